"""Test requirements files for common deployment errors."""

from pathlib import Path
import subprocess

import pytest

PROJECT_ROOT = Path(__file__).parent.parent


def test_requirements_files_exist():
    """Verify all required requirements files exist."""
    assert (PROJECT_ROOT / "requirements" / "requirements.in").exists()
    assert (PROJECT_ROOT / "requirements" / "requirements.txt").exists()
    assert (PROJECT_ROOT / "requirements" / "requirements-dev.txt").exists()
    assert (PROJECT_ROOT / "requirements" / "requirements-test.txt").exists()


def test_direct_dependencies_are_pinned():
    """Verify every package named in requirements.in has a pin in requirements.txt."""
    names = [
        line.strip()
        for line in (PROJECT_ROOT / "requirements" / "requirements.in").read_text().splitlines()
        if line.strip() and not line.startswith("#")
    ]
    pinned = {
        line.split("==")[0]
        for line in (PROJECT_ROOT / "requirements" / "requirements.txt").read_text().splitlines()
        if "==" in line
    }

    assert names
    assert set(names) <= pinned


@pytest.mark.integration
def test_requirements_in_compiles():
    """Verify requirements.in compiles without errors."""
    import tempfile

    requirements_in = PROJECT_ROOT / "requirements" / "requirements.in"

    # Compile to a temp file to verify it works without modifying anything
    with tempfile.NamedTemporaryFile(mode="w", suffix=".txt", delete=False) as tmp:
        result = subprocess.run(
            ["uv", "pip", "compile", str(requirements_in), "-o", tmp.name],
            check=False,
            capture_output=True,
            text=True,
        )
        Path(tmp.name).unlink()  # Clean up

    assert result.returncode == 0, f"requirements.in failed to compile: {result.stderr}"


@pytest.mark.integration
def test_no_dependency_conflicts():
    """Verify installed packages have no conflicts."""
    # uv pip check verifies no broken dependencies in the current environment
    result = subprocess.run(
        ["uv", "pip", "check"],
        check=False,
        capture_output=True,
        text=True,
    )

    assert result.returncode == 0, f"Dependency conflicts found: {result.stdout}"
