#!/usr/bin/env python3
"""Pre-commit wrapper for validating scenario JSON files."""

from pathlib import Path
import sys


def main():
    """Validate scenario files passed as arguments."""
    files_to_validate = sys.argv[1:]

    if not files_to_validate:
        return 0

    scenario_files = [
        f for f in files_to_validate if f.endswith(".json") and "scenarios" in Path(f).parts
    ]
    if not scenario_files:
        return 0

    try:
        from wavetrack.core.validators import (
            ScenarioValidator,
            format_validation_results,
            has_errors,
        )
    except ImportError:
        # Dependencies not installed - skip silently
        return 0

    validator = ScenarioValidator()
    results = {}

    for file_path in scenario_files:
        errors = validator.validate_file(Path(file_path))
        if errors:
            results[file_path] = errors

    if results:
        output = format_validation_results(results, "human")
        print(output, file=sys.stderr)  # noqa: T201
        return 1 if has_errors(results) else 0

    return 0


if __name__ == "__main__":
    sys.exit(main())
