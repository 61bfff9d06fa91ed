"""Shared CLI plumbing: consoles, error-to-exit-code mapping, stdout summaries."""

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from rich.console import Console
import click

from helpers.logger import logger
from helpers.observability import logfire
from wavetrack.core.errors import WavetrackError
from wavetrack.core.scenario import Scenario

# Humans read stderr; stdout carries key=value lines for scripts
console = Console(stderr=True)


@contextmanager
def handle_errors(action: str) -> Iterator[None]:
    """Turn library errors into a red message and the documented exit code."""
    try:
        yield
    except WavetrackError as e:
        console.print(f"[red]Error {action}: {e}[/red]")
        logfire.error(f"{action} failed", error_type=type(e).__name__)
        logger.debug(f"{type(e).__name__} while {action}: {e}")
        raise SystemExit(e.exit_code) from None


def emit(**fields) -> None:
    """Print one machine-readable ``key=value`` line per field."""
    for key, value in fields.items():
        if isinstance(value, float):
            value = f"{value:.10g}"
        elif isinstance(value, list | tuple):
            value = ",".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in value)
        click.echo(f"{key}={value}")


def load_scenario(path: Path | str) -> Scenario:
    scenario = Scenario.from_file(path)
    logger.debug(f"Scenario {scenario.name}: {scenario.model.case}")
    return scenario


def parse_vector(text: str, length: int, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"{name} must be comma-separated numbers") from None
    if len(values) != length:
        raise click.BadParameter(f"{name} needs {length} values, got {len(values)}")
    return values
