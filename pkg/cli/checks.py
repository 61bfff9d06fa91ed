"""Self-check and scenario validation commands."""

from pathlib import Path

from rich.table import Table
import click

from cli.common import console, emit
from wavetrack.core.validators import (
    ScenarioValidator,
    format_validation_results,
    has_errors,
)
from wavetrack.oracles.selfcheck import run_self_check


@click.command("self-check")
@click.option(
    "--value-fn",
    "value_fn_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also verify that this value-function file loads",
)
@click.option(
    "--density",
    type=click.IntRange(min=2),
    default=21,
    show_default=True,
    help="Samples per input channel for the Hamiltonian oracle",
)
def self_check_cmd(value_fn_path: Path | None, density: int):
    """Run every oracle against the installed library."""
    with console.status("[bold green]Running oracles...", spinner="dots"):
        results = run_self_check(value_fn_path, density=density)

    table = Table(title="🔬 Self-check", show_header=True, header_style="bold cyan")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="yellow")
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.name, status, result.detail)
    console.print(table)

    failed = [r for r in results if not r.passed]
    emit(passed=len(results) - len(failed), failed=len(failed))
    if failed:
        raise SystemExit(1)


@click.command("validate")
@click.argument("paths", nargs=-1, type=click.Path(path_type=Path))
@click.option(
    "--format",
    type=click.Choice(["human", "json", "github"]),
    default="human",
    help="Output format",
)
def validate_cmd(paths: tuple[Path, ...], format: str):  # noqa: A002
    """Validate scenario files (defaults to every file under scenarios/)."""
    validator = ScenarioValidator()
    results = {}
    for path in paths or (Path("scenarios"),):
        if path.is_dir():
            results.update(
                {
                    str(path / name): errors
                    for name, errors in validator.validate_directory(path).items()
                }
            )
        else:
            results[str(path)] = validator.validate_file(path)

    click.echo(format_validation_results(results, format))
    if has_errors(results):
        raise SystemExit(1)
