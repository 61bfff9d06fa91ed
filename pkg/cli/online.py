"""Online commands: closed-loop simulation and one-shot planning."""

from pathlib import Path

from rich.table import Table
import click

from cli.common import console, emit, handle_errors, load_scenario, parse_vector
from helpers.logger import add_run_log, logger
from wavetrack.core.config import config
from wavetrack.core.errors import ConfigurationError, PlanningInfeasibleError
from wavetrack.hj.storage import load_value_function
from wavetrack.sim.runner import check_model_hash, plan_at, run_batch


@click.command("simulate")
@click.argument("scenario_paths", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option(
    "--value-fn",
    "value_fn_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Value-function file (defaults to each scenario's offline.output)",
)
@click.option(
    "--out-dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Run directory root (defaults to <artifacts_dir>/runs)",
)
@click.option("--seed", type=int, default=None, help="Override the scenario seed")
@click.option(
    "--disturbance-scale",
    type=float,
    default=None,
    help="Multiply the plant's d_nom bound (stress testing)",
)
def simulate_cmd(
    scenario_paths: tuple[Path, ...],
    value_fn_path: Path | None,
    out_dir: Path | None,
    seed: int | None,
    disturbance_scale: float | None,
):
    """Run the closed loop for one or more scenarios.

    An infeasible plan ends the run with an "infeasible" event and exit code 0.

    Example:
        wavetrack simulate scenarios/sim1_case2.json --value-fn artifacts/case2.wtvf
    """
    out_dir = out_dir or config.artifacts_dir / "runs"
    with handle_errors("simulating"):
        runs = []
        for path in scenario_paths:
            scenario = load_scenario(path)
            if scenario.online is None:
                raise ConfigurationError(f"scenario {scenario.name!r} has no online section")
            value_fn = load_value_function(value_fn_path or scenario.offline.output)
            check_model_hash(scenario, value_fn)
            runs.append((scenario, value_fn))

        sink = add_run_log(out_dir / "simulate.log")
        try:
            logs = run_batch(runs, out_dir, seed=seed, disturbance_scale=disturbance_scale)
        finally:
            logger.remove(sink)

    table = Table(title="🚤 Simulation runs", show_header=True, header_style="bold cyan")
    table.add_column("Scenario", style="cyan")
    table.add_column("Outcome", style="green")
    table.add_column("Goal times", style="yellow")
    table.add_column("Replans", justify="right")
    table.add_column("Collisions", justify="right")
    for name, log in logs.items():
        summary = log.summary()
        table.add_row(
            name,
            summary["outcome"],
            ", ".join(f"{t:.2f}" for t in summary["goal_times"]) or "-",
            str(summary["replans"]),
            str(summary["collisions"]),
        )
        emit(
            scenario=name,
            outcome=summary["outcome"],
            goal_times=summary["goal_times"],
            replans=summary["replans"],
            collisions=summary["collisions"],
            max_level_excess=summary["max_level_excess"],
            content_hash=log.content_hash(),
            run_dir=str(out_dir / name),
        )
    console.print(table)


@click.command("plan")
@click.argument("scenario_path", type=click.Path(path_type=Path))
@click.option("--value-fn", "value_fn_path", type=click.Path(path_type=Path), default=None)
@click.option("--at-time", "at_time", type=float, default=0.0, show_default=True)
@click.option("--state", default=None, help="Tracking state x,z,u,w (defaults to s0)")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def plan_cmd(
    scenario_path: Path,
    value_fn_path: Path | None,
    at_time: float,
    state: str | None,
    out_path: Path | None,
):
    """Plan once with the whole map known and print or save the plan CSV.

    An infeasible request prints the first blocked timestep and exits with 1.
    """
    with handle_errors("planning"):
        scenario = load_scenario(scenario_path)
        if scenario.online is None:
            raise ConfigurationError(f"scenario {scenario.name!r} has no online section")
        value_fn = load_value_function(value_fn_path or scenario.offline.output)
        check_model_hash(scenario, value_fn)
        s = parse_vector(state, 4, "--state") if state else None
        try:
            replan, _ = plan_at(scenario, value_fn, at_time, s)
        except PlanningInfeasibleError as e:
            console.print(f"[yellow]⛔ Infeasible: {e}[/yellow]")
            emit(
                status="infeasible",
                blocked_step=e.blocked_step if e.blocked_step is not None else "none",
                blocked_time=e.blocked_time if e.blocked_time is not None else "none",
            )
            raise SystemExit(1) from None

        plan = replan.plan
        if out_path is not None:
            plan.to_csv(out_path)
            emit(status="ok", steps=plan.steps, level=replan.level, out=str(out_path))
            return

    click.echo("t,x,z,u_x,u_z")
    for row in plan.as_rows():
        click.echo(",".join(f"{v:.9g}" for v in row))
    console.print(
        f"[green]✅ {plan.steps} steps, level {replan.level:.4f}, "
        f"cost {plan.cost:.4f}[/green]"
    )
