"""Offline commands: solve the HJI game and export planner-space rasters."""

from pathlib import Path
import time

from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
import click
import numpy as np
import ujson

from cli.common import console, emit, handle_errors, load_scenario
from helpers.logger import logger
from wavetrack.core.errors import ArtifactError, ConfigurationError
from wavetrack.hj.solver import solve
from wavetrack.hj.storage import load_value_function, save_value_function
from wavetrack.replanner.choices import choose_level
from wavetrack.safesets.constraints import build_constraint_set
from wavetrack.safesets.teb import teb_approx
from wavetrack.sim.assembly import build_problem, build_system, build_world
from wavetrack.sim.runner import check_model_hash


@click.command("solve")
@click.argument("scenario_path", type=click.Path(path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Value-function file (defaults to the scenario's offline.output)",
)
def solve_cmd(scenario_path: Path, out_path: Path | None):
    """Solve the offline tracking game and write the value-function file.

    Example:
        wavetrack solve scenarios/sim1_case2.json --out artifacts/case2.wtvf
    """
    with handle_errors("solving"):
        scenario = load_scenario(scenario_path)
        problem = build_problem(scenario)
        out_path = out_path or scenario.offline.output

        started = time.monotonic()
        with Progress(
            TextColumn("[bold cyan]🌊 {task.description}"),
            BarColumn(),
            TextColumn("{task.percentage:>5.1f}%"),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        ) as progress:
            task = progress.add_task(f"{scenario.model.case} solve", total=1.0)
            value_fn = solve(
                problem, progress=lambda done: progress.update(task, completed=done)
            )
        wall_s = time.monotonic() - started

        diagnostics = value_fn.meta["diagnostics"]
        epsilon = value_fn.epsilon_grid(problem.system.error_map)
        digest = save_value_function(
            value_fn,
            out_path,
            metadata={
                "scenario": scenario.name,
                "case": scenario.model.case,
                "model_hash": scenario.model_hash(),
                "epsilon_grid": epsilon,
                "wall_s": wall_s,
            },
        )

    console.print(
        f"[green]✅ Solved {scenario.name} in {wall_s:.1f}s "
        f"({diagnostics['steps']} steps)[/green]"
    )
    emit(
        path=str(out_path),
        content_hash=digest,
        model_hash=scenario.model_hash(),
        axes=value_fn.ndim,
        t_start=float(value_fn.times[0]),
        t_end=float(value_fn.t_off),
        steps=diagnostics["steps"],
        epsilon_grid=epsilon,
        monotonicity_defect=float(diagnostics["monotonicity_defect"]),
        wall_s=wall_s,
    )


@click.command("export")
@click.argument("scenario_path", type=click.Path(path_type=Path))
@click.option("--value-fn", "value_fn_path", type=click.Path(path_type=Path), required=True)
@click.option("--at-time", "at_time", type=float, default=0.0, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
def export_cmd(scenario_path: Path, value_fn_path: Path, at_time: float, out_dir: Path):
    """Write the map, planner obstacles, planner goal and TEB at one time.

    Rasters are plain PBM files with the workspace geometry in a comment line.
    """
    with handle_errors("exporting"):
        scenario = load_scenario(scenario_path)
        if scenario.online is None:
            raise ConfigurationError(f"scenario {scenario.name!r} has no online section")
        value_fn = load_value_function(value_fn_path)
        check_model_hash(scenario, value_fn)
        system = build_system(scenario)
        world = build_world(scenario)
        t = min(max(at_time, 0.0), value_fn.t_off)

        choice = choose_level(scenario.online.level, value_fn, system, scenario.online.s0, t)
        mode = "coupled" if scenario.model.case == "case1" else "ball"
        constraints = build_constraint_set(
            value_fn,
            world.true_obstacles,
            world.goal_grid(0),
            t,
            t,
            scenario.online.planner.sample_period,
            choice.level,
            mode=mode,
        )
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactError(f"cannot create {out_dir}: {e}") from e
        world.true_obstacles.write(out_dir / "true_map.pbm")
        constraints.obstacles[0].write(out_dir / "planner_obstacles.pbm")
        constraints.goals[0].write(out_dir / "planner_goal.pbm")

        teb = teb_approx(value_fn, t, choice.level, system.error_axes)
        teb_payload = {
            "time": t,
            "level": choice.level,
            "radius": teb.radius,
            "lower": [float(a[0]) for a in teb.axes],
            "spacing": [float(a[1] - a[0]) for a in teb.axes],
            "shape": list(teb.mask.shape),
            "cells": np.argwhere(teb.mask).tolist(),
        }
        try:
            (out_dir / "teb.json").write_text(ujson.dumps(teb_payload))
        except OSError as e:
            raise ArtifactError(f"cannot write TEB to {out_dir}: {e}") from e

    logger.info(f"📤 Exported rasters for t={t:.2f} to {out_dir}")
    emit(out_dir=str(out_dir), time=t, level=choice.level, teb_radius=teb.radius)
