#!/usr/bin/env python3
"""Plot a simulation run directory: map snapshots and the value against its level."""

from pathlib import Path

import click
import numpy as np
import ujson


def _cells_to_points(cells, workspace) -> np.ndarray:
    if not cells:
        return np.empty((0, 2))
    lower = np.asarray(workspace["lower"])
    return lower + (np.asarray(cells) + 0.5) * workspace["resolution"]


@click.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--snapshot", "snapshot_index", type=int, default=-1, show_default=True)
def main(run_dir: Path, out_path: Path | None, snapshot_index: int):
    """Render one replan snapshot and the value trace of RUN_DIR to a PNG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    traces = np.genfromtxt(run_dir / "traces.csv", delimiter=",", names=True)
    snapshots = ujson.loads((run_dir / "snapshots.json").read_text())
    summary = ujson.loads((run_dir / "summary.json").read_text())

    fig, (ax_map, ax_value) = plt.subplots(1, 2, figsize=(13, 6))

    if snapshots:
        snap = snapshots[snapshot_index]
        workspace = snap["workspace"]
        size = workspace["resolution"] * 72 / 4
        for key, color, label in (
            ("planner_obstacles", "#f4c7c3", "planner obstacles"),
            ("known_obstacles", "#c0392b", "known obstacles"),
            ("planner_goal", "#27ae60", "planner goal"),
        ):
            points = _cells_to_points(snap[key], workspace)
            ax_map.scatter(
                points[:, 0], points[:, 1], s=size, marker="s", c=color, label=label
            )
        plan = np.asarray(snap["plan"])
        if plan.size:
            ax_map.plot(plan[:, 0], plan[:, 1], "b.--", label=f"plan {snap['k']}")
        ax_map.set_title(f"Replan {snap['k']} at t={snap['t']:.2f}, level {snap['level']:.3f}")

    ax_map.plot(traces["x"], traces["z"], "k-", linewidth=1.5, label="tracker")
    ax_map.plot(traces["ref_x"], traces["ref_z"], "c-", linewidth=1, label="reference")
    ax_map.set_xlabel("x [m]")
    ax_map.set_ylabel("z [m] (depth)")
    ax_map.invert_yaxis()
    ax_map.set_aspect("equal")
    ax_map.legend(loc="best", fontsize="small")

    ax_value.plot(traces["t"], traces["value"], label="V(t_c, r)")
    ax_value.step(traces["t"], traces["level"], where="post", label="level")
    for goal_time in summary.get("goal_times", []):
        ax_value.axvline(goal_time, color="g", linestyle=":")
    ax_value.set_xlabel("t [s]")
    ax_value.set_title(f"Outcome: {summary.get('outcome', '?')}")
    ax_value.legend(loc="best")

    fig.tight_layout()
    out_path = out_path or run_dir / "run.png"
    fig.savefig(out_path, dpi=120)
    click.echo(f"out={out_path}")


if __name__ == "__main__":
    main()
