"""Closed-loop run records and their on-disk layout.

A run directory holds:

- ``traces.csv``: one row per control period (see ``COLUMNS``)
- ``events.jsonl``: one JSON object per event, ``{"t", "kind", ...}``
- ``config.json``: the scenario echo including the seed
- ``snapshots.json``: per-replan rasters and trajectories
- ``plans/plan_KKK.csv``: every plan, in wall time
- ``summary.json``: outcome, goal times and statistics

Event kinds: ``replan``, ``sense``, ``clamp``, ``goal``, ``collision``,
``invariance``, ``infeasible``, ``reinit_failed``.
"""

from dataclasses import dataclass, field
import hashlib
from pathlib import Path
from typing import Any

import numpy as np
import ujson

from helpers.logger import logger
from wavetrack.core.errors import ArtifactError
from wavetrack.planner.types import PlannedTrajectory

COLUMNS = (
    "t",
    "x",
    "z",
    "u",
    "w",
    "ref_x",
    "ref_z",
    "thrust_u",
    "thrust_w",
    "d_x",
    "d_z",
    "d_u",
    "d_w",
    "value",
    "level",
    "t_c",
)

# Wall-clock fields vary between identical runs
_UNHASHED_KEYS = frozenset({"plan_ms"})


@dataclass
class SimEvent:
    t: float
    kind: str
    data: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {"t": self.t, "kind": self.kind, **self.data}


@dataclass
class SimLog:
    """Everything one closed-loop run produced."""

    config_echo: dict[str, Any] = field(default_factory=dict)
    rows: list[tuple[float, ...]] = field(default_factory=list)
    events: list[SimEvent] = field(default_factory=list)
    plans: list[tuple[int, PlannedTrajectory]] = field(default_factory=list)
    snapshots: list[dict[str, Any]] = field(default_factory=list)
    outcome: str = "running"
    disturbance_bound: float | None = None
    extrapolated_samples: int = 0

    def record(self, row) -> None:
        row = tuple(float(v) for v in row)
        if len(row) != len(COLUMNS):
            raise ValueError(f"trace row has {len(row)} fields, expected {len(COLUMNS)}")
        if self.rows and row[0] <= self.rows[-1][0]:
            raise ValueError(f"trace time {row[0]} does not increase")
        self.rows.append(row)

    def event(self, t: float, kind: str, **data) -> SimEvent:
        entry = SimEvent(float(t), kind, data)
        self.events.append(entry)
        logger.debug(f"[{t:7.2f}] {kind} {data}")
        return entry

    def events_of(self, kind: str) -> list[SimEvent]:
        return [e for e in self.events if e.kind == kind]

    @property
    def traces(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, len(COLUMNS)))
        return np.array(self.rows, dtype=float)

    def column(self, name: str) -> np.ndarray:
        return self.traces[:, COLUMNS.index(name)]

    @property
    def goal_times(self) -> list[float]:
        return [e.t for e in self.events_of("goal")]

    def summary(self) -> dict[str, Any]:
        traces = self.traces
        replans = self.events_of("replan")
        plan_ms = [e.data.get("plan_ms", 0.0) for e in replans]
        excess = None
        disturbance_outside = False
        if traces.shape[0]:
            gap = self.column("value") - self.column("level")
            gap = gap[np.isfinite(gap)]
            excess = float(gap.max()) if gap.size else None
            if self.disturbance_bound is not None:
                disturbances = traces[:, COLUMNS.index("d_x") : COLUMNS.index("d_w") + 1]
                disturbance_outside = bool(
                    np.any(np.abs(disturbances) > self.disturbance_bound + 1e-12)
                )
        return {
            "outcome": self.outcome,
            "goal_times": self.goal_times,
            "replans": len(replans),
            "collisions": len(self.events_of("collision")),
            "invariance_breaches": len(self.events_of("invariance")),
            "clamps": len(self.events_of("clamp")),
            "extrapolated_samples": self.extrapolated_samples,
            "max_level_excess": excess,
            "disturbance_outside_box": disturbance_outside,
            "plan_ms_mean": float(np.mean(plan_ms)) if plan_ms else 0.0,
            "plan_ms_max": float(np.max(plan_ms)) if plan_ms else 0.0,
            "final_time": float(traces[-1, 0]) if traces.shape[0] else 0.0,
        }

    def content_hash(self) -> str:
        """SHA-256 of traces, events and outcome; wall-clock timings excluded."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.traces, dtype="<f8").tobytes())
        for entry in self.events:
            payload = {
                k: v for k, v in entry.as_dict().items() if k not in _UNHASHED_KEYS
            }
            digest.update(ujson.dumps(payload, sort_keys=True).encode())
        for _, plan in self.plans:
            digest.update(np.ascontiguousarray(plan.as_rows(), dtype="<f8").tobytes())
        digest.update(self.outcome.encode())
        return digest.hexdigest()

    def write(self, out_dir: Path | str) -> Path:
        """Write the run directory; returns its path."""
        out_dir = Path(out_dir)
        try:
            (out_dir / "plans").mkdir(parents=True, exist_ok=True)
            np.savetxt(
                out_dir / "traces.csv",
                self.traces,
                delimiter=",",
                header=",".join(COLUMNS),
                comments="",
                fmt="%.10g",
            )
            with open(out_dir / "events.jsonl", "w") as f:
                for entry in self.events:
                    f.write(ujson.dumps(entry.as_dict(), sort_keys=True) + "\n")
            for k, plan in self.plans:
                plan.to_csv(out_dir / "plans" / f"plan_{k:03d}.csv")
            (out_dir / "config.json").write_text(
                ujson.dumps(self.config_echo, indent=2, sort_keys=True)
            )
            (out_dir / "snapshots.json").write_text(ujson.dumps(self.snapshots))
            summary = {**self.summary(), "content_hash": self.content_hash()}
            (out_dir / "summary.json").write_text(
                ujson.dumps(summary, indent=2, sort_keys=True)
            )
        except OSError as e:
            raise ArtifactError(f"cannot write run to {out_dir}: {e}") from e
        logger.info(f"📁 Wrote run to {out_dir}")
        return out_dir
