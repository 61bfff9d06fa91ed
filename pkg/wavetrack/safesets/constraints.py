"""Time-indexed planner obstacles and goals for one planning interval."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import Literal

import numpy as np

from helpers.observability import logfire
from wavetrack.core.config import config
from wavetrack.core.errors import ConfigurationError
from wavetrack.hj.value_function import ValueFunction
from wavetrack.safesets.case1 import planner_goal_case1, planner_obstacles_case1
from wavetrack.safesets.occupancy import OccupancyGrid
from wavetrack.safesets.teb import (
    planner_goal_case2,
    planner_obstacles_case2,
    teb_approx,
)

ConstraintMode = Literal["ball", "coupled"]


@dataclass(frozen=True, eq=False)
class PlanningConstraintSet:
    """O_p(t_k) and G_p(t_k) at t_k = t_i + k T_s, k = 0..N."""

    times: np.ndarray
    obstacles: tuple[OccupancyGrid, ...]
    goals: tuple[OccupancyGrid, ...]
    level: float
    teb_radii: tuple[float, ...] = ()

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.shape[0] < 1:
            raise ConfigurationError("constraint set needs at least one timestamp")
        if not (len(self.obstacles) == len(self.goals) == times.shape[0]):
            raise ConfigurationError("constraint grids do not match the timestamps")
        if times.shape[0] > 1:
            steps = np.diff(times)
            if not np.allclose(steps, steps[0], rtol=0.0, atol=1e-9) or steps[0] <= 0:
                raise ConfigurationError("constraint timestamps must be uniformly spaced")
        first = self.obstacles[0]
        if not all(first.aligned(g) for g in (*self.obstacles, *self.goals)):
            raise ConfigurationError("constraint grids must share one workspace")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    @property
    def steps(self) -> int:
        """N, the number of planner steps."""
        return self.times.shape[0] - 1

    @property
    def sample_period(self) -> float:
        return float(self.times[1] - self.times[0]) if self.steps else 0.0

    @property
    def workspace(self) -> OccupancyGrid:
        return self.obstacles[0]

    @property
    def goal_everywhere_empty(self) -> bool:
        return all(g.is_empty for g in self.goals)


def constraint_times(t_i: float, t_f: float, sample_period: float) -> np.ndarray:
    """t_i + k T_s for k = 0..ceil((t_f - t_i) / T_s)."""
    if t_f < t_i:
        raise ConfigurationError(f"planning interval ends before it starts: {t_i} > {t_f}")
    if not sample_period > 0:
        raise ConfigurationError(f"T_s must be positive, got {sample_period}")
    steps = math.ceil((t_f - t_i) / sample_period - 1e-9)
    return t_i + sample_period * np.arange(steps + 1)


def build_constraint_set(
    value_fn: ValueFunction,
    known_obstacles: OccupancyGrid,
    goal: OccupancyGrid,
    t_i: float,
    t_f: float,
    sample_period: float,
    level: float,
    mode: ConstraintMode = "ball",
    threads: int | None = None,
) -> PlanningConstraintSet:
    """Construct O_p and G_p at every planner timestamp in [t_i, t_f].

    ``ball`` inflates by the tracking-error-bound radius (decoupled systems);
    ``coupled`` uses the position-dependent bound of the six-dimensional system.
    Value-function queries are clamped to [0, T_off].
    """
    times = constraint_times(t_i, t_f, sample_period)
    query_times = np.clip(times, 0.0, value_fn.t_off)

    def build(t: float) -> tuple[OccupancyGrid, OccupancyGrid, float]:
        if mode == "coupled":
            return (
                planner_obstacles_case1(known_obstacles, value_fn, t, level),
                planner_goal_case1(goal, value_fn, t, level),
                math.nan,
            )
        teb = teb_approx(value_fn, t, level)
        return (
            planner_obstacles_case2(known_obstacles, teb),
            planner_goal_case2(goal, teb),
            teb.radius,
        )

    with logfire.span(
        "🧱 Planner constraints",
        operation="constraints",
        level=round(level, 4),
        steps=len(times),
    ):
        with ThreadPoolExecutor(max_workers=threads or config.threads) as pool:
            built = list(pool.map(build, query_times))

    return PlanningConstraintSet(
        times=times,
        obstacles=tuple(b[0] for b in built),
        goals=tuple(b[1] for b in built),
        level=float(level),
        teb_radii=tuple(b[2] for b in built),
    )
