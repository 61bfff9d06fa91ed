"""Sublevel choice and planner-state reinitialisation at each replan."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from helpers.logger import logger
from wavetrack.core.errors import ReinitializationError
from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.hj.value_function import ValueFunction, value_at
from wavetrack.replanner.policies import LevelPolicy, ReinitPolicy
from wavetrack.safesets.occupancy import OccupancyGrid
from wavetrack.safesets.sublevel import min_value_level, planning_sublevel_set

_LEVEL_EPS = 1e-12


@dataclass(frozen=True)
class LevelChoice:
    level: float
    floor: float
    requested: float
    clamped: bool


def choose_level(
    policy: LevelPolicy,
    value_fn: ValueFunction,
    system: RelativeSystem,
    s,
    t_i: float,
    initial_floor: float | None = None,
    region_entered: bool = False,
) -> LevelChoice:
    """c_k from the policy, never below the smallest feasible level at (s, t_i)."""
    floor = min_value_level(value_fn, system, s, t_i)
    first_floor = floor if initial_floor is None else initial_floor

    if policy.mode == "fixed":
        requested = float(policy.c)
    elif policy.mode == "floor":
        requested = floor
    elif policy.mode == "initial_floor":
        requested = first_floor
    elif region_entered:
        requested = float(policy.c_high)
    else:
        requested = first_floor if policy.c_low is None else float(policy.c_low)

    clamped = requested < floor - _LEVEL_EPS
    level = max(requested, floor)
    if clamped:
        logger.warning(
            f"Requested level {requested:.4f} is below the feasible floor "
            f"{floor:.4f}; using the floor"
        )
    return LevelChoice(level=level, floor=floor, requested=requested, clamped=clamped)


def _fallback_state(system: RelativeSystem, s) -> np.ndarray:
    """Planner state that zeroes the error coordinates of r."""
    return system.planner_state(np.zeros(system.dim), s)


def choose_planning_state(
    policy: ReinitPolicy,
    value_fn: ValueFunction,
    system: RelativeSystem,
    s,
    t_i: float,
    level: float,
    planner_obstacles: OccupancyGrid,
    planner_goal: OccupancyGrid,
    raw_goal: OccupancyGrid | None = None,
    previous: np.ndarray | None = None,
) -> np.ndarray:
    """p_k for the new plan.

    ``continue_previous`` keeps the previous plan's state at t_k (or zeroes
    the tracking error on the first replan). ``teleport_closest_to_goal``
    picks the free cell of the planning sublevel set nearest the goal.
    """
    if policy.mode == "continue_previous":
        if previous is not None:
            return np.asarray(previous, dtype=float).copy()
        return _fallback_state(system, s)

    sublevel = planning_sublevel_set(value_fn, system, s, t_i, level, planner_obstacles)
    candidates = sublevel.cells.cells & ~planner_obstacles.cells
    if not candidates.any():
        raise ReinitializationError(
            f"no obstacle-free planner state with V ≤ {level:.4f} at t={t_i:.2f}"
        )

    target = planner_goal
    if target.is_empty and raw_goal is not None:
        target = raw_goal
    if target.is_empty:
        # No goal to aim for: stay as close as possible to the tracker
        anchor = planner_obstacles.index_of(_fallback_state(system, s))
        target_cells = np.zeros(planner_obstacles.shape, dtype=bool)
        if anchor is not None:
            target_cells[anchor] = True
        else:
            target_cells = candidates
    else:
        target_cells = target.cells

    distance = distance_transform_edt(~target_cells, sampling=planner_obstacles.resolution)
    ix, iz = np.nonzero(candidates)
    order = np.lexsort((ix, iz, distance[ix, iz]))
    best = (int(ix[order[0]]), int(iz[order[0]]))
    p_k = planner_obstacles.center_of(best)
    logger.debug(
        f"Teleported planner to {np.round(p_k, 3).tolist()} "
        f"(V={value_at(value_fn, system.relative_state(s, p_k), t_i):.4f})"
    )
    return p_k
