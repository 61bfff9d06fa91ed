"""Planner-space slices of value-function sublevel sets."""

from dataclasses import dataclass

import numpy as np

from helpers.logger import logger
from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.hj.value_function import ValueFunction
from wavetrack.safesets.occupancy import OccupancyGrid


def min_value_level(
    value_fn: ValueFunction, system: RelativeSystem, s, t: float
) -> float:
    """min over planner states p of V(t, L s - M p).

    Scans the error-axis nodes of the grid with the remaining relative
    coordinates fixed at L s.
    """
    base = np.asarray(system.tracking_map @ np.asarray(s, dtype=float), dtype=float)
    axes = system.error_axes
    mesh = np.meshgrid(*(value_fn.grid.axes[a] for a in axes), indexing="ij")
    points = np.repeat(base[None, :], mesh[0].size, axis=0)
    for column, coords in zip(axes, mesh, strict=True):
        points[:, column] = coords.ravel()
    values, outside = value_fn.sample(points, t)
    if outside.all():
        logger.warning(
            f"Tracking state at t={t:.2f} lies outside the value grid; level is clamped"
        )
    return float(values.min())


@dataclass(frozen=True, eq=False)
class PlanningSublevelSet:
    """Planner cells p with V(t, L s - M p) ≤ level, rasterised on ``cells``."""

    cells: OccupancyGrid
    level: float
    time: float

    @property
    def is_empty(self) -> bool:
        return self.cells.is_empty


def planning_values(
    value_fn: ValueFunction,
    system: RelativeSystem,
    s,
    t: float,
    workspace: OccupancyGrid,
) -> tuple[np.ndarray, np.ndarray]:
    """V(t, L s - M p) at every workspace cell center, plus an off-grid flag."""
    centers = workspace.center_points()
    relative = (system.tracking_map @ np.asarray(s, dtype=float))[None, :] - (
        centers @ system.planning_map.T
    )
    values, outside = value_fn.sample(relative, t)
    return values.reshape(workspace.shape), outside.reshape(workspace.shape)


def planning_sublevel_set(
    value_fn: ValueFunction,
    system: RelativeSystem,
    s,
    t: float,
    level: float,
    workspace: OccupancyGrid,
) -> PlanningSublevelSet:
    values, outside = planning_values(value_fn, system, s, t, workspace)
    members = (values <= level) & ~outside
    result = PlanningSublevelSet(
        cells=workspace.with_cells(members), level=float(level), time=float(t)
    )
    if result.is_empty:
        logger.warning(f"Planning sublevel set at t={t:.2f} is empty for level {level:.4f}")
    return result
