"""Tracking error bounds: the error-space shadow of a value-function sublevel set."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from helpers.logger import logger
from wavetrack.hj.value_function import ValueFunction
from wavetrack.safesets.morphology import dilate_disk, dilate_offsets, erode_disk
from wavetrack.safesets.occupancy import OccupancyGrid


@dataclass(frozen=True, eq=False)
class TrackingErrorBound:
    """Error nodes e with min over the other relative axes of V(t, ·) ≤ level.

    ``reduced`` holds that minimum on the error sub-grid; ``radius`` bounds the
    shape by a ball so the Case 2/3 constraints can use disk morphology.
    """

    time: float
    level: float
    axes: tuple[np.ndarray, ...]
    reduced: np.ndarray
    mask: np.ndarray
    radius: float

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(
            self.axes, self.reduced, bounds_error=False, fill_value=np.inf
        )

    def contains(self, errors) -> np.ndarray:
        """Membership of (k, ndim) error points; outside the grid is never inside."""
        points = np.atleast_2d(np.asarray(errors, dtype=float))
        return self._interpolator(points) <= self.level

    def cell_offsets(self, resolution: float) -> np.ndarray:
        """Integer cell offsets o with o · resolution inside the bound."""
        if self.is_empty:
            return np.zeros((0, len(self.axes)), dtype=int)
        reach = [
            int(np.floor(max(abs(a[0]), abs(a[-1])) / resolution + 1e-9)) for a in self.axes
        ]
        ranges = [np.arange(-k, k + 1) for k in reach]
        mesh = np.meshgrid(*ranges, indexing="ij")
        offsets = np.stack([m.ravel() for m in mesh], axis=1)
        inside = self.contains(offsets * resolution)
        return offsets[inside]


def teb_approx(
    value_fn: ValueFunction,
    t: float,
    level: float,
    error_axes: tuple[int, ...] | None = None,
) -> TrackingErrorBound:
    """Tracking error bound at time ``t`` for sublevel ``level``."""
    if error_axes is None:
        error_axes = (0, 1) if value_fn.ndim >= 2 else (0,)
    values = value_fn.slice_at(t)
    others = tuple(a for a in range(value_fn.ndim) if a not in error_axes)
    reduced = values.min(axis=others) if others else values
    mask = reduced <= level
    axes = tuple(value_fn.grid.axes[a] for a in error_axes)

    if mask.any():
        mesh = np.meshgrid(*axes, indexing="ij")
        norms = np.sqrt(sum(m**2 for m in mesh))
        half_cell = 0.5 * float(np.max(value_fn.grid.spacing[list(error_axes)]))
        radius = float(norms[mask].max()) + half_cell
    else:
        logger.warning(
            f"Tracking error bound at t={t:.2f} is empty for level {level:.4f}"
        )
        radius = 0.0
    return TrackingErrorBound(
        time=float(t),
        level=float(level),
        axes=axes,
        reduced=reduced,
        mask=mask,
        radius=radius,
    )


def planner_obstacles_case2(
    obstacles: OccupancyGrid, teb: TrackingErrorBound
) -> OccupancyGrid:
    """O ⊕ ball(TEB radius); nothing when the bound is empty."""
    if teb.is_empty:
        return obstacles.cleared()
    return dilate_disk(obstacles, teb.radius)


def planner_goal_case2(goal: OccupancyGrid, teb: TrackingErrorBound) -> OccupancyGrid:
    """G ⊖ ball(TEB radius); may come back empty for small goals.

    An empty bound satisfies every cell.
    """
    if teb.is_empty:
        return ~goal.cleared()
    eroded = erode_disk(goal, teb.radius)
    if eroded.is_empty and not goal.is_empty:
        logger.warning(
            f"Goal fully eroded by a tracking error bound of radius {teb.radius:.3f} m"
        )
    return eroded


def set_avoidance(
    region: OccupancyGrid,
    value_fn: ValueFunction,
    t: float,
    level: float,
    error_axes: tuple[int, ...] | None = None,
) -> OccupancyGrid:
    """Planner cells p with p + e in ``region`` for some e in the bound."""
    teb = teb_approx(value_fn, t, level, error_axes)
    offsets = teb.cell_offsets(region.resolution)
    if offsets.shape[0] == 0:
        return region.cleared()
    # p is unsafe when p + e hits the region, i.e. region shifted by -e
    return dilate_offsets(region, -offsets)


def set_satisfaction(
    region: OccupancyGrid,
    value_fn: ValueFunction,
    t: float,
    level: float,
    error_axes: tuple[int, ...] | None = None,
) -> OccupancyGrid:
    """Planner cells p with p + e in ``region`` for every e in the bound."""
    return ~set_avoidance(~region, value_fn, t, level, error_axes)
