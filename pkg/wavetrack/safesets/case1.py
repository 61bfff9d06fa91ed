"""Planner obstacles for the coupled six-dimensional relative system.

Relative state r = (x - x_p, z - z_p, u_r, w_r, x, z). The error bound now
depends on where the vehicle is, so each occupied cell q contributes the
planner states q - e for the errors e admissible at q.
"""

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from wavetrack.core.errors import ConfigurationError
from wavetrack.hj.value_function import ValueFunction
from wavetrack.safesets.occupancy import OccupancyGrid

ERROR_AXES = (0, 1)
VELOCITY_AXES = (2, 3)
POSITION_AXES = (4, 5)

# Occupied cells evaluated per interpolation batch
_CHUNK = 256


def planner_obstacles_case1(
    obstacles: OccupancyGrid, value_fn: ValueFunction, t: float, level: float
) -> OccupancyGrid:
    """{p : p + e ∈ O for some e with min over velocities of V(t, e, ·, p + e) ≤ level}."""
    if value_fn.ndim != 6:
        raise ConfigurationError(
            "coupled obstacles need a six-dimensional value function"
        )
    values = value_fn.slice_at(t)
    reduced = values.min(axis=VELOCITY_AXES)
    axes = value_fn.grid.axes
    interpolator = RegularGridInterpolator(
        (axes[0], axes[1], axes[4], axes[5]),
        reduced,
        bounds_error=False,
        fill_value=None,
    )

    # Candidate offsets: inside the bound somewhere in the position range
    loosest = reduced.min(axis=(2, 3))
    loose = RegularGridInterpolator(
        (axes[0], axes[1]), loosest, bounds_error=False, fill_value=np.inf
    )
    res = obstacles.resolution
    reach = [
        int(np.floor(max(abs(axes[a][0]), abs(axes[a][-1])) / res + 1e-9))
        for a in ERROR_AXES
    ]
    mesh = np.meshgrid(*(np.arange(-k, k + 1) for k in reach), indexing="ij")
    offsets = np.stack([m.ravel() for m in mesh], axis=1)
    offsets = offsets[loose(offsets * res) <= level]

    result = np.zeros(obstacles.shape, dtype=bool)
    occupied = np.argwhere(obstacles.cells)
    if offsets.shape[0] == 0 or occupied.shape[0] == 0:
        return obstacles.with_cells(result)

    lo = np.array([axes[a][0] for a in POSITION_AXES])
    hi = np.array([axes[a][-1] for a in POSITION_AXES])
    shape = np.asarray(obstacles.shape)
    for start in range(0, occupied.shape[0], _CHUNK):
        cells = occupied[start : start + _CHUNK]
        positions = np.clip(
            np.asarray(obstacles.lower) + (cells + 0.5) * res, lo, hi
        )
        errors = offsets * res
        query = np.concatenate(
            [
                np.repeat(errors[None, :, :], cells.shape[0], axis=0),
                np.repeat(positions[:, None, :], offsets.shape[0], axis=1),
            ],
            axis=2,
        ).reshape(-1, 4)
        inside = (interpolator(query) <= level).reshape(cells.shape[0], offsets.shape[0])
        cell_idx, offset_idx = np.nonzero(inside)
        targets = cells[cell_idx] - offsets[offset_idx]
        valid = np.all((targets >= 0) & (targets < shape), axis=1)
        targets = targets[valid]
        result[targets[:, 0], targets[:, 1]] = True
    return obstacles.with_cells(result)


def planner_goal_case1(
    goal: OccupancyGrid, value_fn: ValueFunction, t: float, level: float
) -> OccupancyGrid:
    """Planner cells whose whole position-dependent error bound stays inside ``goal``."""
    return ~planner_obstacles_case1(~goal, value_fn, t, level)
