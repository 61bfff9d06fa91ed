"""Stored value function V(t, r) with multilinear interpolation."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from helpers.logger import logger
from wavetrack.core.errors import ConfigurationError
from wavetrack.hj.grid import Grid


@dataclass(frozen=True)
class ValueFunction:
    """Time slices of V on a grid, ``times`` ascending from 0 to T_off.

    ``slices`` and ``l_field`` are float32; the last slice is the terminal
    cost itself.
    """

    grid: Grid
    times: np.ndarray
    slices: np.ndarray
    l_field: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        slices = np.asarray(self.slices, dtype=np.float32)
        l_field = np.asarray(self.l_field, dtype=np.float32)
        if times.ndim != 1 or times.shape[0] < 2:
            raise ConfigurationError("a value function needs at least two time slices")
        if np.any(np.diff(times) <= 0):
            raise ConfigurationError("value-function times must be strictly ascending")
        if slices.shape != (times.shape[0], *self.grid.shape):
            raise ConfigurationError(
                f"slices have shape {slices.shape}, expected "
                f"{(times.shape[0], *self.grid.shape)}"
            )
        if l_field.shape != self.grid.shape:
            raise ConfigurationError("terminal cost does not match the grid")
        if not np.array_equal(slices[-1], l_field):
            raise ConfigurationError("the last slice must equal the terminal cost")
        for array in (times, slices, l_field):
            array.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "slices", slices)
        object.__setattr__(self, "l_field", l_field)

    @property
    def t_off(self) -> float:
        return float(self.times[-1])

    @property
    def ndim(self) -> int:
        return self.grid.ndim

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(
            (self.times, *self.grid.axes), self.slices, method="linear"
        )

    def sample(self, points, t) -> tuple[np.ndarray, np.ndarray]:
        """Interpolate V at (k, n) ``points`` and time(s) ``t``.

        Points outside the grid are clamped to it and flagged in the second
        return value; times are clamped to [0, T_off].
        """
        clamped, outside = self.grid.clamp(points)
        query_t = np.clip(
            np.broadcast_to(np.asarray(t, dtype=float), (clamped.shape[0],)),
            self.times[0],
            self.times[-1],
        )
        query = np.column_stack([query_t, clamped])
        return self._interpolator(query).astype(np.float64), outside

    def slice_at(self, t: float) -> np.ndarray:
        """V(t, ·) on the grid nodes, blended linearly between stored slices."""
        t = float(np.clip(t, self.times[0], self.times[-1]))
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        index = min(max(index, 0), self.times.shape[0] - 2)
        t0, t1 = self.times[index], self.times[index + 1]
        weight = (t - t0) / (t1 - t0)
        lower = self.slices[index].astype(np.float64)
        if weight == 0.0:
            return lower
        upper = self.slices[index + 1].astype(np.float64)
        if weight == 1.0:
            return upper
        return (1.0 - weight) * lower + weight * upper

    def gradient(self, r, t: float) -> np.ndarray:
        """Central-difference ∇_r V at ``r`` with steps equal to the grid spacing.

        ``r`` may be a single state (n,) or a batch (k, n); the result matches.
        """
        r = np.asarray(r, dtype=float)
        points = np.atleast_2d(r)
        count, ndim = points.shape
        steps = self.grid.spacing
        offsets = np.concatenate([np.diag(steps), -np.diag(steps)])
        stencil = (points[:, None, :] + offsets[None, :, :]).reshape(-1, ndim)
        values, _ = self.sample(stencil, t)
        values = values.reshape(count, 2, ndim)
        grad = (values[:, 0] - values[:, 1]) / (2.0 * steps)
        return grad[0] if r.ndim == 1 else grad

    def epsilon_grid(self, error_map: np.ndarray) -> float:
        """Interpolation slack 2 · max spacing · ‖C‖₂ added to tracking bounds."""
        return float(2.0 * np.max(self.grid.spacing) * np.linalg.norm(error_map, 2))


def value_query(value_fn: ValueFunction, r, t: float) -> tuple[float, bool]:
    """V(t, r) for a single relative state and whether r was clamped to the grid."""
    values, outside = value_fn.sample(np.asarray(r, dtype=float)[None, :], t)
    extrapolated = bool(outside[0])
    if extrapolated:
        logger.debug(f"Value query at t={t:.3f} clamped to the grid box")
    return float(values[0]), extrapolated


def value_at(value_fn: ValueFunction, r, t: float) -> float:
    """V(t, r) for a single relative state; see ``value_query`` for the clamp flag."""
    return value_query(value_fn, r, t)[0]
