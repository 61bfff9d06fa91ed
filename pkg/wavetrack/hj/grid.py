"""Uniform rectilinear grids over the relative state space."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from wavetrack.core.errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``counts[i]`` nodes on [lo[i], hi[i]], ends included."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        counts = tuple(int(v) for v in self.counts)
        if not (len(lo) == len(hi) == len(counts)) or not lo:
            raise ConfigurationError("grid bounds and counts must have the same length")
        for axis, (a, b, n) in enumerate(zip(lo, hi, counts, strict=True)):
            if not b > a:
                raise ConfigurationError(f"grid axis {axis} has hi {b} not above lo {a}")
            if n < 3:
                raise ConfigurationError(f"grid axis {axis} needs at least 3 nodes, got {n}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_spacing(cls, lo, hi, spacing) -> "Grid":
        """Grid whose node spacing is ``spacing`` (scalar or per axis)."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        spacing = np.broadcast_to(np.asarray(spacing, dtype=float), lo.shape)
        counts = np.rint((hi - lo) / spacing).astype(int) + 1
        return cls(tuple(lo), tuple(hi), tuple(int(n) for n in counts))

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @cached_property
    def spacing(self) -> np.ndarray:
        return np.array(
            [(b - a) / (n - 1) for a, b, n in zip(self.lo, self.hi, self.counts, strict=True)]
        )

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.counts, strict=True)
        )

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape (ndim, *shape)."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"))

    def clamp(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Project (k, ndim) points onto the grid box; second value flags moved points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        clamped = np.clip(points, self.lo, self.hi)
        return clamped, np.any(clamped != points, axis=-1)

    def describe(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "counts": list(self.counts)}


def error_cost(error_map: np.ndarray, r: np.ndarray) -> np.ndarray:
    """l(r) = ‖C r‖₂ along the leading axis."""
    return np.linalg.norm(np.tensordot(error_map, r, axes=(1, 0)), axis=0)
