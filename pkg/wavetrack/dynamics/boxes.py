"""Compact input sets: per-channel boxes."""

from dataclasses import dataclass
import itertools

import numpy as np

from wavetrack.core.errors import ConfigurationError


def _frozen(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise ConfigurationError(f"{name} must be finite, got {array}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class InputBox:
    """Box [lower, upper] over control or disturbance channels."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower, "lower")
        upper = _frozen(self.upper, "upper")
        if lower.shape != upper.shape:
            raise ConfigurationError(
                f"box bounds differ in size: {lower.shape} vs {upper.shape}"
            )
        if np.any(lower > upper):
            raise ConfigurationError(f"box lower exceeds upper: {lower} > {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def symmetric(cls, bound, dim: int | None = None) -> "InputBox":
        """Box [-bound, bound], broadcasting a scalar bound over ``dim`` channels."""
        bound = np.abs(np.asarray(bound, dtype=float))
        if dim is not None:
            bound = np.broadcast_to(bound, (dim,))
        return cls(lower=-bound, upper=bound)

    @classmethod
    def empty(cls) -> "InputBox":
        return cls(lower=np.zeros(0), upper=np.zeros(0))

    @classmethod
    def concat(cls, *boxes: "InputBox") -> "InputBox":
        return cls(
            lower=np.concatenate([box.lower for box in boxes]),
            upper=np.concatenate([box.upper for box in boxes]),
        )

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.lower, -self.upper, rtol=0.0, atol=1e-12))

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float).reshape(-1)
        return bool(np.all(u >= self.lower - tol) and np.all(u <= self.upper + tol))

    def clip(self, u) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), self.lower, self.upper)

    def scaled(self, factor: float) -> "InputBox":
        """Box scaled about its center."""
        return InputBox(
            lower=self.center - factor * self.half_width,
            upper=self.center + factor * self.half_width,
        )

    def lattice(self, density: int) -> np.ndarray:
        """All points of the product lattice with ``density`` samples per channel.

        Returns an array of shape (count, dim); the extremes are always included.
        """
        if self.dim == 0:
            return np.zeros((1, 0))
        axes = [
            np.linspace(lo, hi, density) if hi > lo else np.array([lo])
            for lo, hi in zip(self.lower, self.upper, strict=True)
        ]
        return np.array(list(itertools.product(*axes)), dtype=float)
