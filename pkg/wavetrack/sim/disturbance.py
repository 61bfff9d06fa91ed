"""Seeded, piecewise-constant nominal disturbances."""

import math

import numpy as np

from wavetrack.core.config import config

_HOLD_EPS = 1e-9


def hold_index(t: float, hold: float | None = None) -> int:
    """Zero-order-hold interval containing ``t``."""
    hold = hold or config.disturbance_hold
    return max(math.floor(t / hold + _HOLD_EPS), 0)


def sample_disturbance(
    seed: int,
    t: float,
    bound: float = 0.001,
    dim: int = 4,
    hold: float | None = None,
) -> np.ndarray:
    """d_nom uniform on [-bound, bound] per channel, constant on each hold interval.

    A pure function of (seed, interval): the Philox counter is set to the
    interval index, so no generator state is carried between calls.
    """
    k = hold_index(t, hold)
    generator = np.random.Generator(
        np.random.Philox(key=int(seed), counter=np.array([0, k, 0, 0], dtype=np.uint64))
    )
    return generator.uniform(-bound, bound, size=dim)
