"""Brute-force Hamiltonian from field evaluations on input lattices.

The relative field is affine in each input, so the inner max over (u_p, d)
splits into independent blocks: the planner lattice, then one disturbance
channel at a time. Each block is evaluated by calling the field itself.
"""

import numpy as np

from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import RelativeSystem


def _channel_samples(box: InputBox, channel: int, density: int) -> np.ndarray:
    lo, hi = box.lower[channel], box.upper[channel]
    values = np.linspace(lo, hi, density) if hi > lo else np.array([lo])
    points = np.tile(box.center, (values.shape[0], 1))
    points[:, channel] = values
    return points


def sampled_hamiltonian(
    system: RelativeSystem, t: float, r, p, density: int = 21
) -> float:
    """min over a u_s lattice of max over (u_p, d) lattices of pᵀ g(t, r, u_s, u_p, d)."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    zero_s = system.tracker_box.center
    zero_p = system.planner_box.center
    zero_d = system.disturbance_box.center

    def directional(u_s, u_p, d) -> float:
        return float(p @ system.field(t, r, u_s, u_p, d))

    base = directional(zero_s, zero_p, zero_d)
    tracker = min(
        directional(u, zero_p, zero_d) for u in system.tracker_box.lattice(density)
    )
    planner = max(
        directional(zero_s, u, zero_d) for u in system.planner_box.lattice(density)
    )
    disturbance = 0.0
    for channel in range(system.disturbance_box.dim):
        samples = _channel_samples(system.disturbance_box, channel, density)
        disturbance += max(directional(zero_s, zero_p, d) for d in samples) - base
    return tracker + (planner - base) + disturbance
