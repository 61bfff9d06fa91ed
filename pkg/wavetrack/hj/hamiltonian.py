"""Analytic Hamiltonian and optimal inputs for affine relative systems.

For box inputs the inner optimisations separate per channel:

    min_{u ∈ [c-h, c+h]} σ u = σ c - |σ| h        (tracker)
    max_{u ∈ [c-h, c+h]} σ u = σ c + |σ| h        (planner, disturbance)

with σ = pᵀ b for the input column b.
"""

import numpy as np

from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import (
    RelativeSystem,
    apply_columns,
    lead_axes,
    project_columns,
)


def _expand(vector: np.ndarray, like: np.ndarray) -> np.ndarray:
    return vector.reshape(vector.shape + (1,) * (like.ndim - 1))


def _extreme_value(
    columns: np.ndarray, costate: np.ndarray, box: InputBox, sign: float
) -> np.ndarray:
    sigma = project_columns(columns, costate)
    if sigma.shape[0] == 0:
        return np.zeros(costate.shape[1:])
    center = _expand(box.center, sigma)
    half = _expand(box.half_width, sigma)
    return (sigma * center + sign * np.abs(sigma) * half).sum(axis=0)


def _extreme_input(
    columns: np.ndarray, costate: np.ndarray, box: InputBox, sign: float
) -> np.ndarray:
    """Box point extremising σᵀu; sign -1 minimises, +1 maximises, σ = 0 gives the center."""
    sigma = project_columns(columns, costate)
    if sigma.shape[0] == 0:
        return np.zeros((0, *costate.shape[1:]))
    center = _expand(box.center, sigma)
    half = _expand(box.half_width, sigma)
    return center + sign * half * np.sign(sigma)


def hamiltonian(system: RelativeSystem, t: float, r, p) -> np.ndarray:
    """min_{u_s} max_{u_p, d} pᵀ g(t, r, u_s, u_p, d), vectorised over batch axes."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    value = (p * system.drift(t, r)).sum(axis=0)
    value = value + _extreme_value(
        system.tracking_columns(t, r), p, system.tracker_box, -1.0
    )
    value = value + _extreme_value(
        system.planner_columns(t, r), p, system.planner_box, 1.0
    )
    return value + _extreme_value(
        system.disturbance_columns(t, r), p, system.disturbance_box, 1.0
    )


def optimal_inputs(
    system: RelativeSystem, t: float, r, p
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(u_s*, u_p*, d*) attaining the Hamiltonian at costate ``p``."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    return (
        _extreme_input(system.tracking_columns(t, r), p, system.tracker_box, -1.0),
        _extreme_input(system.planner_columns(t, r), p, system.planner_box, 1.0),
        _extreme_input(
            system.disturbance_columns(t, r), p, system.disturbance_box, 1.0
        ),
    )


def _input_reach(columns: np.ndarray, box: InputBox) -> np.ndarray:
    """max over the box of |columns u| per state axis."""
    if columns.shape[1] == 0:
        return np.zeros(columns.shape[:1] + columns.shape[2:])
    magnitude = np.abs(box.center) + box.half_width
    return apply_columns(np.abs(columns), magnitude)


def speed_bound(system: RelativeSystem, t: float, r) -> np.ndarray:
    """Per-axis bound on |g| over all admissible inputs, maximised over ``r``.

    Used for the time step; returns shape (n,).
    """
    r = np.asarray(r, dtype=float)
    reach = np.abs(system.drift(t, r))
    for columns, box in (
        (system.tracking_columns(t, r), system.tracker_box),
        (system.planner_columns(t, r), system.planner_box),
        (system.disturbance_columns(t, r), system.disturbance_box),
    ):
        reach = reach + lead_axes(_input_reach(columns, box), r.ndim)
    return reach.reshape(reach.shape[0], -1).max(axis=1)
