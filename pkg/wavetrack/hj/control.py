"""Optimal tracking control and worst-case adversary from a stored V."""

import numpy as np

from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.hj.hamiltonian import optimal_inputs
from wavetrack.hj.value_function import ValueFunction


def optimal_control(
    value_fn: ValueFunction, system: RelativeSystem, r, t: float
) -> np.ndarray:
    """Tracker input minimising ∇Vᵀ g; zero-gradient channels get the box center."""
    r = np.asarray(r, dtype=float)
    grad = value_fn.gradient(r, t)
    tracker, _, _ = optimal_inputs(system, t, r, grad)
    return system.tracker_box.clip(tracker)


def worst_adversary(
    value_fn: ValueFunction, system: RelativeSystem, r, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """(u_p, d) maximising ∇Vᵀ g."""
    r = np.asarray(r, dtype=float)
    grad = value_fn.gradient(r, t)
    _, planner, disturbance = optimal_inputs(system, t, r, grad)
    return planner, disturbance
