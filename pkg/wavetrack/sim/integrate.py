"""Fixed-step plant integration."""

from collections.abc import Callable

import numpy as np

from wavetrack.core.errors import ConfigurationError, SolverError

PlantField = Callable[[float, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def integrate_step(
    field: PlantField, s, u_s, d_nom, t: float, dt: float
) -> np.ndarray:
    """One classical RK4 step with the inputs held over [t, t + dt].

    Raises:
        ConfigurationError: If ``dt`` is not positive
        SolverError: If the new state is not finite
    """
    if not dt > 0:
        raise ConfigurationError(f"integration step must be positive, got {dt}")
    s = np.asarray(s, dtype=float)
    half = 0.5 * dt
    k1 = field(t, s, u_s, d_nom)
    k2 = field(t + half, s + half * k1, u_s, d_nom)
    k3 = field(t + half, s + half * k2, u_s, d_nom)
    k4 = field(t + dt, s + dt * k3, u_s, d_nom)
    result = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(result)):
        raise SolverError(
            f"plant state became non-finite at t={t + dt:.4f}: {result.tolist()}"
        )
    return result
