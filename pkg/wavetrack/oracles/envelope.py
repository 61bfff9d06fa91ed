"""Dense random check that fitted wave bounds contain the true wave terms."""

import numpy as np

from wavetrack.core.geometry import Rect
from wavetrack.dynamics.wave import (
    Case2WaveEnvelope,
    Case3WaveBounds,
    WaveParams,
    wave_disturbance,
)


def envelope_residual(
    params: WaveParams,
    fitted: Case2WaveEnvelope | Case3WaveBounds,
    sample_count: int = 10_000,
    region: Rect | None = None,
    seed: int = 0,
) -> float:
    """Largest componentwise excess of the true wave terms over the fitted bounds.

    Samples (x, z, t) uniformly over ``region`` and one wave period. A value
    ≤ 0 means every sample lies inside the bounded set.
    """
    region = region or Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
    rng = np.random.default_rng(seed)
    x = rng.uniform(region.x_min, region.x_max, sample_count)
    z = rng.uniform(region.z_min, region.z_max, sample_count)
    t = rng.uniform(0.0, params.period, sample_count)

    true_terms = wave_disturbance(params, x, z, t)
    if isinstance(fitted, Case2WaveEnvelope):
        residual = true_terms - fitted.nominal(t)
        bounds = fitted.residual_box().upper
    else:
        residual = true_terms
        bounds = fitted.box().upper
    excess = np.abs(residual) - bounds[:, None]
    return float(excess.max())


def enclosing_envelope(params: WaveParams, region: Rect) -> dict[str, float]:
    """Smallest nominal-plus-residual envelope over ``region`` in closed form.

    Over a rectangle the phasors ``a ω^j exp(-k z) exp(i k x)`` fill an annular
    sector. For the narrow sectors of long waves the enclosing circle passes
    through its four corners, so its center lies on the bisector at
    ``(M_hi + M_lo) / (2 cos θ)`` with radius ``sqrt(c² - M_hi M_lo)``.
    """
    half_angle = 0.5 * params.wavenumber * (region.x_max - region.x_min)
    phase = 0.5 * params.wavenumber * (region.x_max + region.x_min)
    result = {}
    for key, magnitude in (
        ("velocity", params.velocity_magnitude),
        ("acceleration", params.acceleration_magnitude),
    ):
        high = float(magnitude(region.z_min))
        low = float(magnitude(region.z_max))
        center = (high + low) / (2.0 * np.cos(half_angle))
        result[f"{key}_amplitude"] = center
        result[f"{key}_phase"] = phase
        result[f"{key}_bound"] = float(np.sqrt(center**2 - high * low))
    return result
