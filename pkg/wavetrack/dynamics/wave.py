"""Plane progressive waves and the bounded descriptions the offline solve uses.

Orbital velocity and acceleration follow linear wave theory in deep water with
the z axis pointing down:

    W_x =  a ω exp(-k z) cos(k x - ω t)      A_x =  a ω² exp(-k z) sin(k x - ω t)
    W_z = -a ω exp(-k z) sin(k x - ω t)      A_z =  a ω² exp(-k z) cos(k x - ω t)

Both pairs are the real and (negated) imaginary parts of a phasor
``amplitude(z) * exp(i k x)`` rotated by ``exp(-i ω t)``, which is what makes
the periodic envelope a minimal-enclosing-circle fit in the complex plane.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize

from helpers.logger import logger
from wavetrack.core.config import config
from wavetrack.core.geometry import Rect
from wavetrack.dynamics.boxes import InputBox


class WaveParams(BaseModel):
    """Single-frequency plane progressive wave."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    amplitude: float = Field(default=0.4, gt=0, description="Surface amplitude in m")
    frequency: float = Field(
        default=2 * math.pi * 0.1, gt=0, description="Angular frequency in rad/s"
    )
    wavenumber: float = Field(default=0.0402, gt=0, description="Wavenumber in 1/m")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.frequency

    def velocity_magnitude(self, z):
        return self.amplitude * self.frequency * np.exp(-self.wavenumber * np.asarray(z))

    def acceleration_magnitude(self, z):
        return (
            self.amplitude
            * self.frequency**2
            * np.exp(-self.wavenumber * np.asarray(z))
        )


def wave_velocity(params: WaveParams, x, z, t) -> np.ndarray:
    """Orbital velocity (W_x, W_z), stacked on the first axis."""
    x, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, z, t)))
    phase = params.wavenumber * x - params.frequency * t
    magnitude = params.velocity_magnitude(z)
    return np.stack([magnitude * np.cos(phase), -magnitude * np.sin(phase)])


def wave_acceleration(params: WaveParams, x, z, t) -> np.ndarray:
    """Orbital acceleration (A_x, A_z), stacked on the first axis."""
    x, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, z, t)))
    phase = params.wavenumber * x - params.frequency * t
    magnitude = params.acceleration_magnitude(z)
    return np.stack([magnitude * np.sin(phase), magnitude * np.cos(phase)])


def wave_disturbance(params: WaveParams, x, z, t) -> np.ndarray:
    """The wave terms as one vector (W_x, W_z, A_x, A_z)."""
    return np.concatenate(
        [wave_velocity(params, x, z, t), wave_acceleration(params, x, z, t)]
    )


class Case2WaveEnvelope(BaseModel):
    """Nominal periodic wave terms with residual bounds.

    The nominal terms repeat every ``2π / frequency`` seconds; the true wave
    terms stay within ``velocity_bound`` / ``acceleration_bound`` of them,
    componentwise, over the fitted region.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    velocity_amplitude: float = Field(ge=0)
    velocity_phase: float
    velocity_bound: float = Field(ge=0)
    acceleration_amplitude: float = Field(ge=0)
    acceleration_phase: float
    acceleration_bound: float = Field(ge=0)
    frequency: float = Field(gt=0)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.frequency

    def nominal(self, t) -> np.ndarray:
        """Nominal (W_x, W_z, A_x, A_z) at time ``t``; stacked on the first axis."""
        t = np.asarray(t, dtype=float)
        vel = self.velocity_phase - self.frequency * t
        acc = self.acceleration_phase - self.frequency * t
        return np.stack(
            [
                self.velocity_amplitude * np.cos(vel),
                -self.velocity_amplitude * np.sin(vel),
                self.acceleration_amplitude * np.sin(acc),
                self.acceleration_amplitude * np.cos(acc),
            ]
        )

    def residual_box(self) -> InputBox:
        """Box on (W_x, W_z, A_x, A_z) minus the nominal terms."""
        return InputBox.symmetric(
            [
                self.velocity_bound,
                self.velocity_bound,
                self.acceleration_bound,
                self.acceleration_bound,
            ]
        )


class Case3WaveBounds(BaseModel):
    """Bounds on the full wave terms, for the time-invariant treatment."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    velocity_bound: float = Field(ge=0)
    acceleration_bound: float = Field(ge=0)

    def box(self) -> InputBox:
        return InputBox.symmetric(
            [
                self.velocity_bound,
                self.velocity_bound,
                self.acceleration_bound,
                self.acceleration_bound,
            ]
        )


def _region_samples(region: Rect, count: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.unique(np.linspace(region.x_min, region.x_max, count))
    zs = np.unique(np.linspace(region.z_min, region.z_max, count))
    grid_x, grid_z = np.meshgrid(xs, zs, indexing="ij")
    return grid_x.ravel(), grid_z.ravel()


def _enclosing_center(points: np.ndarray) -> complex:
    """Approximate center of the minimal circle enclosing complex ``points``."""
    start = np.array([points.real.mean(), points.imag.mean()])

    def radius(center: np.ndarray) -> float:
        return float(np.max(np.abs(points - complex(center[0], center[1]))))

    result = minimize(
        radius,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
    )
    best = result.x if result.fun <= radius(start) else start
    return complex(best[0], best[1])


def _residual_bound(
    phasors: np.ndarray, center: complex, frequency: float, horizon: float | None
) -> float:
    offsets = phasors - center
    period = 2 * math.pi / frequency
    if horizon is None or horizon >= period:
        # sup over a full period of |Re(w e^{-iωt})| and |Im(w e^{-iωt})| is |w|
        return float(np.max(np.abs(offsets)))
    times = np.linspace(0.0, horizon, config.envelope_time_samples)
    rotated = offsets[:, None] * np.exp(-1j * frequency * times)[None, :]
    return float(max(np.max(np.abs(rotated.real)), np.max(np.abs(rotated.imag))))


def fit_case2_envelope(
    params: WaveParams,
    region: Rect,
    horizon: float | None = None,
    samples: int | None = None,
) -> Case2WaveEnvelope:
    """Fit nominal periodic wave terms and residual bounds over ``region``.

    The nominal amplitude and phase are the center of the smallest circle
    enclosing the sampled phasors; the residual bound is then computed
    exactly over one period, or by time sampling when ``horizon`` is shorter.
    """
    samples = samples or config.envelope_spatial_samples
    xs, zs = _region_samples(region, samples)
    rotation = np.exp(1j * params.wavenumber * xs)

    velocity = params.velocity_magnitude(zs) * rotation
    acceleration = params.acceleration_magnitude(zs) * rotation

    velocity_center = _enclosing_center(velocity)
    acceleration_center = _enclosing_center(acceleration)

    envelope = Case2WaveEnvelope(
        velocity_amplitude=abs(velocity_center),
        velocity_phase=float(np.angle(velocity_center)),
        velocity_bound=_residual_bound(
            velocity, velocity_center, params.frequency, horizon
        ),
        acceleration_amplitude=abs(acceleration_center),
        acceleration_phase=float(np.angle(acceleration_center)),
        acceleration_bound=_residual_bound(
            acceleration, acceleration_center, params.frequency, horizon
        ),
        frequency=params.frequency,
    )
    logger.debug(
        f"Fitted wave envelope: W {envelope.velocity_amplitude:.4f} ± "
        f"{envelope.velocity_bound:.4f}, A {envelope.acceleration_amplitude:.4f} ± "
        f"{envelope.acceleration_bound:.4f}"
    )
    return envelope


def fit_case3_bounds(
    params: WaveParams,
    region: Rect,
    horizon: float | None = None,
    samples: int | None = None,
) -> Case3WaveBounds:
    """Componentwise bounds on the full wave terms over ``region``."""
    samples = samples or config.envelope_spatial_samples
    xs, zs = _region_samples(region, samples)
    rotation = np.exp(1j * params.wavenumber * xs)
    velocity = params.velocity_magnitude(zs) * rotation
    acceleration = params.acceleration_magnitude(zs) * rotation
    return Case3WaveBounds(
        velocity_bound=_residual_bound(velocity, 0j, params.frequency, horizon),
        acceleration_bound=_residual_bound(
            acceleration, 0j, params.frequency, horizon
        ),
    )
