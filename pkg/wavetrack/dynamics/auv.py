"""Planar AUV surge/heave model and the three relative systems built on it.

State s = (x, z, u_r, w_r): position in the plane (z down) and velocity
relative to the surrounding fluid. Controls are the thrusts (T_A, T_B).
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import (
    AffineField,
    RelativeSystem,
    constant_columns,
    planner_field,
)
from wavetrack.dynamics.wave import (
    Case2WaveEnvelope,
    Case3WaveBounds,
    WaveParams,
    wave_disturbance,
)

STATE_NAMES = ("x", "z", "u_r", "w_r")


class AuvParams(BaseModel):
    """Rigid-body, added-mass, damping and buoyancy coefficients."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mass: float = Field(default=116.0, gt=0, description="m in kg")
    displaced_mass: float = Field(default=116.2, gt=0, description="m̄ in kg")
    added_mass_u: float = Field(default=-167.7, description="X_u̇ in kg")
    added_mass_w: float = Field(default=-383.0, description="Z_ẇ in kg")
    damping_u: float = Field(default=26.9, ge=0, description="X_u in kg/s")
    damping_w: float = Field(default=0.0, ge=0, description="Z_w in kg/s")
    quadratic_damping_u: float = Field(default=241.3, ge=0, description="X_u|u| in kg/m")
    quadratic_damping_w: float = Field(default=265.6, ge=0, description="Z_w|w| in kg/m")
    gravity: float = Field(default=9.81, gt=0)

    @model_validator(mode="after")
    def _check_inertia(self) -> "AuvParams":
        if self.inertia_u <= 0 or self.inertia_w <= 0:
            raise ValueError("mass minus added mass must be positive on both axes")
        return self

    @property
    def inertia_u(self) -> float:
        return self.mass - self.added_mass_u

    @property
    def inertia_w(self) -> float:
        return self.mass - self.added_mass_w

    @property
    def excess_mass(self) -> float:
        """m̄ - m; scales the wave acceleration term."""
        return self.displaced_mass - self.mass

    def control_columns(self) -> np.ndarray:
        return np.array(
            [
                [0.0, 0.0],
                [0.0, 0.0],
                [1.0 / self.inertia_u, 0.0],
                [0.0, 1.0 / self.inertia_w],
            ]
        )

    def wave_columns(self) -> np.ndarray:
        """How (W_x, W_z, A_x, A_z) enter the state derivative."""
        return np.diag(
            [
                1.0,
                1.0,
                self.excess_mass / self.inertia_u,
                self.excess_mass / self.inertia_w,
            ]
        )


def auv_rhs(params: AuvParams, s, u_s, d_nom, d_wave) -> np.ndarray:
    """State derivative for thrust ``u_s``, additive ``d_nom`` and wave terms.

    ``d_wave`` is (W_x, W_z, A_x, A_z); every argument may carry batch axes.
    """
    _, _, u_r, w_r = np.asarray(s, dtype=float)[:4]
    thrust_a, thrust_b = np.asarray(u_s, dtype=float)
    d_x, d_z, d_u, d_w = np.asarray(d_nom, dtype=float)
    w_x, w_z, a_x, a_z = np.asarray(d_wave, dtype=float)
    excess = params.excess_mass

    x_dot = u_r + w_x + d_x
    z_dot = w_r + w_z + d_z
    u_dot = (
        excess * a_x
        - (params.damping_u + params.quadratic_damping_u * np.abs(u_r)) * u_r
        + thrust_a
    ) / params.inertia_u + d_u
    w_dot = (
        excess * a_z
        + params.gravity * (params.mass - params.displaced_mass)
        - (params.damping_w + params.quadratic_damping_w * np.abs(w_r)) * w_r
        + thrust_b
    ) / params.inertia_w + d_w
    return np.stack(np.broadcast_arrays(x_dot, z_dot, u_dot, w_dot))


def _free_drift(params: AuvParams, s: np.ndarray, wave: np.ndarray) -> np.ndarray:
    return auv_rhs(params, s, np.zeros(2), np.zeros(4), wave)


def truth_field(params: AuvParams, wave: WaveParams) -> AffineField:
    """Plant model with the true wave terms in the drift and d = d_nom."""

    def drift(t: float, s: np.ndarray) -> np.ndarray:
        return _free_drift(params, s, wave_disturbance(wave, s[0], s[1], t))

    return AffineField(
        state_dim=4,
        control_dim=2,
        disturbance_dim=4,
        drift=drift,
        control_columns=constant_columns(params.control_columns()),
        disturbance_columns=constant_columns(np.eye(4)),
        time_invariant=False,
        name="auv-truth",
    )


def envelope_field(params: AuvParams, envelope: Case2WaveEnvelope) -> AffineField:
    """Tracking model with the nominal periodic wave in the drift.

    d = (d_nom, residual wave terms), eight channels.
    """

    def drift(t: float, s: np.ndarray) -> np.ndarray:
        return _free_drift(params, s, envelope.nominal(t))

    return AffineField(
        state_dim=4,
        control_dim=2,
        disturbance_dim=8,
        drift=drift,
        control_columns=constant_columns(params.control_columns()),
        disturbance_columns=constant_columns(
            np.hstack([np.eye(4), params.wave_columns()])
        ),
        time_invariant=False,
        name="auv-periodic",
    )


def bounded_field(params: AuvParams) -> AffineField:
    """Tracking model with the whole wave treated as bounded disturbance."""

    def drift(_t: float, s: np.ndarray) -> np.ndarray:
        return _free_drift(params, s, np.zeros(4))

    return AffineField(
        state_dim=4,
        control_dim=2,
        disturbance_dim=8,
        drift=drift,
        control_columns=constant_columns(params.control_columns()),
        disturbance_columns=constant_columns(
            np.hstack([np.eye(4), params.wave_columns()])
        ),
        time_invariant=True,
        name="auv-bounded",
    )


def _decoupled_lift(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = np.asarray(r, dtype=float)
    return r, np.zeros((2, *r.shape[1:]))


def _coupled_lift(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # r = (x - x_p, z - z_p, u_r, w_r, x, z)
    r = np.asarray(r, dtype=float)
    s = np.stack([r[4], r[5], r[2], r[3]])
    p = np.stack([r[4] - r[0], r[5] - r[1]])
    return s, p


DECOUPLED_TRACKING_MAP = np.eye(4)
DECOUPLED_PLANNING_MAP = np.vstack([np.eye(2), np.zeros((2, 2))])
DECOUPLED_ERROR_MAP = np.hstack([np.eye(2), np.zeros((2, 2))])

COUPLED_TRACKING_MAP = np.vstack(
    [np.eye(4), np.hstack([np.eye(2), np.zeros((2, 2))])]
)
COUPLED_PLANNING_MAP = np.vstack([np.eye(2), np.zeros((4, 2))])
COUPLED_ERROR_MAP = np.hstack([np.eye(2), np.zeros((2, 4))])


def _boxes(
    u_s_max: float, u_p_max: float, d_nom_max: float, wave_box: InputBox | None
) -> tuple[InputBox, InputBox, InputBox]:
    disturbance = InputBox.symmetric(d_nom_max, 4)
    if wave_box is not None:
        disturbance = InputBox.concat(disturbance, wave_box)
    return (
        InputBox.symmetric(u_s_max, 2),
        InputBox.symmetric(u_p_max, 2),
        disturbance,
    )


def make_case1(
    auv: AuvParams,
    wave: WaveParams,
    u_s_max: float = 1000.0,
    u_p_max: float = 0.3,
    d_nom_max: float = 0.001,
) -> RelativeSystem:
    """Six-dimensional relative system with the true wave in the drift."""
    tracker_box, planner_box, disturbance_box = _boxes(
        u_s_max, u_p_max, d_nom_max, None
    )
    return RelativeSystem(
        tracking_map=COUPLED_TRACKING_MAP,
        planning_map=COUPLED_PLANNING_MAP,
        error_map=COUPLED_ERROR_MAP,
        tracking=truth_field(auv, wave),
        planning=planner_field(),
        tracker_box=tracker_box,
        planner_box=planner_box,
        disturbance_box=disturbance_box,
        lift=_coupled_lift,
        name="case1",
    )


def make_case2(
    auv: AuvParams,
    envelope: Case2WaveEnvelope,
    u_s_max: float = 1000.0,
    u_p_max: float = 0.3,
    d_nom_max: float = 0.001,
    tracking_map: np.ndarray | None = None,
    planning_map: np.ndarray | None = None,
    error_map: np.ndarray | None = None,
) -> RelativeSystem:
    """Four-dimensional periodic relative system with the nominal wave in the drift."""
    tracker_box, planner_box, disturbance_box = _boxes(
        u_s_max, u_p_max, d_nom_max, envelope.residual_box()
    )
    return RelativeSystem(
        tracking_map=DECOUPLED_TRACKING_MAP if tracking_map is None else tracking_map,
        planning_map=DECOUPLED_PLANNING_MAP if planning_map is None else planning_map,
        error_map=DECOUPLED_ERROR_MAP if error_map is None else error_map,
        tracking=envelope_field(auv, envelope),
        planning=planner_field(),
        tracker_box=tracker_box,
        planner_box=planner_box,
        disturbance_box=disturbance_box,
        lift=_decoupled_lift,
        name="case2",
    )


def make_case3(
    auv: AuvParams,
    bounds: Case3WaveBounds,
    u_s_max: float = 1000.0,
    u_p_max: float = 0.3,
    d_nom_max: float = 0.001,
) -> RelativeSystem:
    """Four-dimensional time-invariant relative system, wave as disturbance."""
    tracker_box, planner_box, disturbance_box = _boxes(
        u_s_max, u_p_max, d_nom_max, bounds.box()
    )
    return RelativeSystem(
        tracking_map=DECOUPLED_TRACKING_MAP,
        planning_map=DECOUPLED_PLANNING_MAP,
        error_map=DECOUPLED_ERROR_MAP,
        tracking=bounded_field(auv),
        planning=planner_field(),
        tracker_box=tracker_box,
        planner_box=planner_box,
        disturbance_box=disturbance_box,
        lift=_decoupled_lift,
        name="case3",
    )

