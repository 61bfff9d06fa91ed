"""Closed-form value of the one-dimensional pursuit game ṙ = u_s - u_p + d."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import AffineField, RelativeSystem, constant_columns

__all__ = ["Analytic1DGame", "analytic_value", "game_system"]


class Analytic1DGame(BaseModel):
    """Tracker speed ``a_s`` against planner speed ``a_p`` and disturbance ``e``.

    With a_s ≥ a_p + e the tracker holds the error, so V(t, r) = |r|; otherwise
    the adversary pulls away at a_p + e - a_s and
    V(t, r) = |r| + (a_p + e - a_s)(T_off - t).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    tracker_speed: float = Field(gt=0)
    planner_speed: float = Field(gt=0)
    disturbance_bound: float = Field(default=0.0, ge=0)
    t_off: float = Field(default=1.0, gt=0)

    @property
    def adversary_speed(self) -> float:
        return self.planner_speed + self.disturbance_bound

    @property
    def tracker_dominates(self) -> bool:
        return self.tracker_speed >= self.adversary_speed


def analytic_value(game: Analytic1DGame, r, t):
    r = np.abs(np.asarray(r, dtype=float))
    if game.tracker_dominates:
        return r
    return r + (game.adversary_speed - game.tracker_speed) * (game.t_off - np.asarray(t))


def _scalar_field(name: str, disturbed: bool) -> AffineField:
    def drift(_t: float, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x, dtype=float)

    width = 1 if disturbed else 0
    return AffineField(
        state_dim=1,
        control_dim=1,
        disturbance_dim=width,
        drift=drift,
        control_columns=constant_columns(np.ones((1, 1))),
        disturbance_columns=constant_columns(np.ones((1, width))),
        time_invariant=True,
        name=name,
    )


def _identity_lift(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = np.asarray(r, dtype=float)
    return r, np.zeros_like(r)


def game_system(game: Analytic1DGame) -> RelativeSystem:
    disturbed = game.disturbance_bound > 0
    return RelativeSystem(
        tracking_map=np.ones((1, 1)),
        planning_map=np.ones((1, 1)),
        error_map=np.ones((1, 1)),
        tracking=_scalar_field("game-tracker", disturbed),
        planning=_scalar_field("game-planner", False),
        tracker_box=InputBox.symmetric(game.tracker_speed, 1),
        planner_box=InputBox.symmetric(game.planner_speed, 1),
        disturbance_box=(
            InputBox.symmetric(game.disturbance_bound, 1)
            if disturbed
            else InputBox.empty()
        ),
        lift=_identity_lift,
        name="game1d",
    )
