"""Replan bookkeeping, triggers and periodic interval mapping."""

from dataclasses import dataclass
import math

import numpy as np

from wavetrack.core.errors import ConfigurationError
from wavetrack.planner.types import PlannedTrajectory
from wavetrack.replanner.policies import ReplanPolicy

_TIME_EPS = 1e-9


@dataclass
class ReplanState:
    """What the loop remembers about the most recent replan."""

    k: int
    t_k: float
    s_k: np.ndarray
    p_k: np.ndarray
    level: float
    plan: PlannedTrajectory
    interval: tuple[float, float]
    offset: float = 0.0
    initial_floor: float | None = None
    region_active: bool = False
    region_entered: bool = False

    def mapped_time(self, t: float) -> float:
        """Value-function time t_c for wall time ``t`` under the current plan."""
        return t - self.offset

    def planner_state(self, t: float) -> np.ndarray:
        """Reference position at wall time ``t``; ``plan`` is stored in wall time."""
        return self.plan.state_at(t)


def earliest_equiv_interval(t_a: float, t_b: float, tau: float) -> tuple[float, float]:
    """Shift [t_a, t_b] back by whole periods so it starts in [0, tau)."""
    if not tau > 0:
        raise ConfigurationError(f"period must be positive, got {tau}")
    if t_a < 0 or t_b < t_a:
        raise ConfigurationError(f"invalid interval [{t_a}, {t_b}]")
    shift = math.floor(t_a / tau + _TIME_EPS) * tau
    if shift > t_a:
        shift -= tau
    return t_a - shift, t_b - shift


def should_replan(
    policy: ReplanPolicy,
    state: ReplanState | None,
    t: float,
    constraint_changed: bool,
    s,
) -> bool:
    """Replan on a constraint change, fixed period, region entry or horizon expiry."""
    if state is None or constraint_changed:
        return True
    elapsed = t - state.t_k
    if policy.fixed_period is not None and elapsed >= policy.fixed_period - _TIME_EPS:
        return True
    if policy.horizon_expiry is not None and elapsed >= policy.horizon_expiry - _TIME_EPS:
        return True
    return bool(
        policy.region_trigger is not None
        and policy.region_trigger.active(s)
        and not state.region_active
    )
