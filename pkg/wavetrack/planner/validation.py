"""Post-hoc checks of a planned trajectory against its request."""

import numpy as np

from wavetrack.core.validators import Violation
from wavetrack.planner.types import PlannedTrajectory, PlanRequest

TOLERANCE = 1e-9


def validate_plan(
    trajectory: PlannedTrajectory, request: PlanRequest
) -> list[Violation]:
    """Check input bounds (C1), dynamics (C2), obstacles (C3) and goal (C4).

    Returns an empty list for a valid plan.
    """
    errors: list[Violation] = []
    constraints = request.constraints
    t_s = request.sample_period

    expected = request.t_i + t_s * np.arange(trajectory.times.shape[0])
    if not np.allclose(trajectory.times, expected, rtol=0.0, atol=TOLERANCE):
        errors.append(
            Violation(None, "timestamps are not t_i + k T_s", "timing")
        )
    if trajectory.steps > constraints.steps:
        errors.append(
            Violation(
                None,
                f"plan has {trajectory.steps} steps but the horizon allows "
                f"{constraints.steps}",
                "timing",
            )
        )

    for k, control in enumerate(trajectory.controls):
        if not request.planner_box.contains(control, tol=TOLERANCE):
            errors.append(
                Violation(k, f"input {control.tolist()} outside the box", "C1")
            )
        predicted = trajectory.states[k] + t_s * control
        if np.max(np.abs(trajectory.states[k + 1] - predicted)) > TOLERANCE:
            errors.append(
                Violation(k, "state does not follow p + T_s u", "C2")
            )

    for k, state in enumerate(trajectory.states[: constraints.steps + 1]):
        if constraints.obstacles[k].occupied(state):
            errors.append(
                Violation(k, f"state {state.tolist()} is in O_p(t_{k})", "C3")
            )

    if request.enforce_goal:
        last = trajectory.steps
        reached = (
            trajectory.goal_time is not None
            and last <= constraints.steps
            and constraints.goals[last].member(trajectory.states[-1])
        )
        if not reached:
            errors.append(
                Violation(last, "final state is not in the planner goal set", "C4")
            )
    return errors
