"""Planning requests and the trajectories the planner returns."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wavetrack.core.errors import ArtifactError, ConfigurationError
from wavetrack.dynamics.boxes import InputBox
from wavetrack.safesets.constraints import PlanningConstraintSet


@dataclass(frozen=True, eq=False)
class PlanRequest:
    """One planning problem over [t_i, t_f] with time-indexed constraints.

    Stage cost is T_s [(p - p_ref)ᵀ Q (p - p_ref) + uᵀ R u]; when the goal is
    soft the terminal term (p_N - p_ref)ᵀ Q (p_N - p_ref) is added.
    """

    t_i: float
    t_f: float
    p0: np.ndarray
    constraints: PlanningConstraintSet
    planner_box: InputBox
    goal_required: bool = True
    q_matrix: np.ndarray = field(default_factory=lambda: np.eye(2))
    r_matrix: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(2))
    p_ref: np.ndarray | None = None

    def __post_init__(self):
        if self.t_f < self.t_i:
            raise ConfigurationError(f"t_f {self.t_f} precedes t_i {self.t_i}")
        if not np.isclose(self.constraints.times[0], self.t_i, atol=1e-9):
            raise ConfigurationError("constraints must start at t_i")
        if not self.planner_box.is_symmetric:
            raise ConfigurationError("the lattice planner needs a symmetric input box")
        p0 = np.asarray(self.p0, dtype=float).reshape(-1)
        if p0.shape[0] != self.planner_box.dim:
            raise ConfigurationError(f"p0 has {p0.shape[0]} components, expected 2")
        object.__setattr__(self, "p0", p0)
        if self.p_ref is not None:
            object.__setattr__(self, "p_ref", np.asarray(self.p_ref, dtype=float))

    @property
    def sample_period(self) -> float:
        return self.constraints.sample_period

    @property
    def steps(self) -> int:
        return self.constraints.steps

    @property
    def enforce_goal(self) -> bool:
        """Hard goal unless every G_p(t_k) is empty, in which case it is dropped."""
        return self.goal_required and not self.constraints.goal_everywhere_empty

    def reference(self) -> np.ndarray:
        """p_ref, defaulting to the centroid of the last nonempty G_p(t_k)."""
        if self.p_ref is not None:
            return self.p_ref
        for goal in reversed(self.constraints.goals):
            if not goal.is_empty:
                centers = goal.center_points()[goal.cells.ravel()]
                return centers.mean(axis=0)
        return self.p0


@dataclass(frozen=True, eq=False)
class PlannedTrajectory:
    """States at t_k = t_i + k T_s and the zero-order-hold inputs between them."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    goal_time: float | None
    cost: float
    expanded: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        controls = np.asarray(self.controls, dtype=float).reshape(-1, states.shape[1])
        if states.shape[0] != times.shape[0] or controls.shape[0] != max(
            times.shape[0] - 1, 0
        ):
            raise ConfigurationError("trajectory arrays have inconsistent lengths")
        for array in (times, states, controls):
            array.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "controls", controls)

    @property
    def steps(self) -> int:
        return self.controls.shape[0]

    @property
    def t_i(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def state_at(self, t: float) -> np.ndarray:
        """Planner state at time ``t`` under the zero-order-hold inputs."""
        if self.steps == 0 or t <= self.times[0]:
            return self.states[0].copy()
        if t >= self.times[-1]:
            return self.states[-1].copy()
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        k = min(max(k, 0), self.steps - 1)
        return self.states[k] + (t - self.times[k]) * self.controls[k]

    def shifted(self, offset: float) -> "PlannedTrajectory":
        """Same trajectory with every timestamp moved by ``offset``."""
        return PlannedTrajectory(
            times=self.times + offset,
            states=self.states,
            controls=self.controls,
            goal_time=None if self.goal_time is None else self.goal_time + offset,
            cost=self.cost,
            expanded=self.expanded,
        )

    def as_rows(self) -> np.ndarray:
        """(K+1, 5) array of t, x, z, u_x, u_z; the last row holds zero input."""
        controls = np.vstack([self.controls, np.zeros((1, self.states.shape[1]))])
        return np.column_stack([self.times, self.states, controls])

    def to_csv(self, path: Path | str) -> None:
        try:
            np.savetxt(
                path,
                self.as_rows(),
                delimiter=",",
                header="t,x,z,u_x,u_z",
                comments="",
                fmt="%.9g",
            )
        except OSError as e:
            raise ArtifactError(f"cannot write plan to {path}: {e}") from e
