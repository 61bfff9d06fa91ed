"""Control- and disturbance-affine vector fields and relative systems.

Every callable here is vectorised: states carry the state axis first and any
number of trailing batch axes, so the same code evaluates one point or a whole
grid. Column callables return ``(n, m)`` when they do not depend on the state
and ``(n, m, *batch)`` when they do.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from wavetrack.core.errors import ConfigurationError
from wavetrack.dynamics.boxes import InputBox

DriftFn = Callable[[float, np.ndarray], np.ndarray]
ColumnsFn = Callable[[float, np.ndarray], np.ndarray]
LiftFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def apply_columns(columns: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Σ_i columns[:, i] * values[i], broadcasting batch axes."""
    values = np.asarray(values, dtype=float)
    if columns.shape[1] == 0:
        batch = columns.shape[2:] or values.shape[1:]
        return np.zeros((columns.shape[0], *batch))
    if columns.ndim == 2:
        return np.tensordot(columns, values, axes=(1, 0))
    if values.ndim == 1:
        values = values.reshape((1, values.shape[0]) + (1,) * (columns.ndim - 2))
    else:
        values = values[np.newaxis]
    return (columns * values).sum(axis=1)


def project_columns(columns: np.ndarray, costate: np.ndarray) -> np.ndarray:
    """pᵀ columns[:, i] for every channel i; shape (m, *batch)."""
    if columns.ndim == 2:
        return np.tensordot(columns, costate, axes=(0, 0))
    if costate.ndim == 1:
        costate = costate.reshape((costate.shape[0], 1) + (1,) * (columns.ndim - 2))
    else:
        costate = costate[:, np.newaxis]
    return (columns * costate).sum(axis=0)


def lead_axes(values: np.ndarray, ndim: int) -> np.ndarray:
    """Append singleton batch axes so a (n,) vector broadcasts against (n, *batch)."""
    values = np.asarray(values)
    return values.reshape(values.shape + (1,) * (ndim - values.ndim))


def map_left(matrix: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Apply ``matrix`` to the leading axis of a vector or column array."""
    return np.tensordot(matrix, values, axes=(1, 0))


@dataclass(frozen=True)
class AffineField:
    """ẋ = drift(t, x) + control_columns(t, x) u + disturbance_columns(t, x) d."""

    state_dim: int
    control_dim: int
    disturbance_dim: int
    drift: DriftFn
    control_columns: ColumnsFn
    disturbance_columns: ColumnsFn
    time_invariant: bool = False
    name: str = ""

    def __call__(self, t: float, x, u, d) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            self.drift(t, x)
            + lead_axes(apply_columns(self.control_columns(t, x), u), x.ndim)
            + lead_axes(apply_columns(self.disturbance_columns(t, x), d), x.ndim)
        )


def _constant(columns: np.ndarray) -> ColumnsFn:
    columns = np.array(columns, dtype=float)
    columns.setflags(write=False)

    def fn(_t: float, _x: np.ndarray) -> np.ndarray:
        return columns

    return fn


def constant_columns(columns) -> ColumnsFn:
    """Column callable for state- and time-independent input columns."""
    return _constant(columns)


def planner_field(dim: int = 2) -> AffineField:
    """Planning model ṗ = u_p with no drift and no disturbance."""

    def drift(_t: float, p: np.ndarray) -> np.ndarray:
        return np.zeros_like(p, dtype=float)

    return AffineField(
        state_dim=dim,
        control_dim=dim,
        disturbance_dim=0,
        drift=drift,
        control_columns=_constant(np.eye(dim)),
        disturbance_columns=_constant(np.zeros((dim, 0))),
        time_invariant=True,
        name="planner",
    )


@dataclass(frozen=True)
class RelativeSystem:
    """Relative dynamics r = L s - M p between a tracking and a planning model.

    ``lift`` recovers the (s, p) pair the fields are evaluated at from a
    relative state; for the decoupled cases the planner terms vanish and the
    lift returns s = r with a zero planner state.
    """

    tracking_map: np.ndarray
    planning_map: np.ndarray
    error_map: np.ndarray
    tracking: AffineField
    planning: AffineField
    tracker_box: InputBox
    planner_box: InputBox
    disturbance_box: InputBox
    lift: LiftFn
    name: str = ""

    def __post_init__(self):
        for attr in ("tracking_map", "planning_map", "error_map"):
            array = np.array(getattr(self, attr), dtype=float)
            if array.ndim != 2:
                raise ConfigurationError(f"{attr} must be a matrix, got {array.shape}")
            array.setflags(write=False)
            object.__setattr__(self, attr, array)

        rows, tracking_cols = self.tracking_map.shape
        if tracking_cols != self.tracking.state_dim:
            raise ConfigurationError(
                f"tracking map has {tracking_cols} columns but the tracking model "
                f"has {self.tracking.state_dim} states"
            )
        if self.planning_map.shape != (rows, self.planning.state_dim):
            raise ConfigurationError(
                f"planning map shape {self.planning_map.shape} does not match "
                f"({rows}, {self.planning.state_dim})"
            )
        if self.error_map.shape[1] != rows:
            raise ConfigurationError(
                f"error map has {self.error_map.shape[1]} columns, expected {rows}"
            )
        if self.tracker_box.dim != self.tracking.control_dim:
            raise ConfigurationError("tracker box does not match tracking controls")
        if self.planner_box.dim != self.planning.control_dim:
            raise ConfigurationError("planner box does not match planning controls")
        if self.disturbance_box.dim != self.tracking.disturbance_dim:
            raise ConfigurationError(
                "disturbance box does not match tracking disturbances"
            )

    @property
    def dim(self) -> int:
        return int(self.tracking_map.shape[0])

    @property
    def time_invariant(self) -> bool:
        return self.tracking.time_invariant and self.planning.time_invariant

    @property
    def error_axes(self) -> tuple[int, ...]:
        """Relative-state axes the planner state enters."""
        return tuple(int(i) for i in np.flatnonzero(np.any(self.planning_map, axis=1)))

    def relative_state(self, s, p) -> np.ndarray:
        return map_left(self.tracking_map, np.asarray(s, dtype=float)) - map_left(
            self.planning_map, np.asarray(p, dtype=float)
        )

    def planner_state(self, r, s) -> np.ndarray:
        """Planner state p with L s - M p matching ``r`` on the error axes."""
        axes = list(self.error_axes)
        rhs = map_left(self.tracking_map, np.asarray(s, dtype=float))[axes] - np.asarray(
            r, dtype=float
        )[axes]
        return np.linalg.solve(self.planning_map[axes], rhs)

    def drift(self, t: float, r: np.ndarray) -> np.ndarray:
        s, p = self.lift(r)
        drift = map_left(self.tracking_map, self.tracking.drift(t, s)) - map_left(
            self.planning_map, self.planning.drift(t, p)
        )
        return lead_axes(drift, np.ndim(r))

    def tracking_columns(self, t: float, r: np.ndarray) -> np.ndarray:
        s, _ = self.lift(r)
        return map_left(self.tracking_map, self.tracking.control_columns(t, s))

    def planner_columns(self, t: float, r: np.ndarray) -> np.ndarray:
        _, p = self.lift(r)
        return -map_left(self.planning_map, self.planning.control_columns(t, p))

    def disturbance_columns(self, t: float, r: np.ndarray) -> np.ndarray:
        s, _ = self.lift(r)
        return map_left(self.tracking_map, self.tracking.disturbance_columns(t, s))

    def field(self, t: float, r, u_s, u_p, d) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        terms = (
            apply_columns(self.tracking_columns(t, r), u_s),
            apply_columns(self.planner_columns(t, r), u_p),
            apply_columns(self.disturbance_columns(t, r), d),
        )
        return self.drift(t, r) + sum(lead_axes(term, r.ndim) for term in terms)

    def composed_field(self, t: float, s, p, u_s, u_p, d) -> np.ndarray:
        """L f(t, s, u_s, d) - M h(p, u_p), evaluated on the original models."""
        return map_left(self.tracking_map, self.tracking(t, s, u_s, d)) - map_left(
            self.planning_map, self.planning(t, p, u_p, np.zeros(0))
        )


def periodic_wrap(t, tau: float):
    """Map ``t`` into [0, tau)."""
    if not tau > 0:
        raise ConfigurationError(f"period must be positive, got {tau}")
    wrapped = np.mod(t, tau)
    wrapped = np.where(wrapped >= tau, 0.0, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped
