"""Backward-in-time HJI variational inequality solver.

Solves max{∂V/∂t + H(t, r, ∇V), l(r) - V} = 0 with V(T_off, r) = l(r) on a
uniform grid using a Lax-Friedrichs numerical Hamiltonian, upwind one-sided
differences (optionally second-order ENO) and two-stage TVD Runge-Kutta
in time. The obstacle term is enforced by V ← max(V, l) after every step.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
import math
from typing import Literal

import numpy as np

from helpers.logger import logger
from helpers.observability import logfire
from wavetrack.core.errors import ConfigurationError, SolverError
from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.hj.grid import Grid, error_cost
from wavetrack.hj.hamiltonian import hamiltonian, speed_bound
from wavetrack.hj.value_function import ValueFunction

Accuracy = Literal["first", "second"]

# Coupled six-dimensional solves are only tractable on coarse grids
COARSE_DIM = 6
COARSE_MAX_NODES = 13

_TIME_EPS = 1e-12


@dataclass(frozen=True)
class HJIProblem:
    system: RelativeSystem
    grid: Grid
    t_off: float
    cfl: float = 0.5
    accuracy: Accuracy = "first"
    save_dt: float | None = None

    def __post_init__(self):
        if not isinstance(self.system, RelativeSystem):
            raise ConfigurationError(
                "dynamics must be a control- and disturbance-affine RelativeSystem"
            )
        if self.grid.ndim != self.system.dim:
            raise ConfigurationError(
                f"grid has {self.grid.ndim} axes but the relative state has "
                f"{self.system.dim}"
            )
        if not self.t_off > 0:
            raise ConfigurationError(f"T_off must be positive, got {self.t_off}")
        if not 0 < self.cfl <= 1:
            raise ConfigurationError(f"CFL number must be in (0, 1], got {self.cfl}")
        if self.accuracy not in ("first", "second"):
            raise ConfigurationError(f"unknown accuracy {self.accuracy!r}")
        if self.save_dt is not None and not self.save_dt > 0:
            raise ConfigurationError(f"save_dt must be positive, got {self.save_dt}")
        if self.grid.ndim >= COARSE_DIM:
            if max(self.grid.counts) > COARSE_MAX_NODES:
                raise ConfigurationError(
                    f"{self.grid.ndim}-D solves are supported only up to "
                    f"{COARSE_MAX_NODES} nodes per axis"
                )
            logger.warning(
                f"Solving a {self.grid.ndim}-D problem on a coarse grid; "
                "expect loose tracking bounds"
            )

    def describe(self) -> dict:
        return {
            "system": self.system.name,
            "grid": self.grid.describe(),
            "t_off": self.t_off,
            "cfl": self.cfl,
            "accuracy": self.accuracy,
            "save_dt": self.save_dt,
        }


@dataclass
class SolveDiagnostics:
    steps: int = 0
    cfl_shrinks: int = 0
    min_dt: float = math.inf
    max_dt: float = 0.0
    max_alpha: list[float] = field(default_factory=list)
    monotonicity_defect: float = 0.0

    def as_dict(self) -> dict:
        return {
            "steps": self.steps,
            "cfl_shrinks": self.cfl_shrinks,
            "min_dt": self.min_dt if self.steps else 0.0,
            "max_dt": self.max_dt,
            "max_alpha": self.max_alpha,
            "monotonicity_defect": self.monotonicity_defect,
        }


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def one_sided_gradients(
    values: np.ndarray, spacing: np.ndarray, accuracy: Accuracy = "first"
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Backward (p⁻) and forward (p⁺) differences per axis.

    At the faces the missing difference copies the one-sided interior one.
    """
    minus_all, plus_all = [], []
    for axis, h in enumerate(spacing):
        moved = np.moveaxis(values, axis, 0)
        diff = np.diff(moved, axis=0) / h
        minus = np.empty_like(moved)
        plus = np.empty_like(moved)
        minus[1:] = diff
        minus[0] = diff[0]
        plus[:-1] = diff
        plus[-1] = diff[-1]
        if accuracy == "second" and moved.shape[0] >= 3:
            curvature = np.zeros_like(moved)
            curvature[1:-1] = np.diff(moved, n=2, axis=0) / h**2
            minus[1:] += 0.5 * h * _minmod(curvature[:-1], curvature[1:])
            plus[:-1] -= 0.5 * h * _minmod(curvature[:-1], curvature[1:])
        minus_all.append(np.moveaxis(minus, 0, axis))
        plus_all.append(np.moveaxis(plus, 0, axis))
    return minus_all, plus_all


class _Stepper:
    """One solve's worth of grid, cost and scheme state."""

    def __init__(self, problem: HJIProblem):
        self.problem = problem
        self.system = problem.system
        self.spacing = problem.grid.spacing
        self.mesh = problem.grid.mesh()
        self.diagnostics = SolveDiagnostics(max_alpha=[0.0] * problem.grid.ndim)

    def rate(self, values: np.ndarray, t: float) -> np.ndarray:
        """∂V/∂τ in backward time τ = T_off - t."""
        minus, plus = one_sided_gradients(values, self.spacing, self.problem.accuracy)
        costate_avg = 0.5 * (np.stack(minus) + np.stack(plus))

        ham = hamiltonian(self.system, t, self.mesh, costate_avg)

        # Per-axis bound on |g| over every admissible input, not just the optimal ones
        alpha = speed_bound(self.system, t, self.mesh)
        for axis, value in enumerate(alpha):
            self.diagnostics.max_alpha[axis] = max(
                self.diagnostics.max_alpha[axis], float(value)
            )

        dissipation = sum(
            alpha[axis] * 0.5 * (plus[axis] - minus[axis])
            for axis in range(len(alpha))
        )
        return ham + dissipation

    def stable_dt(self, t: float) -> float:
        speeds = speed_bound(self.system, t, self.mesh)
        rate = float(np.sum(speeds / self.spacing))
        if rate <= 0:
            return math.inf
        return self.problem.cfl / rate

    def step(self, values: np.ndarray, t: float, dt: float) -> np.ndarray:
        stage = values + dt * self.rate(values, t)
        stage = stage + dt * self.rate(stage, t - dt)
        return 0.5 * (values + stage)


def _save_times(t_off: float, save_dt: float | None) -> list[float]:
    """Descending stop times the integration must land on exactly."""
    if save_dt is None:
        return [0.0]
    count = math.floor(t_off / save_dt + 1e-9)
    stops = [t_off - k * save_dt for k in range(1, count + 1)]
    stops = [t for t in stops if t > _TIME_EPS]
    return [*stops, 0.0]


def solve(
    problem: HJIProblem,
    progress: Callable[[float], None] | None = None,
) -> ValueFunction:
    """Integrate backward from T_off to 0 and return the stored slices.

    ``progress`` receives the fraction of [0, T_off] covered after each step.
    """
    stepper = _Stepper(problem)
    grid = problem.grid
    cost = error_cost(problem.system.error_map, stepper.mesh)
    terminal = cost.astype(np.float32)

    values = terminal.astype(np.float64)
    t = problem.t_off
    times = [t]
    slices = [terminal]
    stops = _save_times(problem.t_off, problem.save_dt)
    diagnostics = stepper.diagnostics

    with logfire.span(
        "🌊 HJI solve",
        case=problem.system.name,
        operation="solve",
        nodes=grid.size,
        t_off=problem.t_off,
    ):
        for stop in stops:
            while t - stop > _TIME_EPS:
                dt = min(stepper.stable_dt(t), t - stop)
                # The speed bound can grow inside the step for time-varying drift
                later = stepper.stable_dt(t - dt)
                if later < dt:
                    dt = later
                    diagnostics.cfl_shrinks += 1

                previous = values
                values = np.maximum(stepper.step(values, t, dt), cost)
                if not np.all(np.isfinite(values)):
                    raise SolverError(
                        f"non-finite value function at t={t - dt:.6f} after "
                        f"{diagnostics.steps} steps"
                    )
                diagnostics.monotonicity_defect = max(
                    diagnostics.monotonicity_defect,
                    float(np.max(previous - values)),
                )

                t = stop if abs(t - dt - stop) <= _TIME_EPS else t - dt
                diagnostics.steps += 1
                diagnostics.min_dt = min(diagnostics.min_dt, dt)
                diagnostics.max_dt = max(diagnostics.max_dt, dt)

                if problem.save_dt is None and t > stop:
                    times.append(t)
                    slices.append(values.astype(np.float32))
                if progress is not None:
                    progress(1.0 - t / problem.t_off)
            times.append(stop)
            slices.append(values.astype(np.float32))

        logfire.info(
            "HJI solve finished",
            case=problem.system.name,
            steps=diagnostics.steps,
            monotonicity_defect=diagnostics.monotonicity_defect,
        )

    times_arr = np.array(times[::-1])
    slices_arr = np.stack(slices[::-1])
    return ValueFunction(
        grid=grid,
        times=times_arr,
        slices=slices_arr,
        l_field=terminal,
        meta={"problem": problem.describe(), "diagnostics": diagnostics.as_dict()},
    )
