"""Online replanning and tracking for time-varying and periodic systems.

Each control period runs, in order: goal check, sensing, the replan trigger,
an optional replan, then the tracking controller on the current plan. In
periodic mode every value-function query uses the mapped time t_c = t - offset,
where offset shifts the replan instant into the earliest equivalent interval.
"""

from dataclasses import dataclass, field
import math
import time
from typing import Literal, Protocol

import numpy as np

from helpers.logger import logger
from helpers.observability import logfire
from wavetrack.core.config import config
from wavetrack.core.errors import (
    ConfigurationError,
    InvarianceError,
    PlanningInfeasibleError,
    ReinitializationError,
)
from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.hj.control import optimal_control
from wavetrack.hj.value_function import ValueFunction, value_at, value_query
from wavetrack.planner.lattice import plan_over_interval
from wavetrack.planner.types import PlanRequest
from wavetrack.replanner.choices import choose_level, choose_planning_state
from wavetrack.replanner.policies import LevelPolicy, ReinitPolicy, ReplanPolicy
from wavetrack.replanner.timing import (
    ReplanState,
    earliest_equiv_interval,
    should_replan,
)
from wavetrack.safesets.constraints import ConstraintMode, build_constraint_set
from wavetrack.safesets.occupancy import OccupancyGrid
from wavetrack.sim.log import SimLog

_TIME_EPS = 1e-9


class Plant(Protocol):
    state: np.ndarray

    def disturbance(self, t: float) -> np.ndarray: ...

    def step(self, t: float, u_s, dt: float) -> np.ndarray: ...


class World(Protocol):
    workspace: OccupancyGrid

    @property
    def goal_count(self) -> int: ...

    @property
    def known_obstacles(self) -> OccupancyGrid: ...

    @property
    def known_count(self) -> int: ...

    def sense(self, s, t: float) -> bool: ...

    def goal_grid(self, index: int) -> OccupancyGrid: ...

    def in_goal(self, s, index: int) -> bool: ...

    def collision(self, s) -> bool: ...


@dataclass
class OnlineSettings:
    """Loop parameters resolved from a scenario."""

    mode: Literal["time_varying", "periodic"]
    t_run: float
    planner_box: InputBox
    sample_period: float = 0.2
    control_period: float = field(default_factory=lambda: config.control_period)
    tau: float | None = None
    horizon: float | None = None
    replan: ReplanPolicy = field(default_factory=ReplanPolicy)
    level: LevelPolicy = field(default_factory=LevelPolicy)
    reinit: ReinitPolicy = field(default_factory=ReinitPolicy)
    goal_required: bool = True
    q_matrix: np.ndarray = field(default_factory=lambda: np.eye(2))
    r_matrix: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(2))
    p_ref: np.ndarray | None = None
    constraint_mode: ConstraintMode = "ball"
    strict_invariance: bool = True
    threads: int | None = None

    def __post_init__(self):
        if self.mode == "periodic":
            if self.tau is None or not self.tau > 0:
                raise ConfigurationError("periodic mode needs a positive period τ")
            if self.horizon is None:
                raise ConfigurationError("periodic mode needs a planning horizon T′")


class OnlineLoop:
    """Closed loop of one plant, one map and one stored value function."""

    def __init__(
        self,
        system: RelativeSystem,
        value_fn: ValueFunction,
        plant: Plant,
        world: World,
        settings: OnlineSettings,
        log: SimLog | None = None,
    ):
        self.system = system
        self.value_fn = value_fn
        self.plant = plant
        self.world = world
        self.settings = settings
        self.log = log or SimLog()
        self.epsilon_grid = value_fn.epsilon_grid(system.error_map)
        self._check_horizons()

        self.state: ReplanState | None = None
        self.goal_index = 0
        self._region_entered = False
        self._trail: list[list[float]] = []

    def _check_horizons(self):
        settings = self.settings
        t_off = self.value_fn.t_off
        if settings.mode == "time_varying":
            if settings.t_run > t_off + _TIME_EPS:
                raise ConfigurationError(
                    f"T_run = {settings.t_run} exceeds T_off = {t_off}"
                )
            return
        if t_off <= settings.tau:
            raise ConfigurationError(f"periodic mode needs T_off > τ = {settings.tau}")
        if settings.horizon > t_off - settings.tau + _TIME_EPS:
            raise ConfigurationError(
                f"T′ = {settings.horizon} exceeds T_off - τ = {t_off - settings.tau:.4f}"
            )

    @property
    def replan_policy(self) -> ReplanPolicy:
        """Periodic mode always expires plans after T′."""
        policy = self.settings.replan
        if self.settings.mode == "periodic" and policy.horizon_expiry is None:
            return policy.model_copy(update={"horizon_expiry": self.settings.horizon})
        return policy

    def run(self) -> SimLog:
        settings = self.settings
        dt = settings.control_period
        total_steps = int(math.floor(settings.t_run / dt + _TIME_EPS))
        log = self.log
        policy = self.replan_policy

        for step in range(total_steps + 1):
            t = step * dt
            s = np.asarray(self.plant.state, dtype=float).copy()
            self._trail.append([float(s[0]), float(s[1])])

            forced = False
            if self.world.in_goal(s, self.goal_index):
                log.event(t, "goal", goal=self.goal_index)
                logger.info(f"🎯 Goal {self.goal_index} reached at t={t:.2f}")
                self.goal_index += 1
                if self.goal_index >= self.world.goal_count:
                    log.outcome = "goal"
                    self._record(t, s, np.zeros(2), final=True)
                    break
                forced = policy.on_goal_hit

            changed = self.world.sense(s, t)
            if changed:
                log.event(t, "sense", known=self.world.known_count)

            region = settings.level.region
            if region is not None and region.active(s):
                self._region_entered = True

            if should_replan(policy, self.state, t, changed or forced, s):
                try:
                    self.state = self.replan(t, s)
                except PlanningInfeasibleError as e:
                    log.event(
                        t,
                        "infeasible",
                        message=str(e),
                        blocked_step=e.blocked_step,
                        blocked_time=e.blocked_time,
                    )
                    logger.warning(f"⛔ Planning infeasible at t={t:.2f}: {e}")
                    log.outcome = "infeasible"
                    break
                except ReinitializationError as e:
                    log.event(t, "reinit_failed", message=str(e))
                    logger.warning(f"⛔ No viable planner state at t={t:.2f}: {e}")
                    log.outcome = "reinit_failed"
                    break

            if policy.region_trigger is not None:
                self.state.region_active = policy.region_trigger.active(s)

            if step == total_steps:
                log.outcome = "t_run"
                self._record(t, s, np.zeros(2), final=True)
                break

            u_s = self._record(t, s, None)
            self.plant.step(t, u_s, dt)

        logger.info(f"🏁 Run finished: {log.outcome} after {len(log.rows)} samples")
        return log

    def _record(self, t: float, s: np.ndarray, u_s, final: bool = False) -> np.ndarray:
        """Evaluate the controller at t, log one trace row and return u_s."""
        state = self.state
        if state is None:
            reference = s[:2].copy()
            t_c, level, value = t, math.nan, math.nan
            u_s = np.zeros(2) if u_s is None else u_s
        else:
            reference = state.planner_state(t)
            t_c = min(max(state.mapped_time(t), 0.0), self.value_fn.t_off)
            r = self.system.relative_state(s, reference)
            value, extrapolated = value_query(self.value_fn, r, t_c)
            if extrapolated:
                self.log.extrapolated_samples += 1
            level = state.level
            if u_s is None:
                u_s = optimal_control(self.value_fn, self.system, r, t_c)

        if self.world.collision(s):
            self.log.event(t, "collision", x=float(s[0]), z=float(s[1]))
            logger.error(f"💥 Collision at t={t:.2f}, position ({s[0]:.3f}, {s[1]:.3f})")

        disturbance = np.zeros(4) if final else self.plant.disturbance(t)
        self.log.record(
            (t, *s[:4], *reference[:2], *u_s[:2], *disturbance[:4], value, level, t_c)
        )
        return np.asarray(u_s, dtype=float)

    def _interval(self, t: float) -> tuple[float, float, float]:
        """(t_i, t_f, offset) for a replan at wall time t."""
        settings = self.settings
        if settings.mode == "time_varying":
            return t, settings.t_run, 0.0
        t_i, t_f = earliest_equiv_interval(t, t + settings.horizon, settings.tau)
        if t_f > self.value_fn.t_off + _TIME_EPS:
            raise InvarianceError(
                f"mapped interval [{t_i:.3f}, {t_f:.3f}] leaves [0, {self.value_fn.t_off}]"
            )
        return t_i, t_f, t - t_i

    def replan(self, t: float, s: np.ndarray) -> ReplanState:
        """Choose c_k and p_k at (t, s), rebuild the constraints and plan.

        Raises:
            PlanningInfeasibleError: If no trajectory satisfies the constraints
            ReinitializationError: If no viable planner state exists
            InvarianceError: If a replan hypothesis fails
        """
        settings = self.settings
        previous = self.state
        k = 0 if previous is None else previous.k + 1
        log = self.log

        if (
            settings.mode == "periodic"
            and previous is not None
            and t - previous.t_k > self.value_fn.t_off - settings.tau + _TIME_EPS
        ):
            raise InvarianceError(
                f"replans at {previous.t_k:.3f} and {t:.3f} are further apart "
                "than T_off - τ"
            )

        t_i, t_f, offset = self._interval(t)
        with logfire.span("🔁 Replan", replan=k, operation="replan", t=round(t, 3)):
            initial_floor = None if previous is None else previous.initial_floor
            choice = choose_level(
                settings.level,
                self.value_fn,
                self.system,
                s,
                t_i,
                initial_floor=initial_floor,
                region_entered=self._region_entered,
            )
            level = choice.level
            if choice.clamped:
                log.event(
                    t, "clamp", requested=choice.requested, floor=choice.floor, level=level
                )

            goal = self.world.goal_grid(self.goal_index)
            known = self.world.known_obstacles
            constraints = self._constraints(known, goal, t_i, t_f, level)

            previous_point = None if previous is None else previous.planner_state(t)
            p_k = choose_planning_state(
                settings.reinit,
                self.value_fn,
                self.system,
                s,
                t_i,
                level,
                constraints.obstacles[0],
                constraints.goals[0],
                raw_goal=goal,
                previous=previous_point,
            )

            v_k = value_at(self.value_fn, self.system.relative_state(s, p_k), t_i)
            if v_k > level:
                slack = v_k - level
                if settings.strict_invariance and slack > self.epsilon_grid:
                    raise InvarianceError(
                        f"V at the new planner state is {v_k:.4f}, above level "
                        f"{level:.4f} by more than the grid slack"
                    )
                kind = "invariance" if slack > self.epsilon_grid else "clamp"
                log.event(t, kind, requested=level, value=v_k, level=v_k)
                level = v_k
                constraints = self._constraints(known, goal, t_i, t_f, level)

            request = PlanRequest(
                t_i=t_i,
                t_f=t_f,
                p0=p_k,
                constraints=constraints,
                planner_box=settings.planner_box,
                goal_required=settings.goal_required,
                q_matrix=settings.q_matrix,
                r_matrix=settings.r_matrix,
                p_ref=settings.p_ref,
            )
            started = time.monotonic()
            plan = plan_over_interval(request)
            plan_ms = (time.monotonic() - started) * 1000.0

        wall_plan = plan.shifted(offset)
        log.event(
            t,
            "replan",
            k=k,
            t_i=t_i,
            t_f=t_f,
            offset=offset,
            level=level,
            floor=choice.floor,
            p_k=[float(v) for v in p_k],
            goal=self.goal_index,
            steps=plan.steps,
            cost=plan.cost,
            expanded=plan.expanded,
            plan_ms=plan_ms,
        )
        log.plans.append((k, wall_plan))
        log.snapshots.append(
            {
                "k": k,
                "t": t,
                "level": level,
                "workspace": {
                    "lower": list(known.lower),
                    "resolution": known.resolution,
                    "shape": list(known.shape),
                },
                "known_obstacles": known.occupied_indices(),
                "planner_obstacles": constraints.obstacles[0].occupied_indices(),
                "planner_goal": constraints.goals[0].occupied_indices(),
                "plan": wall_plan.states.tolist(),
                "trajectory": list(self._trail),
            }
        )
        logger.info(
            f"🔁 Replan {k} at t={t:.2f}: level {level:.4f}, {plan.steps} steps, "
            f"{plan_ms:.0f} ms"
        )

        if previous is None:
            initial_floor = level
        region_active = previous.region_active if previous is not None else False
        return ReplanState(
            k=k,
            t_k=t,
            s_k=s.copy(),
            p_k=np.asarray(p_k, dtype=float),
            level=level,
            plan=wall_plan,
            interval=(t_i, t_f),
            offset=offset,
            initial_floor=initial_floor,
            region_active=region_active,
            region_entered=self._region_entered,
        )

    def _constraints(self, known, goal, t_i: float, t_f: float, level: float):
        return build_constraint_set(
            self.value_fn,
            known,
            goal,
            t_i,
            t_f,
            self.settings.sample_period,
            level,
            mode=self.settings.constraint_mode,
            threads=self.settings.threads,
        )
