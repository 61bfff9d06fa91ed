"""Tests for replan timing, level and state choices, and the online loop."""

import numpy as np
import pytest

from wavetrack.core.errors import (
    ConfigurationError,
    InvarianceError,
    ReinitializationError,
)
from wavetrack.core.geometry import Rect
from wavetrack.dynamics.boxes import InputBox
from wavetrack.planner.types import PlannedTrajectory
from wavetrack.replanner.choices import choose_level, choose_planning_state
from wavetrack.replanner.loop import OnlineLoop, OnlineSettings
from wavetrack.replanner.policies import (
    LevelPolicy,
    RegionTrigger,
    ReinitPolicy,
    ReplanPolicy,
)
from wavetrack.replanner.timing import (
    ReplanState,
    earliest_equiv_interval,
    should_replan,
)
from wavetrack.safesets.occupancy import OccupancyGrid
from wavetrack.sim.world import MapWorld
from wavetrack.tests.conftest import position_error_value_fn

REGION = Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
LOCAL = OccupancyGrid.empty((0.5, 2.5), (1.5, 3.5), 0.1)
S = np.array([1.0, 3.0, 0.0, 0.0])


def _state(t_k: float = 0.0, region_active: bool = False) -> ReplanState:
    plan = PlannedTrajectory(
        times=np.array([t_k]), states=np.array([[0.0, 3.0]]), controls=np.zeros((0, 2)),
        goal_time=None, cost=0.0,
    )
    return ReplanState(
        k=0, t_k=t_k, s_k=S, p_k=np.array([0.0, 3.0]), level=0.2, plan=plan,
        interval=(t_k, t_k + 4.0), region_active=region_active,
    )


class TestEarliestEquivalentInterval:
    """Test suite for periodic interval mapping."""

    @pytest.mark.parametrize(
        ("t_a", "t_b", "expected"),
        [
            (23.0, 26.0, (3.0, 6.0)),
            (0.0, 8.0, (0.0, 8.0)),
            (20.0, 24.0, (0.0, 4.0)),
            (9.99, 12.0, (9.99, 12.0)),
            (10.0, 14.0, (0.0, 4.0)),
            (4.0, 8.0, (4.0, 8.0)),
            (12.0, 16.0, (2.0, 6.0)),
            (35.5, 37.0, (5.5, 7.0)),
            (7.0, 7.0, (7.0, 7.0)),
            (100.0, 103.0, (0.0, 3.0)),
            (0.0, 4.0, (0.0, 4.0)),
            (3.0, 7.0, (3.0, 7.0)),
            (10.5, 14.5, (0.5, 4.5)),
            (19.9, 23.9, (9.9, 13.9)),
            (40.0, 44.0, (0.0, 4.0)),
            (56.0, 60.0, (6.0, 10.0)),
            (8.0, 12.0, (8.0, 12.0)),
            (25.0, 29.0, (5.0, 9.0)),
            (31.25, 35.25, (1.25, 5.25)),
            (0.5, 0.5, (0.5, 0.5)),
        ],
    )
    def test_examples(self, t_a, t_b, expected):
        """Test shifting by whole periods of 10 s."""
        assert earliest_equiv_interval(t_a, t_b, 10.0) == pytest.approx(expected)

    def test_length_preserved(self):
        """Test the mapped interval keeps its length and starts in [0, τ)."""
        for t_a in np.linspace(0.0, 50.0, 37):
            t_i, t_f = earliest_equiv_interval(t_a, t_a + 3.3, 7.0)
            assert 0.0 <= t_i < 7.0
            assert t_f - t_i == pytest.approx(3.3)

    @pytest.mark.parametrize(("t_a", "t_b", "tau"), [(1.0, 2.0, 0.0), (-1.0, 2.0, 10.0), (3.0, 2.0, 10.0)])
    def test_invalid(self, t_a, t_b, tau):
        """Test non-positive periods and malformed intervals."""
        with pytest.raises(ConfigurationError):
            earliest_equiv_interval(t_a, t_b, tau)


class TestShouldReplan:
    """Test suite for replan triggers."""

    def test_first_step(self):
        """Test there is always a plan at the start."""
        assert should_replan(ReplanPolicy(), None, 0.0, False, S)

    def test_constraint_change(self):
        """Test a newly sensed obstacle triggers."""
        assert should_replan(ReplanPolicy(), _state(), 1.0, True, S)
        assert not should_replan(ReplanPolicy(), _state(), 1.0, False, S)

    def test_fixed_period(self):
        """Test the periodic trigger fires at the period boundary."""
        policy = ReplanPolicy(fixed_period=2.0)

        assert not should_replan(policy, _state(1.0), 2.98, False, S)
        assert should_replan(policy, _state(1.0), 3.0, False, S)

    def test_horizon_expiry(self):
        """Test plans expire after T′."""
        policy = ReplanPolicy(horizon_expiry=4.0)

        assert not should_replan(policy, _state(4.0), 7.9, False, S)
        assert should_replan(policy, _state(4.0), 8.0, False, S)

    def test_region_entry_fires_once(self):
        """Test the region trigger fires on entry, not while inside."""
        policy = ReplanPolicy(region_trigger=RegionTrigger(axis="z", above=3.6))
        inside = np.array([0.0, 3.7, 0.0, 0.0])

        assert should_replan(policy, _state(region_active=False), 1.0, False, inside)
        assert not should_replan(policy, _state(region_active=True), 1.0, False, inside)
        assert not should_replan(policy, _state(), 1.0, False, S)


class TestPolicies:
    """Test suite for policy models."""

    def test_region_trigger_is_strict(self):
        """Test z > 3.6 excludes the boundary."""
        trigger = RegionTrigger(axis="z", above=3.6)

        assert trigger.active([0.0, 3.61])
        assert not trigger.active([0.0, 3.6])

    def test_region_trigger_band(self):
        """Test combined above and below bounds."""
        trigger = RegionTrigger(axis="x", above=-1.0, below=1.0)

        assert trigger.active([0.0, 0.0])
        assert not trigger.active([1.5, 0.0])

    def test_region_trigger_needs_bound(self):
        """Test an unbounded trigger is refused."""
        with pytest.raises(ValueError, match="above"):
            RegionTrigger(axis="z")

    def test_fixed_level_needs_value(self):
        """Test mode fixed without c is refused."""
        with pytest.raises(ValueError, match="'c'"):
            LevelPolicy(mode="fixed")

    def test_region_switch_needs_region(self):
        """Test region_switch without c_high and region is refused."""
        with pytest.raises(ValueError, match="c_high"):
            LevelPolicy(mode="region_switch", c_high=0.7)


class TestChooseLevel:
    """Test suite for sublevel choices."""

    def test_fixed(self, error_value_fn, case2_system):
        """Test a fixed level above the floor is used as is."""
        choice = choose_level(
            LevelPolicy(mode="fixed", c=0.3), error_value_fn, case2_system, S, 0.0
        )

        assert choice.level == pytest.approx(0.3)
        assert not choice.clamped

    def test_fixed_below_floor_is_clamped(self, error_value_fn, case2_system):
        """Test a level below the feasible floor is raised to it."""
        choice = choose_level(
            LevelPolicy(mode="fixed", c=-0.1), error_value_fn, case2_system, S, 0.0
        )

        assert choice.clamped
        assert choice.level == pytest.approx(choice.floor)
        assert choice.requested == pytest.approx(-0.1)

    def test_floor(self, error_value_fn, case2_system):
        """Test the floor mode uses the smallest feasible level."""
        choice = choose_level(LevelPolicy(mode="floor"), error_value_fn, case2_system, S, 0.0)

        assert choice.level == pytest.approx(0.0, abs=1e-9)

    def test_initial_floor_is_held(self, error_value_fn, case2_system):
        """Test the first replan's level is reused later."""
        choice = choose_level(
            LevelPolicy(mode="initial_floor"),
            error_value_fn,
            case2_system,
            S,
            3.0,
            initial_floor=0.15,
        )

        assert choice.level == pytest.approx(0.15)

    def test_region_switch(self, error_value_fn, case2_system):
        """Test c_low before and c_high after the region is entered."""
        policy = LevelPolicy(
            mode="region_switch",
            c_low=0.2,
            c_high=0.7,
            region=RegionTrigger(axis="z", above=3.6),
        )

        before = choose_level(policy, error_value_fn, case2_system, S, 0.0)
        after = choose_level(
            policy, error_value_fn, case2_system, S, 0.0, region_entered=True
        )

        assert before.level == pytest.approx(0.2)
        assert after.level == pytest.approx(0.7)


class TestChoosePlanningState:
    """Test suite for planner-state reinitialisation."""

    def test_continue_previous(self, error_value_fn, case2_system):
        """Test the previous plan's point is kept."""
        p_k = choose_planning_state(
            ReinitPolicy(), error_value_fn, case2_system, S, 0.0, 0.21,
            LOCAL, LOCAL, previous=np.array([1.1, 3.1]),
        )

        np.testing.assert_allclose(p_k, [1.1, 3.1])

    def test_first_plan_starts_at_vehicle(self, error_value_fn, case2_system):
        """Test the first plan zeroes the position error."""
        p_k = choose_planning_state(
            ReinitPolicy(), error_value_fn, case2_system, S, 0.0, 0.21, LOCAL, LOCAL
        )

        np.testing.assert_allclose(p_k, [1.0, 3.0])

    def test_teleport_toward_goal(self, error_value_fn, case2_system):
        """Test the sublevel cell nearest the goal wins, lower z on ties."""
        goal = LOCAL.rasterize(Rect(x_min=1.25, x_max=1.5, z_min=2.5, z_max=3.5), inside=True)

        p_k = choose_planning_state(
            ReinitPolicy(mode="teleport_closest_to_goal"),
            error_value_fn, case2_system, S, 0.0, 0.21, LOCAL, goal,
        )

        np.testing.assert_allclose(p_k, [1.15, 2.95])

    def test_teleport_skips_obstacles(self, error_value_fn, case2_system):
        """Test occupied cells are never chosen."""
        goal = LOCAL.rasterize(Rect(x_min=1.25, x_max=1.5, z_min=2.5, z_max=3.5), inside=True)
        cells = np.zeros(LOCAL.shape, dtype=bool)
        cells[6, :] = True

        p_k = choose_planning_state(
            ReinitPolicy(mode="teleport_closest_to_goal"),
            error_value_fn, case2_system, S, 0.0, 0.21, LOCAL.with_cells(cells), goal,
        )

        np.testing.assert_allclose(p_k, [1.05, 2.85])

    def test_teleport_without_goal_stays_near_vehicle(self, error_value_fn, case2_system):
        """Test an empty goal anchors on the vehicle position."""
        p_k = choose_planning_state(
            ReinitPolicy(mode="teleport_closest_to_goal"),
            error_value_fn, case2_system, S, 0.0, 0.21, LOCAL, LOCAL,
        )

        np.testing.assert_allclose(p_k, [1.05, 3.05])

    def test_teleport_with_empty_sublevel(self, error_value_fn, case2_system):
        """Test a level below V everywhere has no viable state."""
        with pytest.raises(ReinitializationError):
            choose_planning_state(
                ReinitPolicy(mode="teleport_closest_to_goal"),
                error_value_fn, case2_system, S, 0.0, -0.1, LOCAL, LOCAL,
            )


class FollowingPlant:
    """Plant that lands exactly on the reference each control period."""

    def __init__(self, s0):
        self.state = np.asarray(s0, dtype=float)
        self.loop: OnlineLoop | None = None

    def disturbance(self, t: float) -> np.ndarray:
        return np.zeros(4)

    def step(self, t: float, u_s, dt: float) -> np.ndarray:
        reference = self.loop.state.planner_state(t + dt)
        self.state = np.concatenate([reference, [0.0, 0.0]])
        return self.state


def _loop(case2_system, value_fn, world, settings, s0) -> OnlineLoop:
    plant = FollowingPlant(s0)
    loop = OnlineLoop(case2_system, value_fn, plant, world, settings)
    plant.loop = loop
    return loop


class TestOnlineLoop:
    """Closed-loop tests on a coarse map with perfect tracking."""

    def test_time_varying_reaches_goal(self, case2_system):
        """Test sensing-driven replans and arrival without collisions."""
        world = MapWorld(
            REGION,
            obstacles=[
                Rect(x_min=-0.4, x_max=0.0, z_min=3.0, z_max=3.8),
                Rect(x_min=1.2, x_max=1.6, z_min=3.0, z_max=3.6),
            ],
            goals=[Rect(x_min=0.4, x_max=1.2, z_min=4.0, z_max=4.8)],
            sensor_range=1.2,
            resolution=0.1,
        )
        settings = OnlineSettings(
            mode="time_varying",
            t_run=8.0,
            planner_box=InputBox.symmetric(0.5, 2),
            level=LevelPolicy(mode="fixed", c=0.21),
        )
        loop = _loop(case2_system, position_error_value_fn(), world, settings, [-1.0, 3.0, 0.0, 0.0])

        log = loop.run()

        replans = log.events_of("replan")
        sense_times = {e.t for e in log.events_of("sense")}
        assert log.outcome == "goal"
        assert replans[0].t == 0.0
        assert all(e.t in sense_times for e in replans[1:])
        assert log.events_of("collision") == []
        assert all(e.data["offset"] == 0.0 for e in replans)
        assert all(e.data["t_f"] == pytest.approx(8.0) for e in replans)
        assert log.summary()["max_level_excess"] <= 1e-6

    def test_periodic_maps_intervals(self, case2_system):
        """Test plans expire every T′ and late replans map back by τ."""
        world = MapWorld(
            REGION,
            obstacles=[],
            goals=[Rect(x_min=1.0, x_max=1.6, z_min=5.0, z_max=5.6)],
            sensor_range=1.2,
            resolution=0.1,
        )
        settings = OnlineSettings(
            mode="periodic",
            t_run=12.0,
            planner_box=InputBox.symmetric(0.05, 2),
            tau=10.0,
            horizon=4.0,
            level=LevelPolicy(mode="fixed", c=0.21),
            goal_required=False,
        )
        loop = _loop(
            case2_system, position_error_value_fn(t_off=14.0), world, settings,
            [-1.4, 2.6, 0.0, 0.0],
        )

        log = loop.run()

        replans = log.events_of("replan")
        assert [e.t for e in replans] == pytest.approx([0.0, 4.0, 8.0, 12.0])
        assert [e.data["offset"] for e in replans] == pytest.approx([0.0, 0.0, 0.0, 10.0])
        assert all(e.data["t_f"] <= 14.0 + 1e-9 for e in replans)
        assert log.outcome == "t_run"
        assert log.column("t_c")[-1] == pytest.approx(2.0)
        assert log.plans[-1][1].times[0] == pytest.approx(12.0)

    def test_periodic_horizon_must_fit(self, case2_system):
        """Test T′ above T_off - τ is refused at construction."""
        world = MapWorld(REGION, [], [REGION], 1.2, 0.1)
        settings = OnlineSettings(
            mode="periodic",
            t_run=12.0,
            planner_box=InputBox.symmetric(0.5, 2),
            tau=10.0,
            horizon=4.5,
        )

        with pytest.raises(ConfigurationError, match="T_off"):
            _loop(case2_system, position_error_value_fn(t_off=14.0), world, settings, S)

    def test_run_longer_than_horizon(self, case2_system):
        """Test a time-varying run cannot outlast the value function."""
        world = MapWorld(REGION, [], [REGION], 1.2, 0.1)
        settings = OnlineSettings(
            mode="time_varying", t_run=12.0, planner_box=InputBox.symmetric(0.5, 2)
        )

        with pytest.raises(ConfigurationError, match="T_run"):
            _loop(case2_system, position_error_value_fn(), world, settings, S)

    def test_periodic_settings_need_period(self):
        """Test periodic mode without τ is refused."""
        with pytest.raises(ConfigurationError, match="τ"):
            OnlineSettings(
                mode="periodic", t_run=10.0, planner_box=InputBox.symmetric(0.5, 2), horizon=4.0
            )

    def test_replans_too_far_apart(self, case2_system):
        """Test the periodic loop refuses a gap longer than T_off - τ."""
        world = MapWorld(REGION, [], [REGION], 1.2, 0.1)
        settings = OnlineSettings(
            mode="periodic",
            t_run=12.0,
            planner_box=InputBox.symmetric(0.5, 2),
            tau=10.0,
            horizon=4.0,
            goal_required=False,
        )
        loop = _loop(case2_system, position_error_value_fn(t_off=14.0), world, settings, S)
        loop.state = _state(t_k=0.0)

        with pytest.raises(InvarianceError):
            loop.replan(5.0, S)
