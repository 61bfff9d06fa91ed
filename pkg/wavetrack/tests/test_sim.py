"""Tests for disturbances, integration, the map, run logs and scenario assembly."""

import numpy as np
import pytest
import ujson

from wavetrack.core.errors import ConfigurationError, SolverError, StaleArtifactError
from wavetrack.core.geometry import Rect
from wavetrack.core.scenario import Scenario
from wavetrack.dynamics.auv import AuvParams
from wavetrack.dynamics.wave import WaveParams
from wavetrack.planner.types import PlannedTrajectory
from wavetrack.sim.assembly import build_plant, build_settings, build_world
from wavetrack.sim.disturbance import hold_index, sample_disturbance
from wavetrack.sim.integrate import integrate_step
from wavetrack.sim.log import COLUMNS, SimLog
from wavetrack.sim.plant import AuvPlant
from wavetrack.sim.runner import check_model_hash
from wavetrack.sim.world import MapWorld
from wavetrack.tests.conftest import position_error_value_fn

REGION = Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
OBSTACLE = Rect(x_min=-0.4, x_max=0.0, z_min=3.0, z_max=3.8)
GOAL = Rect(x_min=0.4, x_max=1.2, z_min=4.0, z_max=4.8)


def _decay(_t, s, _u, _d):
    return -s


class TestDisturbance:
    """Test suite for the seeded nominal disturbance."""

    def test_pure_function_of_seed_and_interval(self):
        """Test repeated and same-interval queries agree."""
        first = sample_disturbance(5, 0.01, hold=0.2)

        np.testing.assert_array_equal(first, sample_disturbance(5, 0.01, hold=0.2))
        np.testing.assert_array_equal(first, sample_disturbance(5, 0.19, hold=0.2))

    def test_changes_between_intervals_and_seeds(self):
        """Test a new interval or seed draws new values."""
        first = sample_disturbance(5, 0.0, hold=0.2)

        assert not np.array_equal(first, sample_disturbance(5, 0.2, hold=0.2))
        assert not np.array_equal(first, sample_disturbance(6, 0.0, hold=0.2))

    def test_within_bound(self):
        """Test every channel stays inside [-bound, bound]."""
        draws = np.array([sample_disturbance(1, 0.2 * k, 0.001, hold=0.2) for k in range(500)])

        assert draws.shape == (500, 4)
        assert np.all(np.abs(draws) <= 0.001)
        assert draws.std() > 0.0002

    def test_zero_bound(self):
        """Test a zero bound disables the disturbance."""
        np.testing.assert_array_equal(sample_disturbance(1, 3.0, 0.0), np.zeros(4))

    @pytest.mark.parametrize(
        ("t", "expected"), [(0.0, 0), (0.19, 0), (0.2, 1), (0.6, 3), (-0.1, 0)]
    )
    def test_hold_index(self, t, expected):
        """Test interval boundaries belong to the later interval."""
        assert hold_index(t, 0.2) == expected


class TestIntegrateStep:
    """Test suite for RK4 integration."""

    def _error(self, dt: float) -> float:
        s = np.array([1.0])
        for k in range(int(round(1.0 / dt))):
            s = integrate_step(_decay, s, None, None, k * dt, dt)
        return abs(float(s[0]) - np.exp(-1.0))

    def test_fourth_order(self):
        """Test halving the step cuts the error about sixteenfold."""
        ratio = self._error(0.1) / self._error(0.05)

        assert 12.0 < ratio < 20.0
        assert self._error(0.1) < 1e-6

    @pytest.mark.parametrize("dt", [0.0, -0.1])
    def test_non_positive_step(self, dt):
        """Test dt ≤ 0 is a configuration error."""
        with pytest.raises(ConfigurationError):
            integrate_step(_decay, [1.0], None, None, 0.0, dt)

    def test_non_finite_state(self):
        """Test an exploding field is reported."""

        def blow_up(_t, s, _u, _d):
            return np.full_like(s, np.inf)

        with pytest.raises(SolverError, match="non-finite"):
            integrate_step(blow_up, [1.0], None, None, 0.0, 0.1)


class TestMapWorld:
    """Test suite for the map and range sensor."""

    @pytest.fixture
    def world(self):
        return MapWorld(REGION, [OBSTACLE], [GOAL], sensor_range=1.2, resolution=0.1)

    def test_sensing_reveals_once(self, world):
        """Test an obstacle in range is revealed whole, exactly once."""
        assert world.sense([-1.0, 3.0], 0.0)
        assert not world.sense([-1.0, 3.0], 0.02)
        assert world.known_count == 1
        assert world.timeline.change_times == [0.0]

    def test_out_of_range(self, world):
        """Test obstacles beyond the sensor square stay unknown."""
        assert not world.sense([-1.8, 5.5], 0.0)
        assert world.known_obstacles == world.border

    def test_known_obstacles_grow(self, world):
        """Test the known grid adds the rectangle to the region border."""
        border = world.known_obstacles.count

        world.sense([-1.0, 3.0], 0.0)

        assert world.known_obstacles.count == border + 4 * 8

    def test_vehicle_footprint_inflates(self):
        """Test a nonzero half extent dilates every known obstacle."""
        bare = MapWorld(REGION, [OBSTACLE], [GOAL], 1.2, 0.1)
        wide = MapWorld(REGION, [OBSTACLE], [GOAL], 1.2, 0.1, vehicle_half_extent=(0.1, 0.1))

        assert wide.true_obstacles.count > bare.true_obstacles.count

    def test_collision_and_goal(self, world):
        """Test the true map decides collisions and goal arrival."""
        assert world.collision([-0.2, 3.4])
        assert world.collision([2.5, 3.0])
        assert not world.collision([-1.0, 3.0])
        assert world.in_goal([0.8, 4.4], 0)
        assert not world.in_goal([0.0, 4.4], 0)
        assert world.goal_grid(0).count == 8 * 8


class TestSimLog:
    """Test suite for run records."""

    def _log(self) -> SimLog:
        log = SimLog(config_echo={"name": "test"}, disturbance_bound=0.001)
        for k in range(3):
            row = [0.0] * len(COLUMNS)
            row[0] = 0.02 * k
            row[COLUMNS.index("value")] = 0.1
            row[COLUMNS.index("level")] = 0.2
            log.record(row)
        log.event(0.0, "replan", k=0, plan_ms=12.0)
        log.plans.append(
            (0, PlannedTrajectory(np.array([0.0]), np.zeros((1, 2)), np.zeros((0, 2)), None, 0.0))
        )
        log.outcome = "t_run"
        return log

    def test_record_checks_width_and_order(self):
        """Test malformed and non-increasing rows are refused."""
        log = self._log()

        with pytest.raises(ValueError, match="fields"):
            log.record([1.0])
        with pytest.raises(ValueError, match="increase"):
            log.record([0.0] * len(COLUMNS))

    def test_summary(self):
        """Test outcome, counts and the level margin."""
        summary = self._log().summary()

        assert summary["outcome"] == "t_run"
        assert summary["replans"] == 1
        assert summary["max_level_excess"] == pytest.approx(-0.1)
        assert not summary["disturbance_outside_box"]
        assert summary["extrapolated_samples"] == 0
        assert summary["final_time"] == pytest.approx(0.04)

    def test_hash_ignores_wall_clock(self):
        """Test planning times do not change the content hash."""
        first, second = self._log(), self._log()
        second.events[0].data["plan_ms"] = 99.0

        assert first.content_hash() == second.content_hash()
        second.outcome = "goal"
        assert first.content_hash() != second.content_hash()

    def test_write(self, tmp_path):
        """Test the run directory layout."""
        out = self._log().write(tmp_path / "run")

        header = (out / "traces.csv").read_text().splitlines()[0]
        assert header == ",".join(COLUMNS)
        assert (out / "plans" / "plan_000.csv").exists()
        events = (out / "events.jsonl").read_text().splitlines()
        assert ujson.loads(events[0])["kind"] == "replan"
        summary = ujson.loads((out / "summary.json").read_text())
        assert len(summary["content_hash"]) == 64


class TestAuvPlant:
    """Test suite for the ground-truth plant."""

    def test_seeded_runs_repeat(self):
        """Test identical seeds give bitwise identical trajectories."""
        plants = [
            AuvPlant(AuvParams(), WaveParams(), [0.0, 3.0, 0.0, 0.0], seed=4) for _ in range(2)
        ]
        for plant in plants:
            for k in range(50):
                plant.step(0.02 * k, np.array([10.0, -5.0]), 0.02)

        np.testing.assert_array_equal(plants[0].state, plants[1].state)
        assert np.all(np.abs(plants[0].last_disturbance) <= 0.001)

    def test_waves_move_the_vehicle(self):
        """Test the free vehicle drifts with the wave."""
        plant = AuvPlant(
            AuvParams(), WaveParams(), [0.0, 2.5, 0.0, 0.0], disturbance_bound=0.0
        )
        for k in range(100):
            plant.step(0.02 * k, np.zeros(2), 0.02)

        assert np.all(np.isfinite(plant.state))
        assert not np.allclose(plant.state[:2], [0.0, 2.5])


class TestAssembly:
    """Test suite for scenario wiring."""

    def test_time_varying_settings(self, case2_system):
        """Test settings and world built from a time-varying scenario."""
        scenario = Scenario.from_file("scenarios/sim1_case2.json")

        settings = build_settings(scenario, case2_system)
        world = build_world(scenario)
        plant = build_plant(scenario)

        assert settings.mode == "time_varying"
        assert settings.t_run == 8.0
        assert settings.tau is None
        assert settings.constraint_mode == "ball"
        assert settings.strict_invariance
        assert world.goal_count == 1
        assert len(world.obstacles) == 3
        assert plant.seed == 1

    def test_periodic_settings(self, case2_system):
        """Test τ and T′ are carried into the loop settings."""
        scenario = Scenario.from_file("scenarios/periodic_case2.json")

        settings = build_settings(scenario, case2_system)

        assert settings.mode == "periodic"
        assert settings.tau == 10.0
        assert settings.horizon == 4.0
        assert not settings.goal_required

    def test_stress_scales(self, case2_system):
        """Test stress overrides scale the disturbance and relax strictness."""
        scenario = Scenario.from_file("scenarios/sim1_case2.json").with_overrides(
            seed=9, disturbance_scale=5.0
        )

        settings = build_settings(scenario, case2_system)
        plant = build_plant(scenario)

        assert plant.seed == 9
        assert plant.disturbance_bound == pytest.approx(0.005)
        assert not settings.strict_invariance


class TestModelHash:
    """Test suite for stale value-function detection."""

    def _value_fn(self, meta):
        base = position_error_value_fn()
        return type(base)(base.grid, base.times, base.slices, base.l_field, meta=meta)

    def test_matching_hash(self):
        """Test a value function solved for the scenario is accepted."""
        scenario = Scenario.from_file("scenarios/sim1_case2.json")

        check_model_hash(scenario, self._value_fn({"model_hash": scenario.model_hash()}))

    def test_stale_hash(self):
        """Test a hash from another model is refused."""
        scenario = Scenario.from_file("scenarios/sim1_case2.json")

        with pytest.raises(StaleArtifactError):
            check_model_hash(scenario, self._value_fn({"model_hash": "0" * 64}))

    def test_missing_hash_is_tolerated(self):
        """Test bare value functions load with a warning."""
        scenario = Scenario.from_file("scenarios/sim1_case2.json")

        check_model_hash(scenario, self._value_fn({}))
