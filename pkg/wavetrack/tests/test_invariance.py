"""Closed-loop checks that the optimal tracker keeps the error inside its bound.

Rollouts use the simulator's RK4 step at half the largest solver step, with
the inputs held over each step.
"""

import numpy as np
import pytest

from wavetrack.hj.control import optimal_control, worst_adversary
from wavetrack.hj.grid import Grid
from wavetrack.hj.solver import HJIProblem, solve
from wavetrack.hj.value_function import value_at
from wavetrack.oracles.analytic import Analytic1DGame, game_system
from wavetrack.sim.integrate import integrate_step

GAME_GRID = Grid(lo=(-1.0,), hi=(1.0,), counts=(101,))


def _rollout_dt(value_fn) -> float:
    return 0.5 * value_fn.meta["diagnostics"]["max_dt"]


def _rollout(value_fn, system, r0: float, t_end: float, adversary, rng) -> float:
    """Largest V(t, r(t)) - V(0, r0) along one closed-loop rollout."""

    def field(t, r, inputs, d):
        return system.field(t, r, inputs[0], inputs[1], d)

    dt = _rollout_dt(value_fn)
    r = np.array([r0])
    start = value_at(value_fn, r, 0.0)
    worst = -np.inf
    for k in range(int(t_end / dt)):
        t = k * dt
        u_s = optimal_control(value_fn, system, r, t)
        if adversary == "worst":
            u_p, d = worst_adversary(value_fn, system, r, t)
        else:
            u_p = rng.uniform(system.planner_box.lower, system.planner_box.upper)
            d = np.zeros(system.disturbance_box.dim)
        r = integrate_step(field, r, (u_s, u_p), d, t, dt)
        worst = max(worst, value_at(value_fn, r, t + dt) - start)
    return worst


class TestTrackingInvariance:
    """V(t, r(t)) never exceeds V(0, r0) beyond the grid slack."""

    def test_tracker_dominates_worst_planner(self, tracker_game, tracker_game_value_fn):
        """Test 200 starts against the worst-case planner."""
        system = game_system(tracker_game)
        slack = tracker_game_value_fn.epsilon_grid(system.error_map)
        rng = np.random.default_rng(11)

        excess = [
            _rollout(tracker_game_value_fn, system, r0, 1.0, "worst", rng)
            for r0 in rng.uniform(-0.9, 0.9, 200)
        ]

        assert max(excess) <= slack

    def test_tracker_dominates_random_planner(self, tracker_game, tracker_game_value_fn):
        """Test 50 starts against a planner with random inputs."""
        system = game_system(tracker_game)
        slack = tracker_game_value_fn.epsilon_grid(system.error_map)
        rng = np.random.default_rng(13)

        excess = [
            _rollout(tracker_game_value_fn, system, r0, 1.0, "random", rng)
            for r0 in rng.uniform(-0.9, 0.9, 50)
        ]

        assert max(excess) <= slack

    def test_adversary_dominates(self):
        """Test the bound still holds while the error grows."""
        game = Analytic1DGame(tracker_speed=1.0, planner_speed=2.0)
        system = game_system(game)
        value_fn = solve(HJIProblem(system=system, grid=GAME_GRID, t_off=1.0))
        solve_error = 0.05 + 0.1 * value_fn.meta["diagnostics"]["max_dt"]
        slack = value_fn.epsilon_grid(system.error_map) + 2 * solve_error
        rng = np.random.default_rng(12)

        excess = [
            _rollout(value_fn, system, r0, 0.7, "worst", rng)
            for r0 in rng.uniform(-0.2, 0.2, 50)
        ]

        assert max(excess) <= slack

    def test_rollout_step_is_half_the_solver_step(self, tracker_game_value_fn):
        """Test rollouts never step further than the solver did."""
        max_dt = tracker_game_value_fn.meta["diagnostics"]["max_dt"]

        assert 0 < _rollout_dt(tracker_game_value_fn) == pytest.approx(max_dt / 2)

    def test_error_stays_near_zero(self, tracker_game, tracker_game_value_fn):
        """Test a start at zero error stays within the slack."""
        system = game_system(tracker_game)
        excess = _rollout(
            tracker_game_value_fn, system, 0.0, 1.0, "worst", np.random.default_rng(0)
        )
        peak = excess + value_at(tracker_game_value_fn, [0.0], 0.0)

        assert peak <= tracker_game_value_fn.epsilon_grid(system.error_map)
