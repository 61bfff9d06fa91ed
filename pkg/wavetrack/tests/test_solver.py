"""Tests for the HJI solver on problems with closed-form values."""

import numpy as np
import pytest

from wavetrack.core.errors import ConfigurationError
from wavetrack.dynamics.auv import AuvParams, make_case1
from wavetrack.dynamics.boxes import InputBox
from wavetrack.dynamics.fields import (
    AffineField,
    RelativeSystem,
    constant_columns,
    planner_field,
)
from wavetrack.dynamics.wave import WaveParams
from wavetrack.hj.grid import Grid, error_cost
from wavetrack.hj.hamiltonian import optimal_inputs
from wavetrack.hj.solver import HJIProblem, one_sided_gradients, solve
from wavetrack.oracles.analytic import Analytic1DGame, analytic_value, game_system

GAME_GRID = Grid(lo=(-1.0,), hi=(1.0,), counts=(101,))


def _max_error(value_fn, game) -> float:
    r = value_fn.grid.axes[0]
    return max(
        float(np.max(np.abs(value_fn.slices[i] - analytic_value(game, r, t))))
        for i, t in enumerate(value_fn.times)
    )


class TestGrid:
    """Test suite for uniform grids."""

    def test_spacing_and_axes(self):
        """Test node placement with both ends included."""
        grid = Grid(lo=(-1.0, 0.0), hi=(1.0, 2.0), counts=(5, 3))

        np.testing.assert_allclose(grid.spacing, [0.5, 1.0])
        np.testing.assert_allclose(grid.axes[0], [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert grid.mesh().shape == (2, 5, 3)
        assert grid.size == 15

    def test_from_spacing(self):
        """Test node counts derived from a spacing."""
        grid = Grid.from_spacing((-1.0,), (1.0,), 0.02)

        assert grid.counts == (101,)

    @pytest.mark.parametrize(
        ("lo", "hi", "counts"),
        [((0.0,), (0.0,), (5,)), ((0.0,), (1.0,), (2,)), ((0.0, 1.0), (1.0,), (5,))],
    )
    def test_invalid_grids(self, lo, hi, counts):
        """Test degenerate bounds, too few nodes and length mismatch."""
        with pytest.raises(ConfigurationError):
            Grid(lo=lo, hi=hi, counts=counts)

    def test_clamp_flags_outside(self):
        """Test projection onto the grid box."""
        grid = Grid(lo=(-1.0,), hi=(1.0,), counts=(3,))

        clamped, outside = grid.clamp([[0.5], [1.5]])

        np.testing.assert_allclose(clamped[:, 0], [0.5, 1.0])
        assert outside.tolist() == [False, True]

    def test_error_cost_uses_map(self):
        """Test l(r) = ‖C r‖ picks the position axes."""
        error_map = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

        cost = error_cost(error_map, np.array([3.0, 4.0, 100.0]))

        assert float(cost) == pytest.approx(5.0)


class TestOneSidedGradients:
    """Test suite for upwind differences."""

    def test_linear_function_is_exact(self):
        """Test that both differences recover a linear slope."""
        x = np.linspace(0.0, 1.0, 11)

        minus, plus = one_sided_gradients(3.0 * x, np.array([0.1]))

        np.testing.assert_allclose(minus[0], 3.0)
        np.testing.assert_allclose(plus[0], 3.0)

    def test_kink_separates_sides(self):
        """Test backward and forward differences straddle a kink."""
        x = np.linspace(-1.0, 1.0, 5)

        minus, plus = one_sided_gradients(np.abs(x), np.array([0.5]))

        assert minus[0][2] == pytest.approx(-1.0)
        assert plus[0][2] == pytest.approx(1.0)

    def test_second_order_keeps_linear_exact(self):
        """Test the ENO correction vanishes on a straight line."""
        x = np.linspace(0.0, 1.0, 11)

        minus, plus = one_sided_gradients(2.0 * x, np.array([0.1]), accuracy="second")

        np.testing.assert_allclose(minus[0], 2.0)
        np.testing.assert_allclose(plus[0], 2.0)


class TestGameSolve:
    """Test suite for the one-dimensional game against its closed form."""

    def test_terminal_slice_is_cost(self, tracker_game_value_fn):
        """Test V(T_off, ·) = l bitwise."""
        expected = np.abs(GAME_GRID.axes[0]).astype(np.float32)

        assert np.array_equal(tracker_game_value_fn.slices[-1], expected)
        assert tracker_game_value_fn.times[-1] == tracker_game_value_fn.t_off

    def test_tracker_dominates(self, tracker_game, tracker_game_value_fn):
        """Test V(t, r) = |r| within 0.05 at every stored slice."""
        assert _max_error(tracker_game_value_fn, tracker_game) <= 0.05

    def test_adversary_dominates(self):
        """Test V grows at a_p - a_s backward in time."""
        game = Analytic1DGame(tracker_speed=1.0, planner_speed=2.0)
        value_fn = solve(HJIProblem(system=game_system(game), grid=GAME_GRID, t_off=1.0))

        max_dt = value_fn.meta["diagnostics"]["max_dt"]
        assert _max_error(value_fn, game) <= 0.05 + 0.1 * max_dt

    def test_value_never_below_cost(self, tracker_game_value_fn):
        """Test V ≥ l everywhere."""
        assert np.all(
            tracker_game_value_fn.slices >= tracker_game_value_fn.l_field[None] - 1e-7
        )

    def test_monotone_backward_in_time(self):
        """Test V(t, r) is non-increasing in t for the adversarial game."""
        game = Analytic1DGame(tracker_speed=1.0, planner_speed=1.5)
        value_fn = solve(HJIProblem(system=game_system(game), grid=GAME_GRID, t_off=1.0))

        assert np.all(np.diff(value_fn.slices, axis=0) <= 1e-6)
        assert value_fn.meta["diagnostics"]["monotonicity_defect"] <= 1e-6

    def test_save_dt_stores_exact_times(self, tracker_game):
        """Test stored slices land on the save grid."""
        problem = HJIProblem(
            system=game_system(tracker_game), grid=GAME_GRID, t_off=1.0, save_dt=0.25
        )

        value_fn = solve(problem)

        np.testing.assert_allclose(value_fn.times, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_second_order_accuracy(self, tracker_game):
        """Test the ENO variant also meets the tolerance."""
        problem = HJIProblem(
            system=game_system(tracker_game),
            grid=GAME_GRID,
            t_off=1.0,
            accuracy="second",
            save_dt=0.5,
        )

        assert _max_error(solve(problem), tracker_game) <= 0.05

    def test_progress_reaches_one(self, tracker_game):
        """Test the progress callback ends at the full horizon."""
        seen = []
        problem = HJIProblem(
            system=game_system(tracker_game), grid=GAME_GRID, t_off=0.2, save_dt=0.1
        )

        solve(problem, progress=seen.append)

        assert seen[-1] == pytest.approx(1.0)
        assert seen == sorted(seen)

    def test_diagnostics_recorded(self, tracker_game_value_fn):
        """Test the metadata carries the problem and step statistics."""
        diagnostics = tracker_game_value_fn.meta["diagnostics"]

        assert diagnostics["steps"] > 0
        assert 0 < diagnostics["min_dt"] <= diagnostics["max_dt"]
        assert tracker_game_value_fn.meta["problem"]["system"] == "game1d"


class TestProblemValidation:
    """Test suite for solver preconditions."""

    def test_grid_dimension_mismatch(self, case2_system):
        """Test a 1-D grid for a 4-D system is refused."""
        with pytest.raises(ConfigurationError, match="4"):
            HJIProblem(system=case2_system, grid=GAME_GRID, t_off=1.0)

    @pytest.mark.parametrize(
        "kwargs", [{"t_off": 0.0}, {"cfl": 0.0}, {"cfl": 1.5}, {"save_dt": -0.1}]
    )
    def test_bad_numbers(self, tracker_game, kwargs):
        """Test non-positive horizons, CFL out of range and negative save_dt."""
        arguments = {"system": game_system(tracker_game), "grid": GAME_GRID, "t_off": 1.0}
        arguments.update(kwargs)

        with pytest.raises(ConfigurationError):
            HJIProblem(**arguments)

    def test_non_affine_dynamics(self):
        """Test that only relative systems are accepted."""
        with pytest.raises(ConfigurationError, match="affine"):
            HJIProblem(system=lambda t, r: r, grid=GAME_GRID, t_off=1.0)

    def test_fine_six_dimensional_grid(self):
        """Test that the coupled system refuses fine grids."""
        system = make_case1(AuvParams(), WaveParams())
        grid = Grid(lo=(-1.0,) * 6, hi=(1.0,) * 6, counts=(15,) * 6)

        with pytest.raises(ConfigurationError, match="13 nodes"):
            HJIProblem(system=system, grid=grid, t_off=1.0)


def _drifting_system() -> RelativeSystem:
    """ṙ = 0.5 + u_s - u_p + 2 d with off-center boxes."""

    def drift(_t: float, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, 0.5, dtype=float)

    tracking = AffineField(
        state_dim=1,
        control_dim=1,
        disturbance_dim=1,
        drift=drift,
        control_columns=constant_columns(np.ones((1, 1))),
        disturbance_columns=constant_columns(np.full((1, 1), 2.0)),
        time_invariant=True,
        name="drifting",
    )
    return RelativeSystem(
        tracking_map=np.ones((1, 1)),
        planning_map=np.ones((1, 1)),
        error_map=np.ones((1, 1)),
        tracking=tracking,
        planning=planner_field(1),
        tracker_box=InputBox(lower=np.array([0.0]), upper=np.array([1.0])),
        planner_box=InputBox(lower=np.array([-2.0]), upper=np.array([1.0])),
        disturbance_box=InputBox(lower=np.array([0.0]), upper=np.array([0.1])),
        lift=lambda r: (np.asarray(r, dtype=float), np.zeros_like(r, dtype=float)),
        name="drifting",
    )


class TestDissipation:
    """Test suite for the Lax-Friedrichs dissipation coefficient."""

    def test_alpha_covers_box_bound(self):
        """Test α reaches |drift| + Σ |b| h + |b c| over every input box."""
        system = _drifting_system()
        bound = 0.5
        for column, box in ((1.0, system.tracker_box), (-1.0, system.planner_box)):
            bound += abs(column) * box.half_width[0] + abs(column * box.center[0])
        bound += 2.0 * system.disturbance_box.half_width[0]
        bound += abs(2.0 * system.disturbance_box.center[0])

        value_fn = solve(
            HJIProblem(
                system=system,
                grid=Grid(lo=(-1.0,), hi=(1.0,), counts=(21,)),
                t_off=0.1,
            )
        )

        assert bound == pytest.approx(3.7)
        assert value_fn.meta["diagnostics"]["max_alpha"][0] >= bound - 1e-12

    def test_alpha_exceeds_optimal_input_speed(self):
        """Test α is not limited to the speed at the optimal inputs."""
        system = _drifting_system()
        r = np.linspace(-1.0, 1.0, 21)[None, :]
        speeds = []
        for p in (-1.0, 1.0):
            inputs = optimal_inputs(system, 0.0, r, np.full_like(r, p))
            speeds.append(float(np.max(np.abs(system.field(0.0, r, *inputs)))))
        sampled = max(speeds)

        value_fn = solve(
            HJIProblem(
                system=system,
                grid=Grid(lo=(-1.0,), hi=(1.0,), counts=(21,)),
                t_off=0.1,
            )
        )

        assert sampled == pytest.approx(2.7)
        assert value_fn.meta["diagnostics"]["max_alpha"][0] > sampled
