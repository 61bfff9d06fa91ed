"""Shared fixtures: small value functions and systems that need no long solve."""

import math

import numpy as np
import pytest

from wavetrack.core.scenario import GridSpec, Scenario
from wavetrack.dynamics.auv import AuvParams, make_case2
from wavetrack.dynamics.wave import Case2WaveEnvelope
from wavetrack.hj.grid import Grid
from wavetrack.hj.solver import HJIProblem, solve
from wavetrack.hj.value_function import ValueFunction
from wavetrack.oracles.analytic import Analytic1DGame, game_system
from wavetrack.sim.assembly import build_problem

# Fitted values for the default wave over [-2, 2] x [2, 6]
DEFAULT_ENVELOPE = Case2WaveEnvelope(
    velocity_amplitude=0.2154,
    velocity_phase=0.0,
    velocity_bound=0.0244,
    acceleration_amplitude=0.1353,
    acceleration_phase=0.0,
    acceleration_bound=0.0153,
    frequency=2 * math.pi * 0.1,
)


def position_error_value_fn(
    lo=(-0.5, -0.5, -1.0, -1.0),
    hi=(0.5, 0.5, 1.0, 1.0),
    counts=(11, 11, 5, 5),
    t_off: float = 10.0,
    dt: float = 1.0,
) -> ValueFunction:
    """Time-constant V equal to the norm of the first (at most two) axes."""
    grid = Grid(lo, hi, counts)
    mesh = grid.mesh()
    error_axes = min(grid.ndim, 2)
    l_field = np.sqrt(sum(mesh[a] ** 2 for a in range(error_axes))).astype(np.float32)
    times = np.linspace(0.0, t_off, int(round(t_off / dt)) + 1)
    slices = np.broadcast_to(l_field, (times.shape[0], *grid.shape)).copy()
    return ValueFunction(grid=grid, times=times, slices=slices, l_field=l_field)


def reduced_scenario(name: str = "sim1_case2", t_off: float = 2.0) -> Scenario:
    """Shipped scenario on an 11-node-per-axis grid over a short horizon."""
    scenario = Scenario.from_file(f"scenarios/{name}.json")
    grid = scenario.offline.grid
    offline = scenario.offline.model_copy(
        update={
            "grid": GridSpec(lo=grid.lo, hi=grid.hi, counts=[11] * len(grid.counts)),
            "t_off": t_off,
            "save_dt": 0.1,
        }
    )
    online = scenario.online.model_copy(update={"t_run": t_off})
    return scenario.model_copy(update={"offline": offline, "online": online})


@pytest.fixture
def case2_system():
    return make_case2(AuvParams(), DEFAULT_ENVELOPE)


@pytest.fixture
def error_value_fn():
    return position_error_value_fn()


@pytest.fixture(scope="session")
def tracker_game():
    return Analytic1DGame(tracker_speed=2.0, planner_speed=1.0)


@pytest.fixture(scope="session")
def tracker_game_value_fn(tracker_game):
    """Solved 1-D game with the tracker faster than the planner."""
    problem = HJIProblem(
        system=game_system(tracker_game),
        grid=Grid(lo=(-1.0,), hi=(1.0,), counts=(101,)),
        t_off=tracker_game.t_off,
    )
    return solve(problem)


@pytest.fixture(scope="session")
def reduced_case2():
    """sim1_case2 solved on 11⁴ nodes over 2 s, with its scenario."""
    scenario = reduced_scenario()
    return scenario, solve(build_problem(scenario))
