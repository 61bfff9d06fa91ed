"""Turn a scenario document into systems, solver problems, worlds and loops."""

import numpy as np

from helpers.logger import logger
from wavetrack.core.config import config
from wavetrack.core.errors import ConfigurationError
from wavetrack.core.scenario import Scenario
from wavetrack.dynamics.auv import make_case1, make_case2, make_case3
from wavetrack.dynamics.fields import RelativeSystem
from wavetrack.dynamics.wave import fit_case2_envelope, fit_case3_bounds
from wavetrack.hj.grid import Grid
from wavetrack.hj.solver import HJIProblem
from wavetrack.oracles.analytic import game_system
from wavetrack.replanner.loop import OnlineSettings
from wavetrack.sim.plant import AuvPlant
from wavetrack.sim.world import MapWorld


def build_system(scenario: Scenario) -> RelativeSystem:
    """Relative system for the scenario's case; fits the wave model if absent."""
    model = scenario.model
    if model.case == "game1d":
        return game_system(model.game)
    boxes = {
        "u_s_max": model.u_s_max,
        "u_p_max": model.u_p_max,
        "d_nom_max": model.d_nom_max,
    }
    if model.case == "case1":
        return make_case1(model.auv, model.wave, **boxes)
    if model.case == "case2":
        envelope = model.envelope or fit_case2_envelope(model.wave, model.region)
        return make_case2(model.auv, envelope, **boxes)
    bounds = model.case3_bounds or fit_case3_bounds(model.wave, model.region)
    return make_case3(model.auv, bounds, **boxes)


def build_problem(scenario: Scenario, system: RelativeSystem | None = None) -> HJIProblem:
    offline = scenario.offline
    grid = Grid(
        lo=tuple(offline.grid.lo),
        hi=tuple(offline.grid.hi),
        counts=tuple(offline.grid.counts),
    )
    return HJIProblem(
        system=system or build_system(scenario),
        grid=grid,
        t_off=offline.t_off,
        cfl=offline.cfl,
        accuracy=offline.accuracy,
        save_dt=offline.save_dt,
    )


def _online(scenario: Scenario):
    if scenario.online is None:
        raise ConfigurationError(f"scenario {scenario.name!r} has no online section")
    return scenario.online


def build_world(scenario: Scenario) -> MapWorld:
    online = _online(scenario)
    return MapWorld(
        region=scenario.model.region,
        obstacles=online.obstacles,
        goals=online.goals,
        sensor_range=online.sensor_range,
        resolution=online.resolution,
        vehicle_half_extent=online.vehicle_half_extent,
    )


def build_plant(scenario: Scenario) -> AuvPlant:
    online = _online(scenario)
    bound = scenario.model.d_nom_max * online.stress.disturbance_scale
    return AuvPlant(
        auv=scenario.model.auv,
        wave=scenario.model.wave,
        s0=online.s0,
        seed=online.seed,
        disturbance_bound=bound,
        hold=config.disturbance_hold,
    )


def build_settings(scenario: Scenario, system: RelativeSystem) -> OnlineSettings:
    online = _online(scenario)
    planner = online.planner
    stress = online.stress
    if stress.disturbance_scale != 1.0 or stress.planner_speed_scale != 1.0:
        logger.warning(
            f"Stress run: disturbance x{stress.disturbance_scale}, "
            f"planner speed x{stress.planner_speed_scale}"
        )
    periodic = online.mode == "periodic"
    return OnlineSettings(
        mode=online.mode,
        t_run=online.t_run,
        planner_box=system.planner_box.scaled(stress.planner_speed_scale),
        sample_period=planner.sample_period,
        control_period=config.control_period,
        tau=scenario.period if periodic else None,
        horizon=online.replan.horizon_expiry if periodic else None,
        replan=online.replan,
        level=online.level,
        reinit=online.reinit,
        goal_required=planner.goal_required,
        q_matrix=planner.q_weight * np.eye(2),
        r_matrix=planner.r_weight * np.eye(2),
        p_ref=None if planner.p_ref is None else np.asarray(planner.p_ref, dtype=float),
        constraint_mode="coupled" if scenario.model.case == "case1" else "ball",
        strict_invariance=stress.disturbance_scale <= 1.0
        and stress.planner_speed_scale <= 1.0,
    )
