"""Single and batch closed-loop runs."""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from helpers.logger import logger
from helpers.observability import logfire
from wavetrack.core.config import config
from wavetrack.core.errors import StaleArtifactError
from wavetrack.core.scenario import Scenario
from wavetrack.hj.value_function import ValueFunction
from wavetrack.replanner.loop import OnlineLoop
from wavetrack.replanner.timing import ReplanState
from wavetrack.sim.assembly import build_plant, build_settings, build_system, build_world
from wavetrack.sim.log import SimLog


def check_model_hash(scenario: Scenario, value_fn: ValueFunction) -> None:
    """Refuse value functions solved for a different model or grid.

    Raises:
        StaleArtifactError: If the stored model hash differs from the scenario's
    """
    stored = value_fn.meta.get("model_hash")
    expected = scenario.model_hash()
    if stored is None:
        logger.warning("Value function carries no model hash; skipping the staleness check")
        return
    if stored != expected:
        raise StaleArtifactError(
            f"value function was solved for model {stored[:12]}, "
            f"scenario {scenario.name!r} needs {expected[:12]}"
        )


def run(
    scenario: Scenario,
    value_fn: ValueFunction,
    seed: int | None = None,
    disturbance_scale: float | None = None,
) -> SimLog:
    """Simulate ``scenario`` in closed loop with a stored value function."""
    if seed is not None or disturbance_scale is not None:
        scenario = scenario.with_overrides(seed=seed, disturbance_scale=disturbance_scale)
    system = build_system(scenario)
    settings = build_settings(scenario, system)
    plant = build_plant(scenario)
    log = SimLog(
        config_echo=scenario.model_dump(mode="json"),
        disturbance_bound=scenario.model.d_nom_max,
    )
    loop = OnlineLoop(system, value_fn, plant, build_world(scenario), settings, log)

    with logfire.span(
        "🚤 Simulation",
        scenario=scenario.name,
        case=scenario.model.case,
        operation="simulate",
        seed=scenario.online.seed,
    ):
        result = loop.run()
        logfire.info(
            "Simulation finished",
            scenario=scenario.name,
            outcome=result.outcome,
            replans=len(result.events_of("replan")),
        )
    return result


def run_batch(
    runs: list[tuple[Scenario, ValueFunction]],
    out_dir: Path | str,
    seed: int | None = None,
    disturbance_scale: float | None = None,
    threads: int | None = None,
) -> dict[str, SimLog]:
    """Run independent scenarios, each into ``out_dir/<scenario name>``."""
    out_dir = Path(out_dir)

    def one(item: tuple[Scenario, ValueFunction]) -> tuple[str, SimLog]:
        scenario, value_fn = item
        log = run(scenario, value_fn, seed=seed, disturbance_scale=disturbance_scale)
        log.write(out_dir / scenario.name)
        return scenario.name, log

    with ThreadPoolExecutor(max_workers=threads or config.threads) as pool:
        return dict(pool.map(one, runs))


def plan_at(
    scenario: Scenario,
    value_fn: ValueFunction,
    t: float,
    s=None,
) -> tuple[ReplanState, SimLog]:
    """Single replan at wall time ``t`` with the whole map already known.

    ``s`` defaults to the scenario's initial state.
    """
    system = build_system(scenario)
    world = build_world(scenario)
    world.timeline.reveal(range(len(world.obstacles)), t)
    state = np.asarray(scenario.online.s0 if s is None else s, dtype=float)
    log = SimLog(config_echo=scenario.model_dump(mode="json"))
    loop = OnlineLoop(
        system, value_fn, build_plant(scenario), world, build_settings(scenario, system), log
    )
    return loop.replan(t, state), log
