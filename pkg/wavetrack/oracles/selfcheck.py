"""Installation self-check: every oracle against the library it guards."""

from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from helpers.logger import logger
from wavetrack.core.errors import WavetrackError
from wavetrack.core.geometry import Rect
from wavetrack.dynamics.auv import AuvParams, make_case2
from wavetrack.dynamics.wave import (
    Case2WaveEnvelope,
    WaveParams,
    fit_case2_envelope,
    fit_case3_bounds,
)
from wavetrack.hj.grid import Grid
from wavetrack.hj.hamiltonian import hamiltonian
from wavetrack.hj.solver import HJIProblem, solve
from wavetrack.hj.storage import load_value_function
from wavetrack.oracles.analytic import Analytic1DGame, analytic_value, game_system
from wavetrack.oracles.envelope import enclosing_envelope, envelope_residual
from wavetrack.oracles.sampled import sampled_hamiltonian
from wavetrack.sim.disturbance import sample_disturbance
from wavetrack.sim.integrate import integrate_step

# Published fit for the default wave over [-2, 2] x [2, 6]; its residual bounds
# contain the smallest ones with some margin
REFERENCE_ENVELOPE = {
    "velocity_amplitude": 0.2185,
    "acceleration_amplitude": 0.1373,
    "velocity_bound": 0.03,
    "acceleration_bound": 0.025,
}
REFERENCE_CASE3 = {"velocity_bound": 0.2319, "acceleration_bound": 0.1457}
RELATIVE_TOLERANCE = 0.05
CONTAINMENT_SLACK = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _game_error(game: Analytic1DGame, spacing: float = 0.02) -> tuple[float, float]:
    """Max node error of the grid solve against the closed form, and max dt."""
    counts = int(round(2.0 / spacing)) + 1
    problem = HJIProblem(
        system=game_system(game),
        grid=Grid(lo=(-1.0,), hi=(1.0,), counts=(counts,)),
        t_off=game.t_off,
    )
    value_fn = solve(problem)
    r = value_fn.grid.axes[0]
    errors = [
        np.max(np.abs(value_fn.slices[i] - analytic_value(game, r, t)))
        for i, t in enumerate(value_fn.times)
    ]
    return float(max(errors)), float(value_fn.meta["diagnostics"]["max_dt"])


def check_dominant_tracker() -> CheckResult:
    error, _ = _game_error(Analytic1DGame(tracker_speed=2.0, planner_speed=1.0))
    return CheckResult("1-D game, tracker dominates", error <= 0.05, f"max error {error:.4f}")


def check_dominant_adversary() -> CheckResult:
    error, max_dt = _game_error(Analytic1DGame(tracker_speed=1.0, planner_speed=2.0))
    bound = 0.05 + 0.1 * max_dt
    return CheckResult(
        "1-D game, adversary dominates",
        error <= bound,
        f"max error {error:.4f} (bound {bound:.4f})",
    )


def check_hamiltonian(density: int = 21, samples: int = 100, seed: int = 0) -> CheckResult:
    wave = WaveParams()
    system = make_case2(AuvParams(), fit_case2_envelope(wave, Rect.square(0.0, 4.0, 2.0)))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        r = rng.uniform([-0.5, -0.5, -1.0, -1.0], [0.5, 0.5, 1.0, 1.0])
        p = rng.normal(size=4)
        t = rng.uniform(0.0, 10.0)
        analytic = float(hamiltonian(system, t, r, p))
        sampled = sampled_hamiltonian(system, t, r, p, density)
        worst = max(worst, abs(analytic - sampled) / (1.0 + abs(analytic)))
    return CheckResult(
        f"Hamiltonian vs {density}-point lattice", worst <= 1e-8, f"max rel. gap {worst:.2e}"
    )


def published_envelope(wave: WaveParams | None = None) -> Case2WaveEnvelope:
    """The published Case-2 parameters, with zero phases."""
    wave = wave or WaveParams()
    return Case2WaveEnvelope(
        velocity_phase=0.0,
        acceleration_phase=0.0,
        frequency=wave.frequency,
        **REFERENCE_ENVELOPE,
    )


def check_envelope(sample_count: int = 10_000) -> CheckResult:
    wave = WaveParams()
    region = Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
    fitted = fit_case2_envelope(wave, region)
    residual = envelope_residual(wave, fitted, sample_count, region)
    published_residual = envelope_residual(
        wave, published_envelope(wave), sample_count, region
    )
    exact = enclosing_envelope(wave, region)
    matches_exact = all(
        abs(getattr(fitted, key) - exact[key]) <= RELATIVE_TOLERANCE * exact[key]
        for key in REFERENCE_ENVELOPE
    )
    amplitudes_ok = all(
        abs(getattr(fitted, key) - ref) <= RELATIVE_TOLERANCE * ref
        for key, ref in REFERENCE_ENVELOPE.items()
        if key.endswith("amplitude")
    )
    within_published = all(
        getattr(fitted, key) <= ref
        for key, ref in REFERENCE_ENVELOPE.items()
        if key.endswith("bound")
    )
    passed = (
        residual <= CONTAINMENT_SLACK
        and published_residual <= CONTAINMENT_SLACK
        and matches_exact
        and amplitudes_ok
        and within_published
    )
    return CheckResult(
        "Periodic wave envelope",
        passed,
        f"W {fitted.velocity_amplitude:.4f}±{fitted.velocity_bound:.4f} "
        f"(exact ±{exact['velocity_bound']:.4f}), "
        f"A {fitted.acceleration_amplitude:.4f}±{fitted.acceleration_bound:.4f} "
        f"(exact ±{exact['acceleration_bound']:.4f}), "
        f"residual {residual:.2e}, published residual {published_residual:.2e}",
    )


def check_case3_bounds(sample_count: int = 10_000) -> CheckResult:
    wave = WaveParams()
    region = Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
    bounds = fit_case3_bounds(wave, region)
    residual = envelope_residual(wave, bounds, sample_count, region)
    close = all(
        abs(getattr(bounds, key) - ref) <= RELATIVE_TOLERANCE * ref
        for key, ref in REFERENCE_CASE3.items()
    )
    return CheckResult(
        "Time-invariant wave bounds",
        close and residual <= CONTAINMENT_SLACK,
        f"D_W {bounds.velocity_bound:.4f}, D_A {bounds.acceleration_bound:.4f}",
    )


def check_rk4_order() -> CheckResult:
    matrix = np.array([[0.0, 1.0], [-4.0, -0.3]])

    def field(_t, s, _u, _d):
        return matrix @ s

    s0 = np.array([1.0, 0.0])
    horizon = 1.0
    exact = expm(matrix * horizon) @ s0
    errors = []
    for steps in (20, 40):
        dt = horizon / steps
        s = s0
        for k in range(steps):
            s = integrate_step(field, s, np.zeros(0), np.zeros(0), k * dt, dt)
        errors.append(np.linalg.norm(s - exact))
    ratio = errors[0] / max(errors[1], 1e-300)
    return CheckResult("RK4 convergence order", 12.0 <= ratio <= 20.0, f"error ratio {ratio:.1f}")


def check_disturbance(seed: int = 7, bound: float = 0.001) -> CheckResult:
    times = np.arange(0.0, 20.0, 0.02)
    samples = np.array([sample_disturbance(seed, t, bound) for t in times])
    repeat = np.array([sample_disturbance(seed, t, bound) for t in times])
    within = bool(np.all(np.abs(samples) <= bound))
    deterministic = bool(np.array_equal(samples, repeat))
    return CheckResult(
        "Seeded disturbance",
        within and deterministic,
        f"max |d| {np.abs(samples).max():.2e}, deterministic={deterministic}",
    )


def check_value_file(path: Path | str) -> CheckResult:
    try:
        value_fn = load_value_function(path)
    except WavetrackError as e:
        return CheckResult("Value-function file", False, str(e))
    return CheckResult(
        "Value-function file",
        True,
        f"{value_fn.ndim}-D, {len(value_fn.times)} slices over [0, {value_fn.t_off:g}]",
    )


def run_self_check(
    value_fn_path: Path | str | None = None, density: int = 21
) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        check_dominant_tracker,
        check_dominant_adversary,
        lambda: check_hamiltonian(density=density),
        check_envelope,
        check_case3_bounds,
        check_rk4_order,
        check_disturbance,
    ]
    if value_fn_path is not None:
        checks.append(lambda: check_value_file(value_fn_path))

    results = []
    for check in checks:
        result = check()
        status = "✅" if result.passed else "❌"
        logger.info(f"{status} {result.name}: {result.detail}")
        results.append(result)
    return results
