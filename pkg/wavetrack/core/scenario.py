"""Scenario files: one JSON document per offline solve and online run."""

from functools import lru_cache
import hashlib
import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
import ujson

from helpers.logger import logger
from wavetrack.core.errors import ConfigurationError
from wavetrack.core.geometry import Rect
from wavetrack.dynamics.auv import AuvParams
from wavetrack.dynamics.wave import Case2WaveEnvelope, Case3WaveBounds, WaveParams
from wavetrack.oracles.analytic import Analytic1DGame
from wavetrack.replanner.policies import LevelPolicy, ReinitPolicy, ReplanPolicy

Case = Literal["case1", "case2", "case3", "game1d"]

GRID_DIMS = {"case1": 6, "case2": 4, "case3": 4, "game1d": 1}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSpec(_Section):
    lo: list[float]
    hi: list[float]
    counts: list[int]

    @model_validator(mode="after")
    def _check_lengths(self) -> "GridSpec":
        if not (len(self.lo) == len(self.hi) == len(self.counts)):
            raise ValueError("grid lo, hi and counts must have the same length")
        return self


class ModelSection(_Section):
    """Everything the offline value function depends on."""

    case: Case = "case2"
    auv: AuvParams = AuvParams()
    wave: WaveParams = WaveParams()
    region: Rect = Rect(x_min=-2.0, x_max=2.0, z_min=2.0, z_max=6.0)
    envelope: Case2WaveEnvelope | None = None
    case3_bounds: Case3WaveBounds | None = None
    u_s_max: float = Field(default=1000.0, gt=0)
    u_p_max: float = Field(default=0.3, gt=0)
    d_nom_max: float = Field(default=0.001, ge=0)
    game: Analytic1DGame | None = None

    @model_validator(mode="after")
    def _check_game(self) -> "ModelSection":
        if self.case == "game1d" and self.game is None:
            raise ValueError("case 'game1d' needs a 'game' section")
        return self


class OfflineSection(_Section):
    grid: GridSpec
    t_off: float = Field(gt=0)
    cfl: float = Field(default=0.5, gt=0, le=1)
    accuracy: Literal["first", "second"] = "first"
    save_dt: float | None = Field(default=None, gt=0)
    output: Path = Path("artifacts/value_function.wtvf")


class PlannerSection(_Section):
    sample_period: float = Field(default=0.2, gt=0, description="T_s")
    goal_required: bool = True
    q_weight: float = Field(default=1.0, ge=0)
    r_weight: float = Field(default=0.01, ge=0)
    p_ref: tuple[float, float] | None = None


class StressSection(_Section):
    disturbance_scale: float = Field(default=1.0, ge=0)
    planner_speed_scale: float = Field(default=1.0, gt=0)


class OnlineSection(_Section):
    mode: Literal["time_varying", "periodic"] = "time_varying"
    t_run: float = Field(gt=0)
    tau: float | None = Field(default=None, gt=0)
    s0: tuple[float, float, float, float]
    sensor_range: float = Field(default=1.2, gt=0)
    resolution: float = Field(default=0.05, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    vehicle_half_extent: tuple[float, float] = (0.0, 0.0)
    obstacles: list[Rect] = Field(default_factory=list)
    goals: list[Rect] = Field(min_length=1)
    replan: ReplanPolicy = ReplanPolicy()
    level: LevelPolicy = LevelPolicy()
    reinit: ReinitPolicy = ReinitPolicy()
    planner: PlannerSection = PlannerSection()
    stress: StressSection = StressSection()


class Scenario(_Section):
    name: str
    description: str = ""
    model: ModelSection
    offline: OfflineSection
    online: OnlineSection | None = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "Scenario":
        expected = GRID_DIMS[self.model.case]
        if len(self.offline.grid.counts) != expected:
            raise ValueError(
                f"{self.model.case} needs a {expected}-D grid, "
                f"got {len(self.offline.grid.counts)}-D"
            )
        online = self.online
        if online is None:
            return self
        if self.model.case == "game1d":
            raise ValueError("the one-dimensional game has no online section")

        region = self.model.region
        x0, z0 = online.s0[0], online.s0[1]
        if not region.contains(x0, z0):
            raise ValueError(f"initial position ({x0}, {z0}) lies outside the region")
        for rect in online.obstacles:
            if rect.contains(x0, z0):
                raise ValueError(f"initial position ({x0}, {z0}) lies inside an obstacle")
        for goal in online.goals:
            if not region.contains_rect(goal):
                raise ValueError("goal rectangles must lie inside the region")

        if online.mode == "periodic":
            tau = self.period
            horizon = online.replan.horizon_expiry
            if horizon is None:
                raise ValueError("periodic mode needs replan.horizon_expiry (T′)")
            if self.offline.t_off <= tau:
                raise ValueError(f"periodic mode needs T_off > τ = {tau:.4f}")
            if horizon > self.offline.t_off - tau + 1e-9:
                raise ValueError(
                    f"T′ = {horizon} exceeds T_off - τ = {self.offline.t_off - tau:.4f}"
                )
        elif online.t_run > self.offline.t_off + 1e-9:
            raise ValueError(
                f"T_run = {online.t_run} exceeds T_off = {self.offline.t_off}"
            )
        return self

    @property
    def period(self) -> float:
        """τ: the online period, defaulting to the wave period."""
        if self.online is not None and self.online.tau is not None:
            return self.online.tau
        return 2 * math.pi / self.model.wave.frequency

    def model_hash(self) -> str:
        """SHA-256 over the model section and solver settings."""
        payload = {
            "model": self.model.model_dump(mode="json"),
            "offline": self.offline.model_dump(mode="json", exclude={"output"}),
        }
        return hashlib.sha256(
            ujson.dumps(payload, sort_keys=True).encode()
        ).hexdigest()

    def with_overrides(
        self, seed: int | None = None, disturbance_scale: float | None = None
    ) -> "Scenario":
        """Copy with the online seed and/or disturbance scale replaced."""
        if self.online is None:
            raise ConfigurationError(f"scenario {self.name!r} has no online section")
        online = self.online
        if seed is not None:
            online = online.model_copy(update={"seed": seed})
        if disturbance_scale is not None:
            stress = online.stress.model_copy(
                update={"disturbance_scale": disturbance_scale}
            )
            online = online.model_copy(update={"stress": stress})
        return self.model_copy(update={"online": online})

    @classmethod
    @lru_cache(maxsize=32)
    def from_file(cls, path: Path | str) -> "Scenario":
        """Load and validate a scenario JSON file.

        Raises:
            ConfigurationError: If the file is missing, malformed or invalid
        """
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigurationError(f"cannot read scenario {path}: {e}") from e
        try:
            scenario = cls.model_validate_json(text)
        except ValidationError as e:
            raise ConfigurationError(f"invalid scenario {path}:\n{e}") from e
        logger.debug(f"Loaded scenario {scenario.name} from {path.name}")
        return scenario

    @classmethod
    def clear_cache(cls):
        """Clear the scenario cache. Useful for testing or when files change."""
        cls.from_file.cache_clear()
        logger.debug("🗑️  Scenario cache cleared")
