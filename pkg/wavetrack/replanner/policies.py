"""Replanning trigger, level and reinitialisation policies."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

_AXES = {"x": 0, "z": 1}


class RegionTrigger(BaseModel):
    """Half-plane predicate on one position coordinate, e.g. z > 3.6."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    axis: Literal["x", "z"] = "z"
    above: float | None = None
    below: float | None = None

    @model_validator(mode="after")
    def _check_bound(self) -> "RegionTrigger":
        if self.above is None and self.below is None:
            raise ValueError("region trigger needs 'above' or 'below'")
        return self

    def active(self, s) -> bool:
        value = float(s[_AXES[self.axis]])
        if self.above is not None and not value > self.above:
            return False
        return not (self.below is not None and not value < self.below)


class ReplanPolicy(BaseModel):
    """When to replan. Constraint changes always trigger a replan."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fixed_period: float | None = Field(default=None, gt=0)
    region_trigger: RegionTrigger | None = None
    horizon_expiry: float | None = Field(
        default=None, gt=0, description="T′, the periodic planning horizon"
    )
    on_goal_hit: bool = True


class LevelPolicy(BaseModel):
    """How the sublevel c_k is chosen at each replan.

    ``fixed`` uses ``c``; ``floor`` uses the smallest feasible level at every
    replan; ``initial_floor`` holds the level found at the first replan;
    ``region_switch`` uses ``c_low`` (or the initial floor) until the region
    is first entered and ``c_high`` from then on.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: Literal["fixed", "floor", "initial_floor", "region_switch"] = "initial_floor"
    c: float | None = None
    c_low: float | None = None
    c_high: float | None = None
    region: RegionTrigger | None = None

    @model_validator(mode="after")
    def _check_mode(self) -> "LevelPolicy":
        if self.mode == "fixed" and self.c is None:
            raise ValueError("fixed level policy needs 'c'")
        if self.mode == "region_switch" and (self.c_high is None or self.region is None):
            raise ValueError("region_switch level policy needs 'c_high' and 'region'")
        return self


class ReinitPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: Literal["continue_previous", "teleport_closest_to_goal"] = (
        "continue_previous"
    )
