"""Axis-aligned rectangles in the (x, z) plane."""

from pydantic import BaseModel, ConfigDict, model_validator


class Rect(BaseModel):
    """Closed axis-aligned box [x_min, x_max] × [z_min, z_max] in metres.

    Degenerate boxes (a segment or a single point) are allowed; they are used
    for point regions when fitting wave envelopes.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    x_min: float
    x_max: float
    z_min: float
    z_max: float

    @model_validator(mode="after")
    def _check_order(self) -> "Rect":
        if self.x_min > self.x_max or self.z_min > self.z_max:
            raise ValueError(
                f"empty rectangle: x [{self.x_min}, {self.x_max}], "
                f"z [{self.z_min}, {self.z_max}]"
            )
        return self

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.z_min + self.z_max))

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.z_max - self.z_min

    def contains(self, x: float, z: float) -> bool:
        return self.x_min <= x <= self.x_max and self.z_min <= z <= self.z_max

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.x_min <= other.x_min
            and other.x_max <= self.x_max
            and self.z_min <= other.z_min
            and other.z_max <= self.z_max
        )

    def intersects(self, other: "Rect") -> bool:
        """Closed-interval overlap test, so touching edges count."""
        return (
            self.x_min <= other.x_max
            and other.x_min <= self.x_max
            and self.z_min <= other.z_max
            and other.z_min <= self.z_max
        )

    @classmethod
    def square(cls, x: float, z: float, half_extent: float) -> "Rect":
        return cls(
            x_min=x - half_extent,
            x_max=x + half_extent,
            z_min=z - half_extent,
            z_max=z + half_extent,
        )
