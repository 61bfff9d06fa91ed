"""The true map, the range sensor and the growing set of known obstacles."""

from dataclasses import dataclass, field

from helpers.logger import logger
from wavetrack.core.geometry import Rect
from wavetrack.safesets.morphology import dilate_box
from wavetrack.safesets.occupancy import OccupancyGrid


@dataclass
class ConstraintTimeline:
    """Indices of revealed obstacles and the instants the set grew."""

    known: list[int] = field(default_factory=list)
    change_times: list[float] = field(default_factory=list)

    def reveal(self, indices, t: float) -> bool:
        new = sorted(set(indices) - set(self.known))
        if not new:
            return False
        self.known.extend(new)
        self.change_times.append(float(t))
        return True


def sense(
    obstacles: list[Rect],
    s,
    sensor_range: float,
    timeline: ConstraintTimeline,
    t: float,
) -> bool:
    """Reveal every obstacle that overlaps the sensor square around (x, z).

    Obstacles are revealed whole. Returns True iff the known set grew.
    """
    window = Rect.square(float(s[0]), float(s[1]), sensor_range)
    hits = [i for i, rect in enumerate(obstacles) if rect.intersects(window)]
    return timeline.reveal(hits, t)


class MapWorld:
    """Rectangle map over the region Ξ with a square range sensor."""

    def __init__(
        self,
        region: Rect,
        obstacles: list[Rect],
        goals: list[Rect],
        sensor_range: float,
        resolution: float,
        vehicle_half_extent: tuple[float, float] = (0.0, 0.0),
    ):
        self.region = region
        self.obstacles = list(obstacles)
        self.goals = list(goals)
        self.sensor_range = sensor_range
        self.vehicle_half_extent = vehicle_half_extent
        self.workspace = OccupancyGrid.for_region(region, resolution)
        self.border = self.workspace.outside_region(region)
        self.timeline = ConstraintTimeline()
        self._known_grid: OccupancyGrid | None = None
        self._goal_grids = [self.workspace.rasterize(g, inside=True) for g in self.goals]
        for index, grid in enumerate(self._goal_grids):
            if grid.is_empty:
                logger.warning(f"Goal {index} covers no whole workspace cell")

    @property
    def goal_count(self) -> int:
        return len(self.goals)

    def sense(self, s, t: float) -> bool:
        changed = sense(self.obstacles, s, self.sensor_range, self.timeline, t)
        if changed:
            self._known_grid = None
        return changed

    def obstacle_grid(self, indices) -> OccupancyGrid:
        """Ξᶜ plus the listed rectangles, inflated by the vehicle footprint."""
        grid = self.border
        for index in indices:
            grid = grid.rasterize(self.obstacles[index])
        if any(h > 0 for h in self.vehicle_half_extent):
            grid = dilate_box(grid, self.vehicle_half_extent)
        return grid

    @property
    def known_obstacles(self) -> OccupancyGrid:
        if self._known_grid is None:
            self._known_grid = self.obstacle_grid(self.timeline.known)
        return self._known_grid

    @property
    def true_obstacles(self) -> OccupancyGrid:
        return self.obstacle_grid(range(len(self.obstacles)))

    @property
    def known_count(self) -> int:
        return len(self.timeline.known)

    def goal_grid(self, index: int) -> OccupancyGrid:
        return self._goal_grids[index]

    def in_goal(self, s, index: int) -> bool:
        return self.goals[index].contains(float(s[0]), float(s[1]))

    def collision(self, s) -> bool:
        x, z = float(s[0]), float(s[1])
        if not self.region.contains(x, z):
            return True
        return any(rect.contains(x, z) for rect in self.obstacles)
