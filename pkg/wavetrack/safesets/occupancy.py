"""Boolean occupancy grids over the planning workspace.

Cells are indexed ``[ix, iz]`` (x first) and cover
``[lower + i * resolution, lower + (i + 1) * resolution)`` on each axis. The
same class works for one-dimensional workspaces.
"""

from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from wavetrack.core.errors import ArtifactError, ConfigurationError
from wavetrack.core.geometry import Rect

_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    lower: tuple[float, ...]
    resolution: float
    cells: np.ndarray

    def __post_init__(self):
        if not self.resolution > 0:
            raise ConfigurationError(f"resolution must be positive, got {self.resolution}")
        cells = np.array(self.cells, dtype=bool)
        lower = tuple(float(v) for v in self.lower)
        if cells.ndim != len(lower):
            raise ConfigurationError(
                f"cells have {cells.ndim} axes but lower corner has {len(lower)}"
            )
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "lower", lower)

    @classmethod
    def empty(cls, lower, upper, resolution: float) -> "OccupancyGrid":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        counts = (upper - lower) / resolution
        shape = np.rint(counts).astype(int)
        if np.any(np.abs(counts - shape) > 1e-6) or np.any(shape < 1):
            raise ConfigurationError(
                f"workspace extent {upper - lower} is not a positive multiple of "
                f"the resolution {resolution}"
            )
        return cls(tuple(lower), resolution, np.zeros(tuple(shape), dtype=bool))

    @classmethod
    def for_region(
        cls, region: Rect, resolution: float, margin_cells: int = 2
    ) -> "OccupancyGrid":
        """Empty workspace covering ``region`` padded by ``margin_cells`` per side."""
        pad = margin_cells * resolution
        lower = (region.x_min - pad, region.z_min - pad)
        nx = math.ceil(region.width / resolution - _SNAP) + 2 * margin_cells
        nz = math.ceil(region.height / resolution - _SNAP) + 2 * margin_cells
        return cls(lower, resolution, np.zeros((max(nx, 1), max(nz, 1)), dtype=bool))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells.shape

    @property
    def ndim(self) -> int:
        return self.cells.ndim

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(
            lo + n * self.resolution for lo, n in zip(self.lower, self.shape, strict=True)
        )

    def centers(self, axis: int) -> np.ndarray:
        return self.lower[axis] + (np.arange(self.shape[axis]) + 0.5) * self.resolution

    def center_points(self) -> np.ndarray:
        """Cell centers as a (cell_count, ndim) array in C order."""
        mesh = np.meshgrid(*(self.centers(a) for a in range(self.ndim)), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def center_of(self, index) -> np.ndarray:
        return np.array(
            [self.lower[a] + (index[a] + 0.5) * self.resolution for a in range(self.ndim)]
        )

    def index_of(self, point) -> tuple[int, ...] | None:
        """Cell containing ``point``, or None outside the workspace."""
        point = np.atleast_1d(np.asarray(point, dtype=float))[: self.ndim]
        index = np.floor((point - np.asarray(self.lower)) / self.resolution).astype(int)
        if np.any(index < 0) or np.any(index >= np.asarray(self.shape)):
            return None
        return tuple(int(i) for i in index)

    def occupied(self, point) -> bool:
        """True inside an occupied cell or anywhere outside the workspace."""
        index = self.index_of(point)
        return True if index is None else bool(self.cells[index])

    def member(self, point) -> bool:
        """True only inside a set cell; outside the workspace is not a member."""
        index = self.index_of(point)
        return False if index is None else bool(self.cells[index])

    def with_cells(self, cells: np.ndarray) -> "OccupancyGrid":
        cells = np.asarray(cells, dtype=bool)
        if cells.shape != self.shape:
            raise ConfigurationError(f"cells shape {cells.shape} != {self.shape}")
        return OccupancyGrid(self.lower, self.resolution, cells)

    def aligned(self, other: "OccupancyGrid") -> bool:
        return (
            self.shape == other.shape
            and math.isclose(self.resolution, other.resolution)
            and np.allclose(self.lower, other.lower)
        )

    def _check_aligned(self, other: "OccupancyGrid"):
        if not self.aligned(other):
            raise ConfigurationError("occupancy grids are not aligned")

    def __or__(self, other: "OccupancyGrid") -> "OccupancyGrid":
        self._check_aligned(other)
        return self.with_cells(self.cells | other.cells)

    def __and__(self, other: "OccupancyGrid") -> "OccupancyGrid":
        self._check_aligned(other)
        return self.with_cells(self.cells & other.cells)

    def __sub__(self, other: "OccupancyGrid") -> "OccupancyGrid":
        self._check_aligned(other)
        return self.with_cells(self.cells & ~other.cells)

    def __invert__(self) -> "OccupancyGrid":
        return self.with_cells(~self.cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return self.aligned(other) and bool(np.array_equal(self.cells, other.cells))

    @property
    def count(self) -> int:
        return int(self.cells.sum())

    @property
    def is_empty(self) -> bool:
        return not self.cells.any()

    def cleared(self) -> "OccupancyGrid":
        return self.with_cells(np.zeros(self.shape, dtype=bool))

    def _rect_range(self, lo: float, hi: float, axis: int, inside: bool) -> slice:
        start = (lo - self.lower[axis]) / self.resolution
        stop = (hi - self.lower[axis]) / self.resolution
        if inside:
            first, last = math.ceil(start - _SNAP), math.floor(stop + _SNAP)
        else:
            first, last = math.floor(start + _SNAP), math.ceil(stop - _SNAP)
            # Zero-width rectangles still mark the cell they sit in
            last = max(last, first + 1)
        first = min(max(first, 0), self.shape[axis])
        last = min(max(last, 0), self.shape[axis])
        return slice(first, last)

    def rasterize(self, rect: Rect, inside: bool = False) -> "OccupancyGrid":
        """Grid with the cells of ``rect`` set.

        ``inside=False`` marks every cell the rectangle overlaps (obstacles);
        ``inside=True`` marks only cells fully inside it (goals).
        """
        if self.ndim != 2:
            raise ConfigurationError("rectangles need a two-dimensional workspace")
        cells = np.array(self.cells)
        xs = self._rect_range(rect.x_min, rect.x_max, 0, inside)
        zs = self._rect_range(rect.z_min, rect.z_max, 1, inside)
        cells[xs, zs] = True
        return self.with_cells(cells)

    def outside_region(self, region: Rect) -> "OccupancyGrid":
        """Cells whose center lies outside ``region``; the workspace complement of Ξ."""
        mesh_x, mesh_z = np.meshgrid(self.centers(0), self.centers(1), indexing="ij")
        inside = (
            (mesh_x >= region.x_min)
            & (mesh_x <= region.x_max)
            & (mesh_z >= region.z_min)
            & (mesh_z <= region.z_max)
        )
        return self.with_cells(~inside)

    def to_text(self) -> str:
        """Plain PBM (P1) rendering with the geometry in a comment line.

        Rows are z indices in ascending order, columns are x indices.
        """
        cells = self.cells if self.ndim == 2 else self.cells[:, None]
        width, height = cells.shape
        header = " ".join(f"{v:.12g}" for v in self.lower)
        lines = [
            "P1",
            f"# lower {header} resolution {self.resolution:.12g}",
            f"{width} {height}",
        ]
        lines.extend(" ".join("1" if c else "0" for c in cells[:, j]) for j in range(height))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "OccupancyGrid":
        lines = [line.strip() for line in text.strip().splitlines()]
        try:
            if lines[0] != "P1" or not lines[1].startswith("# lower "):
                raise ValueError("missing P1 header")
            fields = lines[1].split()
            res_at = fields.index("resolution")
            lower = tuple(float(v) for v in fields[2:res_at])
            resolution = float(fields[res_at + 1])
            width, height = (int(v) for v in lines[2].split())
            rows = [[c == "1" for c in line.split()] for line in lines[3 : 3 + height]]
            cells = np.array(rows, dtype=bool).T
            if cells.shape != (width, height):
                raise ValueError(f"expected {width}x{height} cells, got {cells.shape}")
        except (IndexError, ValueError) as e:
            raise ArtifactError(f"malformed occupancy text: {e}") from e
        if len(lower) == 1:
            cells = cells[:, 0]
        return cls(lower, resolution, cells)

    def write(self, path: Path | str) -> None:
        try:
            Path(path).write_text(self.to_text())
        except OSError as e:
            raise ArtifactError(f"cannot write occupancy grid to {path}: {e}") from e

    def occupied_indices(self) -> list[list[int]]:
        return np.argwhere(self.cells).tolist()
