"""Minkowski operations on occupancy grids."""

import math

import numpy as np
from scipy.ndimage import binary_dilation, binary_erosion

from wavetrack.safesets.occupancy import OccupancyGrid


def disk_structure(radius: float, resolution: float, ndim: int = 2) -> np.ndarray:
    """Cells whose offset from the center has Euclidean length ≤ ``radius``."""
    reach = max(int(math.floor(radius / resolution + 1e-9)), 0)
    axes = [np.arange(-reach, reach + 1) * resolution] * ndim
    mesh = np.meshgrid(*axes, indexing="ij")
    distance = np.sqrt(sum(m**2 for m in mesh))
    return distance <= radius + 1e-9 * resolution


def box_structure(half_extents, resolution: float) -> np.ndarray:
    reach = [max(math.ceil(h / resolution - 1e-9), 0) for h in half_extents]
    return np.ones(tuple(2 * k + 1 for k in reach), dtype=bool)


def dilate_disk(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """B ⊕ ball(radius)."""
    structure = disk_structure(radius, grid.resolution, grid.ndim)
    if structure.size == 1:
        return grid
    return grid.with_cells(binary_dilation(grid.cells, structure=structure))


def erode_disk(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """B ⊖ ball(radius); cells near the workspace edge erode as if outside were free."""
    structure = disk_structure(radius, grid.resolution, grid.ndim)
    if structure.size == 1:
        return grid
    return grid.with_cells(
        binary_erosion(grid.cells, structure=structure, border_value=0)
    )


def dilate_box(grid: OccupancyGrid, half_extents) -> OccupancyGrid:
    """Inflate by a rectangular footprint, e.g. the vehicle's extent."""
    structure = box_structure(half_extents, grid.resolution)
    if structure.size == 1:
        return grid
    return grid.with_cells(binary_dilation(grid.cells, structure=structure))


def _shift(cells: np.ndarray, offset) -> np.ndarray:
    """cells translated by integer ``offset``; vacated cells are False."""
    shifted = np.zeros_like(cells)
    source, target = [], []
    for delta, size in zip(offset, cells.shape, strict=True):
        delta = int(delta)
        if abs(delta) >= size:
            return shifted
        if delta >= 0:
            source.append(slice(0, size - delta))
            target.append(slice(delta, size))
        else:
            source.append(slice(-delta, size))
            target.append(slice(0, size + delta))
    shifted[tuple(target)] = cells[tuple(source)]
    return shifted


def dilate_offsets(grid: OccupancyGrid, offsets: np.ndarray) -> OccupancyGrid:
    """Union of ``grid`` translated by every integer cell offset in (k, ndim) ``offsets``."""
    offsets = np.asarray(offsets, dtype=int).reshape(-1, grid.ndim)
    result = np.zeros(grid.shape, dtype=bool)
    for offset in offsets:
        result |= _shift(grid.cells, offset)
    return grid.with_cells(result)
