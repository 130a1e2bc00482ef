"""Field-of-view model and occlusion-aware visibility on occupancy grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridIndex, OccupancyGrid

TWO_PI = 2.0 * math.pi
# absorbs float noise at the inclusive FoV and range boundaries
_ANGLE_EPS = 1e-9
_DIST_EPS = 1e-9


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def wrap_angles(a: np.ndarray) -> np.ndarray:
    out = np.mod(a + math.pi, TWO_PI) - math.pi
    out[out == -math.pi] = math.pi
    return out


@dataclass(frozen=True)
class SensorModel:
    fov: float  # radians, full angular width
    range: float  # meters

    def __post_init__(self) -> None:
        if not 0 < self.fov <= TWO_PI + _ANGLE_EPS:
            raise ValueError(f"fov must lie in (0, 2*pi], got {self.fov}")
        if not self.range > 0:
            raise ValueError(f"range must be positive, got {self.range}")

    def range_cells(self, resolution: float) -> float:
        return self.range / resolution


@dataclass(frozen=True)
class Pose:
    cell: GridIndex
    heading: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "cell", GridIndex(int(self.cell[0]), int(self.cell[1])))
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))


def bresenham_line(a: tuple[int, int], b: tuple[int, int]) -> list[GridIndex]:
    """Integer Bresenham cells from ``a`` to ``b``, both inclusive.

    On exact half-cell ties the minor coordinate stays on the start's side.
    """
    r0, c0 = a
    r1, c1 = b
    dc = abs(c1 - c0)
    dr = -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    cells = []
    while True:
        cells.append(GridIndex(r0, c0))
        if r0 == r1 and c0 == c1:
            return cells
        e2 = 2 * err
        if e2 > dr:
            err += dr
            c0 += sc
        if e2 < dc:
            err += dc
            r0 += sr


@lru_cache(maxsize=16)
def _offset_table(height: int, width: int, radius_sq: float):
    """Bresenham interiors for every offset reachable on a ``height x width`` grid.

    Returns (d_row, d_col, interior_flat) where ``interior_flat[k]`` lists the
    flat-index deltas of the strictly-interior line cells for offset ``k``,
    padded with 0 (the origin cell). Flat deltas are valid without wraparound
    because both endpoints, and so the whole line, lie inside the grid.
    """
    max_r = min(height - 1, int(math.floor(math.sqrt(radius_sq))))
    max_c = min(width - 1, int(math.floor(math.sqrt(radius_sq))))
    rr, cc = np.meshgrid(np.arange(-max_r, max_r + 1), np.arange(-max_c, max_c + 1), indexing="ij")
    rr, cc = rr.ravel(), cc.ravel()
    keep = rr * rr + cc * cc <= radius_sq + _DIST_EPS
    rr, cc = rr[keep], cc[keep]
    n_interior = np.maximum(np.abs(rr), np.abs(cc)) - 1
    longest = max(int(n_interior.max()), 1)
    interior = np.zeros((rr.size, longest), dtype=np.int64)
    for k, (dr, dc) in enumerate(zip(rr.tolist(), cc.tolist())):
        line = bresenham_line((0, 0), (dr, dc))[1:-1]
        if line:
            interior[k, :len(line)] = [r * width + c for r, c in line]
    for arr in (rr, cc, interior):
        arr.setflags(write=False)
    return rr, cc, interior


class VisibilityMap:
    """Heading-independent line-of-sight sets for one grid and sensor range.

    What a cell can see depends only on the static map, so each cell's
    occlusion test runs once and is reused for every heading and every
    planning iteration.
    """

    def __init__(self, grid: OccupancyGrid, sensor: SensorModel):
        self.grid = grid
        self.sensor = sensor
        self._blocking = ~grid.free_mask.ravel()
        self._free = grid.free_mask.ravel()
        r = sensor.range_cells(grid.resolution)
        self._table = _offset_table(grid.height, grid.width, r * r)
        self._cache: dict[GridIndex, tuple[np.ndarray, np.ndarray]] = {}

    def line_of_sight(self, cell: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        """Flat indices of Free cells in range with a clear line, and their bearings.

        Includes ``cell`` itself with bearing 0.
        """
        cell = GridIndex(*cell)
        hit = self._cache.get(cell)
        if hit is not None:
            return hit
        grid = self.grid
        if not grid.is_free(cell):
            raise ValueError(f"pose cell {tuple(cell)} is not Free")
        rr, cc, interior = self._table
        row, col = cell
        tr, tc = row + rr, col + cc
        inside = (tr >= 0) & (tr < grid.height) & (tc >= 0) & (tc < grid.width)
        origin = row * grid.width + col
        targets = (tr * grid.width + tc)[inside]
        candidate = self._free[targets]
        targets = targets[candidate]
        lines = interior[inside][candidate] + origin
        clear = ~self._blocking[lines].any(axis=1)
        targets = targets[clear]
        d_row = rr[inside][candidate][clear]
        d_col = cc[inside][candidate][clear]
        bearings = np.arctan2(d_row, d_col).astype(np.float64)
        targets.setflags(write=False)
        bearings.setflags(write=False)
        self._cache[cell] = (targets, bearings)
        return targets, bearings

    def visible_flat(self, pose: Pose) -> np.ndarray:
        targets, bearings = self.line_of_sight(pose.cell)
        if self.sensor.fov >= TWO_PI - _ANGLE_EPS:
            return targets
        off = np.abs(wrap_angles(bearings - pose.heading))
        keep = off <= self.sensor.fov / 2.0 + _ANGLE_EPS
        keep[targets == pose.cell[0] * self.grid.width + pose.cell[1]] = True
        return targets[keep]

    def visible(self, pose: Pose) -> set[GridIndex]:
        flat = self.visible_flat(pose)
        rows, cols = np.divmod(flat, self.grid.width)
        return {GridIndex(int(r), int(c)) for r, c in zip(rows.tolist(), cols.tolist())}


def visible_cells(grid: OccupancyGrid, pose: Pose, sensor: SensorModel) -> set[GridIndex]:
    """Free cells the sensor sees from ``pose``: in range, inside the FoV, unoccluded.

    Occupied and Unknown cells both block sight. The pose cell is always visible.
    """
    return VisibilityMap(grid, sensor).visible(pose)
