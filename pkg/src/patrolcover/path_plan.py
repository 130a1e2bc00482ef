"""A* grid search and closed-loop stitching of ordered waypoints."""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .grid import CellState, GridIndex, OccupancyGrid

SQRT2 = math.sqrt(2.0)
_MOVES = (
    (0, 1, 1.0), (1, 0, 1.0), (0, -1, 1.0), (-1, 0, 1.0),
    (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2),
)


class PlanningError(RuntimeError):
    pass


class NoPathError(PlanningError):
    def __init__(self, start, goal, message: str | None = None):
        self.start, self.goal = tuple(start), tuple(goal)
        super().__init__(message or f"no path from {self.start} to {self.goal}")


@dataclass(frozen=True)
class GlobalPath:
    cells: tuple[GridIndex, ...]
    segment_offsets: tuple[int, ...]
    closed: bool = True


def inflate_obstacles(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """Turn every Free cell within ``radius`` meters of a non-Free cell Occupied."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    free = grid.free_mask
    if radius == 0 or free.all() or not free.any():
        return grid
    r_cells = radius / grid.resolution
    # squared EDT is an integer; compare with slack so 0.15/0.05 still means 3 cells
    dist_sq = ndimage.distance_transform_edt(free) ** 2
    hit = free & (dist_sq <= r_cells * r_cells + 1e-6)
    cells = grid.cells.copy()
    cells[hit] = CellState.OCCUPIED
    return grid.with_cells(cells)


def _neighbors(free: np.ndarray, r: int, c: int):
    h, w = free.shape
    for dr, dc, cost in _MOVES:
        nr, nc = r + dr, c + dc
        if not (0 <= nr < h and 0 <= nc < w) or not free[nr, nc]:
            continue
        # no squeezing diagonally between two blocked orthogonal cells
        if dr and dc and not free[r + dr, c] and not free[r, c + dc]:
            continue
        yield nr, nc, cost


def octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dr, dc = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dr, dc) + (SQRT2 - 1.0) * min(dr, dc)


def astar(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]) -> list[GridIndex]:
    """Minimum-cost 8-connected path (straight 1, diagonal sqrt 2)."""
    start, goal = GridIndex(*start), GridIndex(*goal)
    for name, cell in (("start", start), ("goal", goal)):
        if not grid.is_free(cell):
            raise PlanningError(f"{name} cell {tuple(cell)} is not Free")
    if start == goal:
        return [start]
    free = grid.free_mask
    g = {start: 0.0}
    parent: dict[GridIndex, GridIndex] = {}
    closed: set[GridIndex] = set()
    # ties on f prefer larger g, then smaller (row, col)
    heap = [(octile(start, goal), -0.0, start.row, start.col)]
    while heap:
        _, neg_g, r, c = heapq.heappop(heap)
        cur = GridIndex(r, c)
        if cur in closed:
            continue
        if cur == goal:
            path = [cur]
            while path[-1] != start:
                path.append(parent[path[-1]])
            return path[::-1]
        closed.add(cur)
        base = -neg_g
        for nr, nc, cost in _neighbors(free, r, c):
            nxt = GridIndex(nr, nc)
            if nxt in closed:
                continue
            ng = base + cost
            if ng < g.get(nxt, math.inf):
                g[nxt] = ng
                parent[nxt] = cur
                heapq.heappush(heap, (ng + octile(nxt, goal), -ng, nr, nc))
    raise NoPathError(start, goal)


def step_counts(cells: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """(straight, diagonal) step counts along a cell sequence."""
    straight = diagonal = 0
    for a, b in zip(cells, cells[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            diagonal += 1
        elif a != b:
            straight += 1
    return straight, diagonal


def path_cost(cells: Sequence[tuple[int, int]]) -> float:
    straight, diagonal = step_counts(cells)
    return straight + diagonal * SQRT2


def reachable_mask(grid: OccupancyGrid, start: tuple[int, int]) -> np.ndarray:
    """Cells reachable from ``start`` under the same moves A* uses."""
    free = grid.free_mask
    seen = np.zeros(grid.shape, dtype=bool)
    if not grid.is_free(start):
        return seen
    seen[start[0], start[1]] = True
    queue = deque([tuple(start)])
    while queue:
        r, c = queue.popleft()
        for nr, nc, _ in _neighbors(free, r, c):
            if not seen[nr, nc]:
                seen[nr, nc] = True
                queue.append((nr, nc))
    return seen


def stitch_path(grid: OccupancyGrid, tour: Sequence) -> GlobalPath:
    """Join consecutive waypoints (and last back to first) with A* segments.

    ``tour`` holds waypoints, poses or cells in visiting order.
    """
    cells_in = [_cell_of(w) for w in tour]
    if not cells_in:
        raise ValueError("empty tour")
    for cell in cells_in:
        if not grid.is_free(cell):
            raise PlanningError(f"waypoint cell {tuple(cell)} is not Free")
    cells = [cells_in[0]]
    offsets = []
    n = len(cells_in)
    legs = [(cells_in[k], cells_in[(k + 1) % n]) for k in range(n)] if n > 1 else []
    for a, b in legs:
        offsets.append(len(cells) - 1)
        try:
            segment = astar(grid, a, b)
        except NoPathError as exc:
            raise NoPathError(a, b, f"waypoints {tuple(a)} and {tuple(b)} are not connected") from exc
        cells.extend(segment[1:])
    if not offsets:
        offsets.append(0)
    return GlobalPath(tuple(cells), tuple(offsets), closed=True)


def _cell_of(item) -> GridIndex:
    if hasattr(item, "pose"):
        item = item.pose
    if hasattr(item, "cell"):
        item = item.cell
    return GridIndex(int(item[0]), int(item[1]))
