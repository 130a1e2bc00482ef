"""Bundled synthetic maps (0.05 m/cell) and their generators."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .grid import CellState, OccupancyGrid, load_map_file, save_map

RESOLUTION = 0.05


def _box(height: int, width: int) -> np.ndarray:
    cells = np.full((height, width), CellState.FREE, dtype=np.int8)
    cells[0, :] = cells[-1, :] = CellState.OCCUPIED
    cells[:, 0] = cells[:, -1] = CellState.OCCUPIED
    return cells


def two_rooms() -> OccupancyGrid:
    """60x60: two rooms joined by a doorway, a table in each room."""
    cells = _box(60, 60)
    cells[:, 29:31] = CellState.OCCUPIED
    cells[22:38, 29:31] = CellState.FREE  # doorway
    cells[40:46, 10:18] = CellState.OCCUPIED  # table, left room
    cells[12:20, 42:47] = CellState.OCCUPIED  # table, right room
    return OccupancyGrid(cells, RESOLUTION)


def ring_corridor() -> OccupancyGrid:
    """60x60: corridor looping around a solid central block."""
    cells = _box(60, 60)
    cells[16:44, 16:44] = CellState.OCCUPIED
    cells[44:52, 28:32] = CellState.OCCUPIED  # pillar in the top corridor
    return OccupancyGrid(cells, RESOLUTION)


def shelves() -> OccupancyGrid:
    """60x80 warehouse-style aisles between shelf rows, unmapped corner."""
    cells = _box(60, 80)
    for r0 in (12, 26, 40):
        cells[r0:r0 + 4, 12:34] = CellState.OCCUPIED
        cells[r0:r0 + 4, 46:68] = CellState.OCCUPIED
    cells[52:59, 70:79] = CellState.UNKNOWN
    return OccupancyGrid(cells, RESOLUTION)


GENERATORS = {
    "two_rooms": two_rooms,
    "ring_corridor": ring_corridor,
    "shelves": shelves,
}


def bundled_names() -> list[str]:
    return sorted(GENERATORS)


def bundled_map_path(name: str) -> Path:
    if name not in GENERATORS:
        raise KeyError(f"unknown bundled map {name!r}; choose from {', '.join(bundled_names())}")
    return Path(str(resources.files(__package__) / "data" / f"{name}.yaml"))


def load_bundled(name: str) -> OccupancyGrid:
    return load_map_file(bundled_map_path(name))


def write_bundled(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in bundled_names():
        path = directory / f"{name}.yaml"
        save_map(GENERATORS[name](), path)
        written.append(path)
    return written
