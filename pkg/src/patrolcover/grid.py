"""Occupancy grid maps in the PGM + YAML robot-map format.

Grid row 0 is the bottom image row, so rows grow with world y and columns
grow with world x.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, NamedTuple

import numpy as np
import yaml

DEFAULT_FREE_THRESH = 0.196
DEFAULT_OCCUPIED_THRESH = 0.65


class MapError(ValueError):
    """Raised for unreadable or inconsistent map inputs."""


class CellState(enum.IntEnum):
    FREE = 0
    OCCUPIED = 100
    UNKNOWN = -1


class GridIndex(NamedTuple):
    row: int
    col: int


class WorldPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Immutable trinary occupancy map.

    ``cells`` is an ``(height, width)`` int8 array holding ``CellState`` values.
    ``origin`` is the world pose ``(x, y, yaw)`` of the lower-left corner of
    cell (0, 0); yaw is carried along but not applied, as in map_server.
    """

    cells: np.ndarray
    resolution: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells)
        if cells.ndim != 2 or cells.shape[0] == 0 or cells.shape[1] == 0:
            raise MapError(f"cells must be a non-empty 2D array, got shape {cells.shape}")
        if not (self.resolution > 0 and math.isfinite(self.resolution)):
            raise MapError(f"resolution must be positive, got {self.resolution}")
        valid = np.isin(cells, [s.value for s in CellState])
        if not valid.all():
            raise MapError("cells contain values outside Free/Occupied/Unknown")
        cells = cells.astype(np.int8, copy=True)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "resolution", float(self.resolution))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    def state(self, idx: tuple[int, int]) -> CellState:
        self.check_index(idx)
        return CellState(int(self.cells[idx[0], idx[1]]))

    def is_free(self, idx: tuple[int, int]) -> bool:
        return self.in_bounds(idx) and self.cells[idx[0], idx[1]] == CellState.FREE

    def in_bounds(self, idx: tuple[int, int]) -> bool:
        return 0 <= idx[0] < self.height and 0 <= idx[1] < self.width

    def check_index(self, idx: tuple[int, int]) -> None:
        if not self.in_bounds(idx):
            raise IndexError(f"cell {tuple(idx)} outside {self.height}x{self.width} grid")

    def with_cells(self, cells: np.ndarray) -> "OccupancyGrid":
        return OccupancyGrid(cells, self.resolution, self.origin)

    @classmethod
    def from_strings(cls, rows: list[str], resolution: float = 0.05,
                     origin: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> "OccupancyGrid":
        """Build a grid from text art: ``.`` free, ``#`` occupied, ``?`` unknown.

        The first string is the TOP row, as the map would be drawn.
        """
        table = {".": CellState.FREE, "#": CellState.OCCUPIED, "?": CellState.UNKNOWN}
        data = [[table[ch] for ch in line] for line in reversed(rows)]
        return cls(np.array(data, dtype=np.int8), resolution, origin)


def free_area(grid: OccupancyGrid) -> float:
    return int(np.count_nonzero(grid.free_mask)) * grid.resolution ** 2


def world_to_grid(grid: OccupancyGrid, p: tuple[float, float]) -> GridIndex:
    x, y = p
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite world point {p}")
    col = math.floor((x - grid.origin[0]) / grid.resolution)
    row = math.floor((y - grid.origin[1]) / grid.resolution)
    idx = GridIndex(row, col)
    if not grid.in_bounds(idx):
        raise IndexError(f"world point ({x}, {y}) falls outside the map")
    return idx


def grid_to_world(grid: OccupancyGrid, idx: tuple[int, int]) -> WorldPoint:
    grid.check_index(idx)
    return WorldPoint(
        grid.origin[0] + (idx[1] + 0.5) * grid.resolution,
        grid.origin[1] + (idx[0] + 0.5) * grid.resolution,
    )


# -- PGM / YAML I/O ---------------------------------------------------------

def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise MapError("truncated PGM header")
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(data: bytes) -> np.ndarray:
    """Decode an 8-bit binary (P5) or ASCII (P2) PGM into a ``(rows, cols)`` uint8 array.

    Array row 0 is the top image row.
    """
    if len(data) < 2 or data[:2] not in (b"P5", b"P2"):
        raise MapError("not a PGM image (expected P5 or P2 magic)")
    try:
        (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise MapError(f"malformed PGM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise MapError(f"PGM dimensions must be positive, got {width}x{height}")
    if not 0 < maxval <= 255:
        raise MapError(f"only 8-bit PGM is supported (maxval {maxval})")
    if magic == b"P5":
        start = pos + 1  # exactly one whitespace byte ends the header
        raw = data[start:start + width * height]
        if len(raw) != width * height:
            raise MapError(f"PGM raster truncated: expected {width * height} bytes, got {len(raw)}")
        pixels = np.frombuffer(raw, dtype=np.uint8)
    else:
        try:
            values = [int(tok) for tok in data[pos:].split()]
        except ValueError:
            raise MapError("malformed ASCII PGM raster") from None
        if len(values) < width * height:
            raise MapError(f"PGM raster truncated: expected {width * height} values, got {len(values)}")
        pixels = np.array(values[:width * height], dtype=np.int64)
        if pixels.min() < 0 or pixels.max() > maxval:
            raise MapError("ASCII PGM value out of range")
        pixels = pixels.astype(np.uint8)
    if maxval != 255:
        pixels = np.round(pixels.astype(np.float64) * 255.0 / maxval).astype(np.uint8)
    return pixels.reshape(height, width)


def write_pgm(pixels: np.ndarray) -> bytes:
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes()


_REQUIRED_KEYS = ("resolution", "origin")


def load_map(image_bytes: bytes, metadata: Mapping[str, Any]) -> OccupancyGrid:
    """Classify a grayscale map image using map_server's trinary thresholds."""
    missing = [k for k in _REQUIRED_KEYS if k not in metadata]
    if missing:
        raise MapError(f"map metadata missing keys: {', '.join(missing)}")
    try:
        resolution = float(metadata["resolution"])
        origin = tuple(float(v) for v in metadata["origin"])
        negate = int(metadata.get("negate", 0))
        occ_th = float(metadata.get("occupied_thresh", DEFAULT_OCCUPIED_THRESH))
        free_th = float(metadata.get("free_thresh", DEFAULT_FREE_THRESH))
    except (TypeError, ValueError) as exc:
        raise MapError(f"bad map metadata: {exc}") from None
    if not resolution > 0:
        raise MapError(f"resolution must be positive, got {resolution}")
    if len(origin) == 2:
        origin = (*origin, 0.0)
    if len(origin) != 3:
        raise MapError(f"origin must be [x, y, yaw], got {metadata['origin']!r}")

    pixels = read_pgm(image_bytes)
    for key, actual in (("width", pixels.shape[1]), ("height", pixels.shape[0])):
        if key in metadata and int(metadata[key]) != actual:
            raise MapError(f"image {key} {actual} disagrees with metadata {key} {metadata[key]}")

    values = pixels.astype(np.float64)
    p = values / 255.0 if negate else (255.0 - values) / 255.0
    cells = np.full(pixels.shape, CellState.UNKNOWN, dtype=np.int8)
    cells[p >= occ_th] = CellState.OCCUPIED
    cells[p <= free_th] = CellState.FREE
    # image row 0 is the top of the map
    return OccupancyGrid(cells[::-1], resolution, origin)


def load_map_file(yaml_path: str | Path) -> OccupancyGrid:
    yaml_path = Path(yaml_path)
    try:
        metadata = yaml.safe_load(yaml_path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise MapError(f"cannot read map metadata {yaml_path}: {exc}") from None
    if not isinstance(metadata, dict):
        raise MapError(f"{yaml_path} is not a YAML mapping")
    if "image" not in metadata:
        raise MapError("map metadata missing keys: image")
    image_path = Path(metadata["image"])
    if not image_path.is_absolute():
        image_path = yaml_path.parent / image_path
    try:
        data = image_path.read_bytes()
    except OSError as exc:
        raise MapError(f"cannot read map image {image_path}: {exc}") from None
    return load_map(data, metadata)


def grid_to_pixels(grid: OccupancyGrid) -> np.ndarray:
    """Encode a grid as map_server-style pixels (254 free, 0 occupied, 205 unknown)."""
    pixels = np.full(grid.shape, 205, dtype=np.uint8)
    pixels[grid.cells == CellState.FREE] = 254
    pixels[grid.cells == CellState.OCCUPIED] = 0
    return pixels[::-1].copy()


def save_map(grid: OccupancyGrid, yaml_path: str | Path) -> None:
    yaml_path = Path(yaml_path)
    image_name = yaml_path.with_suffix(".pgm").name
    (yaml_path.parent / image_name).write_bytes(write_pgm(grid_to_pixels(grid)))
    meta = {
        "image": image_name,
        "resolution": grid.resolution,
        "origin": list(grid.origin),
        "negate": 0,
        "occupied_thresh": DEFAULT_OCCUPIED_THRESH,
        "free_thresh": DEFAULT_FREE_THRESH,
    }
    yaml_path.write_text(yaml.safe_dump(meta, sort_keys=False))
