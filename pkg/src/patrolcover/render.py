"""SVG rendering of a plan: map raster, explored overlay, waypoints and paths."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import CellState, GridIndex, OccupancyGrid
from .path_plan import GlobalPath
from .waypoints import CoverageGrid, Waypoint


@dataclass(frozen=True)
class RenderStyle:
    occupied: str = "#404040"
    free: str = "#ffffff"
    unknown: str = "#b0b0b0"
    explored: str = "#dcdcdc"
    waypoint: str = "#1f4fff"
    commit_path: str = "#707070"
    final_path: str = "#e00000"
    commit_stroke: float = 1.0
    final_stroke: float = 1.5
    waypoint_radius: float = 2.5
    scale: int = 4  # pixels per cell

    def __post_init__(self) -> None:
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")


def _fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def compress_path(cells: Sequence[tuple[int, int]]) -> list[GridIndex]:
    """Drop interior cells of straight runs; the polyline traced is unchanged."""
    pts = [GridIndex(*c) for c in cells]
    if len(pts) < 3:
        return pts
    out = [pts[0]]
    for prev, cur, nxt in zip(pts, pts[1:], pts[2:]):
        d1 = (cur[0] - prev[0], cur[1] - prev[1])
        d2 = (nxt[0] - cur[0], nxt[1] - cur[1])
        if d1 != d2:
            out.append(cur)
    out.append(pts[-1])
    return out


def _raster_classes(grid: OccupancyGrid, explored: np.ndarray | None) -> np.ndarray:
    cls = np.zeros(grid.shape, dtype=np.int8)  # 0 free
    cls[grid.cells == CellState.OCCUPIED] = 1
    cls[grid.cells == CellState.UNKNOWN] = 2
    if explored is not None:
        cls[explored] = 3
    return cls


def render_plan(grid: OccupancyGrid, cov: CoverageGrid | None, waypoints: Sequence[Waypoint],
                commit_order_tour: Sequence[int] | None, final_path: GlobalPath | None,
                style: RenderStyle | None = None) -> str:
    """Return a standalone SVG document for one planning run.

    Cells are drawn as horizontal runs of equal-colour rectangles (a 1x1 map
    gives exactly one). ``commit_order_tour`` indexes ``waypoints`` and is
    drawn as a closed straight-line polyline; ``final_path`` is drawn after
    collinear-run compression.
    """
    style = style or RenderStyle()
    if cov is not None and cov.base.shape != grid.shape:
        raise ValueError(f"coverage grid {cov.base.shape} does not match map {grid.shape}")
    for w in waypoints:
        if not grid.in_bounds(w.pose.cell):
            raise ValueError(f"waypoint {tuple(w.pose.cell)} lies outside the map")
    if final_path is not None:
        for c in final_path.cells:
            if not grid.in_bounds(c):
                raise ValueError(f"path cell {tuple(c)} lies outside the map")

    s = style.scale
    h, w = grid.shape
    colours = [style.free, style.occupied, style.unknown, style.explored]

    def xy(cell) -> tuple[str, str]:
        return _fmt((cell[1] + 0.5) * s), _fmt((h - 1 - cell[0] + 0.5) * s)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * s}" height="{h * s}" '
        f'viewBox="0 0 {w * s} {h * s}">',
        '<g id="cells" shape-rendering="crispEdges">',
    ]
    cls = _raster_classes(grid, None if cov is None else cov.explored)
    for row in range(h - 1, -1, -1):
        y = (h - 1 - row) * s
        line = cls[row]
        start = 0
        for col in range(1, w + 1):
            if col == w or line[col] != line[start]:
                out.append(f'<rect x="{start * s}" y="{y}" width="{(col - start) * s}" height="{s}" '
                           f'fill="{colours[line[start]]}"/>')
                start = col
    out.append("</g>")

    if commit_order_tour is not None and len(commit_order_tour) > 1:
        pts = " ".join(",".join(xy(waypoints[i].pose.cell)) for i in commit_order_tour)
        out.append(f'<polygon id="commit-order" points="{pts}" fill="none" stroke="{style.commit_path}" '
                   f'stroke-width="{_fmt(style.commit_stroke)}" stroke-dasharray="{_fmt(2 * s)}"/>')
    if final_path is not None and final_path.cells:
        pts = " ".join(",".join(xy(c)) for c in compress_path(final_path.cells))
        out.append(f'<polyline id="final-path" points="{pts}" fill="none" stroke="{style.final_path}" '
                   f'stroke-width="{_fmt(style.final_stroke)}" stroke-linejoin="round"/>')
    out.append('<g id="waypoints">')
    for k, wp in enumerate(waypoints):
        cx, cy = xy(wp.pose.cell)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(style.waypoint_radius)}" '
                   f'fill="{style.waypoint}"><title>{k}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
