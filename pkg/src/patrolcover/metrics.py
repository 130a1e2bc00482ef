"""Patrol-loop evaluation metrics: length, rotation, revisit time, coverage."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .path_plan import SQRT2, GlobalPath, step_counts
from .sensor import wrap_angle
from .waypoints import CoverageGrid


@dataclass(frozen=True)
class VelocityModel:
    v_linear: float = 0.26  # m/s
    v_angular: float = 1.82  # rad/s

    def __post_init__(self) -> None:
        if not (self.v_linear > 0 and self.v_angular > 0):
            raise ValueError(f"velocities must be positive, got {self.v_linear}, {self.v_angular}")


@dataclass(frozen=True)
class MetricsReport:
    path_length: float
    total_rotation: float
    revisit_time: float
    coverage_percent: float
    computation_time: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def path_length(path: GlobalPath | Sequence[tuple[int, int]], resolution: float) -> float:
    cells = path.cells if isinstance(path, GlobalPath) else path
    straight, diagonal = step_counts(cells)
    return (straight + diagonal * SQRT2) * resolution


def _headings(points: Sequence[Sequence[float]]) -> list[float]:
    out = []
    for a, b in zip(points, points[1:]):
        if a[0] == b[0] and a[1] == b[1]:
            continue
        out.append(math.atan2(b[1] - a[1], b[0] - a[0]))
    return out


def _turning(headings: list[float], closed: bool) -> float:
    if len(headings) < 1:
        return 0.0
    total = sum(abs(wrap_angle(h1 - h0)) for h0, h1 in zip(headings, headings[1:]))
    if closed:
        total += abs(wrap_angle(headings[0] - headings[-1]))
    return total


def cumulative_rotation(path: GlobalPath | Sequence[tuple[int, int]], closed: bool | None = None) -> float:
    """Sum of absolute heading changes between consecutive path steps.

    For a closed path the turn from the last step back onto the first is
    included. Cells are (row, col), so the step heading is atan2(d_row, d_col).
    """
    if isinstance(path, GlobalPath):
        cells, closed = path.cells, path.closed if closed is None else closed
    else:
        cells, closed = path, bool(closed)
    if len(cells) < 2:
        return 0.0
    return _turning(_headings([(c[1], c[0]) for c in cells]), closed)


def waypoint_rotation(points: Sequence[Sequence[float]], closed: bool = True) -> float:
    """Turning at the waypoints only, treating legs between them as straight lines.

    ``points`` are (x, y) in visiting order, without repeating the first.
    """
    pts = list(points)
    if closed and len(pts) > 1:
        pts = pts + pts[:1]
    return _turning(_headings(pts), closed)


def revisit_time(l_p: float, theta_total: float, v: VelocityModel) -> float:
    return l_p / v.v_linear + theta_total / v.v_angular


def coverage_percent(cov: CoverageGrid) -> float:
    total = int(np.count_nonzero(cov.base.free_mask))
    if total == 0:
        raise ValueError("map has no Free cells")
    return 100.0 * int(np.count_nonzero(cov.explored & cov.base.free_mask)) / total
