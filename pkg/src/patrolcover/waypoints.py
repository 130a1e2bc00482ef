"""Greedy max-coverage waypoint generation over a frontier of explored cells."""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import GridIndex, OccupancyGrid, free_area
from .sensor import TWO_PI, Pose, SensorModel, VisibilityMap, wrap_angles, _ANGLE_EPS

log = logging.getLogger(__name__)


@dataclass
class CoverageGrid:
    """Explored-cell overlay on a static map; only Free cells are ever flagged."""

    base: OccupancyGrid
    explored: np.ndarray = None

    def __post_init__(self) -> None:
        if self.explored is None:
            self.explored = np.zeros(self.base.shape, dtype=bool)
        else:
            self.explored = np.array(self.explored, dtype=bool)
            if self.explored.shape != self.base.shape:
                raise ValueError("explored mask shape does not match the grid")
            if (self.explored & ~self.base.free_mask).any():
                raise ValueError("explored mask flags non-Free cells")

    def copy(self) -> "CoverageGrid":
        return CoverageGrid(self.base, self.explored.copy())

    @property
    def explored_count(self) -> int:
        return int(np.count_nonzero(self.explored))

    @property
    def explored_area(self) -> float:
        return self.explored_count * self.base.resolution ** 2


@dataclass(frozen=True)
class Waypoint:
    pose: Pose
    gained_area: float = 0.0


@dataclass(frozen=True)
class CandidateScore:
    candidate: Pose
    area: float
    gained: int = 0  # newly explored cells, logged alongside the total

    def order_key(self):
        """Sort key: larger area first, then smallest (row, col, heading)."""
        return (-self.area, self.candidate.cell.row, self.candidate.cell.col, self.candidate.heading)


@dataclass(frozen=True)
class StopConfig:
    min_coverage_fraction: float = 0.95
    epsilon: float = 0.005
    max_iterations: int = 10_000

    def __post_init__(self) -> None:
        # 0 is accepted as a degenerate "stop after the first mark"
        if not 0 <= self.min_coverage_fraction <= 1:
            raise ValueError(f"min_coverage_fraction must lie in [0, 1], got {self.min_coverage_fraction}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


class StopReason(str, enum.Enum):
    NO_CANDIDATES = "no_candidates"
    COVERAGE_REACHED = "coverage_reached"
    GROWTH_STALLED = "growth_stalled"
    MAX_ITERATIONS = "max_iterations"


@dataclass
class IterationRecord:
    iteration: int
    explored_area: float  # A_i, after committing this iteration's waypoint
    gained_area: float  # delta A_i
    scores: list[CandidateScore] = field(default_factory=list)
    selected: CandidateScore | None = None


@dataclass
class WaypointRun:
    waypoints: list[Waypoint]
    coverage: CoverageGrid
    history: list[IterationRecord]
    stop_reason: StopReason

    def __iter__(self):
        return iter((self.waypoints, self.coverage))


def _vis_for(cov: CoverageGrid, sensor: SensorModel, vis: VisibilityMap | None) -> VisibilityMap:
    if vis is None:
        return VisibilityMap(cov.base, sensor)
    if vis.grid is not cov.base or vis.sensor != sensor:
        raise ValueError("visibility map was built for a different grid or sensor")
    return vis


def mark_explored(cov: CoverageGrid, pose: Pose, sensor: SensorModel,
                  vis: VisibilityMap | None = None) -> float:
    """Flag every cell visible from ``pose``; return the newly explored area."""
    vis = _vis_for(cov, sensor, vis)
    flat = vis.visible_flat(pose)
    explored = cov.explored.reshape(-1)
    new = int(np.count_nonzero(~explored[flat]))
    explored[flat] = True
    return new * cov.base.resolution ** 2


def boundary_candidates(cov: CoverageGrid) -> list[GridIndex]:
    """Explored cells 4-adjacent to an unexplored Free cell, sorted by (row, col)."""
    frontier = cov.base.free_mask & ~cov.explored
    touching = np.zeros_like(frontier)
    touching[1:, :] |= frontier[:-1, :]
    touching[:-1, :] |= frontier[1:, :]
    touching[:, 1:] |= frontier[:, :-1]
    touching[:, :-1] |= frontier[:, 1:]
    rows, cols = np.nonzero(cov.explored & touching)
    return [GridIndex(int(r), int(c)) for r, c in zip(rows.tolist(), cols.tolist())]


def heading_set(headings: int) -> list[float]:
    if headings < 1:
        raise ValueError(f"headings must be >= 1, got {headings}")
    return [TWO_PI * k / headings for k in range(headings)]


def estimate_coverage(cov: CoverageGrid, candidate: tuple[int, int], sensor: SensorModel,
                      headings: int = 8, vis: VisibilityMap | None = None) -> CandidateScore:
    """Best-heading total explored area if ``candidate`` became the next waypoint.

    Equivalent to marking a copy of ``cov`` from each heading and counting
    every explored cell; ``cov`` itself is left untouched. Equal-area headings
    resolve to the earliest in the sweep.
    """
    vis = _vis_for(cov, sensor, vis)
    targets, bearings = vis.line_of_sight(candidate)
    unexplored = ~cov.explored.reshape(-1)[targets]
    angles = np.array(heading_set(headings))
    if sensor.fov >= TWO_PI - _ANGLE_EPS:
        gains = np.full(headings, int(np.count_nonzero(unexplored)))
    else:
        off = np.abs(wrap_angles(bearings[None, :] - angles[:, None]))
        in_view = off <= sensor.fov / 2.0 + _ANGLE_EPS
        in_view[:, targets == candidate[0] * cov.base.width + candidate[1]] = True
        gains = (in_view & unexplored[None, :]).sum(axis=1)
    best = int(np.argmax(gains))
    total = cov.explored_count + int(gains[best])
    return CandidateScore(Pose(candidate, angles[best]), total * cov.base.resolution ** 2, int(gains[best]))


def select_next(scores: list[CandidateScore]) -> CandidateScore:
    if not scores:
        raise ValueError("no candidate scores to select from")
    return min(scores, key=CandidateScore.order_key)


def generate_waypoints(grid: OccupancyGrid, start: Pose, sensor: SensorModel,
                       stop: StopConfig | None = None, headings: int = 8, *,
                       allowed: np.ndarray | None = None, workers: int = 1,
                       vis: VisibilityMap | None = None) -> WaypointRun:
    """Run the mark / frontier / score / select loop from ``start``.

    ``allowed`` optionally restricts which cells may become waypoints (e.g.
    the inflated free space reachable from the start); visibility always uses
    the raw map. Candidate scoring runs on ``workers`` threads against a
    frozen snapshot, so results do not depend on the worker count.
    """
    stop = stop or StopConfig()
    if not grid.is_free(start.cell):
        raise ValueError(f"start cell {tuple(start.cell)} is not Free")
    if allowed is not None and not allowed[start.cell]:
        raise ValueError(f"start cell {tuple(start.cell)} is not an allowed waypoint cell")
    cov = CoverageGrid(grid)
    vis = _vis_for(cov, sensor, vis)
    total_free = free_area(grid)

    gained = mark_explored(cov, start, sensor, vis)
    waypoints = [Waypoint(start, gained)]
    history = [IterationRecord(0, cov.explored_area, gained)]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            area = cov.explored_area
            if area > stop.min_coverage_fraction * total_free:
                reason = StopReason.COVERAGE_REACHED
                break
            if area > 0 and history[-1].gained_area / area < stop.epsilon:
                reason = StopReason.GROWTH_STALLED
                break
            if len(waypoints) - 1 >= stop.max_iterations:
                reason = StopReason.MAX_ITERATIONS
                break
            candidates = boundary_candidates(cov)
            if allowed is not None:
                candidates = [c for c in candidates if allowed[c]]
            if not candidates:
                reason = StopReason.NO_CANDIDATES
                break

            def score(c, _cov=cov):
                return estimate_coverage(_cov, c, sensor, headings, vis)

            scores = list(pool.map(score, candidates)) if pool else [score(c) for c in candidates]
            best = select_next(scores)
            gained = mark_explored(cov, best.candidate, sensor, vis)
            waypoints.append(Waypoint(best.candidate, gained))
            history.append(IterationRecord(len(history), cov.explored_area, gained, scores, best))
            log.debug("iteration %d: %d candidates, picked %s heading %.3f, +%.4f m^2 (total %.4f m^2)",
                      len(history) - 1, len(scores), tuple(best.candidate.cell),
                      best.candidate.heading, gained, cov.explored_area)
    finally:
        if pool:
            pool.shutdown()
    log.info("waypoint generation stopped (%s) after %d waypoints, %.1f%% explored",
             reason.value, len(waypoints), 100.0 * cov.explored_area / total_free if total_free else 0.0)
    return WaypointRun(waypoints, cov, history, reason)
