"""End-to-end planning: waypoints, tour ordering, path stitching, metrics."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .config import PlanConfig
from .grid import GridIndex, OccupancyGrid, WorldPoint, grid_to_world, world_to_grid
from .metrics import (MetricsReport, coverage_percent, cumulative_rotation, path_length,
                      revisit_time, waypoint_rotation)
from .path_plan import GlobalPath, PlanningError, inflate_obstacles, reachable_mask, stitch_path
from .sensor import Pose
from .tour import Tour, grasp_order, tour_length
from .waypoints import Waypoint, WaypointRun, generate_waypoints

log = logging.getLogger(__name__)


@dataclass
class PatrolPlan:
    grid: OccupancyGrid
    traversable: OccupancyGrid  # the inflated map the path is planned on
    run: WaypointRun
    commit_tour: Tour  # waypoints in the order they were generated
    tour: Tour
    path: GlobalPath
    metrics: MetricsReport

    @property
    def waypoints(self) -> list[Waypoint]:
        return self.run.waypoints

    @property
    def ordered_waypoints(self) -> list[Waypoint]:
        return [self.run.waypoints[i] for i in self.tour.order]

    def waypoint_points(self) -> list[WorldPoint]:
        return [grid_to_world(self.grid, w.pose.cell) for w in self.run.waypoints]


def default_start(traversable: OccupancyGrid) -> GridIndex:
    """Traversable cell closest to the centroid of all traversable cells."""
    rows, cols = np.nonzero(traversable.free_mask)
    if rows.size == 0:
        raise PlanningError("map has no traversable cells after inflation")
    d = (rows - rows.mean()) ** 2 + (cols - cols.mean()) ** 2
    k = int(np.lexsort((cols, rows, d))[0])
    return GridIndex(int(rows[k]), int(cols[k]))


def resolve_start(grid: OccupancyGrid, traversable: OccupancyGrid, cfg: PlanConfig) -> Pose:
    if cfg.start is None:
        return Pose(default_start(traversable), 0.0)
    x, y, deg = cfg.start
    try:
        cell = world_to_grid(grid, (x, y))
    except IndexError as exc:
        raise PlanningError(f"start pose: {exc}") from None
    if not grid.is_free(cell):
        raise PlanningError(f"start cell (row {cell.row}, col {cell.col}) is {grid.state(cell).name}, not Free")
    if not traversable.is_free(cell):
        raise PlanningError(f"start cell (row {cell.row}, col {cell.col}) lies within the "
                            f"{cfg.inflate_m} m obstacle inflation radius")
    return Pose(cell, math.radians(deg))


def compute_metrics(grid: OccupancyGrid, path: GlobalPath, waypoints: list[Waypoint],
                    order, coverage_pct: float, cfg: PlanConfig,
                    computation_time: float = 0.0) -> MetricsReport:
    length = path_length(path, grid.resolution)
    if cfg.rotation_mode == "waypoints":
        pts = [grid_to_world(grid, waypoints[i].pose.cell) for i in order]
        rotation = waypoint_rotation(pts)
    else:
        rotation = cumulative_rotation(path)
    return MetricsReport(length, rotation, revisit_time(length, rotation, cfg.velocity),
                         coverage_pct, computation_time)


def plan_patrol(grid: OccupancyGrid, cfg: PlanConfig | None = None) -> PatrolPlan:
    cfg = cfg or PlanConfig()
    t0 = time.perf_counter()
    traversable = inflate_obstacles(grid, cfg.inflate_m)
    start = resolve_start(grid, traversable, cfg)
    allowed = reachable_mask(traversable, start.cell)

    run = generate_waypoints(grid, start, cfg.sensor, cfg.stop, cfg.headings,
                             allowed=allowed, workers=cfg.threads)
    points = [grid_to_world(grid, w.pose.cell) for w in run.waypoints]
    identity = tuple(range(len(points)))
    commit_tour = Tour(identity, tour_length(points, identity))
    tour = grasp_order(points, cfg.grasp, workers=cfg.threads, initial=identity)
    if tour.length > commit_tour.length + 1e-9:
        raise AssertionError("optimized tour is longer than the commit order")
    log.info("tour: %.2f m in commit order, %.2f m optimized", commit_tour.length, tour.length)

    path = stitch_path(traversable, [run.waypoints[i] for i in tour.order])
    elapsed = time.perf_counter() - t0
    metrics = compute_metrics(grid, path, run.waypoints, tour.order,
                              coverage_percent(run.coverage), cfg, elapsed)
    return PatrolPlan(grid, traversable, run, commit_tour, tour, path, metrics)
