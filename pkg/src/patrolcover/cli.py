"""Command-line interface: ``patrolcover plan | metrics | maps``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

from .config import ConfigError, PlanConfig, load_config
from .grid import GridIndex, MapError, OccupancyGrid, grid_to_world, load_map_file
from .maps import bundled_map_path, bundled_names, write_bundled
from .metrics import VelocityModel, coverage_percent, cumulative_rotation, path_length, revisit_time, waypoint_rotation
from .path_plan import GlobalPath, PlanningError
from .pipeline import PatrolPlan, plan_patrol
from .render import render_plan
from .sensor import Pose, SensorModel, VisibilityMap
from .waypoints import CoverageGrid, Waypoint, mark_explored

log = logging.getLogger("patrolcover")

EXIT_PLAN_FAILED = 1
EXIT_BAD_INPUT = 2

_FLAG_KEYS = (
    "fov_deg", "range_m", "min_coverage", "epsilon", "max_iterations", "headings",
    "grasp_iters", "rcl", "seed", "inflate_m", "v_linear", "v_angular", "start",
    "rotation_mode", "threads",
)
METRIC_KEYS = ("path_length", "total_rotation", "revisit_time", "coverage_percent")


class InputError(Exception):
    pass


def resolve_map_path(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    if arg in bundled_names():
        return bundled_map_path(arg)
    raise InputError(f"map {arg!r} not found (bundled maps: {', '.join(bundled_names())})")


def _load_grid(arg: str) -> OccupancyGrid:
    try:
        return load_map_file(resolve_map_path(arg))
    except MapError as exc:
        raise InputError(str(exc)) from None


# -- artifact writers ---------------------------------------------------------

def waypoints_csv(plan: PatrolPlan) -> str:
    position = {idx: pos for pos, idx in enumerate(plan.tour.order)}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "row", "col", "world_x", "world_y", "heading_rad",
                     "gained_area_m2", "tour_position"])
    for k, wp in enumerate(plan.waypoints):
        x, y = grid_to_world(plan.grid, wp.pose.cell)
        writer.writerow([k, wp.pose.cell.row, wp.pose.cell.col, repr(x), repr(y),
                         repr(wp.pose.heading), repr(wp.gained_area), position[k]])
    return buf.getvalue()


def path_document(plan: PatrolPlan, cfg: PlanConfig) -> dict:
    m = plan.metrics
    return {
        "resolution": plan.grid.resolution,
        "origin": list(plan.grid.origin),
        "width": plan.grid.width,
        "height": plan.grid.height,
        "waypoint_order": list(plan.tour.order),
        "waypoints": [{"row": w.pose.cell.row, "col": w.pose.cell.col, "heading_rad": w.pose.heading}
                      for w in plan.waypoints],
        "segment_offsets": list(plan.path.segment_offsets),
        "cells": [[c.row, c.col] for c in plan.path.cells],
        "closed": plan.path.closed,
        "sensor": {"fov_deg": cfg.fov_deg, "range_m": cfg.range_m},
        "rotation_mode": cfg.rotation_mode,
        "velocity": {"v_linear": cfg.v_linear, "v_angular": cfg.v_angular},
        "metrics": {k: getattr(m, k) for k in METRIC_KEYS},
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def summary_lines(metrics: dict) -> list[str]:
    return [
        f"path length        {metrics['path_length']:.3f} m",
        f"total rotation     {metrics['total_rotation']:.3f} rad",
        f"revisit time       {metrics['revisit_time']:.2f} s",
        f"coverage           {metrics['coverage_percent']:.2f} %",
    ]


# -- commands -----------------------------------------------------------------

def cmd_plan(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else PlanConfig()
    cfg = cfg.updated({k: getattr(args, k) for k in _FLAG_KEYS})
    grid = _load_grid(args.map)
    out = Path(args.out)

    plan = plan_patrol(grid, cfg)
    t_render = time.perf_counter()
    svg = render_plan(grid, plan.run.coverage, plan.waypoints, plan.commit_tour.order, plan.path)
    log.debug("render took %.3f s", time.perf_counter() - t_render)

    out.mkdir(parents=True, exist_ok=True)
    metrics = plan.metrics.as_dict()
    metrics.update({
        "waypoint_count": len(plan.waypoints),
        "stop_reason": plan.run.stop_reason.value,
        "commit_order_length": plan.commit_tour.length,
        "tour_length": plan.tour.length,
        "explored_area_m2": plan.run.coverage.explored_area,
        "rotation_mode": cfg.rotation_mode,
        "v_linear": cfg.v_linear,
        "v_angular": cfg.v_angular,
    })
    (out / "waypoints.csv").write_text(waypoints_csv(plan))
    (out / "path.json").write_text(_dump_json(path_document(plan, cfg)))
    (out / "metrics.json").write_text(_dump_json(metrics))
    (out / "plan.svg").write_text(svg)

    print(f"{len(plan.waypoints)} waypoints ({plan.run.stop_reason.value}), "
          f"tour {plan.commit_tour.length:.2f} m -> {plan.tour.length:.2f} m")
    for line in summary_lines(metrics):
        print(line)
    print(f"computation time   {plan.metrics.computation_time:.2f} s")
    print(f"wrote {out}/waypoints.csv, path.json, metrics.json, plan.svg")
    return 0


def _read_path_doc(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse {path}: {exc}") from None
    required = ("resolution", "origin", "waypoint_order", "waypoints", "cells", "closed", "sensor")
    missing = [k for k in required if k not in doc]
    if missing:
        raise InputError(f"{path} lacks fields: {', '.join(missing)}")
    return doc


def recompute_metrics(doc: dict, grid: OccupancyGrid, velocity: VelocityModel) -> dict:
    """Recompute every stored metric from a path document and its map."""
    if not math.isclose(doc["resolution"], grid.resolution, rel_tol=0, abs_tol=1e-12):
        raise InputError(f"path resolution {doc['resolution']} does not match map resolution {grid.resolution}")
    if any(abs(a - b) > 1e-9 for a, b in zip(doc["origin"], grid.origin)):
        raise InputError(f"path origin {doc['origin']} does not match map origin {list(grid.origin)}")
    if (doc.get("width", grid.width), doc.get("height", grid.height)) != (grid.width, grid.height):
        raise InputError(f"path was planned on a {doc['width']}x{doc['height']} map, "
                         f"not {grid.width}x{grid.height}")
    cells = [GridIndex(int(r), int(c)) for r, c in doc["cells"]]
    for a, b in zip(cells, cells[1:]):
        if max(abs(a.row - b.row), abs(a.col - b.col)) > 1:
            raise InputError(f"path jumps from {tuple(a)} to {tuple(b)}")
    for c in cells:
        if not grid.is_free(c):
            raise InputError(f"path cell {tuple(c)} is not Free on this map")
    waypoints = [Waypoint(Pose((w["row"], w["col"]), w["heading_rad"])) for w in doc["waypoints"]]
    order = [int(i) for i in doc["waypoint_order"]]
    if sorted(order) != list(range(len(waypoints))):
        raise InputError("waypoint_order is not a permutation of the waypoints")

    sensor = SensorModel(math.radians(doc["sensor"]["fov_deg"]), doc["sensor"]["range_m"])
    cov = CoverageGrid(grid)
    vis = VisibilityMap(grid, sensor)
    for wp in waypoints:
        if not grid.is_free(wp.pose.cell):
            raise InputError(f"waypoint {tuple(wp.pose.cell)} is not Free on this map")
        mark_explored(cov, wp.pose, sensor, vis)

    path = GlobalPath(tuple(cells), tuple(doc.get("segment_offsets", ())), bool(doc["closed"]))
    length = path_length(path, grid.resolution)
    if doc.get("rotation_mode", "path") == "waypoints":
        rotation = waypoint_rotation([grid_to_world(grid, waypoints[i].pose.cell) for i in order])
    else:
        rotation = cumulative_rotation(path)
    return {
        "path_length": length,
        "total_rotation": rotation,
        "revisit_time": revisit_time(length, rotation, velocity),
        "coverage_percent": coverage_percent(cov),
    }


def cmd_metrics(args: argparse.Namespace) -> int:
    doc = _read_path_doc(Path(args.path_json))
    grid = _load_grid(args.map)
    stored_v = doc.get("velocity", {})
    v_lin = args.v_linear if args.v_linear is not None else stored_v.get("v_linear", VelocityModel.v_linear)
    v_ang = args.v_angular if args.v_angular is not None else stored_v.get("v_angular", VelocityModel.v_angular)
    try:
        velocity = VelocityModel(float(v_lin), float(v_ang))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    metrics = recompute_metrics(doc, grid, velocity)
    if args.json:
        print(json.dumps(metrics, indent=1))
    else:
        for line in summary_lines(metrics):
            print(line)

    stored = doc.get("metrics") or {}
    same_velocity = (velocity.v_linear, velocity.v_angular) == (
        stored_v.get("v_linear"), stored_v.get("v_angular"))
    keys = [k for k in METRIC_KEYS if k in stored and (same_velocity or k != "revisit_time")]
    bad = [k for k in keys if abs(stored[k] - metrics[k]) > 1e-9]
    if bad:
        for k in bad:
            print(f"mismatch: {k} stored {stored[k]!r}, recomputed {metrics[k]!r}", file=sys.stderr)
        return EXIT_PLAN_FAILED
    return 0


def cmd_maps(args: argparse.Namespace) -> int:
    if args.export:
        for path in write_bundled(args.export):
            print(path)
    else:
        for name in bundled_names():
            print(f"{name}\t{bundled_map_path(name)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patrolcover", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a closed patrol loop over a map")
    p.add_argument("map", help="map YAML path or bundled map name")
    p.add_argument("--config", help="YAML/JSON file of planner settings; flags override it")
    p.add_argument("--out", default="plan_out", help="output directory (default: %(default)s)")
    p.add_argument("--fov-deg", dest="fov_deg", type=float)
    p.add_argument("--range-m", dest="range_m", type=float)
    p.add_argument("--min-coverage", dest="min_coverage", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iterations", dest="max_iterations", type=int)
    p.add_argument("--headings", type=int)
    p.add_argument("--grasp-iters", dest="grasp_iters", type=int)
    p.add_argument("--rcl", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--inflate-m", dest="inflate_m", type=float)
    p.add_argument("--v-linear", dest="v_linear", type=float)
    p.add_argument("--v-angular", dest="v_angular", type=float)
    p.add_argument("--start", help='start pose "x,y,deg" in world coordinates')
    p.add_argument("--rotation-mode", dest="rotation_mode", choices=("path", "waypoints"))
    p.add_argument("--threads", type=int, help="worker threads for candidate scoring and GRASP")
    p.set_defaults(func=cmd_plan)

    m = sub.add_parser("metrics", help="recompute metrics from a stored path.json")
    m.add_argument("path_json")
    m.add_argument("map", help="map YAML path or bundled map name")
    m.add_argument("--v-linear", dest="v_linear", type=float)
    m.add_argument("--v-angular", dest="v_angular", type=float)
    m.add_argument("--json", action="store_true", help="print metrics as JSON")
    m.set_defaults(func=cmd_metrics)

    b = sub.add_parser("maps", help="list or export the bundled maps")
    b.add_argument("--export", metavar="DIR", help="write the bundled maps as PGM+YAML into DIR")
    b.set_defaults(func=cmd_maps)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (PlanningError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLAN_FAILED


if __name__ == "__main__":
    sys.exit(main())
