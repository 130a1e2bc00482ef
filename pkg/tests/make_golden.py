"""Regenerate tests/golden/*.svg. Run only when rendering changes on purpose."""

from pathlib import Path

from patrolcover.config import PlanConfig
from patrolcover.grid import OccupancyGrid
from patrolcover.pipeline import plan_patrol
from patrolcover.render import render_plan

GOLDEN_MAP = [
    "####################",
    "#..................#",
    "#..................#",
    "#.....######.......#",
    "#.....######.......#",
    "#..................#",
    "#..................#",
    "#..................#",
    "#.........#........#",
    "#.........#........#",
    "#.........#........#",
    "#.........#........#",
    "#..................#",
    "#..####............#",
    "#..####.........???#",
    "#...............???#",
    "#..................#",
    "#..................#",
    "#..................#",
    "####################",
]
GOLDEN_CONFIG = PlanConfig(fov_deg=90, range_m=0.6, inflate_m=0.05, seed=0, start=(0.175, 0.175, 0))


def golden_svg() -> str:
    grid = OccupancyGrid.from_strings(GOLDEN_MAP)
    plan = plan_patrol(grid, GOLDEN_CONFIG)
    return render_plan(grid, plan.run.coverage, plan.waypoints, plan.commit_tour.order, plan.path)


if __name__ == "__main__":
    out = Path(__file__).parent / "golden" / "plan_20x20_seed0.svg"
    out.write_text(golden_svg())
    print(out)
