"""Fast-revisit coverage path planning for patrol robots on occupancy grids."""

from .grid import CellState, GridIndex, OccupancyGrid, WorldPoint, free_area, load_map, load_map_file
from .sensor import Pose, SensorModel, bresenham_line, visible_cells
from .waypoints import CoverageGrid, StopConfig, Waypoint, generate_waypoints
from .tour import GraspConfig, Tour, grasp_order, two_opt
from .path_plan import GlobalPath, astar, inflate_obstacles, stitch_path
from .metrics import MetricsReport, VelocityModel
from .config import PlanConfig
from .pipeline import PatrolPlan, plan_patrol

__version__ = "0.1.0"
