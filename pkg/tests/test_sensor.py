import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patrolcover.grid import CellState, OccupancyGrid
from patrolcover.sensor import Pose, SensorModel, VisibilityMap, bresenham_line, visible_cells, wrap_angle

from conftest import open_grid
from oracles import random_block_map, raymarch_visible, textbook_bresenham


def test_bresenham_axis_and_diagonal():
    assert bresenham_line((0, 0), (0, 3)) == [(0, 0), (0, 1), (0, 2), (0, 3)]
    assert bresenham_line((0, 0), (4, 4)) == [(i, i) for i in range(5)]
    assert bresenham_line((2, 2), (2, 2)) == [(2, 2)]


def test_bresenham_matches_textbook_example():
    assert bresenham_line((0, 0), (1, 3)) == textbook_bresenham((0, 0), (1, 3))
    assert bresenham_line((0, 0), (1, 3)) == [(0, 0), (0, 1), (1, 2), (1, 3)]


def test_bresenham_matches_textbook_everywhere():
    for a in [(0, 0), (3, -2)]:
        for dr in range(-12, 13):
            for dc in range(-12, 13):
                b = (a[0] + dr, a[1] + dc)
                assert bresenham_line(a, b) == textbook_bresenham(a, b), (a, b)


@given(st.tuples(st.integers(-30, 30), st.integers(-30, 30)),
       st.tuples(st.integers(-30, 30), st.integers(-30, 30)))
def test_bresenham_structure(a, b):
    line = bresenham_line(a, b)
    assert line[0] == a and line[-1] == b
    assert len(line) == max(abs(b[0] - a[0]), abs(b[1] - a[1])) + 1
    for p, q in zip(line, line[1:]):
        assert max(abs(p[0] - q[0]), abs(p[1] - q[1])) == 1
    # every cell lies within half a cell of the exact segment along the minor axis
    n = len(line) - 1
    if n:
        for i, (r, c) in enumerate(line):
            er = a[0] + (b[0] - a[0]) * i / n
            ec = a[1] + (b[1] - a[1]) * i / n
            assert abs(r - er) <= 0.5 + 1e-12 and abs(c - ec) <= 0.5 + 1e-12


def test_wrap_angle():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert Pose((0, 0), 2 * math.pi).heading == pytest.approx(0.0)


def test_sensor_invariants():
    with pytest.raises(ValueError):
        SensorModel(0.0, 1.0)
    with pytest.raises(ValueError):
        SensorModel(7.0, 1.0)
    with pytest.raises(ValueError):
        SensorModel(1.0, 0.0)


def test_full_fov_sees_whole_open_grid():
    grid = open_grid(11, 11)
    seen = visible_cells(grid, Pose((5, 5), 0.0), SensorModel(2 * math.pi, 1.0))
    assert len(seen) == 121


def wall_scene():
    grid = open_grid(11, 11)
    cells = grid.cells.copy()
    cells[:, 6] = CellState.OCCUPIED
    return grid.with_cells(cells)


def test_wall_blocks_everything_beyond():
    grid = wall_scene()
    pose = Pose((5, 5), 0.0)
    sensor = SensorModel(2 * math.pi, 1.0)
    seen = visible_cells(grid, pose, sensor)
    assert all(c <= 5 for _, c in seen)
    assert seen == raymarch_visible(grid, (5, 5), 0.0, 2 * math.pi, 1.0)


def test_fov_boundary_is_inclusive():
    grid = open_grid(5, 5)
    seen = visible_cells(grid, Pose((2, 2), 0.0), SensorModel(math.pi / 2, 1.0))
    assert (3, 2) not in seen  # straight up: bearing pi/2
    assert (3, 3) in seen  # bearing pi/4 == fov/2
    assert (1, 3) in seen  # bearing -pi/4
    assert (2, 2) in seen


def test_range_limit():
    grid = open_grid(1, 12)
    seen = visible_cells(grid, Pose((0, 0), 0.0), SensorModel(2 * math.pi, 0.25))  # 5 cells
    assert seen == {(0, c) for c in range(6)}


def test_unknown_blocks_sight_and_is_never_visible():
    grid = OccupancyGrid.from_strings(["..?.."])
    seen = visible_cells(grid, Pose((0, 0), 0.0), SensorModel(2 * math.pi, 1.0))
    assert seen == {(0, 0), (0, 1)}


def test_pose_must_be_free():
    grid = OccupancyGrid.from_strings(["#."])
    with pytest.raises(ValueError, match="not Free"):
        visible_cells(grid, Pose((0, 0), 0.0), SensorModel(1.0, 1.0))


def _random_case(seed):
    rng = np.random.default_rng(seed)
    grid = random_block_map(rng)
    free = np.argwhere(grid.free_mask)
    cell = tuple(int(v) for v in free[rng.integers(len(free))])
    return grid, cell, rng


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 2 * math.pi), st.floats(0.1, 2 * math.pi),
       st.floats(-math.pi, math.pi), st.floats(0.1, 1.5))
def test_monotone_in_fov(seed, f1, f2, heading, rng_m):
    grid, cell, _ = _random_case(seed)
    lo, hi = sorted((f1, f2))
    pose = Pose(cell, heading)
    assert visible_cells(grid, pose, SensorModel(lo, rng_m)) <= visible_cells(grid, pose, SensorModel(hi, rng_m))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 2 * math.pi), st.floats(-math.pi, math.pi),
       st.floats(0.05, 1.5), st.floats(0.05, 1.5))
def test_monotone_in_range(seed, fov, heading, r1, r2):
    grid, cell, _ = _random_case(seed)
    lo, hi = sorted((r1, r2))
    pose = Pose(cell, heading)
    assert visible_cells(grid, pose, SensorModel(fov, lo)) <= visible_cells(grid, pose, SensorModel(fov, hi))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 2 * math.pi), st.floats(-math.pi, math.pi))
def test_occlusion_soundness(seed, fov, heading):
    grid, cell, _ = _random_case(seed)
    for target in visible_cells(grid, Pose(cell, heading), SensorModel(fov, 1.5)):
        for mid in bresenham_line(cell, target)[1:-1]:
            assert grid.is_free(mid)


def test_visibility_cache_matches_fresh_computation():
    grid, cell, _ = _random_case(7)
    sensor = SensorModel(math.radians(120), 0.8)
    vis = VisibilityMap(grid, sensor)
    for heading in np.linspace(-3, 3, 7):
        pose = Pose(cell, heading)
        assert vis.visible(pose) == visible_cells(grid, pose, sensor)
