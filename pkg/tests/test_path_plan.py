
import numpy as np
import pytest

from patrolcover.grid import CellState, OccupancyGrid
from patrolcover.path_plan import (NoPathError, PlanningError, astar, inflate_obstacles, path_cost,
                                   reachable_mask, step_counts, stitch_path)

from conftest import open_grid
from oracles import dijkstra_path, random_noise_map


def test_inflate_zero_is_identity():
    grid = OccupancyGrid.from_strings(["..#", "...", "?.."])
    assert np.array_equal(inflate_obstacles(grid, 0.0).cells, grid.cells)


def test_inflate_one_cell_disk():
    grid = open_grid(5, 5)
    cells = grid.cells.copy()
    cells[2, 2] = CellState.OCCUPIED
    out = inflate_obstacles(grid.with_cells(cells), 0.05)
    occupied = {tuple(int(v) for v in p) for p in np.argwhere(out.cells == CellState.OCCUPIED)}
    assert occupied == {(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)}


def test_inflate_saturates_and_keeps_unknown():
    grid = OccupancyGrid.from_strings(["?....", ".....", "....."])
    out = inflate_obstacles(grid, 10.0)
    assert out.cells[2, 0] == CellState.UNKNOWN  # '?' is the top-left cell, grid row 2
    assert not out.free_mask.any()


def test_inflate_radius_rounding():
    # 0.15 / 0.05 is a hair under 3.0 in floating point; 3 cells must still count
    grid = open_grid(1, 8)
    cells = grid.cells.copy()
    cells[0, 0] = CellState.OCCUPIED
    out = inflate_obstacles(grid.with_cells(cells), 0.15)
    assert out.free_mask[0].tolist() == [False] * 4 + [True] * 4
    with pytest.raises(ValueError):
        inflate_obstacles(grid, -1)


def test_astar_trivial_and_straight():
    grid = open_grid(10, 10)
    assert astar(grid, (3, 3), (3, 3)) == [(3, 3)]
    path = astar(grid, (0, 0), (0, 5))
    assert path == [(0, c) for c in range(6)]
    assert path_cost(path) == 5


def test_astar_errors():
    grid = OccupancyGrid.from_strings(["..#..", "..#..", "..#.."])
    with pytest.raises(NoPathError):
        astar(grid, (0, 0), (0, 4))
    with pytest.raises(PlanningError, match="not Free"):
        astar(grid, (0, 2), (0, 0))


def test_astar_no_corner_cutting():
    grid = OccupancyGrid.from_strings([".#", "#."])
    with pytest.raises(NoPathError):
        astar(grid, (0, 1), (1, 0))
    # one blocked orthogonal neighbour is fine
    grid = OccupancyGrid.from_strings(["..", "#."])
    assert astar(grid, (0, 1), (1, 0)) == [(0, 1), (1, 0)]


def test_astar_matches_dijkstra_on_random_maps():
    rng = np.random.default_rng(77)
    solved = 0
    while solved < 30:
        grid = random_noise_map(rng, 30, 0.25)
        free = np.argwhere(grid.free_mask)
        a, b = (tuple(int(v) for v in free[k]) for k in rng.integers(len(free), size=2))
        ref = dijkstra_path(grid, a, b)
        if ref is None:
            with pytest.raises(NoPathError):
                astar(grid, a, b)
            continue
        path = astar(grid, a, b)
        assert step_counts(path) == step_counts(ref)
        assert path[0] == a and path[-1] == b
        assert all(grid.is_free(c) for c in path)
        solved += 1


def test_astar_is_deterministic():
    grid = open_grid(12, 12)
    assert astar(grid, (0, 0), (7, 11)) == astar(grid, (0, 0), (7, 11))


def test_stitch_single_and_pair():
    grid = open_grid(1, 10)
    single = stitch_path(grid, [(0, 3)])
    assert single.cells == ((0, 3),) and single.closed
    pair = stitch_path(grid, [(0, 1), (0, 6)])
    assert pair.cells[0] == pair.cells[-1] == (0, 1)
    assert path_cost(pair.cells) == pytest.approx(2 * path_cost(astar(grid, (0, 1), (0, 6))))
    assert pair.segment_offsets == (0, 5)


def test_stitch_around_obstacle_matches_segment_oracle():
    grid = open_grid(20, 20)
    cells = grid.cells.copy()
    cells[6:14, 6:14] = CellState.OCCUPIED
    grid = grid.with_cells(cells)
    tour = [(2, 2), (2, 17), (17, 17), (10, 3), (17, 2)]
    path = stitch_path(grid, tour)
    expected = sum(path_cost(dijkstra_path(grid, a, b)) for a, b in zip(tour, tour[1:] + tour[:1]))
    assert path_cost(path.cells) == pytest.approx(expected, abs=1e-9)
    assert path.cells[0] == path.cells[-1]
    for k, off in enumerate(path.segment_offsets):
        assert path.cells[off] == tour[k]
    for a, b in zip(path.cells, path.cells[1:]):
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1
        assert grid.is_free(b)


def test_stitch_reports_unreachable_pair():
    grid = OccupancyGrid.from_strings(["..#..", "..#.."])
    with pytest.raises(NoPathError) as info:
        stitch_path(grid, [(0, 0), (0, 4)])
    assert info.value.start == (0, 0) and info.value.goal == (0, 4)


def test_reachable_mask():
    grid = OccupancyGrid.from_strings([".#.", "#..", "..."])
    mask = reachable_mask(grid, (0, 0))
    assert mask.sum() == 6  # (2,0) is sealed off by the no-squeeze rule
    assert not mask[2, 0]
