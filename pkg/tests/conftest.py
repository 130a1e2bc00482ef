import numpy as np
import pytest

from patrolcover.grid import CellState, OccupancyGrid

ACCEPTANCE_LINES: list[str] = []


def open_grid(h: int, w: int, resolution: float = 0.05) -> OccupancyGrid:
    return OccupancyGrid(np.full((h, w), CellState.FREE, dtype=np.int8), resolution)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
