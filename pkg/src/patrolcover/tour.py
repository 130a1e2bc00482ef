"""Closed-tour ordering of waypoints: randomized greedy construction plus 2-opt.

Distances are straight-line; the map is not consulted here. Index 0 is the
patrol start and always stays first.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# a 2-opt move must shorten the tour by more than this to count
IMPROVEMENT_EPS = 1e-10


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: float


@dataclass(frozen=True)
class GraspConfig:
    iterations: int = 32
    rcl_size: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.rcl_size < 1:
            raise ValueError(f"rcl_size must be >= 1, got {self.rcl_size}")


def distance_matrix(points: Sequence[Sequence[float]]) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _check_order(n: int, order: Sequence[int]) -> None:
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {list(order)} is not a permutation of {n} points")


def tour_length(points: Sequence[Sequence[float]], order: Sequence[int]) -> float:
    """Closed-loop Euclidean length, closing edge included."""
    _check_order(len(points), order)
    total = 0.0
    for a, b in zip(order, list(order[1:]) + list(order[:1])):
        total += math.dist(points[a], points[b])
    return total


def _length(dist: np.ndarray, order: Sequence[int]) -> float:
    idx = np.asarray(order)
    return float(dist[idx, np.roll(idx, -1)].sum())


def greedy_randomized_construct(points, cfg: GraspConfig, rng: np.random.Generator,
                                dist: np.ndarray | None = None) -> Tour:
    """Nearest-neighbour tour from index 0, picking uniformly among the RCL."""
    n = len(points)
    if n == 0:
        raise ValueError("need at least one point")
    if dist is None:
        dist = distance_matrix(points)
    order = [0]
    remaining = list(range(1, n))
    while remaining:
        here = order[-1]
        # stable sort keeps index order among equal distances
        ranked = sorted(remaining, key=lambda j: dist[here, j])
        rcl = ranked[:min(cfg.rcl_size, len(ranked))]
        pick = rcl[int(rng.integers(len(rcl)))] if len(rcl) > 1 else rcl[0]
        order.append(pick)
        remaining.remove(pick)
    return Tour(tuple(order), _length(dist, order))


def _move_gains(dist: np.ndarray, order: np.ndarray) -> np.ndarray:
    """gain[i, j] for reversing order[i..j]; only 1 <= i < j <= n-1 is meaningful."""
    nxt = np.roll(order, -1)
    prev = np.roll(order, 1)
    # removed edges (prev[i], order[i]) and (order[j], nxt[j])
    removed = dist[prev, order][:, None] + dist[order, nxt][None, :]
    added = dist[prev[:, None], order[None, :]] + dist[order[:, None], nxt[None, :]]
    return removed - added


def _valid_moves(n: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return (i >= 1) & (j > i)


def two_opt(points, tour: Tour, dist: np.ndarray | None = None) -> Tour:
    """Best-improvement 2-opt until no segment reversal shortens the tour."""
    n = len(points)
    _check_order(n, tour.order)
    if dist is None:
        dist = distance_matrix(points)
    order = np.asarray(tour.order)
    start = int(np.nonzero(order == 0)[0][0])
    order = np.roll(order, -start)
    if n < 4:
        return Tour(tuple(int(v) for v in order), _length(dist, order))
    valid = _valid_moves(n)
    while True:
        gains = np.where(valid, _move_gains(dist, order), -np.inf)
        # argmax returns the first (smallest i, then j) among equal best gains
        k = int(np.argmax(gains))
        if gains.flat[k] <= IMPROVEMENT_EPS:
            break
        i, j = divmod(k, n)
        order[i:j + 1] = order[i:j + 1][::-1].copy()
    return Tour(tuple(int(v) for v in order), _length(dist, order))


def best_two_opt_gain(points, order: Sequence[int]) -> float:
    """Largest length reduction available from any single segment reversal (<= 0 if none)."""
    n = len(points)
    _check_order(n, order)
    if n < 4:
        return 0.0
    dist = distance_matrix(points)
    gains = np.where(_valid_moves(n), _move_gains(dist, np.asarray(order)), -np.inf)
    return float(gains.max())


def round_rng(seed: int, round_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, round_index]))


def grasp_order(points, cfg: GraspConfig | None = None, workers: int = 1,
                initial: Sequence[int] | None = None) -> Tour:
    """Shortest tour over ``cfg.iterations`` construct-then-2-opt rounds.

    If ``initial`` is given (typically the commit order), its 2-opt refinement
    joins the pool, so the result is never longer than that order. Each round
    draws from its own seed stream, and equal lengths resolve to the
    lexicographically smallest order, so the result does not depend on
    ``workers``.
    """
    cfg = cfg or GraspConfig()
    n = len(points)
    if n == 0:
        raise ValueError("need at least one point")
    if n == 1:
        return Tour((0,), 0.0)
    dist = distance_matrix(points)

    def one_round(r: int) -> Tour:
        built = greedy_randomized_construct(points, cfg, round_rng(cfg.seed, r), dist)
        return two_opt(points, built, dist)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_round, range(cfg.iterations)))
    else:
        results = [one_round(r) for r in range(cfg.iterations)]
    if initial is not None:
        _check_order(n, initial)
        results.append(two_opt(points, Tour(tuple(initial), _length(dist, initial)), dist))
    return min(results, key=lambda t: (t.length, t.order))


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 1e-12) - (v < -1e-12)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


def self_intersects(points, order: Sequence[int]) -> bool:
    """True if two non-adjacent edges of the closed tour properly cross."""
    n = len(order)
    edges = [(points[order[k]], points[order[(k + 1) % n]]) for k in range(n)]
    for a in range(n):
        for b in range(a + 2, n):
            if a == 0 and b == n - 1:
                continue
            if _segments_cross(*edges[a], *edges[b]):
                return True
    return False
