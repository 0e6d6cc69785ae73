"""Shared fixtures and independent oracle implementations.

The oracles here deliberately recompute expected values by brute force
(distance scans, 3x3 enumeration, dense segment sampling, Dijkstra) so the
fast implementations are checked against an independent route.
"""

import math

import numpy as np
import pytest

from gridplan.gridworld import GridMap


def brute_force_inflate(occ: np.ndarray, radius: float) -> np.ndarray:
    """Occupied iff cell center within ``radius`` of an occupied center."""
    from scipy.spatial.distance import cdist

    occupied = np.argwhere(occ)
    if len(occupied) == 0 or radius == 0:
        return occ.copy()
    h, w = occ.shape
    cells = np.indices((h, w)).reshape(2, -1).T
    dist = cdist(cells, occupied).min(axis=1)
    return (dist <= radius).reshape(h, w)


def brute_force_corners(occ) -> set:
    """Enumerate every 3x3 neighborhood; free cells with exactly one
    occupied 8-neighbor."""
    grid = [list(map(bool, row)) for row in occ]
    h = len(grid)
    w = len(grid[0])
    corners = set()
    for r in range(h):
        row = grid[r]
        for c in range(w):
            if row[c]:
                continue
            count = 0
            for dr in (-1, 0, 1):
                rr = r + dr
                if rr < 0 or rr >= h:
                    continue
                grow = grid[rr]
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    cc = c + dc
                    if 0 <= cc < w and grow[cc]:
                        count += 1
                        if count > 1:
                            break
                if count > 1:
                    break
            if count == 1:
                corners.add((r, c))
    return corners


def dense_segment_free(grid: GridMap, p, q, step: float = 0.01) -> bool:
    """Point-sampling collision oracle at fixed resolution."""
    length = math.hypot(q[0] - p[0], q[1] - p[1])
    n = max(2, int(length / step) + 1)
    for i in range(n + 1):
        t = i / n
        x = p[0] + t * (q[0] - p[0])
        y = p[1] + t * (q[1] - p[1])
        col = min(int(x), grid.width - 1)
        row = min(int(y), grid.height - 1)
        if grid.occupancy[row, col]:
            return False
    return True


def dijkstra_shortest(points, adjacency, source: int, target: int):
    """Plain Dijkstra over an explicit adjacency list; None if unreachable."""
    import heapq

    dist = {source: 0.0}
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == target:
            return d
        for v, w in adjacency[u]:
            nd = d + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return None


def random_grid(rng: np.random.RandomState, h: int, w: int, density: float) -> np.ndarray:
    return rng.rand(h, w) < density


@pytest.fixture
def free_map():
    occ = np.zeros((64, 64), dtype=bool)
    return GridMap(occ, (5.5, 5.5), (58.5, 58.5))


@pytest.fixture
def ring_map():
    """Goal sealed inside a solid occupied ring."""
    occ = np.zeros((64, 64), dtype=bool)
    occ[20:41, 20:41] = True
    occ[26:35, 26:35] = False
    return GridMap(occ, (5.5, 5.5), (30.5, 30.5))
