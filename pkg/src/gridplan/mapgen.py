"""Deterministic generation of benchmark maps.

Maps mix convex and concave polygonal obstacles at three density tiers and
always come with a feasible start/goal pair, verified with the visibility
planner on the default-margin inflated map.  Generation is a pure function
of (seed, difficulty, width, height).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

import numpy as np

from .errors import MapGenerationError, NoPathError
from .geometry import Point, convex_hull
from .gridworld import (
    DEFAULT_SAFETY_MARGIN,
    GridMap,
    inflate,
    segment_collision_free,
)
from .planners import RunRecord, plan_visibility_astar
from .seeding import derive_seed


@dataclass(frozen=True)
class DifficultyBand:
    occupied_fraction: tuple[float, float]  # before inflation
    polygon_count: tuple[int, int]


DIFFICULTY_BANDS = {
    "sparse": DifficultyBand((0.02, 0.08), (3, 6)),
    "medium": DifficultyBand((0.08, 0.18), (6, 14)),
    "hard": DifficultyBand((0.18, 0.30), (14, 26)),
}

MAX_ATTEMPTS = 50
_CONCAVE_SHARE = 0.4
# random hulls cover ~0.4 of their sampling disk, and unions overlap and
# clip at borders, so lay out considerably more raw area than the target
_OVERLAP_COMPENSATION = 2.6


def _random_convex_polygon(
    rng: Random, cx: float, cy: float, radius: float, max_vertices: int
) -> list[Point]:
    k = rng.randint(3, max_vertices)
    while True:
        pts = []
        for _ in range(k):
            ang = rng.random() * math.tau
            rad = radius * (0.5 + 0.5 * rng.random())
            pts.append((cx + rad * math.cos(ang), cy + rad * math.sin(ang)))
        hull = convex_hull(pts)
        if not hull.degenerate:
            return list(hull.vertices)


def _notch(verts: list[Point], rng: Random) -> list[Point]:
    """Push one edge midpoint toward the centroid, making the polygon concave."""
    n = len(verts)
    gx = sum(v[0] for v in verts) / n
    gy = sum(v[1] for v in verts) / n
    i = rng.randrange(n)
    ax, ay = verts[i]
    bx, by = verts[(i + 1) % n]
    mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
    depth = 0.45 + 0.45 * rng.random()
    notch = (mx + (gx - mx) * depth, my + (gy - my) * depth)
    return verts[: i + 1] + [notch] + verts[i + 1 :]


def _fill_polygon(occ: np.ndarray, verts: list[Point]) -> None:
    """Even-odd scanline rasterization marking cells whose center is inside."""
    h, w = occ.shape
    ys = [v[1] for v in verts]
    r0 = max(0, math.floor(min(ys) - 0.5))
    r1 = min(h - 1, math.ceil(max(ys)))
    n = len(verts)
    for r in range(r0, r1 + 1):
        yc = r + 0.5
        xs = []
        for i in range(n):
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % n]
            if (y1 <= yc < y2) or (y2 <= yc < y1):
                xs.append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))
        xs.sort()
        for j in range(0, len(xs) - 1, 2):
            c0 = max(0, math.ceil(xs[j] - 0.5))
            c1 = min(w - 1, math.floor(xs[j + 1] - 0.5))
            if c1 >= c0:
                occ[r, c0 : c1 + 1] = True


def _try_obstacles(
    rng: Random, band: DifficultyBand, width: int, height: int
) -> np.ndarray | None:
    n_poly = rng.randint(*band.polygon_count)
    target = rng.uniform(*band.occupied_fraction)
    area = target * width * height * _OVERLAP_COMPENSATION
    base_radius = math.sqrt(area / n_poly / math.pi)
    occ = np.zeros((height, width), dtype=bool)
    for _ in range(n_poly):
        radius = base_radius * (0.6 + 0.8 * rng.random())
        cx = rng.uniform(0, width)
        cy = rng.uniform(0, height)
        if rng.random() < _CONCAVE_SHARE:
            verts = _random_convex_polygon(rng, cx, cy, radius, 9)
            verts = _notch(verts, rng)
        else:
            verts = _random_convex_polygon(rng, cx, cy, radius, 10)
        _fill_polygon(occ, verts)
    lo, hi = band.occupied_fraction
    frac = occ.mean()
    if not lo <= frac <= hi:
        return None
    return occ


def place_endpoints(
    planning: GridMap, rng: Random, tries: int = 30
) -> tuple[Point, Point, RunRecord]:
    """Pick a feasible, well-separated (start, goal) pair of free cell centers.

    The separation requirement relaxes from 0.35 to 0.15 of the map diagonal
    as attempts accumulate.  Feasibility means the visibility planner finds a
    path; a direct collision-free segment short-circuits the full graph.
    Raises NoPathError when no feasible pair is found.
    """
    free = planning.free_cells()
    if len(free) < 2:
        raise NoPathError("planning map has fewer than two free cells")
    w = planning.width
    diag = math.hypot(planning.width, planning.height)
    for attempt in range(tries):
        min_sep = (0.35 if attempt < 10 else 0.25 if attempt < 20 else 0.15) * diag
        sr, sc = divmod(int(free[rng.randrange(len(free))]), w)
        gr, gc = divmod(int(free[rng.randrange(len(free))]), w)
        start = (sc + 0.5, sr + 0.5)
        goal = (gc + 0.5, gr + 0.5)
        if math.hypot(goal[0] - start[0], goal[1] - start[1]) < min_sep:
            continue
        if segment_collision_free(planning, start, goal):
            # the straight segment is itself the shortest visibility path
            d = math.hypot(goal[0] - start[0], goal[1] - start[1])
            record = RunRecord(
                success=True,
                path=[start, goal],
                length=d,
                smoothness=0.0,
                wall_time=0.0,
                iterations_used=1,
                cost_trace=[(1, d)],
            )
            return start, goal, record
        try:
            record = plan_visibility_astar(planning.with_endpoints(start, goal))
        except NoPathError:
            continue
        return start, goal, record
    raise NoPathError("no feasible start/goal pair found")


def generate_map(
    seed: int, difficulty: str, width: int = 224, height: int = 224
) -> GridMap:
    """Generate a random obstacle map with a guaranteed-feasible query pair.

    Deterministic per (seed, difficulty, width, height).  The returned map
    holds the raw (uninflated) occupancy; its start and goal are free on the
    default-margin inflated map and connected on its visibility graph.
    Raises MapGenerationError after the retry bound.
    """
    if difficulty not in DIFFICULTY_BANDS:
        raise ValueError(f"unknown difficulty {difficulty!r}")
    if width < 32 or height < 32:
        raise ValueError("maps must be at least 32x32")
    band = DIFFICULTY_BANDS[difficulty]
    rng = Random(derive_seed("mapgen", seed, difficulty, width, height))
    for _ in range(MAX_ATTEMPTS):
        occ = _try_obstacles(rng, band, width, height)
        if occ is None:
            continue
        raw = GridMap(occ, (0.5, 0.5), (0.5, 0.5))
        planning = inflate(raw, DEFAULT_SAFETY_MARGIN)
        if len(planning.free_cells()) < 2:
            continue
        try:
            start, goal, _ = place_endpoints(planning, rng)
        except NoPathError:
            continue
        return GridMap(occ, start, goal)
    raise MapGenerationError(
        f"no feasible {difficulty} {width}x{height} map for seed {seed} "
        f"within {MAX_ATTEMPTS} attempts"
    )
