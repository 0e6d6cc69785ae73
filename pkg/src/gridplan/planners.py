"""Planners: visibility-graph A*, RRT* with pluggable samplers, and the
corner-guided convex-neural variant with early stopping.

All planners operate on an already-inflated GridMap and are deterministic
for a fixed (map, config, seed): per-trial randomness comes from a single
``random.Random`` (Mersenne Twister) owned by the run.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field, replace
from random import Random
from typing import Callable, Sequence

import numpy as np

from .errors import NoPathError
from .geometry import (
    EllipseSpec,
    Point,
    convex_hull,
    informed_ellipse_sample,
    path_length,
    path_smoothness,
    point_in_hull,
    steer,
)
from .gridworld import (
    GridMap,
    GuidanceMask,
    ensure_mask_matches,
    extract_convex_corners,
    filter_predicted_corners,
    segment_collision_free,
)

logger = logging.getLogger(__name__)

# sampler interface used by the RRT* loop: (rng, best_cost) -> Point
Sampler = Callable[[Random, float], Point]


@dataclass
class PlannerConfig:
    """Shared planner parameters.

    Defaults follow the benchmark protocol: step size 5, neighbor radius 7,
    iteration cap 1000, mask sampling ratio 0.5, predicted-corner ratio 0.5,
    exploration ratio 0.2.  ``corner_jitter`` is the localization slack used
    when sampling predicted corners and should match the map's safety margin.
    """

    step_size: float = 5.0
    neighbor_radius: float = 7.0
    max_iters: int = 1000
    mask_ratio: float = 0.5
    predicted_ratio: float = 0.5
    explore_ratio: float = 0.2
    stall_window: int = 50
    stall_tol: float = 1e-3
    goal_tol: float = 5.0
    goal_bias: float = 0.05
    seed: int = 0
    corner_jitter: float = 2.0
    early_stop: bool = False
    validate_tree: bool = False

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.neighbor_radius <= 0:
            raise ValueError("neighbor_radius must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        for name in ("mask_ratio", "predicted_ratio", "explore_ratio", "goal_bias"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.stall_window < 1:
            raise ValueError("stall_window must be at least 1")
        if self.stall_tol <= 0:
            raise ValueError("stall_tol must be positive")
        if self.goal_tol <= 0:
            raise ValueError("goal_tol must be positive")
        if self.corner_jitter < 0:
            raise ValueError("corner_jitter must be nonnegative")


@dataclass
class RunRecord:
    """Outcome of one planning trial."""

    success: bool
    path: list[Point] | None
    length: float | None
    smoothness: float | None
    wall_time: float
    iterations_used: int
    cost_trace: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = {
            "success": self.success,
            "path": [list(p) for p in self.path] if self.path is not None else None,
            "length": self.length,
            "smoothness": self.smoothness,
            "iterations_used": self.iterations_used,
            "cost_trace": [[k, c] for k, c in self.cost_trace],
        }
        if include_wall_time:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            success=d["success"],
            path=[tuple(p) for p in d["path"]] if d["path"] is not None else None,
            length=d["length"],
            smoothness=d["smoothness"],
            wall_time=d.get("wall_time", 0.0),
            iterations_used=d["iterations_used"],
            cost_trace=[(int(k), float(c)) for k, c in d["cost_trace"]],
        )


class Tree:
    """RRT* search tree: parallel arrays of positions, parents and costs."""

    __slots__ = ("xs", "ys", "parent", "cost", "children", "_dirty_edges")

    def __init__(self, root: Point):
        self.xs = [root[0]]
        self.ys = [root[1]]
        self.parent: list[int | None] = [None]
        self.cost = [0.0]
        self.children: list[list[int]] = [[]]
        self._dirty_edges: list[int] = []

    def __len__(self) -> int:
        return len(self.xs)

    def position(self, i: int) -> Point:
        return (self.xs[i], self.ys[i])

    def add(self, pos: Point, parent: int, cost: float) -> int:
        i = len(self.xs)
        self.xs.append(pos[0])
        self.ys.append(pos[1])
        self.parent.append(parent)
        self.cost.append(cost)
        self.children.append([])
        self.children[parent].append(i)
        self._dirty_edges.append(i)
        return i

    def reparent(self, node: int, new_parent: int, new_cost: float) -> None:
        """Attach ``node`` under ``new_parent`` and propagate the cost delta
        to every descendant."""
        old_parent = self.parent[node]
        self.children[old_parent].remove(node)
        self.parent[node] = new_parent
        self.children[new_parent].append(node)
        delta = new_cost - self.cost[node]
        stack = [node]
        while stack:
            n = stack.pop()
            self.cost[n] += delta
            stack.extend(self.children[n])
        self._dirty_edges.append(node)

    def path_to_root(self, i: int) -> list[Point]:
        """Waypoints from the root to node i."""
        out = []
        n: int | None = i
        while n is not None:
            out.append((self.xs[n], self.ys[n]))
            n = self.parent[n]
        out.reverse()
        return out

    def validate(self, grid: GridMap, check_all_edges: bool = False) -> None:
        """Assert cost consistency, acyclicity and edge collision-freedom.

        Edge collision checks normally cover only edges added or reparented
        since the previous call (obstacles are static, so unchanged edges
        stay valid); pass check_all_edges=True for a full sweep.
        """
        n = len(self.xs)
        if self.parent[0] is not None or self.cost[0] != 0.0:
            raise AssertionError("root must have no parent and zero cost")
        reaches_root = [False] * n
        reaches_root[0] = True
        for i in range(1, n):
            p = self.parent[i]
            if p is None:
                raise AssertionError(f"non-root node {i} has no parent")
            edge = math.hypot(self.xs[i] - self.xs[p], self.ys[i] - self.ys[p])
            if abs(self.cost[i] - self.cost[p] - edge) >= 1e-9:
                raise AssertionError(f"cost inconsistency at node {i}")
            chain = []
            j = i
            while not reaches_root[j]:
                chain.append(j)
                j = self.parent[j]
                if j is None or len(chain) > n:
                    raise AssertionError(f"cycle through node {i}")
            for c in chain:
                reaches_root[c] = True
        edges = range(1, n) if check_all_edges else self._dirty_edges
        for i in edges:
            p = self.parent[i]
            if not segment_collision_free(grid, self.position(p), self.position(i)):
                raise AssertionError(f"edge {p}->{i} collides")
        self._dirty_edges = []


class _GridIndex:
    """Uniform bucket index over node positions for nearest/near queries."""

    __slots__ = ("xs", "ys", "bucket", "cells", "max_ring")

    def __init__(self, tree: Tree, bucket: float, extent: float):
        self.xs = tree.xs
        self.ys = tree.ys
        self.bucket = bucket
        self.cells: dict[tuple[int, int], list[int]] = {}
        self.max_ring = int(extent / bucket) + 2
        self.add(0)

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return (int(x // self.bucket), int(y // self.bucket))

    def add(self, i: int) -> None:
        self.cells.setdefault(self._key(self.xs[i], self.ys[i]), []).append(i)

    def nearest(self, x: float, y: float) -> int:
        bx, by = self._key(x, y)
        best = -1
        best_d2 = math.inf
        xs, ys = self.xs, self.ys
        for ring in range(self.max_ring + 1):
            # cells in ring r or beyond hold points at distance >= (r-1)*bucket;
            # strict comparison preserves the lowest-index tie rule
            if best >= 0 and ((ring - 1) * self.bucket) ** 2 > best_d2:
                break
            if ring == 0:
                keys = [(bx, by)]
            else:
                keys = []
                for c in range(bx - ring, bx + ring + 1):
                    keys.append((c, by - ring))
                    keys.append((c, by + ring))
                for r in range(by - ring + 1, by + ring):
                    keys.append((bx - ring, r))
                    keys.append((bx + ring, r))
            for key in keys:
                for i in self.cells.get(key, ()):
                    d2 = (xs[i] - x) ** 2 + (ys[i] - y) ** 2
                    if d2 < best_d2 or (d2 == best_d2 and i < best):
                        best = i
                        best_d2 = d2
        return best

    def near(self, x: float, y: float, radius: float) -> list[int]:
        r2 = radius * radius
        xs, ys = self.xs, self.ys
        out = []
        c0 = int((x - radius) // self.bucket)
        c1 = int((x + radius) // self.bucket)
        r0 = int((y - radius) // self.bucket)
        r1 = int((y + radius) // self.bucket)
        for cc in range(c0, c1 + 1):
            for rr in range(r0, r1 + 1):
                for i in self.cells.get((cc, rr), ()):
                    if (xs[i] - x) ** 2 + (ys[i] - y) ** 2 <= r2:
                        out.append(i)
        out.sort()
        return out


# --- samplers -------------------------------------------------------------


def sampler_uniform(grid: GridMap, rng: Random) -> Point:
    """Uniform over free space: a uniform free cell, jittered within it."""
    free = grid.free_cells()
    flat = int(free[rng.randrange(len(free))])
    row, col = divmod(flat, grid.width)
    return (col + rng.random(), row + rng.random())


def sampler_neural(mask: GuidanceMask, grid: GridMap, ratio: float, rng: Random) -> Point:
    """Mix mask-guided and uniform free-space sampling.

    With probability ``ratio`` a uniform predicted free cell is drawn,
    otherwise a uniform free cell; an empty predicted set falls back to
    uniform.
    """
    cells = mask.free_cells(grid)
    if len(cells) and rng.random() < ratio:
        flat = int(cells[rng.randrange(len(cells))])
        row, col = divmod(flat, grid.width)
        return (col + rng.random(), row + rng.random())
    return sampler_uniform(grid, rng)


_REJECT_TRIES = 100


def sampler_neural_informed(
    mask: GuidanceMask,
    grid: GridMap,
    ratio: float,
    ellipse: EllipseSpec,
    rng: Random,
) -> Point:
    """Mask-guided sampling constrained to the informed ellipse.

    Before a first solution (infinite c_best) this equals sampler_neural.
    Afterwards the uniform branch draws from the ellipse (rejecting occupied
    points, bounded retries, then any free cell) and the mask branch rejects
    predicted cells whose jittered point falls outside the ellipse.
    """
    if math.isinf(ellipse.c_best):
        return sampler_neural(mask, grid, ratio, rng)
    bounds = (float(grid.width), float(grid.height))
    cells = mask.free_cells(grid)
    if len(cells) and rng.random() < ratio:
        w = grid.width
        for _ in range(_REJECT_TRIES):
            flat = int(cells[rng.randrange(len(cells))])
            row, col = divmod(flat, w)
            pt = (col + rng.random(), row + rng.random())
            if ellipse.contains(pt):
                return pt
        # no predicted cell inside the ellipse: fall through to ellipse draw
    for _ in range(_REJECT_TRIES):
        pt = informed_ellipse_sample(ellipse, bounds, rng)
        if (
            0 <= pt[0] < bounds[0]
            and 0 <= pt[1] < bounds[1]
            and grid.point_free(pt)
        ):
            return pt
    return sampler_uniform(grid, rng)


def _corner_center(corners: np.ndarray, idx: int) -> Point:
    r, c = corners[idx]
    return (float(c) + 0.5, float(r) + 0.5)


def _jittered_corner(
    corners: np.ndarray,
    idx: int,
    radius: float,
    grid: GridMap | None,
    rng: Random,
) -> Point:
    center = _corner_center(corners, idx)
    if radius <= 0:
        return center
    for _ in range(16):
        rr = radius * math.sqrt(rng.random())
        th = rng.random() * math.tau
        pt = (center[0] + rr * math.cos(th), center[1] + rr * math.sin(th))
        if grid is None:
            return pt
        if (
            0 <= pt[0] <= grid.width
            and 0 <= pt[1] <= grid.height
            and grid.point_free(pt)
        ):
            return pt
    return center


def sampler_convex_structured(
    predicted: np.ndarray,
    hull_inner: np.ndarray,
    hull_outer: np.ndarray,
    goal: Point,
    cfg: PlannerConfig,
    rng: Random,
    grid: GridMap | None = None,
) -> Point:
    """Three-way structured draw over corner sets.

    Goal bias first; then with probability ``explore_ratio`` a corner outside
    the guidance hull, else with probability ``predicted_ratio`` a predicted
    corner (jittered within ``corner_jitter`` of its center), else a
    remaining corner inside the hull.  An empty chosen set falls through to
    the first nonempty of (predicted, inner, outer), then the goal.
    """
    if cfg.goal_bias > 0 and rng.random() < cfg.goal_bias:
        return goal
    if rng.random() < cfg.explore_ratio:
        chosen = 2
    elif rng.random() < cfg.predicted_ratio:
        chosen = 0
    else:
        chosen = 1
    pools = (predicted, hull_inner, hull_outer)
    if len(pools[chosen]) == 0:
        for fallback in (0, 1, 2):
            if len(pools[fallback]):
                chosen = fallback
                break
        else:
            return goal
    pool = pools[chosen]
    idx = rng.randrange(len(pool))
    if chosen == 0:
        return _jittered_corner(pool, idx, cfg.corner_jitter, grid, rng)
    return _corner_center(pool, idx)


def make_uniform_sampler(grid: GridMap) -> Sampler:
    return lambda rng, best_cost: sampler_uniform(grid, rng)


def make_neural_sampler(grid: GridMap, mask: GuidanceMask, ratio: float) -> Sampler:
    ensure_mask_matches(grid, mask)
    return lambda rng, best_cost: sampler_neural(mask, grid, ratio, rng)


def make_neural_informed_sampler(
    grid: GridMap, mask: GuidanceMask, ratio: float
) -> Sampler:
    ensure_mask_matches(grid, mask)
    c_min = math.hypot(
        grid.goal[0] - grid.start[0], grid.goal[1] - grid.start[1]
    )

    def sample(rng: Random, best_cost: float) -> Point:
        ellipse = EllipseSpec(
            grid.start, grid.goal, max(best_cost, c_min), c_min
        )
        return sampler_neural_informed(mask, grid, ratio, ellipse, rng)

    return sample


# --- early stopping --------------------------------------------------------


def early_stop_check(
    cost_trace: Sequence[tuple[int, float]], stall_window: int, stall_tol: float
) -> bool:
    """True iff at least ``stall_window`` iterations have passed since the
    first solution and the best cost changed by less than ``stall_tol`` over
    that window.  The trace holds one (iteration, finite best cost) entry per
    iteration from the first solution onward."""
    if len(cost_trace) <= stall_window:
        return False
    recent = cost_trace[-1][1]
    old = cost_trace[-1 - stall_window][1]
    if math.isinf(recent) or math.isinf(old):
        return False
    return abs(recent - old) < stall_tol


# --- RRT* core -------------------------------------------------------------


def choose_parent(
    tree: Tree, x_new: Point, neighbors: Sequence[int], grid: GridMap
) -> tuple[int, float] | None:
    """Pick the collision-reachable neighbor minimizing cost + edge length.

    Ties break toward the lowest node index.  Returns None when no neighbor
    has a collision-free connection (the iteration is then skipped).
    """
    candidates = sorted(
        (
            tree.cost[i]
            + math.hypot(tree.xs[i] - x_new[0], tree.ys[i] - x_new[1]),
            i,
        )
        for i in neighbors
    )
    for cost, i in candidates:
        if segment_collision_free(grid, tree.position(i), x_new):
            return i, cost
    return None


def rewire(
    tree: Tree, new_index: int, neighbors: Sequence[int], grid: GridMap
) -> None:
    """Reparent neighbors through the new node when that lowers their cost,
    propagating the delta to their descendants."""
    x, y = tree.xs[new_index], tree.ys[new_index]
    base = tree.cost[new_index]
    for i in neighbors:
        if i == new_index:
            continue
        d = math.hypot(tree.xs[i] - x, tree.ys[i] - y)
        new_cost = base + d
        if new_cost < tree.cost[i] and segment_collision_free(
            grid, (x, y), tree.position(i)
        ):
            tree.reparent(i, new_index, new_cost)


_CONNECT_TRIES = 32


def _connect_parent(
    tree: Tree, x_new: Point, grid: GridMap
) -> tuple[int, float] | None:
    """Cost-optimal collision-free parent over the whole tree.

    Used for waypoint-connect draws (no step cap): candidates are tried in
    increasing cost + edge length, bounded to keep unreachable targets cheap.
    """
    candidates = sorted(
        (
            tree.cost[i]
            + math.hypot(tree.xs[i] - x_new[0], tree.ys[i] - x_new[1]),
            i,
        )
        for i in range(len(tree))
    )
    for cost, i in candidates[:_CONNECT_TRIES]:
        if segment_collision_free(grid, tree.position(i), x_new):
            return i, cost
    return None


def rrt_star_plan(
    grid: GridMap,
    cfg: PlannerConfig,
    sampler: Sampler,
    connect_filter: Callable[[Point], bool] | None = None,
) -> RunRecord:
    """RRT* loop with a pluggable sampler.

    Samples, steers by ``step_size``, connects to the cost-optimal neighbor
    within ``neighbor_radius`` and rewires.  Any new node with a
    collision-free straight segment to the goal becomes a candidate solution
    (this covers and extends the ``goal_tol`` direct-connection radius); the
    best cost is traced per iteration and early stopping, when enabled,
    terminates the loop once the cost stalls.  Rejected iterations count
    toward the cap.

    ``connect_filter`` marks draws that are waypoint connections: those
    points are inserted without the step cap, attached to the cost-optimal
    collision-free parent over the whole tree.  The corner-guided planner
    uses this for predicted corners.
    """
    if not grid.point_free(grid.start):
        raise ValueError("start cell is occupied on the planning map")
    if not grid.point_free(grid.goal):
        raise ValueError("goal cell is occupied on the planning map")
    t0 = time.perf_counter()
    rng = Random(cfg.seed)
    goal = grid.goal
    tree = Tree(grid.start)
    index = _GridIndex(tree, cfg.neighbor_radius, float(max(grid.width, grid.height)))
    goal_links: list[tuple[int, float]] = []  # (node, distance to goal)
    best_cost = math.inf
    cost_trace: list[tuple[int, float]] = []
    iterations = 0

    # the start itself may already see the goal
    ds = math.hypot(goal[0] - grid.start[0], goal[1] - grid.start[1])
    if ds == 0.0 or segment_collision_free(grid, grid.start, goal):
        goal_links.append((0, ds))
        best_cost = ds
        cost_trace.append((0, best_cost))

    for k in range(1, cfg.max_iters + 1):
        iterations = k
        if cfg.goal_bias > 0 and rng.random() < cfg.goal_bias:
            x_rand = goal
        else:
            x_rand = sampler(rng, best_cost)
        long_connect = connect_filter is not None and connect_filter(x_rand)
        nearest = index.nearest(x_rand[0], x_rand[1])
        x_near = tree.position(nearest)
        x_new = x_rand if long_connect else steer(x_near, x_rand, cfg.step_size)
        picked = None
        rewire_set: list[int] = []
        if x_new != x_near:
            if long_connect:
                rewire_set = index.near(x_new[0], x_new[1], cfg.neighbor_radius)
                if not any(tree.position(i) == x_new for i in rewire_set):
                    picked = _connect_parent(tree, x_new, grid)
            elif segment_collision_free(grid, x_near, x_new):
                rewire_set = index.near(x_new[0], x_new[1], cfg.neighbor_radius)
                candidates = rewire_set
                if nearest not in candidates:
                    candidates = sorted(candidates + [nearest])
                picked = choose_parent(tree, x_new, candidates, grid)
        if picked is not None:
            parent, cost = picked
            i_new = tree.add(x_new, parent, cost)
            index.add(i_new)
            rewire(tree, i_new, rewire_set, grid)
            d_goal = math.hypot(goal[0] - x_new[0], goal[1] - x_new[1])
            if d_goal == 0.0 or segment_collision_free(grid, x_new, goal):
                goal_links.append((i_new, d_goal))
        if goal_links:
            best_cost = min(tree.cost[i] + d for i, d in goal_links)
            cost_trace.append((k, best_cost))
        if cfg.validate_tree:
            tree.validate(grid)
        if cfg.early_stop and early_stop_check(
            cost_trace, cfg.stall_window, cfg.stall_tol
        ):
            break

    wall = time.perf_counter() - t0
    if not goal_links:
        return RunRecord(
            success=False,
            path=None,
            length=None,
            smoothness=None,
            wall_time=wall,
            iterations_used=iterations,
            cost_trace=cost_trace,
        )
    best_node, _ = min(
        goal_links, key=lambda link: (tree.cost[link[0]] + link[1], link[0])
    )
    waypoints = tree.path_to_root(best_node)
    if waypoints[-1] != goal:
        waypoints.append(goal)
    return RunRecord(
        success=True,
        path=waypoints,
        length=path_length(waypoints),
        smoothness=path_smoothness(waypoints),
        wall_time=wall,
        iterations_used=iterations,
        cost_trace=cost_trace,
    )


# --- visibility-graph A* ----------------------------------------------------

_PREFILTER_STEP = 0.5


def _visibility_adjacency(
    grid: GridMap, points: list[Point]
) -> list[list[tuple[int, float]]]:
    """Adjacency lists of the visibility graph over ``points``.

    A vectorized dense-sampling pass first rules out pairs whose sampled
    points hit an occupied cell (sound: a sampled hit means the segment
    really touches that cell); surviving pairs are confirmed with the exact
    supercover collision check.
    """
    n = len(points)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    if n < 2:
        return adj
    pts = np.asarray(points, dtype=np.float64)
    occ = grid.occupancy
    h, w = occ.shape
    for i in range(n - 1):
        tail = pts[i + 1 :]
        dx = tail[:, 0] - pts[i, 0]
        dy = tail[:, 1] - pts[i, 1]
        dist = np.hypot(dx, dy)
        k = max(2, int(dist.max() / _PREFILTER_STEP) + 2)
        t = np.linspace(0.0, 1.0, k)
        xs = pts[i, 0] + dx[:, None] * t
        ys = pts[i, 1] + dy[:, None] * t
        cols = np.clip(xs.astype(np.int64), 0, w - 1)
        rows = np.clip(ys.astype(np.int64), 0, h - 1)
        blocked = occ[rows, cols].any(axis=1)
        for off in np.flatnonzero(~blocked):
            j = i + 1 + int(off)
            if segment_collision_free(grid, points[i], points[j]):
                d = float(dist[off])
                adj[i].append((j, d))
                adj[j].append((i, d))
    return adj


def plan_visibility_astar(grid: GridMap) -> RunRecord:
    """Shortest corner-polyline path via A* over the visibility graph.

    Vertices are the start, the goal and all convex-corner cell centers;
    edges join mutually visible vertices.  Deterministic; raises NoPathError
    when the goal is disconnected.  ``iterations_used`` reports the number of
    A* expansions.
    """
    t0 = time.perf_counter()
    corners = extract_convex_corners(grid)
    points: list[Point] = [grid.start, grid.goal]
    points.extend((c + 0.5, r + 0.5) for r, c in corners.tolist())
    adj = _visibility_adjacency(grid, points)

    gx, gy = grid.goal
    dist = {0: 0.0}
    parent = {0: None}
    h0 = math.hypot(points[0][0] - gx, points[0][1] - gy)
    heap = [(h0, 0, 0)]
    counter = 0
    closed = set()
    expansions = 0
    while heap:
        f, _, u = heapq.heappop(heap)
        if u in closed:
            continue
        closed.add(u)
        expansions += 1
        if u == 1:
            break
        du = dist[u]
        for v, d in adj[u]:
            nd = du + d
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                counter += 1
                hv = math.hypot(points[v][0] - gx, points[v][1] - gy)
                heapq.heappush(heap, (nd + hv, counter, v))
    wall = time.perf_counter() - t0
    if 1 not in closed:
        raise NoPathError("goal is not reachable on the visibility graph")
    waypoints = []
    node = 1
    while node is not None:
        waypoints.append(points[node])
        node = parent[node]
    waypoints.reverse()
    length = path_length(waypoints)
    return RunRecord(
        success=True,
        path=waypoints,
        length=length,
        smoothness=path_smoothness(waypoints),
        wall_time=wall,
        iterations_used=expansions,
        cost_trace=[(expansions, length)],
    )


# --- convex-neural planner ---------------------------------------------------


def partition_corners(
    corners: np.ndarray,
    predicted: np.ndarray,
    start: Point,
    goal: Point,
) -> tuple[np.ndarray, np.ndarray, "object"]:
    """Split non-predicted corners by the guidance hull.

    The hull spans the predicted corner centers plus start and goal.  With no
    predicted corners the hull degenerates to the start-goal segment and all
    corners are treated as outside (degraded guidance).
    Returns (inside, outside, hull).
    """
    if len(predicted) == 0:
        hull = convex_hull([start, goal])
        return corners[:0], corners, hull
    hull_pts = [(float(c) + 0.5, float(r) + 0.5) for r, c in predicted.tolist()]
    hull = convex_hull(hull_pts + [start, goal])
    pred_set = set(map(tuple, predicted.tolist()))
    rest = [rc for rc in corners.tolist() if tuple(rc) not in pred_set]
    rest_arr = np.asarray(rest, dtype=np.int64).reshape(-1, 2)
    flags = np.fromiter(
        (point_in_hull((c + 0.5, r + 0.5), hull) for r, c in rest),
        dtype=bool,
        count=len(rest),
    )
    return rest_arr[flags], rest_arr[~flags], hull


def convex_neural_plan(
    grid: GridMap,
    mask: GuidanceMask,
    cfg: PlannerConfig,
    predicted_corners: np.ndarray | None = None,
) -> RunRecord:
    """Corner-guided RRT* with structured sampling and early stopping.

    Extracts convex corners from the inflated map, keeps those covered by
    the guidance mask, builds the guidance hull over them plus start/goal,
    partitions the remaining corners by the hull, and runs the RRT* loop
    with the three-way structured sampler.  Predicted-corner draws are
    waypoint connections: they attach without the step cap to the
    cost-optimal parent over the whole tree, which is what lets the planner
    reproduce taut, visibility-quality paths.  ``predicted_corners``
    overrides the mask filtering (used by prediction-noise studies).
    """
    t0 = time.perf_counter()
    corners = extract_convex_corners(grid)
    if predicted_corners is None:
        ensure_mask_matches(grid, mask)
        predicted = filter_predicted_corners(mask, corners)
    else:
        predicted = np.asarray(predicted_corners, dtype=np.int64).reshape(-1, 2)
    if len(predicted) == 0:
        logger.info("no predicted corners: planning in degraded-guidance mode")
    inner, outer, _ = partition_corners(corners, predicted, grid.start, grid.goal)
    goal = grid.goal
    # goal bias is applied by the RRT* loop itself; the structured sampler's
    # own goal draw stays as the empty-pools fallback
    sampler_cfg = replace(cfg, goal_bias=0.0)

    def sample(rng: Random, best_cost: float) -> Point:
        return sampler_convex_structured(
            predicted, inner, outer, goal, sampler_cfg, rng, grid=grid
        )

    centers = [(c + 0.5, r + 0.5) for r, c in predicted.tolist()]
    slack = (cfg.corner_jitter + 1e-9) ** 2

    def is_predicted_draw(pt: Point) -> bool:
        return any((pt[0] - x) ** 2 + (pt[1] - y) ** 2 <= slack for x, y in centers)

    cfg_run = cfg if cfg.early_stop else replace(cfg, early_stop=True)
    record = rrt_star_plan(grid, cfg_run, sample, connect_filter=is_predicted_draw)
    record.wall_time = time.perf_counter() - t0
    return record
