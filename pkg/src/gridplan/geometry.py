"""Continuous 2D primitives and path-quality metrics shared by all planners.

All coordinates are in cell units: the grid cell at (row, col) owns the unit
square whose center is the point (col + 0.5, row + 0.5).  Points are plain
``(x, y)`` tuples of floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Sequence

Point = tuple[float, float]

# Collinearity threshold for cross products.  Hull inputs are cell centers
# (half-integer coordinates), whose cross products are exact quarter-integers,
# so this only has to absorb float rounding.
_CROSS_EPS = 1e-12


def path_length(waypoints: Sequence[Point]) -> float:
    """Total Euclidean length of the polyline; 0 for a single waypoint."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(waypoints, waypoints[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total


def path_smoothness(waypoints: Sequence[Point]) -> float:
    """Sum of absolute heading changes (radians) at interior waypoints.

    Headings are measured per segment with atan2; differences are wrapped
    into (-pi, pi] before taking magnitudes.  Zero-length segments carry no
    heading and are skipped.  Paths with fewer than three waypoints (or
    fewer than two non-degenerate segments) cost 0.
    """
    headings = []
    for (x0, y0), (x1, y1) in zip(waypoints, waypoints[1:]):
        dx, dy = x1 - x0, y1 - y0
        if dx == 0.0 and dy == 0.0:
            continue
        headings.append(math.atan2(dy, dx))
    total = 0.0
    for prev, cur in zip(headings, headings[1:]):
        total += abs(math.remainder(cur - prev, math.tau))
    return total


def steer(x_near: Point, x_rand: Point, step: float) -> Point:
    """Move from x_near toward x_rand by at most ``step``.

    Returns x_rand when it is within one step.  A zero-direction query
    (x_rand == x_near) returns x_near unchanged; callers detect that
    degenerate case by equality and skip the iteration.
    """
    dx = x_rand[0] - x_near[0]
    dy = x_rand[1] - x_near[1]
    d = math.hypot(dx, dy)
    if d <= step:
        return x_rand
    scale = step / d
    return (x_near[0] + dx * scale, x_near[1] + dy * scale)


@dataclass(frozen=True)
class HullPolygon:
    """Convex polygon with strictly convex CCW vertices.

    ``degenerate`` is set when the input did not span an area: the vertex
    list is then the two extreme points of a segment, or a single point.
    """

    vertices: tuple[Point, ...]
    degenerate: bool = False


def convex_hull(points: Sequence[Point]) -> HullPolygon:
    """Minimal convex polygon containing all input points (monotone chain).

    Collinear points interior to an edge are dropped, so the vertex sequence
    is strictly convex.  Collinear input collapses to a flagged segment hull;
    a single distinct point collapses to a flagged point hull.
    """
    if not points:
        raise ValueError("convex hull of an empty point set")
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) == 1:
        return HullPolygon((pts[0],), degenerate=True)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(iterable):
        # exact-sign turn test: collinear triples (cross exactly 0) drop out,
        # which is decisive for cell-center inputs whose cross products are
        # exact quarter-integers; an epsilon here can discard true extremes
        # of nearly collinear point sets
        chain = []
        for p in iterable:
            while len(chain) > 1 and cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    if len(lower) == 2 and len(upper) == 2:
        # all points collinear: keep the two extremes
        return HullPolygon((pts[0], pts[-1]), degenerate=True)
    return HullPolygon(tuple(lower[:-1] + upper[:-1]))


def point_in_hull(pt: Point, hull: HullPolygon) -> bool:
    """True iff pt lies inside or on the boundary of the hull."""
    verts = hull.vertices
    px, py = pt
    if hull.degenerate:
        if len(verts) == 1:
            qx, qy = verts[0]
            return abs(px - qx) <= _CROSS_EPS and abs(py - qy) <= _CROSS_EPS
        (ax, ay), (bx, by) = verts
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if abs(cross) > _CROSS_EPS * max(1.0, abs(bx - ax) + abs(by - ay)):
            return False
        dot = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
        return -_CROSS_EPS <= dot <= (bx - ax) ** 2 + (by - ay) ** 2 + _CROSS_EPS
    for (ax, ay), (bx, by) in zip(verts, verts[1:] + verts[:1]):
        if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < -_CROSS_EPS:
            return False
    return True


@dataclass(frozen=True)
class EllipseSpec:
    """Sampling ellipse focused on the start and goal.

    ``c_best`` is the cost of the best known path (the major-axis length);
    ``c_min`` is the focus separation.  ``c_best`` may be infinite before a
    first solution exists, in which case sampling degrades to uniform over
    the map rectangle.
    """

    focus_a: Point
    focus_b: Point
    c_best: float
    c_min: float

    def contains(self, pt: Point, tol: float = 1e-9) -> bool:
        da = math.hypot(pt[0] - self.focus_a[0], pt[1] - self.focus_a[1])
        db = math.hypot(pt[0] - self.focus_b[0], pt[1] - self.focus_b[1])
        return da + db <= self.c_best + tol


def informed_ellipse_sample(
    spec: EllipseSpec, bounds: tuple[float, float], rng: Random
) -> Point:
    """Uniform sample from the ellipse with foci (focus_a, focus_b).

    The major axis is c_best and the minor axis sqrt(c_best^2 - c_min^2);
    points are drawn by uniform unit-disk sampling followed by an affine
    stretch and rotation.  While c_best is infinite (no solution yet) the
    sample is uniform over the ``bounds`` rectangle instead.
    """
    if math.isinf(spec.c_best):
        return (rng.random() * bounds[0], rng.random() * bounds[1])
    if spec.c_best < spec.c_min:
        raise ValueError(
            f"inadmissible cost: c_best={spec.c_best} < c_min={spec.c_min}"
        )
    a = spec.c_best / 2.0
    b = math.sqrt(max(spec.c_best**2 - spec.c_min**2, 0.0)) / 2.0
    cx = (spec.focus_a[0] + spec.focus_b[0]) / 2.0
    cy = (spec.focus_a[1] + spec.focus_b[1]) / 2.0
    theta = math.atan2(
        spec.focus_b[1] - spec.focus_a[1], spec.focus_b[0] - spec.focus_a[0]
    )
    # uniform over the unit disk, then stretch to the ellipse axes
    r = math.sqrt(rng.random())
    phi = rng.random() * math.tau
    ux = r * math.cos(phi) * a
    uy = r * math.sin(phi) * b
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return (cx + ux * cos_t - uy * sin_t, cy + ux * sin_t + uy * cos_t)
