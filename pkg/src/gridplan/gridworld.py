"""Occupancy-grid world model.

A grid cell (row, col) owns the unit square with center (col + 0.5,
row + 0.5); all continuous planning runs in these cell units.  Obstacle
inflation, convex-corner extraction and segment collision queries all
operate on the same GridMap type; planners are expected to receive a map
that has already been inflated by the desired safety margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import netpbm
from .errors import FormatError
from .geometry import Point

DEFAULT_SAFETY_MARGIN = 2.0


class GridMap:
    """Binary occupancy grid plus a start/goal query pair.

    ``occupancy`` is a (height, width) boolean array, True where occupied.
    ``start`` and ``goal`` are continuous points in cell units and must lie
    on free cells of whatever inflated map is used for planning.
    """

    __slots__ = ("occupancy", "start", "goal", "_flat", "_free")

    def __init__(self, occupancy: np.ndarray, start: Point, goal: Point):
        occ = np.asarray(occupancy, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise ValueError(f"bad occupancy shape {occ.shape}")
        for name, (x, y) in (("start", start), ("goal", goal)):
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"{name} has non-finite coordinates")
            if not (0 <= x <= occ.shape[1] and 0 <= y <= occ.shape[0]):
                raise ValueError(f"{name} {(x, y)} outside grid bounds")
        self.occupancy = occ
        self.start = (float(start[0]), float(start[1]))
        self.goal = (float(goal[0]), float(goal[1]))
        self._flat = None
        self._free = None

    @property
    def width(self) -> int:
        return self.occupancy.shape[1]

    @property
    def height(self) -> int:
        return self.occupancy.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.occupancy.shape

    def cell_of(self, p: Point) -> tuple[int, int]:
        """(row, col) of the cell containing p, clamped at the outer border."""
        col = min(int(p[0]), self.width - 1)
        row = min(int(p[1]), self.height - 1)
        return row, col

    def cell_center(self, row: int, col: int) -> Point:
        return (col + 0.5, row + 0.5)

    def is_free_cell(self, row: int, col: int) -> bool:
        return not self.occupancy[row, col]

    def point_free(self, p: Point) -> bool:
        row, col = self.cell_of(p)
        return not self.occupancy[row, col]

    def occ_flat(self) -> bytes:
        """Row-major occupancy as bytes, cached (hot path for collisions)."""
        if self._flat is None:
            self._flat = np.ascontiguousarray(self.occupancy, dtype=np.uint8).tobytes()
        return self._flat

    def free_cells(self) -> np.ndarray:
        """Flat indices of free cells, cached."""
        if self._free is None:
            self._free = np.flatnonzero(~self.occupancy.ravel())
        return self._free

    def with_endpoints(self, start: Point, goal: Point) -> "GridMap":
        """Same occupancy (shared array) with a different query pair."""
        return GridMap(self.occupancy, start, goal)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.start == other.start
            and self.goal == other.goal
            and np.array_equal(self.occupancy, other.occupancy)
        )

    def __repr__(self) -> str:
        return (
            f"GridMap({self.width}x{self.height}, "
            f"occupied={int(self.occupancy.sum())}, "
            f"start={self.start}, goal={self.goal})"
        )


@dataclass
class GuidanceMask:
    """Binary grid of predicted promising regions, paired with a GridMap."""

    bits: np.ndarray  # bool, (height, width)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError(f"bad mask shape {self.bits.shape}")
        self._free_join: tuple[int, np.ndarray] | None = None

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def free_cells(self, grid: GridMap) -> np.ndarray:
        """Flat indices of cells that are both predicted and free in grid.

        Cached for the last grid seen; masks are paired with a single map in
        practice.
        """
        if self._free_join is not None and self._free_join[0] == id(grid):
            return self._free_join[1]
        ensure_mask_matches(grid, self)
        join = np.flatnonzero(self.bits.ravel() & ~grid.occupancy.ravel())
        self._free_join = (id(grid), join)
        return join

    def __eq__(self, other) -> bool:
        if not isinstance(other, GuidanceMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


def ensure_mask_matches(grid: GridMap, mask: GuidanceMask) -> None:
    if mask.bits.shape != grid.occupancy.shape:
        raise FormatError(
            f"mask {mask.bits.shape} does not match map {grid.occupancy.shape}"
        )


def inflate(grid: GridMap, radius: float) -> GridMap:
    """Dilate obstacles by a Euclidean safety margin (center-to-center).

    A cell is occupied in the result iff its center lies within ``radius``
    of the center of some originally occupied cell.  radius 0 is identity.
    """
    if radius < 0:
        raise ValueError(f"negative safety margin {radius}")
    if radius == 0 or not grid.occupancy.any():
        return GridMap(grid.occupancy.copy(), grid.start, grid.goal)
    dist = ndimage.distance_transform_edt(~grid.occupancy)
    return GridMap(dist <= radius, grid.start, grid.goal)


def extract_convex_corners(grid: GridMap) -> np.ndarray:
    """Free cells with exactly one occupied cell among their 8 neighbors.

    Returns an (M, 2) int array of (row, col) pairs in row-major order.
    Out-of-bounds neighbors count as free, so border cells only qualify
    through in-bounds occupied neighbors.
    """
    occ = grid.occupancy
    h, w = occ.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = occ
    count = (
        padded[:-2, :-2] + padded[:-2, 1:-1] + padded[:-2, 2:]
        + padded[1:-1, :-2] + padded[1:-1, 2:]
        + padded[2:, :-2] + padded[2:, 1:-1] + padded[2:, 2:]
    )
    rows, cols = np.nonzero(~occ & (count == 1))
    return np.column_stack([rows, cols]).astype(np.int64)


def filter_predicted_corners(mask: GuidanceMask, corners: np.ndarray) -> np.ndarray:
    """Corners whose cell is marked in the mask, row-major order preserved."""
    if corners.size == 0:
        return corners.reshape(0, 2)
    h, w = mask.bits.shape
    if (corners[:, 0] >= h).any() or (corners[:, 1] >= w).any():
        raise FormatError("corner set does not fit the mask dimensions")
    keep = mask.bits[corners[:, 0], corners[:, 1]]
    return corners[keep]


def _point_blocked(occ: bytes, w: int, h: int, x: float, y: float) -> bool:
    """Occupancy of every cell whose closed unit square contains (x, y)."""
    ix = int(x)
    cols = (ix - 1, ix) if x == ix else (ix,)
    iy = int(y)
    rows = (iy - 1, iy) if y == iy else (iy,)
    for row in rows:
        if row < 0 or row >= h:
            continue
        base = row * w
        for col in cols:
            if 0 <= col < w and occ[base + col]:
                return True
    return False


def segment_collision_free(grid: GridMap, p: Point, q: Point) -> bool:
    """True iff the closed segment pq touches no occupied cell.

    Supercover semantics: every cell whose closed unit square intersects the
    segment is tested, including all four cells around a lattice corner the
    segment passes through and both cells along a grid line it runs on.
    """
    w, h = grid.width, grid.height
    occ = grid.occ_flat()
    x0, y0 = p
    x1, y1 = q
    if _point_blocked(occ, w, h, x0, y0) or _point_blocked(occ, w, h, x1, y1):
        return False
    dx = x1 - x0
    dy = y1 - y0
    if dx == 0.0 and dy == 0.0:
        return True

    ts = [0.0, 1.0]
    if dx != 0.0:
        lo, hi = (x0, x1) if x0 < x1 else (x1, x0)
        inv = 1.0 / dx
        for v in range(math.floor(lo) + 1, math.ceil(hi)):
            ts.append((v - x0) * inv)
    if dy != 0.0:
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        inv = 1.0 / dy
        for v in range(math.floor(lo) + 1, math.ceil(hi)):
            ts.append((v - y0) * inv)
    ts.sort()

    # axis-aligned runs exactly on a grid line touch cells on both sides
    x_on_line = dx == 0.0 and x0 == math.floor(x0)
    y_on_line = dy == 0.0 and y0 == math.floor(y0)

    prev = ts[0]
    for t in ts[1:]:
        if t - prev > 1e-12:
            tm = (prev + t) * 0.5
            col = int(x0 + tm * dx)
            row = int(y0 + tm * dy)
            if col >= w:
                col = w - 1
            if row >= h:
                row = h - 1
            if x_on_line:
                if occ[row * w + col] or (col > 0 and occ[row * w + col - 1]):
                    return False
            elif y_on_line:
                if occ[row * w + col] or (row > 0 and occ[(row - 1) * w + col]):
                    return False
            elif occ[row * w + col]:
                return False
        elif 0.0 < t < 1.0:
            # coincident x/y crossings: the segment passes through a lattice
            # corner and grazes all four surrounding cells
            cx = round(x0 + t * dx)
            cy = round(y0 + t * dy)
            for row in (cy - 1, cy):
                if row < 0 or row >= h:
                    continue
                base = row * w
                for col in (cx - 1, cx):
                    if 0 <= col < w and occ[base + col]:
                        return False
        prev = t
    return True


# --- map / mask serialization -------------------------------------------

_FULL = 255


def save_map(grid: GridMap, path) -> None:
    """Write a GridMap as binary PPM: R=occupied, G=start cell, B=goal cell."""
    rgb = np.zeros((grid.height, grid.width, 3), dtype=np.uint8)
    rgb[:, :, 0][grid.occupancy] = _FULL
    sr, sc = grid.cell_of(grid.start)
    gr, gc = grid.cell_of(grid.goal)
    rgb[sr, sc, 1] = _FULL
    rgb[gr, gc, 2] = _FULL
    netpbm.write_ppm(path, rgb)


def load_map(path) -> GridMap:
    """Load a PPM map; start/goal are restored at their cell centers."""
    rgb = netpbm.read_ppm(path)
    occupancy = rgb[:, :, 0] == _FULL
    starts = np.argwhere(rgb[:, :, 1] == _FULL)
    goals = np.argwhere(rgb[:, :, 2] == _FULL)
    if len(starts) != 1 or len(goals) != 1:
        raise FormatError(
            f"{path}: expected exactly one start and one goal cell, "
            f"found {len(starts)} / {len(goals)}"
        )
    start = (float(starts[0][1]) + 0.5, float(starts[0][0]) + 0.5)
    goal = (float(goals[0][1]) + 0.5, float(goals[0][0]) + 0.5)
    return GridMap(occupancy, start, goal)


def save_mask(mask: GuidanceMask, path) -> None:
    """Write a GuidanceMask as binary PGM: 255=predicted, 0=background."""
    gray = np.where(mask.bits, np.uint8(_FULL), np.uint8(0))
    netpbm.write_pgm(path, gray)


def load_mask(path) -> GuidanceMask:
    gray = netpbm.read_pgm(path)
    return GuidanceMask(gray == _FULL)
