"""Guidance-mask production: oracle labels from visibility paths, corner
filtering, prediction-noise models, and dataset export for the learning side.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Sequence

import numpy as np

from .errors import UsageError
from .geometry import Point
from .gridworld import (
    DEFAULT_SAFETY_MARGIN,
    GridMap,
    GuidanceMask,
    filter_predicted_corners,  # noqa: F401  (re-exported: part of this surface)
    inflate,
    save_map,
    save_mask,
)
from .mapgen import generate_map, place_endpoints
from .planners import plan_visibility_astar
from .seeding import derive_seed

logger = logging.getLogger(__name__)

ORACLE_RADIUS = 6.0  # waypoint inflation radius for label masks, in cells


@dataclass(frozen=True)
class NoiseSpec:
    """Prediction-noise model for robustness studies.

    gaussian_shift displaces each corner by independent rounded Gaussian
    offsets per axis; deletion drops each corner independently.
    """

    kind: str  # "gaussian_shift" | "deletion"
    sigma: float = 0.0
    fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian_shift", "deletion"):
            raise UsageError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise UsageError("sigma must be nonnegative")
        if not 0.0 <= self.fraction <= 1.0:
            raise UsageError("fraction must be in [0, 1]")

    def tag(self) -> str:
        if self.kind == "gaussian_shift":
            return f"shift_sigma{self.sigma:g}"
        return f"delete_{int(round(self.fraction * 100))}pct"


def mask_from_path(grid: GridMap, path: Sequence[Point], radius: float) -> GuidanceMask:
    """Disks of ``radius`` around the path's interior waypoints.

    The first and last waypoints are excluded, and the start/goal cells are
    never marked even when a disk overlaps them.
    """
    h, w = grid.shape
    bits = np.zeros((h, w), dtype=bool)
    for x, y in path[1:-1]:
        r0 = max(0, math.ceil(y - 0.5 - radius))
        r1 = min(h - 1, math.floor(y - 0.5 + radius))
        c0 = max(0, math.ceil(x - 0.5 - radius))
        c1 = min(w - 1, math.floor(x - 0.5 + radius))
        if r1 < r0 or c1 < c0:
            continue
        rows = np.arange(r0, r1 + 1, dtype=np.float64) + 0.5 - y
        cols = np.arange(c0, c1 + 1, dtype=np.float64) + 0.5 - x
        disk = rows[:, None] ** 2 + cols[None, :] ** 2 <= radius * radius
        bits[r0 : r1 + 1, c0 : c1 + 1] |= disk
    for p in (grid.start, grid.goal):
        row, col = grid.cell_of(p)
        bits[row, col] = False
    return GuidanceMask(bits)


def oracle_guidance(grid: GridMap, inflate_radius: float = ORACLE_RADIUS) -> GuidanceMask:
    """Label mask from the visibility planner's path on the inflated map.

    Propagates NoPathError when the goal is disconnected.
    """
    record = plan_visibility_astar(grid)
    return mask_from_path(grid, record.path, inflate_radius)


def perturb_corners(
    corners: np.ndarray, spec: NoiseSpec, grid: GridMap
) -> np.ndarray:
    """Apply a prediction-noise model to a corner set, deterministically.

    Shifted corners are clamped to the grid; shifts landing on occupied
    cells drop the corner.  The result is deduplicated and row-major sorted.
    """
    rng = Random(spec.seed)
    h, w = grid.shape
    kept: list[tuple[int, int]] = []
    if spec.kind == "gaussian_shift":
        for r, c in corners.tolist():
            nr = min(max(r + round(rng.gauss(0.0, spec.sigma)), 0), h - 1)
            nc = min(max(c + round(rng.gauss(0.0, spec.sigma)), 0), w - 1)
            if not grid.occupancy[nr, nc]:
                kept.append((nr, nc))
    else:
        for r, c in corners.tolist():
            if rng.random() >= spec.fraction:
                kept.append((r, c))
    if not kept:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(sorted(set(kept)), dtype=np.int64)


def dataset_export(
    seed: int,
    count: int,
    difficulty: str,
    pairs_per_map: int,
    out_dir,
    width: int = 224,
    height: int = 224,
    safety_margin: float = DEFAULT_SAFETY_MARGIN,
    mask_radius: float = ORACLE_RADIUS,
) -> Path:
    """Export (map+endpoints PPM, label PGM) training pairs plus a manifest.

    For each generated map, ``pairs_per_map`` feasible start/goal pairs are
    drawn; each sample's input encodes occupancy and that pair's endpoints,
    and its label is the oracle mask of the visibility path.  The manifest is
    JSON lines: a meta header, then one record per sample with map id, pair
    id, relative file paths and the visibility path length.  Byte-identical
    across reruns with the same arguments.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.jsonl"
    tmp_path = out / "manifest.jsonl.tmp"
    lines = [
        json.dumps(
            {
                "meta": {
                    "seed": seed,
                    "maps": count,
                    "pairs_per_map": pairs_per_map,
                    "difficulty": difficulty,
                    "width": width,
                    "height": height,
                    "mask_radius": mask_radius,
                    "safety_margin": safety_margin,
                    "reference_scale": {"maps": 4000, "pairs_per_map": 10},
                }
            },
            sort_keys=True,
        )
    ]
    try:
        for i in range(count):
            grid = generate_map(derive_seed("dataset", seed, i), difficulty, width, height)
            planning = inflate(grid, safety_margin)
            for j in range(pairs_per_map):
                rng = Random(derive_seed("pair", seed, i, j))
                start, goal, record = place_endpoints(planning, rng)
                sample = planning.with_endpoints(start, goal)
                mask = mask_from_path(sample, record.path, mask_radius)
                base = f"map{i:05d}_pair{j:02d}"
                save_map(GridMap(grid.occupancy, start, goal), out / f"{base}.ppm")
                save_mask(mask, out / f"{base}.pgm")
                lines.append(
                    json.dumps(
                        {
                            "map": i,
                            "pair": j,
                            "input": f"{base}.ppm",
                            "label": f"{base}.pgm",
                            "path_length": record.length,
                        },
                        sort_keys=True,
                    )
                )
        tmp_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        os.replace(tmp_path, manifest_path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise
    logger.info("exported %d samples to %s", count * pairs_per_map, out)
    return manifest_path


def read_manifest(manifest_path) -> tuple[dict, list[dict]]:
    """Parse a dataset manifest into (meta, sample records)."""
    meta: dict = {}
    records: list[dict] = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "meta" in obj:
                meta = obj["meta"]
            else:
                records.append(obj)
    return meta, records
