import json
import math

import numpy as np
import pytest

from gridplan.errors import UsageError
from gridplan.gridworld import (
    GridMap,
    extract_convex_corners,
    inflate,
    load_map,
    load_mask,
)
from gridplan.guidance import (
    NoiseSpec,
    dataset_export,
    mask_from_path,
    oracle_guidance,
    perturb_corners,
    read_manifest,
)
from gridplan.mapgen import generate_map
from gridplan.planners import plan_visibility_astar


def disk_cells(center, radius, shape):
    """Brute-force disk rasterization: cells whose center is within radius."""
    h, w = shape
    out = set()
    for r in range(h):
        for c in range(w):
            if math.hypot(c + 0.5 - center[0], r + 0.5 - center[1]) <= radius:
                out.add((r, c))
    return out


class TestOracleGuidance:
    def test_direct_visibility_gives_empty_mask(self):
        g = GridMap(np.zeros((32, 32), dtype=bool), (4.5, 4.5), (28.5, 28.5))
        mask = oracle_guidance(g)
        assert not mask.bits.any()

    def test_single_detour_marks_one_disk(self):
        occ = np.zeros((48, 48), dtype=bool)
        occ[10:30, 10:30] = True
        g = GridMap(occ, (4.5, 34.5), (34.5, 4.5))
        record = plan_visibility_astar(g)
        assert len(record.path) == 3  # exactly one interior waypoint
        waypoint = record.path[1]
        mask = oracle_guidance(g, inflate_radius=6)
        expected = disk_cells(waypoint, 6.0, (48, 48))
        sr, sc = g.cell_of(g.start)
        gr, gc = g.cell_of(g.goal)
        expected -= {(sr, sc), (gr, gc)}
        assert set(map(tuple, np.argwhere(mask.bits).tolist())) == expected

    def test_zero_radius_marks_waypoints_only(self):
        occ = np.zeros((48, 48), dtype=bool)
        occ[10:30, 10:30] = True
        g = GridMap(occ, (4.5, 34.5), (34.5, 4.5))
        record = plan_visibility_astar(g)
        mask = oracle_guidance(g, inflate_radius=0)
        cells = {g.cell_of(p) for p in record.path[1:-1]}
        assert set(map(tuple, np.argwhere(mask.bits).tolist())) == cells

    def test_never_marks_start_or_goal(self):
        for seed in range(3):
            g = generate_map(seed, "medium", 96, 96)
            planning = inflate(g, 2.0)
            mask = oracle_guidance(planning)
            sr, sc = planning.cell_of(planning.start)
            gr, gc = planning.cell_of(planning.goal)
            assert not mask.bits[sr, sc]
            assert not mask.bits[gr, gc]


class TestPerturbCorners:
    def _corner_map(self):
        rng = np.random.RandomState(0)
        occ = rng.rand(64, 64) < 0.15
        g = GridMap(occ, (0.5, 0.5), (0.5, 0.5))
        return g, extract_convex_corners(g)

    def test_zero_sigma_identity(self):
        g, corners = self._corner_map()
        spec = NoiseSpec(kind="gaussian_shift", sigma=0.0, seed=3)
        out = perturb_corners(corners, spec, g)
        assert out.tolist() == corners.tolist()

    def test_full_deletion_empties(self):
        g, corners = self._corner_map()
        out = perturb_corners(corners, NoiseSpec(kind="deletion", fraction=1.0), g)
        assert len(out) == 0

    def test_deletion_rate_binomial(self):
        g = GridMap(np.zeros((128, 128), dtype=bool), (0.5, 0.5), (0.5, 0.5))
        cells = np.array(
            [(r, c) for r in range(0, 128, 2) for c in range(0, 128, 2)][:10_000]
        )
        n = len(cells)
        spec = NoiseSpec(kind="deletion", fraction=0.3, seed=11)
        survivors = len(perturb_corners(cells, spec, g))
        p = 0.7
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(survivors - n * p) < 3 * sigma

    def test_shift_never_occupied_or_out_of_bounds(self):
        g, corners = self._corner_map()
        for sigma in (2.0, 4.0):
            out = perturb_corners(
                corners, NoiseSpec(kind="gaussian_shift", sigma=sigma, seed=5), g
            )
            assert len(out)
            assert (out[:, 0] >= 0).all() and (out[:, 0] < 64).all()
            assert (out[:, 1] >= 0).all() and (out[:, 1] < 64).all()
            assert not g.occupancy[out[:, 0], out[:, 1]].any()

    def test_deterministic_per_seed(self):
        g, corners = self._corner_map()
        spec = NoiseSpec(kind="gaussian_shift", sigma=2.0, seed=9)
        a = perturb_corners(corners, spec, g)
        b = perturb_corners(corners, spec, g)
        assert a.tolist() == b.tolist()

    def test_bad_spec_rejected(self):
        with pytest.raises(UsageError):
            NoiseSpec(kind="melt", sigma=1.0)
        with pytest.raises(UsageError):
            NoiseSpec(kind="deletion", fraction=1.5)


class TestMaskFromPath:
    def test_endpoint_cells_cleared_even_when_disk_overlaps(self):
        g = GridMap(np.zeros((24, 24), dtype=bool), (8.5, 8.5), (20.5, 8.5))
        mask = mask_from_path(g, [(8.5, 8.5), (10.5, 8.5), (20.5, 8.5)], 6.0)
        assert not mask.bits[8, 8]
        assert not mask.bits[8, 20]
        assert mask.bits[8, 10]


class TestDatasetExport:
    def test_single_sample_layout(self, tmp_path):
        manifest = dataset_export(
            seed=1, count=1, difficulty="sparse", pairs_per_map=1,
            out_dir=tmp_path, width=64, height=64,
        )
        meta, records = read_manifest(manifest)
        assert meta["maps"] == 1 and meta["pairs_per_map"] == 1
        assert len(records) == 1
        rec = records[0]
        assert (tmp_path / rec["input"]).exists()
        assert (tmp_path / rec["label"]).exists()
        ppms = list(tmp_path.glob("*.ppm"))
        pgms = list(tmp_path.glob("*.pgm"))
        assert len(ppms) == 1 and len(pgms) == 1
        # exactly one record line plus the meta header
        lines = manifest.read_text().strip().splitlines()
        assert len(lines) == 2

    def test_rerun_byte_identical(self, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        dataset_export(5, 2, "sparse", 2, a_dir, width=64, height=64)
        dataset_export(5, 2, "sparse", 2, b_dir, width=64, height=64)
        for pa in sorted(a_dir.iterdir()):
            pb = b_dir / pa.name
            assert pa.read_bytes() == pb.read_bytes(), pa.name

    def test_labels_match_visibility_structure(self, tmp_path):
        manifest = dataset_export(
            seed=9, count=2, difficulty="sparse", pairs_per_map=3,
            out_dir=tmp_path, width=64, height=64,
        )
        meta, records = read_manifest(manifest)
        positive = 0
        total = 0
        for rec in records:
            grid = load_map(tmp_path / rec["input"])
            mask = load_mask(tmp_path / rec["label"])
            planning = inflate(grid, meta["safety_margin"])
            vis = plan_visibility_astar(planning)
            assert vis.length == pytest.approx(rec["path_length"])
            # mask is all-zero iff the path has no interior waypoints
            assert mask.bits.any() == (len(vis.path) > 2)
            positive += int(mask.bits.sum())
            total += mask.bits.size
        assert positive / total < 0.15
