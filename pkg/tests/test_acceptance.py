"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The benchmark suites
(20 maps per difficulty at 224x224, 10 trials per map) are computed once and
shared across criteria; the full module takes on the order of 15 minutes on
a desktop CPU.
"""

import math
import time
from dataclasses import replace
from functools import lru_cache
from random import Random

import numpy as np
import pytest

from gridplan.bench import (
    BenchMap,
    ScenarioSuite,
    convergence_trace,
    iterations_to_within,
    robustness_study,
    run_suite,
    sensitivity_sweep,
)
from gridplan.gridworld import (
    GridMap,
    extract_convex_corners,
    inflate,
)
from gridplan.guidance import NoiseSpec, oracle_guidance
from gridplan.mapgen import generate_map
from gridplan.planners import (
    PlannerConfig,
    convex_neural_plan,
    plan_visibility_astar,
    sampler_convex_structured,
)
from gridplan.seeding import derive_seed

from conftest import brute_force_corners, brute_force_inflate

SUITE_SEED = 2026
MAPS_PER_DIFFICULTY = 20
TRIALS = 10
MAP_SIZE = 224


def _report(cid: str, ok: bool, detail: str) -> None:
    print(f"\n[{cid}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{cid} failed: {detail}"


@lru_cache(maxsize=None)
def suite_maps(difficulty: str) -> tuple:
    maps = []
    for i in range(MAPS_PER_DIFFICULTY):
        grid = generate_map(
            derive_seed(SUITE_SEED, "map", difficulty, i), difficulty, MAP_SIZE, MAP_SIZE
        )
        planning = inflate(grid, 2.0)
        maps.append(
            BenchMap(f"{difficulty}-{i:03d}", planning, oracle_guidance(planning))
        )
    return tuple(maps)


@lru_cache(maxsize=None)
def planner_records(difficulty: str, planner: str, trials: int = TRIALS):
    suite = ScenarioSuite(
        seed=SUITE_SEED,
        maps=list(suite_maps(difficulty)),
        planners=[(planner, PlannerConfig())],
        trials_per_map=trials,
    )
    return run_suite(suite)


@lru_cache(maxsize=None)
def suite_build_seconds() -> float:
    t0 = time.perf_counter()
    suite_maps("sparse")
    planner_records("sparse", "visibility", 1)
    planner_records("sparse", "convex_neural")
    return time.perf_counter() - t0


def _grand_mean(records, field):
    vals = [getattr(r.record, field) for r in records if r.record.success]
    return sum(vals) / len(vals)


def test_c01_corner_rule_exactness():
    rng = np.random.RandomState(10)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        occ = rng.rand(64, 64) < rng.uniform(0.05, 0.4)
        grid = GridMap(occ, (0.5, 0.5), (0.5, 0.5))
        got = set(map(tuple, extract_convex_corners(grid).tolist()))
        if got != brute_force_corners(occ):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    _report(
        "C1",
        mismatches == 0 and elapsed < 10.0,
        f"corner rule vs 3x3 enumeration on 1000 maps: {mismatches} mismatched "
        f"maps in {elapsed:.1f}s (budget 10s)",
    )


def test_c02_inflation_exactness():
    rng = np.random.RandomState(20)
    mismatches = 0
    for _ in range(200):
        occ = rng.rand(64, 64) < rng.uniform(0.02, 0.3)
        grid = GridMap(occ, (0.5, 0.5), (0.5, 0.5))
        for radius in (0, 1, 1.5, 2):
            if not np.array_equal(
                inflate(grid, radius).occupancy, brute_force_inflate(occ, radius)
            ):
                mismatches += 1
    _report(
        "C2",
        mismatches == 0,
        f"inflation vs brute-force distance oracle on 200 maps x 4 radii: "
        f"{mismatches} mismatches",
    )


def test_c03_tree_invariants_instrumented():
    runs = 0
    for m in range(10):
        grid = generate_map(derive_seed("c3", m), "medium", 64, 64)
        planning = inflate(grid, 2.0)
        mask = oracle_guidance(planning)
        for s in range(10):
            cfg = PlannerConfig(
                seed=derive_seed("c3-run", m, s), max_iters=300, validate_tree=True
            )
            convex_neural_plan(planning, mask, cfg)  # validate raises on violation
            runs += 1
    _report(
        "C3",
        runs == 100,
        f"{runs} instrumented corner-guided runs with per-iteration cost/"
        f"acyclicity/collision validation, no violations",
    )


def test_c04_sampler_mixture():
    predicted = np.array([[10, 10]])
    inner = np.array([[20, 20], [20, 21]])
    outer = np.array([[40, 40], [41, 40]])
    goal = (50.0, 50.0)
    cfg = PlannerConfig(explore_ratio=0.2, predicted_ratio=0.5, goal_bias=0.0)
    rng = Random(4)
    n = 100_000
    counts = {"pred": 0, "inner": 0, "outer": 0}
    for _ in range(n):
        x, y = sampler_convex_structured(predicted, inner, outer, goal, cfg, rng)
        if math.hypot(x - 10.5, y - 10.5) <= cfg.corner_jitter + 1e-9:
            counts["pred"] += 1
        elif int(y) == 20:
            counts["inner"] += 1
        else:
            counts["outer"] += 1
    checks = []
    for kind, p in (("outer", 0.2), ("pred", 0.4), ("inner", 0.4)):
        sigma = math.sqrt(n * p * (1 - p))
        checks.append(abs(counts[kind] - n * p) < 3 * sigma)
    _report(
        "C4",
        all(checks),
        f"category counts {counts} vs expected (0.2, 0.4, 0.4) of {n}, 3-sigma",
    )


def test_c05_near_optimal_vs_visibility():
    elapsed = suite_build_seconds()
    _, vis = planner_records("sparse", "visibility", 1)
    _, cn = planner_records("sparse", "convex_neural")
    vis_by_map = {r.map_id: r.record.length for r in vis}
    worst = 0.0
    failures = []
    for bm in suite_maps("sparse"):
        lens = [
            r.record.length
            for r in cn
            if r.map_id == bm.map_id and r.record.success
        ]
        assert lens, f"no successes on {bm.map_id}"
        ratio = (sum(lens) / len(lens)) / vis_by_map[bm.map_id]
        worst = max(worst, ratio)
        if ratio > 1.02:
            failures.append((bm.map_id, round(ratio, 4)))
    _report(
        "C5",
        not failures and elapsed < 300.0,
        f"per-map mean length ratio vs visibility on {MAPS_PER_DIFFICULTY} sparse "
        f"maps: worst {worst:.4f} (limit 1.02), suite built in {elapsed:.0f}s "
        f"(budget 300s); over-limit maps: {failures}",
    )


def test_c06_length_improvement_over_rrt_star():
    _, cn_hard = planner_records("hard", "convex_neural")
    _, rrt_hard = planner_records("hard", "rrt_star")
    hard_ratio = _grand_mean(cn_hard, "length") / _grand_mean(rrt_hard, "length")
    cn_all = []
    rrt_all = []
    for difficulty in ("sparse", "medium", "hard"):
        cn_all.extend(planner_records(difficulty, "convex_neural")[1])
        rrt_all.extend(planner_records(difficulty, "rrt_star")[1])
    combined_ratio = _grand_mean(cn_all, "length") / _grand_mean(rrt_all, "length")
    _report(
        "C6",
        hard_ratio <= 0.95 and combined_ratio <= 0.98,
        f"corner-guided/plain length ratio: hard {hard_ratio:.3f} (limit 0.95), "
        f"combined {combined_ratio:.3f} (limit 0.98)",
    )


def test_c07_smoothness_improvement():
    cn = planner_records("medium", "convex_neural")[1] + planner_records(
        "hard", "convex_neural"
    )[1]
    rrt = planner_records("medium", "rrt_star")[1] + planner_records(
        "hard", "rrt_star"
    )[1]
    ratio = _grand_mean(cn, "smoothness") / _grand_mean(rrt, "smoothness")
    _report(
        "C7",
        ratio <= 0.7,
        f"corner-guided/plain smoothness ratio over medium+hard: {ratio:.3f} "
        f"(limit 0.70)",
    )


def test_c08_success_rate():
    total = 0
    ok = 0
    for difficulty in ("sparse", "medium", "hard"):
        for r in planner_records(difficulty, "convex_neural")[1]:
            total += 1
            ok += r.record.success
    rate = 100.0 * ok / total
    _report(
        "C8",
        rate >= 95.0 and total == 60 * TRIALS,
        f"corner-guided success {ok}/{total} = {rate:.1f}% over the 60-map mixed "
        f"suite (limit 95%)",
    )


def _replay_early_stop(record, cfg: PlannerConfig):
    """First iteration at which the stall rule fires, from the cost trace."""
    trace = record.cost_trace
    for i in range(len(trace)):
        if i >= cfg.stall_window and abs(
            trace[i][1] - trace[i - cfg.stall_window][1]
        ) < cfg.stall_tol:
            return trace[i][0]
    return None


def test_c09_effective_iterations_and_early_stop_replay():
    cfg = PlannerConfig()
    _, cn = planner_records("sparse", "convex_neural")
    iters = [r.record.iterations_used for r in cn]
    median = sorted(iters)[len(iters) // 2]
    replay_errors = 0
    for r in cn:
        expected = _replay_early_stop(r.record, cfg)
        if expected is not None:
            if r.record.iterations_used != expected:
                replay_errors += 1
        elif r.record.iterations_used != cfg.max_iters:
            replay_errors += 1
    _report(
        "C9",
        median < 0.5 * cfg.max_iters and replay_errors == 0,
        f"median effective iterations {median} (limit {cfg.max_iters // 2}); "
        f"early-stop trace replay mismatches: {replay_errors}",
    )


def test_c10_convergence_ordering():
    planners = [
        ("convex_neural", PlannerConfig()),
        ("rrt_star", PlannerConfig()),
    ]
    wins = 0
    total = 0
    for bm in suite_maps("medium")[:10]:
        curves = convergence_trace(bm, planners, n_seeds=20, suite_seed=SUITE_SEED)
        cn_idx = iterations_to_within(curves["convex_neural"], 0.05)
        rrt_idx = iterations_to_within(curves["rrt_star"], 0.05)
        total += 1
        if rrt_idx is None or (cn_idx is not None and cn_idx <= rrt_idx):
            wins += 1
    _report(
        "C10",
        wins >= 0.8 * total,
        f"corner-guided planner stabilizes no later than plain on {wins}/{total} "
        f"medium maps (need >= {int(0.8 * total)})",
    )


def test_c11_robustness_to_prediction_noise():
    cfg = PlannerConfig()
    delete30 = NoiseSpec(kind="deletion", fraction=0.3)
    delete60 = NoiseSpec(kind="deletion", fraction=0.6)
    details = []
    ok = True
    for difficulty in ("sparse", "medium"):
        rows = robustness_study(
            list(suite_maps(difficulty)), [delete30], trials=5, cfg=cfg,
            suite_seed=SUITE_SEED,
        )
        delta = rows[1]["length_delta_pct"]
        details.append(f"{difficulty} 30% deletion length delta {delta:+.2f}%")
        ok = ok and delta <= 2.0
    rows = robustness_study(
        list(suite_maps("hard")), [delete60], trials=5, cfg=cfg,
        suite_seed=SUITE_SEED,
    )
    drop = rows[1]["success_delta_points"]
    details.append(f"hard 60% deletion success delta {drop:+.1f} points")
    ok = ok and drop >= -15.0
    _report("C11", ok, "; ".join(details) + " (limits: +2% length, -15 points)")


def test_c12_determinism():
    maps = [
        BenchMap("det-sparse", suite_maps("sparse")[0].planning, suite_maps("sparse")[0].mask),
        BenchMap("det-medium", suite_maps("medium")[0].planning, suite_maps("medium")[0].mask),
        BenchMap("det-hard", suite_maps("hard")[0].planning, suite_maps("hard")[0].mask),
    ]
    planners = [
        (name, PlannerConfig())
        for name in ("visibility", "rrt_star", "neural", "neural_informed", "convex_neural")
    ]
    suite = ScenarioSuite(seed=7, maps=maps, planners=planners, trials_per_map=2)
    _, first = run_suite(suite)
    _, second = run_suite(suite)
    a = [(r.map_id, r.planner, r.trial, r.record.to_dict(False)) for r in first]
    b = [(r.map_id, r.planner, r.trial, r.record.to_dict(False)) for r in second]
    _report(
        "C12",
        a == b,
        f"two consecutive runs of the all-planner suite produced byte-identical "
        f"records (excluding wall time) across {len(a)} trials",
    )


def test_c13_sensitivity_qualitative_shape():
    rows = sensitivity_sweep(
        list(suite_maps("hard")[:10]),
        [(0.0, 0.2), (0.5, 0.2), (0.9, 0.2)],
        trials=10,
        base_cfg=PlannerConfig(),
        suite_seed=SUITE_SEED,
    )
    by_pred = {row["predicted_ratio"]: row["success_rate"] for row in rows}
    ok = by_pred[0.0] <= min(by_pred.values()) + 1e-9
    _report(
        "C13",
        ok,
        f"hard-map success by predicted ratio {by_pred}; rate at 0.0 is the row "
        f"minimum",
    )
