"""Benchmark harness: repeated trials, metric aggregation, parameter sweeps,
convergence traces, prediction-noise robustness, and report emission.

Trial seeds derive only from (suite seed, map id, planner id, trial index),
so results for one planner never depend on which other planners run.
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import UsageError
from .gridworld import GridMap, GuidanceMask, extract_convex_corners, filter_predicted_corners, inflate
from .guidance import NoiseSpec, oracle_guidance, perturb_corners
from .mapgen import generate_map
from .planners import (
    PlannerConfig,
    RunRecord,
    convex_neural_plan,
    make_neural_informed_sampler,
    make_neural_sampler,
    make_uniform_sampler,
    plan_visibility_astar,
    rrt_star_plan,
)
from .plots import render_curves_svg, render_map_svg
from .seeding import derive_seed

logger = logging.getLogger(__name__)

GUIDED_PLANNERS = frozenset({"neural", "neural_informed", "convex_neural"})
PLANNER_NAMES = ("visibility", "rrt_star", "neural", "neural_informed", "convex_neural")


def run_planner(
    name: str,
    planning: GridMap,
    mask: GuidanceMask | None,
    cfg: PlannerConfig,
    predicted_corners: np.ndarray | None = None,
) -> RunRecord:
    """Dispatch one trial to a planner by name."""
    if name in GUIDED_PLANNERS and mask is None and predicted_corners is None:
        raise UsageError(f"planner {name!r} needs a guidance mask")
    if name == "visibility":
        return plan_visibility_astar(planning)
    if name == "rrt_star":
        return rrt_star_plan(planning, cfg, make_uniform_sampler(planning))
    if name == "neural":
        sampler = make_neural_sampler(planning, mask, cfg.mask_ratio)
        return rrt_star_plan(planning, cfg, sampler)
    if name == "neural_informed":
        sampler = make_neural_informed_sampler(planning, mask, cfg.mask_ratio)
        return rrt_star_plan(planning, cfg, sampler)
    if name == "convex_neural":
        return convex_neural_plan(
            planning, mask, cfg, predicted_corners=predicted_corners
        )
    raise UsageError(f"unknown planner {name!r}")


@dataclass
class BenchMap:
    """One benchmark scenario: an inflated planning map plus optional mask."""

    map_id: str
    planning: GridMap
    mask: GuidanceMask | None = None


@dataclass
class ScenarioSuite:
    seed: int
    maps: list[BenchMap]
    planners: list[tuple[str, PlannerConfig]]
    trials_per_map: int = 10

    def __post_init__(self):
        if self.trials_per_map < 1:
            raise UsageError("trials_per_map must be at least 1")
        for name, _ in self.planners:
            if name not in PLANNER_NAMES:
                raise UsageError(f"unknown planner {name!r}")


@dataclass
class TrialResult:
    map_id: str
    planner: str
    trial: int
    record: RunRecord


@dataclass
class StatsRow:
    """Aggregate over one (map, planner) cell.

    Length and smoothness statistics cover successful trials only; time and
    iterations cover every trial.
    """

    map_id: str
    planner: str
    trials: int
    successes: int
    success_rate: float  # percent
    mean_length: float | None
    std_length: float
    mean_time: float
    std_time: float
    mean_smoothness: float | None
    std_smoothness: float
    mean_iterations: float


def _mean_std(values: list[float]) -> tuple[float | None, float]:
    if not values:
        return None, 0.0
    mean = sum(values) / len(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def aggregate(results: list[TrialResult]) -> list[StatsRow]:
    """Per-(map, planner) statistics, in first-seen order."""
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    order: list[tuple[str, str]] = []
    for tr in results:
        key = (tr.map_id, tr.planner)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(tr.record)
    rows = []
    for map_id, planner in order:
        recs = groups[(map_id, planner)]
        ok = [r for r in recs if r.success]
        mean_len, std_len = _mean_std([r.length for r in ok])
        mean_sm, std_sm = _mean_std([r.smoothness for r in ok])
        mean_t, std_t = _mean_std([r.wall_time for r in recs])
        rows.append(
            StatsRow(
                map_id=map_id,
                planner=planner,
                trials=len(recs),
                successes=len(ok),
                success_rate=100.0 * len(ok) / len(recs),
                mean_length=mean_len,
                std_length=std_len,
                mean_time=mean_t or 0.0,
                std_time=std_t,
                mean_smoothness=mean_sm,
                std_smoothness=std_sm,
                mean_iterations=sum(r.iterations_used for r in recs) / len(recs),
            )
        )
    return rows


def _failure_record(wall: float) -> RunRecord:
    return RunRecord(
        success=False,
        path=None,
        length=None,
        smoothness=None,
        wall_time=wall,
        iterations_used=0,
        cost_trace=[],
    )


def run_trial(
    name: str,
    planning: GridMap,
    mask: GuidanceMask | None,
    cfg: PlannerConfig,
) -> RunRecord:
    """One trial; any raised error becomes a failure record."""
    t0 = time.perf_counter()
    try:
        return run_planner(name, planning, mask, cfg)
    except Exception:
        logger.warning("trial failed for planner %s", name, exc_info=True)
        return _failure_record(time.perf_counter() - t0)


def _run_group(args) -> tuple[tuple[str, str], list[RunRecord]]:
    map_id, name, planning, mask, cfgs = args
    return (map_id, name), [run_trial(name, planning, mask, c) for c in cfgs]


def run_suite(
    suite: ScenarioSuite, jobs: int = 1
) -> tuple[list[StatsRow], list[TrialResult]]:
    """Execute every (map, planner, trial) and aggregate.

    Trial seed = derive_seed(suite seed, map id, planner name, trial index).
    Individual trial errors are captured as failures and never abort the run.
    """
    tasks = []
    for bm in suite.maps:
        for name, cfg in suite.planners:
            cfgs = [
                replace(cfg, seed=derive_seed(suite.seed, bm.map_id, name, t))
                for t in range(suite.trials_per_map)
            ]
            tasks.append((bm.map_id, name, bm.planning, bm.mask, cfgs))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            grouped = dict(pool.map(_run_group, tasks))
    else:
        grouped = dict(_run_group(t) for t in tasks)
    results = [
        TrialResult(bm.map_id, name, t, rec)
        for bm in suite.maps
        for name, _ in suite.planners
        for t, rec in enumerate(grouped[(bm.map_id, name)])
    ]
    return aggregate(results), results


def build_suite(
    seed: int,
    map_specs: list[dict],
    planners: list[tuple[str, PlannerConfig]],
    trials_per_map: int = 10,
    safety_margin: float = 2.0,
    oracle_masks: bool | None = None,
) -> ScenarioSuite:
    """Generate maps per spec dicts and assemble a suite.

    Each spec is {"difficulty", "count", "width", "height"}; map ids are
    "<difficulty>-<index>".  Oracle masks are produced whenever a guided
    planner is present (or forced via ``oracle_masks``).
    """
    need_masks = (
        oracle_masks
        if oracle_masks is not None
        else any(name in GUIDED_PLANNERS for name, _ in planners)
    )
    maps = []
    for spec in map_specs:
        difficulty = spec["difficulty"]
        count = int(spec["count"])
        width = int(spec.get("width", 224))
        height = int(spec.get("height", 224))
        for i in range(count):
            grid = generate_map(
                derive_seed(seed, "map", difficulty, i), difficulty, width, height
            )
            planning = inflate(grid, safety_margin)
            mask = oracle_guidance(planning) if need_masks else None
            maps.append(BenchMap(f"{difficulty}-{i:03d}", planning, mask))
    return ScenarioSuite(seed, maps, planners, trials_per_map)


# --- parameter sensitivity ---------------------------------------------------


def sensitivity_sweep(
    maps: list[BenchMap],
    pairs: list[tuple[float, float]],
    trials: int,
    base_cfg: PlannerConfig,
    suite_seed: int = 0,
) -> list[dict]:
    """Mean corner-guided planner performance per (predicted, explore) ratio.

    Seeds match run_suite's derivation for the convex_neural planner, so a
    single-pair sweep reproduces the corresponding suite cell exactly.
    """
    if not pairs:
        raise UsageError("sensitivity sweep needs a nonempty parameter grid")
    rows = []
    for pred, explore in pairs:
        cfg = replace(base_cfg, predicted_ratio=pred, explore_ratio=explore)
        recs = []
        for bm in maps:
            for t in range(trials):
                cfg_t = replace(
                    cfg,
                    seed=derive_seed(suite_seed, bm.map_id, "convex_neural", t),
                )
                recs.append(run_trial("convex_neural", bm.planning, bm.mask, cfg_t))
        ok = [r for r in recs if r.success]
        mean_len, _ = _mean_std([r.length for r in ok])
        mean_sm, _ = _mean_std([r.smoothness for r in ok])
        rows.append(
            {
                "predicted_ratio": pred,
                "explore_ratio": explore,
                "trials": len(recs),
                "success_rate": 100.0 * len(ok) / len(recs),
                "mean_length": mean_len,
                "mean_time": sum(r.wall_time for r in recs) / len(recs),
                "mean_smoothness": mean_sm,
            }
        )
    return rows


# --- convergence -------------------------------------------------------------


def _trace_to_curve(record: RunRecord, length: int) -> list[float | None]:
    """Per-iteration best cost, carrying the last value forward; None before
    the first solution."""
    curve: list[float | None] = [None] * (length + 1)
    for k, c in record.cost_trace:
        if k <= length:
            curve[k] = c
    last = None
    for i in range(length + 1):
        if curve[i] is None:
            curve[i] = last
        else:
            last = curve[i]
    return curve


def convergence_trace(
    bench_map: BenchMap,
    planners: list[tuple[str, PlannerConfig]],
    n_seeds: int,
    suite_seed: int = 0,
) -> dict[str, list[float | None]]:
    """Mean best-cost-per-iteration curves over seeds, per planner."""
    if n_seeds < 1:
        raise UsageError("convergence trace needs at least one seed")
    curves: dict[str, list[float | None]] = {}
    for name, cfg in planners:
        per_seed = []
        for t in range(n_seeds):
            cfg_t = replace(
                cfg, seed=derive_seed(suite_seed, bench_map.map_id, name, t)
            )
            rec = run_trial(name, bench_map.planning, bench_map.mask, cfg_t)
            per_seed.append(_trace_to_curve(rec, cfg.max_iters))
        mean_curve: list[float | None] = []
        for i in range(cfg.max_iters + 1):
            vals = [c[i] for c in per_seed if c[i] is not None]
            mean_curve.append(sum(vals) / len(vals) if vals else None)
        curves[name] = mean_curve
    return curves


def iterations_to_within(
    curve: list[float | None], fraction: float = 0.05
) -> int | None:
    """First iteration index whose cost is within ``fraction`` of the final."""
    finite = [v for v in curve if v is not None]
    if not finite:
        return None
    target = finite[-1] * (1.0 + fraction)
    for i, v in enumerate(curve):
        if v is not None and v <= target:
            return i
    return None


# --- robustness to prediction noise -----------------------------------------


def robustness_study(
    maps: list[BenchMap],
    noise_specs: list[NoiseSpec],
    trials: int,
    cfg: PlannerConfig,
    suite_seed: int = 0,
) -> list[dict]:
    """Corner-guided planner under perturbed predicted corners.

    Runs a clean baseline plus every noise spec; rows report grand means and
    percentage deltas relative to clean (success as percentage points).
    Noise draws are per trial, seeded from the trial seed.
    """
    conditions: list[tuple[str, NoiseSpec | None]] = [("clean", None)]
    conditions.extend((spec.tag(), spec) for spec in noise_specs)
    stats: dict[str, dict] = {}
    for tag, spec in conditions:
        recs = []
        for bm in maps:
            corners = extract_convex_corners(bm.planning)
            predicted = filter_predicted_corners(bm.mask, corners)
            for t in range(trials):
                trial_seed = derive_seed(suite_seed, bm.map_id, "convex_neural", t)
                cfg_t = replace(cfg, seed=trial_seed)
                if spec is None:
                    noisy = predicted
                else:
                    noisy = perturb_corners(
                        predicted,
                        replace(spec, seed=derive_seed(trial_seed, "noise", tag)),
                        bm.planning,
                    )
                recs.append(
                    run_trial_with_corners(bm.planning, bm.mask, cfg_t, noisy)
                )
        ok = [r for r in recs if r.success]
        mean_len, _ = _mean_std([r.length for r in ok])
        mean_sm, _ = _mean_std([r.smoothness for r in ok])
        stats[tag] = {
            "noise": tag,
            "trials": len(recs),
            "success_rate": 100.0 * len(ok) / len(recs),
            "mean_length": mean_len,
            "mean_time": sum(r.wall_time for r in recs) / len(recs),
            "mean_smoothness": mean_sm,
        }
    clean = stats["clean"]

    def pct(cur, base):
        if cur is None or base in (None, 0):
            return None
        return 100.0 * (cur - base) / base

    rows = []
    for tag, _ in conditions:
        row = dict(stats[tag])
        row["length_delta_pct"] = pct(row["mean_length"], clean["mean_length"])
        row["time_delta_pct"] = pct(row["mean_time"], clean["mean_time"])
        row["smoothness_delta_pct"] = pct(
            row["mean_smoothness"], clean["mean_smoothness"]
        )
        row["success_delta_points"] = row["success_rate"] - clean["success_rate"]
        rows.append(row)
    return rows


def run_trial_with_corners(
    planning: GridMap,
    mask: GuidanceMask | None,
    cfg: PlannerConfig,
    predicted_corners: np.ndarray,
) -> RunRecord:
    t0 = time.perf_counter()
    try:
        return convex_neural_plan(
            planning, mask, cfg, predicted_corners=predicted_corners
        )
    except Exception:
        logger.warning("noisy trial failed", exc_info=True)
        return _failure_record(time.perf_counter() - t0)


# --- reports -----------------------------------------------------------------

CSV_COLUMNS = ("map", "planner", "trial", "success", "length", "smoothness", "time_s", "iters")


def _csv_num(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def emit_report(
    results: list[TrialResult], fmt: str, path, grid: GridMap | None = None
) -> None:
    """Write per-trial records as CSV, JSON, or an SVG path overlay.

    SVG requires the planning map and draws every successful path.
    Byte-deterministic for identical inputs.
    """
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for tr in results:
                r = tr.record
                writer.writerow(
                    [
                        tr.map_id,
                        tr.planner,
                        tr.trial,
                        int(r.success),
                        _csv_num(r.length),
                        _csv_num(r.smoothness),
                        _csv_num(r.wall_time),
                        r.iterations_used,
                    ]
                )
    elif fmt == "json":
        payload = [
            {
                "map": tr.map_id,
                "planner": tr.planner,
                "trial": tr.trial,
                "record": tr.record.to_dict(),
            }
            for tr in results
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    elif fmt == "svg":
        if grid is None:
            raise UsageError("SVG reports need the planning map")
        paths = [
            (f"{tr.planner}/{tr.trial}", tr.record.path)
            for tr in results
            if tr.record.success
        ]
        render_map_svg(grid, paths, path)
    else:
        raise UsageError(f"unknown report format {fmt!r}")


def load_report_json(path) -> list[TrialResult]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return [
        TrialResult(
            obj["map"], obj["planner"], obj["trial"], RunRecord.from_dict(obj["record"])
        )
        for obj in payload
    ]


def write_summary_csv(rows: list[StatsRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "map", "planner", "trials", "successes", "success_rate",
                "mean_length", "std_length", "mean_time", "std_time",
                "mean_smoothness", "std_smoothness", "mean_iterations",
            ]
        )
        for s in rows:
            writer.writerow(
                [
                    s.map_id, s.planner, s.trials, s.successes,
                    _csv_num(s.success_rate), _csv_num(s.mean_length),
                    _csv_num(s.std_length), _csv_num(s.mean_time),
                    _csv_num(s.std_time), _csv_num(s.mean_smoothness),
                    _csv_num(s.std_smoothness), _csv_num(s.mean_iterations),
                ]
            )


def write_dict_csv(rows: list[dict], columns: list[str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [
                    _csv_num(row[c]) if isinstance(row.get(c), float) else row.get(c, "")
                    for c in columns
                ]
            )


def write_convergence_csv(curves: dict[str, list[float | None]], path) -> None:
    names = list(curves)
    length = max(len(c) for c in curves.values())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration"] + names)
        for i in range(length):
            row = [i]
            for name in names:
                c = curves[name]
                v = c[i] if i < len(c) else None
                row.append(_csv_num(v))
            writer.writerow(row)


def write_convergence_svg(curves: dict[str, list[float | None]], path, title="") -> None:
    render_curves_svg(curves, path, title=title)
