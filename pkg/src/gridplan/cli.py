"""Command-line entry point.

Subcommands cover map generation, corner/inflation utilities, single
planning runs, dataset export, and the benchmark protocols.  Exit codes:
0 success, 1 planning/generation failure (no path), 2 usage or configuration
error, 3 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import bench
from .errors import FormatError, MapGenerationError, NoPathError, UsageError
from .gridworld import (
    DEFAULT_SAFETY_MARGIN,
    extract_convex_corners,
    inflate,
    load_map,
    load_mask,
    save_map,
)
from .guidance import NoiseSpec, dataset_export, oracle_guidance
from .mapgen import DIFFICULTY_BANDS, generate_map
from .planners import PlannerConfig
from .plots import render_map_svg

_CONFIG_FIELDS = {f.name: f.type for f in fields(PlannerConfig)}
_FLOAT_PARAMS = (
    ("step_size", "steering step size, cells"),
    ("neighbor_radius", "rewiring neighborhood radius, cells"),
    ("mask_ratio", "probability of mask-guided draws (neural planners)"),
    ("predicted_ratio", "probability of predicted-corner draws inside the hull"),
    ("explore_ratio", "probability of sampling corners outside the hull"),
    ("stall_tol", "best-cost stall tolerance for early stopping"),
    ("goal_tol", "goal connection radius, cells"),
    ("goal_bias", "probability of sampling the goal directly"),
    ("corner_jitter", "sampling slack radius around predicted corners, cells"),
)
_INT_PARAMS = (
    ("max_iters", "iteration cap"),
    ("stall_window", "early-stop stall window, iterations"),
    ("seed", "trial RNG seed"),
)


def _add_planner_flags(parser: argparse.ArgumentParser) -> None:
    defaults = PlannerConfig()
    group = parser.add_argument_group("planner parameters")
    for name, help_text in _FLOAT_PARAMS:
        group.add_argument(
            f"--{name.replace('_', '-')}",
            dest=name,
            type=float,
            default=None,
            help=f"{help_text} (default {getattr(defaults, name)})",
        )
    for name, help_text in _INT_PARAMS:
        group.add_argument(
            f"--{name.replace('_', '-')}",
            dest=name,
            type=int,
            default=None,
            help=f"{help_text} (default {getattr(defaults, name)})",
        )


def _load_config_file(path: str) -> dict:
    """Flat key=value lines or a JSON object; unknown keys are rejected."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise UsageError(f"{path}: config must be a JSON object")
    except json.JSONDecodeError:
        data = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            data[key.strip()] = value.strip()
    for key in data:
        if key not in _CONFIG_FIELDS:
            raise UsageError(f"{path}: unknown config key {key!r}")
    return data


def _planner_config(args) -> PlannerConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    values: dict = {}
    if getattr(args, "config", None):
        raw = _load_config_file(args.config)
        for key, val in raw.items():
            caster = int if key in {n for n, _ in _INT_PARAMS} else float
            if key in ("early_stop", "validate_tree"):
                caster = lambda v: str(v).lower() in ("1", "true", "yes")
            values[key] = caster(val)
    for name, _ in list(_FLOAT_PARAMS) + list(_INT_PARAMS):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        return PlannerConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_genmaps(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        grid = generate_map(args.seed + i, args.difficulty, args.width, args.height)
        path = out / f"{args.difficulty}_{args.seed + i:06d}.ppm"
        save_map(grid, path)
        print(path)
    return 0


def cmd_inflate(args) -> int:
    grid = load_map(args.map)
    save_map(inflate(grid, args.rc), args.out)
    print(args.out)
    return 0


def cmd_corners(args) -> int:
    grid = inflate(load_map(args.map), args.rc)
    corners = extract_convex_corners(grid)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("row,col\n")
        for r, c in corners.tolist():
            fh.write(f"{r},{c}\n")
    print(f"{args.out}: {len(corners)} corners")
    return 0


def cmd_plan(args) -> int:
    if args.planner in bench.GUIDED_PLANNERS and not (args.mask or args.oracle):
        raise UsageError(f"planner {args.planner!r} requires --mask or --oracle")
    grid = load_map(args.map)
    planning = inflate(grid, args.rc)
    mask = None
    if args.mask:
        mask = load_mask(args.mask)
    elif args.oracle:
        mask = oracle_guidance(planning)
    cfg = _planner_config(args)
    try:
        record = bench.run_planner(args.planner, planning, mask, cfg)
    except NoPathError:
        record = None
    payload = {
        "planner": args.planner,
        "map": str(args.map),
        "seed": cfg.seed,
        "record": record.to_dict() if record else {"success": False},
    }
    text = json.dumps(payload, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.svg and record is not None and record.success:
        render_map_svg(planning, [(args.planner, record.path)], args.svg)
    return 0 if record is not None and record.success else 1


def cmd_dataset_export(args) -> int:
    manifest = dataset_export(
        seed=args.seed,
        count=args.count,
        difficulty=args.difficulty,
        pairs_per_map=args.pairs,
        out_dir=args.out,
        width=args.width,
        height=args.height,
    )
    print(manifest)
    return 0


def _load_suite_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON suite config: {exc}") from exc
    if not isinstance(data, dict) or "maps" not in data:
        raise UsageError(f"{path}: suite config must be an object with 'maps'")
    return data


def _suite_planners(data: dict) -> list[tuple[str, PlannerConfig]]:
    planners = []
    for entry in data.get("planners", [{"name": "convex_neural"}]):
        params = entry.get("params", {})
        unknown = set(params) - set(_CONFIG_FIELDS)
        if unknown:
            raise UsageError(f"unknown planner params {sorted(unknown)}")
        planners.append((entry["name"], PlannerConfig(**params)))
    return planners


def _build_suite(data: dict, trials_override: int | None = None) -> bench.ScenarioSuite:
    return bench.build_suite(
        seed=int(data.get("seed", 0)),
        map_specs=data["maps"],
        planners=_suite_planners(data),
        trials_per_map=trials_override or int(data.get("trials_per_map", 10)),
        safety_margin=float(data.get("safety_margin", DEFAULT_SAFETY_MARGIN)),
    )


def cmd_bench_run(args) -> int:
    data = _load_suite_config(args.suite)
    suite = _build_suite(data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stats, results = bench.run_suite(suite, jobs=args.jobs)
    bench.emit_report(results, "json", out / "records.json")
    bench.emit_report(results, "csv", out / "records.csv")
    bench.write_summary_csv(stats, out / "summary.csv")
    for row in stats:
        length = f"{row.mean_length:.2f}" if row.mean_length is not None else "-"
        print(
            f"{row.map_id:16s} {row.planner:16s} len={length:>8s} "
            f"time={row.mean_time:.3f}s success={row.success_rate:.0f}%"
        )
    return 0


def cmd_bench_sweep(args) -> int:
    data = _load_suite_config(args.suite)
    suite = _build_suite(data)
    sweep = data.get("sweep", {})
    preds = sweep.get("predicted_ratio", [0.0, 0.5, 0.9])
    explores = sweep.get("explore_ratio", [0.2])
    trials = int(sweep.get("trials", 20))
    base = next(
        (cfg for name, cfg in suite.planners if name == "convex_neural"),
        PlannerConfig(),
    )
    pairs = [(p, e) for p in preds for e in explores]
    rows = bench.sensitivity_sweep(suite.maps, pairs, trials, base, suite.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_dict_csv(
        rows,
        [
            "predicted_ratio", "explore_ratio", "trials", "success_rate",
            "mean_length", "mean_time", "mean_smoothness",
        ],
        out / "sweep.csv",
    )
    print(out / "sweep.csv")
    return 0


def cmd_bench_converge(args) -> int:
    data = _load_suite_config(args.suite)
    suite = _build_suite(data)
    conv = data.get("convergence", {})
    n_seeds = int(conv.get("seeds", 20))
    indices = conv.get("map_indices", [0])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for idx in indices:
        bm = suite.maps[int(idx)]
        curves = bench.convergence_trace(bm, suite.planners, n_seeds, suite.seed)
        bench.write_convergence_csv(curves, out / f"convergence_{bm.map_id}.csv")
        bench.write_convergence_svg(
            curves, out / f"convergence_{bm.map_id}.svg", title=bm.map_id
        )
        print(out / f"convergence_{bm.map_id}.csv")
    return 0


def cmd_bench_noise(args) -> int:
    data = _load_suite_config(args.suite)
    suite = _build_suite(data)
    specs = []
    for entry in data.get(
        "noise",
        [
            {"kind": "gaussian_shift", "sigma": 2.0},
            {"kind": "gaussian_shift", "sigma": 4.0},
            {"kind": "deletion", "fraction": 0.3},
            {"kind": "deletion", "fraction": 0.6},
        ],
    ):
        specs.append(
            NoiseSpec(
                kind=entry["kind"],
                sigma=float(entry.get("sigma", 0.0)),
                fraction=float(entry.get("fraction", 0.0)),
            )
        )
    cfg = next(
        (cfg for name, cfg in suite.planners if name == "convex_neural"),
        PlannerConfig(),
    )
    rows = bench.robustness_study(
        suite.maps, specs, suite.trials_per_map, cfg, suite.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_dict_csv(
        rows,
        [
            "noise", "trials", "success_rate", "mean_length", "mean_time",
            "mean_smoothness", "length_delta_pct", "time_delta_pct",
            "smoothness_delta_pct", "success_delta_points",
        ],
        out / "robustness.csv",
    )
    print(out / "robustness.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridplan",
        description="Grid motion planning toolkit: corner-guided RRT* and baselines.",
        epilog="Exit codes: 0 ok, 1 planning failure, 2 usage error, 3 I/O error.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("genmaps", help="generate benchmark maps as PPM files")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--difficulty", choices=sorted(DIFFICULTY_BANDS), required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--width", type=int, default=224)
    p.add_argument("--height", type=int, default=224)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_genmaps)

    p = sub.add_parser("inflate", help="write the safety-inflated map")
    p.add_argument("--map", required=True)
    p.add_argument("--rc", type=float, default=DEFAULT_SAFETY_MARGIN,
                   help=f"safety margin in cells (default {DEFAULT_SAFETY_MARGIN})")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inflate)

    p = sub.add_parser("corners", help="extract convex corners to CSV")
    p.add_argument("--map", required=True)
    p.add_argument("--rc", type=float, default=DEFAULT_SAFETY_MARGIN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corners)

    p = sub.add_parser("plan", help="run one planner on one map")
    p.add_argument("--map", required=True)
    p.add_argument("--planner", choices=bench.PLANNER_NAMES, required=True)
    p.add_argument("--mask", help="guidance mask PGM (guided planners)")
    p.add_argument("--oracle", action="store_true",
                   help="use the oracle guidance mask instead of a file")
    p.add_argument("--rc", type=float, default=DEFAULT_SAFETY_MARGIN)
    p.add_argument("--config", help="planner config file (JSON or key=value)")
    p.add_argument("--out", help="write the run record JSON here (default stdout)")
    p.add_argument("--svg", help="also render the planned path as SVG")
    _add_planner_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("dataset", help="training dataset tools")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    d = dsub.add_parser("export", help="export (input PPM, label PGM) pairs")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--count", type=int, default=200)
    d.add_argument("--pairs", type=int, default=10)
    d.add_argument("--difficulty", choices=sorted(DIFFICULTY_BANDS), required=True)
    d.add_argument("--width", type=int, default=224)
    d.add_argument("--height", type=int, default=224)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset_export)

    p = sub.add_parser("bench", help="benchmark protocols")
    bsub = p.add_subparsers(dest="bench_command", required=True)
    for name, func, help_text in (
        ("run", cmd_bench_run, "repeated trials and aggregate metrics"),
        ("sweep", cmd_bench_sweep, "sampling-ratio sensitivity sweep"),
        ("converge", cmd_bench_converge, "cost-vs-iteration convergence traces"),
        ("noise", cmd_bench_noise, "prediction-noise robustness study"),
    ):
        b = bsub.add_parser(name, help=help_text)
        b.add_argument("--suite", required=True, help="suite config JSON")
        b.add_argument("--out", required=True, help="output directory")
        if name == "run":
            b.add_argument("--jobs", type=int, default=1,
                           help="parallel trial workers (default 1)")
        b.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NoPathError, MapGenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
