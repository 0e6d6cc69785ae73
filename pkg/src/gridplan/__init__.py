"""gridplan: 2D occupancy-grid motion planning with corner-guided sampling.

Planners: visibility-graph A*, RRT* (uniform / mask-guided / informed
mask-guided sampling), and a corner-guided RRT* that concentrates sampling
on convex corners filtered by a guidance mask, with early stopping.  A
benchmark harness reproduces the full experimental protocol.
"""

from .bench import (
    BenchMap,
    ScenarioSuite,
    StatsRow,
    TrialResult,
    aggregate,
    build_suite,
    convergence_trace,
    emit_report,
    robustness_study,
    run_planner,
    run_suite,
    sensitivity_sweep,
)
from .errors import (
    FormatError,
    GridPlanError,
    MapGenerationError,
    NoPathError,
    UsageError,
)
from .geometry import (
    EllipseSpec,
    HullPolygon,
    Point,
    convex_hull,
    informed_ellipse_sample,
    path_length,
    path_smoothness,
    point_in_hull,
    steer,
)
from .gridworld import (
    DEFAULT_SAFETY_MARGIN,
    GridMap,
    GuidanceMask,
    extract_convex_corners,
    filter_predicted_corners,
    inflate,
    load_map,
    load_mask,
    save_map,
    save_mask,
    segment_collision_free,
)
from .guidance import (
    NoiseSpec,
    dataset_export,
    mask_from_path,
    oracle_guidance,
    perturb_corners,
    read_manifest,
)
from .mapgen import DIFFICULTY_BANDS, generate_map, place_endpoints
from .planners import (
    PlannerConfig,
    RunRecord,
    Tree,
    choose_parent,
    convex_neural_plan,
    early_stop_check,
    plan_visibility_astar,
    rewire,
    rrt_star_plan,
    sampler_convex_structured,
    sampler_neural,
    sampler_neural_informed,
    sampler_uniform,
)
from .seeding import derive_seed

__version__ = "0.1.0"
