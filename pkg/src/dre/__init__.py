"""Degenerate random environments: sampling, clusters, duality, Monte Carlo."""

from .bounds import (
    bounds_report,
    cubic_root,
    drift_formulas,
    epsilon_d0,
    saw_counts,
    static_classify,
    verify_duality,
)
from .clusters import (
    BlockingFunction,
    BShapeReport,
    ClusterResult,
    backward_cluster,
    classify_b_shape,
    communicating_cluster,
    dn_trajectory,
    forward_cluster,
    interval_chain,
    verify_blocking_function,
)
from .directions import Direction, all_directions, parse_token, token_of
from .env import EnvironmentGrid, Window, reverse_environment, sample_environment, subgrid
from .errors import (
    ConsistencyError,
    DimensionError,
    DreError,
    ModelAssumptionError,
    ValidationError,
)
from .measure import SupportMeasure, theta_plus_is_one
from .models import ModelId, canonical_name, catalog_names, measure_for, two_valued
from .montecarlo import (
    EstimateRecord,
    TrialPlan,
    bisect_pc,
    check_theta_identity,
    classify_shapes,
    estimate_theta,
    m_size_stats,
    run_plan,
    survival_curve,
)
from .snapshot import load_snapshot, save_snapshot
from .walks import (
    OpenCycle,
    PathTrace,
    build_open_cycle,
    coalescence_stats,
    detect_gigantic_m,
    quadrant_path,
    seoa_path,
    swoa_path,
)

__version__ = "0.1.0"

__all__ = [
    "BShapeReport",
    "BlockingFunction",
    "ClusterResult",
    "ConsistencyError",
    "DimensionError",
    "Direction",
    "DreError",
    "EnvironmentGrid",
    "EstimateRecord",
    "ModelAssumptionError",
    "ModelId",
    "OpenCycle",
    "PathTrace",
    "SupportMeasure",
    "TrialPlan",
    "ValidationError",
    "Window",
    "__version__",
    "all_directions",
    "backward_cluster",
    "bisect_pc",
    "bounds_report",
    "build_open_cycle",
    "canonical_name",
    "catalog_names",
    "check_theta_identity",
    "classify_b_shape",
    "classify_shapes",
    "coalescence_stats",
    "communicating_cluster",
    "cubic_root",
    "detect_gigantic_m",
    "dn_trajectory",
    "drift_formulas",
    "epsilon_d0",
    "estimate_theta",
    "forward_cluster",
    "interval_chain",
    "load_snapshot",
    "m_size_stats",
    "measure_for",
    "parse_token",
    "quadrant_path",
    "reverse_environment",
    "run_plan",
    "sample_environment",
    "save_snapshot",
    "saw_counts",
    "seoa_path",
    "static_classify",
    "subgrid",
    "survival_curve",
    "swoa_path",
    "theta_plus_is_one",
    "token_of",
    "two_valued",
    "verify_blocking_function",
    "verify_duality",
]
