"""Distances that avoid a removed set, and tools for reasoning about them.

The package computes intrinsic (path-length) metrics on Euclidean space
minus an exception set, classifies how candidate paths meet that set,
certifies permeability with explicit witness polylines, ranks closed sets
by iterated isolated-point removal, and cross-checks the Lipschitz claims
that motivate the whole construction.
"""

from .cbrank import (
    PERFECT_CORE,
    CBSet,
    Limit,
    PerfectCore,
    Points,
    UnionSet,
    cantor_staircase,
    cb_derivative,
    cb_rank,
    cbset_from_json,
    geometric_limit,
    harmonic_limit,
    is_permeable_1d,
    sk_family,
)
from .errors import (
    BudgetExhaustedError,
    ChartDetourLeavesChartError,
    DepthExceededError,
    DimensionMismatchError,
    GridTooLargeError,
    IntrametricError,
    NoConstructionError,
    NoFinitePairError,
    NotPermeableFamilyError,
    OutOfDomainError,
    SceneError,
    SubsetViolationError,
    UndecidableToleranceError,
    UnsupportedFamilyError,
)
from .exception_sets import (
    COUNTABLE_CLOSURE,
    FINITE,
    UNCOUNTABLE_CLOSURE,
    UNKNOWN,
    Arrangement,
    CantorSet,
    Chart,
    ChartManifold,
    CircleSphere,
    CrossingReport,
    ExceptionSet,
    FinitePoints,
    HalfFlat,
    Hyperplane,
    IrrationalSquare,
    IsolatedCantorD0,
    LipschitzGraph,
    RationalGrid,
    Slit,
    TopologistSine,
    contains,
    exception_set_from_json,
    path_crossings,
    segment_crossings,
)
from .geometry import Polyline, is_simple, loop_erase, polyline_length, segment_intersection
from .grid import grid_distance
from .metrics import (
    Domain,
    MetricEstimate,
    bounded_metric_transform,
    chart_detour,
    cone_chain,
    intrinsic_distance,
    l1_distance_irrational_square,
    permeability_certificate,
    quasi_convexity_ratio,
    theta_intrinsic_distance,
)
from .scene import SceneConfig, parse_scene_config
from .verification import (
    FixtureFunction,
    VerificationReport,
    fixture,
    lipschitz_constant_estimate,
    run_paper_suite,
    stratified_pairs,
    verify_equal_constants,
    verify_main_theorem,
    verify_subset_permeability,
)

__version__ = "0.1.0"
