"""Piecewise-polynomial trajectories through waypoints by alternating minimization.

The solver alternates a closed-form solve of the free waypoint derivatives
with independent per-segment duration optimization via polynomial
root-finding, and records per-iteration diagnostics that verify the
method's descent and rate guarantees at runtime.
"""

from .driver import (
    ConvergenceRecord,
    RateSummary,
    SolveResult,
    Termination,
    build_segments,
    default_initial_guess,
    optimize,
    rate_report,
)
from .errors import (
    AmtrajError,
    ConditioningError,
    DegenerateSegmentError,
    NoFreeVariablesError,
    ProblemFileError,
    SingularFreeBlockError,
    ValidationError,
)
from .objective import (
    ObjectiveBlocks,
    Partition,
    ProblemSpec,
    assemble_blocks,
    build_partition,
    fixed_values,
    sigma_free,
    spatial_gradient,
    spec_notices,
    total_cost,
    validate_spec,
)
from .poly import (
    BoundaryPair,
    DerivStack,
    PolySegment,
    basis,
    boundary_of,
    coeffs_from_boundary,
    cost_matrix,
    eval_segment,
    mapping_matrix,
)
from .problem_io import (
    Report,
    SolverConfig,
    dump_problem,
    emit_report,
    export_trajectory,
    load_problem,
    parse_problem,
    samples_to_csv,
)
from .problems import benchmark_problem, random_problem, waypoint_problem
from .roots import positive_real_roots
from .spatial import solve_free_block, solve_spatial
from .temporal import (
    RationalCost,
    extract_rational,
    optimal_duration,
    segment_cost,
    segment_quadratic_cost,
    solve_temporal,
    stationarity_polynomial,
)

__version__ = "0.1.0"

__all__ = [
    "AmtrajError",
    "BoundaryPair",
    "ConditioningError",
    "ConvergenceRecord",
    "DegenerateSegmentError",
    "DerivStack",
    "NoFreeVariablesError",
    "ObjectiveBlocks",
    "Partition",
    "PolySegment",
    "ProblemFileError",
    "ProblemSpec",
    "RateSummary",
    "RationalCost",
    "Report",
    "SingularFreeBlockError",
    "SolveResult",
    "SolverConfig",
    "Termination",
    "ValidationError",
    "assemble_blocks",
    "basis",
    "benchmark_problem",
    "boundary_of",
    "build_partition",
    "build_segments",
    "coeffs_from_boundary",
    "cost_matrix",
    "default_initial_guess",
    "dump_problem",
    "emit_report",
    "eval_segment",
    "export_trajectory",
    "extract_rational",
    "fixed_values",
    "load_problem",
    "mapping_matrix",
    "optimal_duration",
    "optimize",
    "parse_problem",
    "positive_real_roots",
    "random_problem",
    "rate_report",
    "samples_to_csv",
    "segment_cost",
    "segment_quadratic_cost",
    "sigma_free",
    "solve_free_block",
    "solve_spatial",
    "solve_temporal",
    "spatial_gradient",
    "spec_notices",
    "stationarity_polynomial",
    "total_cost",
    "validate_spec",
    "waypoint_problem",
]
