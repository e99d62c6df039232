"""Soft-constrained Gaussian refinement of three correlated operands.

Given Gaussian beliefs about x, y and z, the library computes the MAP
update under the soft constraint x + y ~= z (closed form) or x * y ~= z
(damped Newton with deterministic multi-start), returning refined means, a
refined precision matrix, and solver diagnostics.  A sweep tracer follows
the refined curve as one prior mean moves across an interval, and a small
oracle toolbox (grid scans, finite differences) supports independent
verification.
"""

__version__ = "0.1.0"

from .model import (
    GaussianTriple,
    InvalidInputError,
    NotPositiveDefiniteError,
    Operation,
    OperationSpec,
    PrecisionMatrix3,
    RefinedTriple,
    SolverDiagnostics,
    UncertainScalar,
    covariance_of,
    solve3,
    spd_check,
    triple_from_independent,
)
from .addition import (
    CONSTRAINT_DIRECTION,
    add_constraint_hessian,
    diagonal_residual_add,
    gradient_add,
    objective_add,
    refine_add,
    refined_precision_add,
)
from .multiplication import (
    MulSolverConfig,
    NonConvergenceError,
    candidate_starts,
    gradient_mul,
    hessian_mul,
    objective_mul,
    refine_mul,
)
from .oracle import GridBox, GridMinimum, fd_gradient, fd_hessian, grid_min
from .reference import (
    ExampleReport,
    WORKED_EXAMPLES,
    WorkedExample,
    run_all,
    run_example,
)
from .sweep import (
    CurveExtremum,
    CurveFeatures,
    CurveJump,
    EmptyCurveError,
    SweepMode,
    SweepSpec,
    TraceCurve,
    TraceSample,
    detect_features,
    trace_sweep,
)

__all__ = [
    "__version__",
    "GaussianTriple",
    "InvalidInputError",
    "NotPositiveDefiniteError",
    "Operation",
    "OperationSpec",
    "PrecisionMatrix3",
    "RefinedTriple",
    "SolverDiagnostics",
    "UncertainScalar",
    "covariance_of",
    "solve3",
    "spd_check",
    "triple_from_independent",
    "CONSTRAINT_DIRECTION",
    "add_constraint_hessian",
    "diagonal_residual_add",
    "gradient_add",
    "objective_add",
    "refine_add",
    "refined_precision_add",
    "MulSolverConfig",
    "NonConvergenceError",
    "candidate_starts",
    "gradient_mul",
    "hessian_mul",
    "objective_mul",
    "refine_mul",
    "GridBox",
    "GridMinimum",
    "fd_gradient",
    "fd_hessian",
    "grid_min",
    "ExampleReport",
    "WORKED_EXAMPLES",
    "WorkedExample",
    "run_all",
    "run_example",
    "CurveExtremum",
    "CurveFeatures",
    "CurveJump",
    "EmptyCurveError",
    "SweepMode",
    "SweepSpec",
    "TraceCurve",
    "TraceSample",
    "detect_features",
    "trace_sweep",
]
