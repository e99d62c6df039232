"""Core data model for soft-constrained Gaussian refinement.

A computation starts from three scalar operands with Gaussian uncertainty,
jointly described by a mean vector and a 3x3 symmetric positive definite
precision matrix (the inverse covariance).  Refinement operations pull the
means toward a constraint surface (x + y = z or x * y = z) and tighten the
precision; the types here carry the inputs, the refined outputs, and the
solver diagnostics.

The linear algebra is deliberately fixed-size: an unrolled 3x3 Cholesky
factorization with an explicit pivot-acceptance threshold, plus forward and
backward substitution.  ``numpy.linalg`` is used by the test suite as an
independent oracle, never by the kernels themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "InvalidInputError",
    "NotPositiveDefiniteError",
    "UncertainScalar",
    "PrecisionMatrix3",
    "GaussianTriple",
    "Operation",
    "OperationSpec",
    "SolverDiagnostics",
    "RefinedTriple",
    "triple_from_independent",
    "covariance_of",
    "spd_check",
    "cholesky3",
    "solve3",
]

# Pivot acceptance for the 3x3 Cholesky, relative to the corresponding
# diagonal entry of the input (a pivot this far below its own diagonal has
# lost all significant digits to cancellation); below this the matrix is
# treated as not positive definite.  The floor is per-row so that strongly
# scaled but genuinely definite matrices -- e.g. diagonal precision with a
# 1e16 dynamic range from a near-certain operand next to a near-ignorant
# one -- are still accepted.
_PIVOT_RTOL = 1e-12
# Maximum tolerated relative asymmetry of a matrix that claims to be symmetric.
_SYMMETRY_RTOL = 1e-12


class InvalidInputError(ValueError):
    """An input violates a documented precondition."""


class NotPositiveDefiniteError(InvalidInputError):
    """A matrix that must be symmetric positive definite is not."""


def _as_vector3(value, name: str = "vector") -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise InvalidInputError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite, got {arr.tolist()}")
    return arr


def _as_matrix3(value, name: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from None
    if arr.shape != (3, 3):
        raise InvalidInputError(f"{name} must be 3x3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite")
    return arr


def _check_symmetry(m: np.ndarray, name: str) -> None:
    scale = max(float(np.abs(m).max()), 1e-300)
    asym = float(np.abs(m - m.T).max())
    if asym > _SYMMETRY_RTOL * scale:
        raise InvalidInputError(
            f"{name} must be symmetric; max relative asymmetry {asym / scale:.3e}"
        )


def cholesky3(m: np.ndarray) -> np.ndarray | None:
    """Lower-triangular Cholesky factor of a symmetric 3x3 matrix.

    Only the lower triangle of ``m`` is read.  Returns ``None`` when a pivot
    falls at or below ``1e-12`` times its own diagonal entry, i.e. the
    matrix is not positive definite to working precision.
    """
    a00 = m[0, 0]
    a10 = m[1, 0]
    a11 = m[1, 1]
    a20 = m[2, 0]
    a21 = m[2, 1]
    a22 = m[2, 2]
    if a00 <= _PIVOT_RTOL * abs(a00):
        return None
    l00 = math.sqrt(a00)
    l10 = a10 / l00
    l20 = a20 / l00
    p1 = a11 - l10 * l10
    if p1 <= _PIVOT_RTOL * abs(a11):
        return None
    l11 = math.sqrt(p1)
    l21 = (a21 - l20 * l10) / l11
    p2 = a22 - l20 * l20 - l21 * l21
    if p2 <= _PIVOT_RTOL * abs(a22):
        return None
    l22 = math.sqrt(p2)
    return np.array([[l00, 0.0, 0.0], [l10, l11, 0.0], [l20, l21, l22]])


def _cho_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L @ L.T) x = b by forward and backward substitution."""
    y0 = b[0] / L[0, 0]
    y1 = (b[1] - L[1, 0] * y0) / L[1, 1]
    y2 = (b[2] - L[2, 0] * y0 - L[2, 1] * y1) / L[2, 2]
    x2 = y2 / L[2, 2]
    x1 = (y1 - L[2, 1] * x2) / L[1, 1]
    x0 = (y0 - L[1, 0] * x1 - L[2, 0] * x2) / L[0, 0]
    return np.array([x0, x1, x2])


def spd_check(m) -> bool:
    """True iff the symmetric 3x3 matrix is positive definite.

    Raises :class:`InvalidInputError` when the input is not symmetric to
    within a 1e-12 relative tolerance; definiteness itself is decided by the
    pivoted Cholesky factorization.
    """
    arr = _as_matrix3(m, "matrix")
    _check_symmetry(arr, "matrix")
    return cholesky3(arr) is not None


def solve3(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for a symmetric positive definite 3x3 ``m``.

    One step of iterative refinement follows the Cholesky solve so the
    residual stays near machine precision even for badly scaled systems.
    """
    arr = _as_matrix3(m, "matrix")
    _check_symmetry(arr, "matrix")
    b = _as_vector3(rhs, "right-hand side")
    L = cholesky3(arr)
    if L is None:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    x = _cho_solve(L, b)
    x = x + _cho_solve(L, b - arr @ x)
    return x


@dataclass(frozen=True)
class UncertainScalar:
    """A scalar value with Gaussian uncertainty (mean and standard deviation)."""

    mean: float
    std: float

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "std", float(self.std))
        if not math.isfinite(self.mean):
            raise InvalidInputError(f"mean must be finite, got {self.mean}")
        if not (math.isfinite(self.std) and self.std > 0.0):
            raise InvalidInputError(f"std must be finite and > 0, got {self.std}")

    @property
    def variance(self) -> float:
        return self.std * self.std


class PrecisionMatrix3:
    """Symmetric positive definite 3x3 precision matrix (inverse covariance).

    Row-major layout::

        [[A, E, Z],
         [E, B, H],
         [Z, H, G]]

    where the diagonal holds the marginal precisions of the three operands
    and the off-diagonal entries carry their correlations.  The stored array
    is made exactly symmetric and read-only at construction.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = _as_matrix3(entries, "precision matrix")
        _check_symmetry(arr, "precision matrix")
        arr = 0.5 * (arr + arr.T)
        if cholesky3(arr) is None:
            raise NotPositiveDefiniteError("precision matrix is not positive definite")
        arr.flags.writeable = False
        self.entries = arr

    @classmethod
    def unchecked(cls, entries) -> "PrecisionMatrix3":
        """Wrap a symmetric matrix without the positive-definiteness check.

        Exists only for diagnostic results that must carry a curvature matrix
        which failed the SPD test (see ``SolverDiagnostics.hessian_spd``).
        """
        obj = object.__new__(cls)
        arr = _as_matrix3(entries, "precision matrix")
        _check_symmetry(arr, "precision matrix")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        obj.entries = arr
        return obj

    def covariance(self) -> np.ndarray:
        return covariance_of(self)

    def __repr__(self):
        return f"PrecisionMatrix3({self.entries.tolist()!r})"


def covariance_of(precision) -> np.ndarray:
    """Invert a precision matrix, returning the 3x3 covariance matrix."""
    arr = precision.entries if isinstance(precision, PrecisionMatrix3) else None
    if arr is None:
        arr = _as_matrix3(precision, "precision matrix")
        _check_symmetry(arr, "precision matrix")
    cols = [solve3(arr, e) for e in np.eye(3)]
    cov = np.column_stack(cols)
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class GaussianTriple:
    """Joint Gaussian belief over the three operands (x, y, z)."""

    means: np.ndarray
    precision: PrecisionMatrix3

    def __post_init__(self):
        means = _as_vector3(self.means, "means")
        means.flags.writeable = False
        object.__setattr__(self, "means", means)
        if not isinstance(self.precision, PrecisionMatrix3):
            object.__setattr__(self, "precision", PrecisionMatrix3(self.precision))


def triple_from_independent(
    x: UncertainScalar, y: UncertainScalar, z: UncertainScalar
) -> GaussianTriple:
    """Joint belief for three independent operands: diagonal precision 1/std^2."""
    precision = PrecisionMatrix3(
        np.diag([1.0 / x.variance, 1.0 / y.variance, 1.0 / z.variance])
    )
    return GaussianTriple(np.array([x.mean, y.mean, z.mean]), precision)


class Operation(Enum):
    """Constraint kind the refinement enforces."""

    ADD = "add"
    MUL = "mul"


@dataclass(frozen=True)
class OperationSpec:
    """An operation kind plus the residual tolerance theta (> 0).

    ``weight`` is the precision of the constraint residual, 1/theta**2; it
    multiplies the constraint term of the refinement objective.
    """

    kind: Operation
    theta: float

    def __post_init__(self):
        if not isinstance(self.kind, Operation):
            raise InvalidInputError(f"kind must be an Operation, got {self.kind!r}")
        object.__setattr__(self, "theta", float(self.theta))
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise InvalidInputError(
                f"theta must be finite and > 0, got {self.theta}"
            )

    @property
    def weight(self) -> float:
        return 1.0 / (self.theta * self.theta)


@dataclass(frozen=True)
class SolverDiagnostics:
    """How a refinement result was obtained.

    ``hessian_spd`` is False when the refined precision matrix failed the
    positive-definiteness check (degenerate or saddle curvature); the result
    is still returned.
    """

    iterations: int
    converged: bool
    starts_tried: int
    gradient_norm: float
    hessian_spd: bool = True


@dataclass(frozen=True)
class RefinedTriple:
    """Refined means and precision, with the residual and objective achieved."""

    means: np.ndarray
    precision: PrecisionMatrix3
    residual: float
    objective: float
    diagnostics: SolverDiagnostics

    def __post_init__(self):
        means = _as_vector3(self.means, "refined means")
        means.flags.writeable = False
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "objective", float(self.objective))
        if not math.isfinite(self.residual):
            raise InvalidInputError("refined residual must be finite")
        if not math.isfinite(self.objective):
            raise InvalidInputError("refined objective must be finite")
