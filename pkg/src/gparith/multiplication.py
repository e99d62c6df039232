"""Numerical refinement under the multiplicative constraint x * y ~= z.

The objective

    F(v) = 1/2 * [ (v - m)' P (v - m) + w * (x*y - z)^2 ]

is quartic, so the minimizer is found numerically: a damped Newton iteration
(Levenberg-style trust adjustment) run from a small deterministic set of
starting points, keeping the lowest converged objective.  The refined
precision is the Hessian of F at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    GaussianTriple,
    InvalidInputError,
    NotPositiveDefiniteError,
    Operation,
    OperationSpec,
    PrecisionMatrix3,
    RefinedTriple,
    SolverDiagnostics,
    _as_vector3,
    _cho_solve,
    cholesky3,
)

__all__ = [
    "MulSolverConfig",
    "NonConvergenceError",
    "objective_mul",
    "gradient_mul",
    "hessian_mul",
    "candidate_starts",
    "refine_mul",
    "refined_from_point",
]

_EYE = np.eye(3)
_DAMPING_MAX = 1e15
# Converged Hessian eigenvalues below -1e-9 * ||H|| mark a saddle/indefinite
# curvature; the result is still returned, flagged via hessian_spd.
_SADDLE_RTOL = 1e-9


@dataclass(frozen=True)
class MulSolverConfig:
    """Damped-Newton solver settings for the multiplicative refinement.

    ``gradient_tolerance`` is scale-aware: convergence requires
    ``||grad|| <= gradient_tolerance * (1 + ||P m||)`` where ``P m`` is the
    prior precision applied to the prior means.
    """

    gradient_tolerance: float = 1e-10
    max_iterations: int = 200
    max_starts: int = 8
    damping_initial: float = 1e-3

    def __post_init__(self):
        if not (math.isfinite(self.gradient_tolerance) and self.gradient_tolerance > 0):
            raise InvalidInputError("gradient_tolerance must be finite and > 0")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        if self.max_starts < 1:
            raise InvalidInputError("max_starts must be >= 1")
        if not (math.isfinite(self.damping_initial) and self.damping_initial > 0):
            raise InvalidInputError("damping_initial must be finite and > 0")


class NonConvergenceError(RuntimeError):
    """No starting point converged; carries the best iterate found."""

    def __init__(self, message, *, best_point, gradient_norm, iterations, starts_tried):
        super().__init__(message)
        self.best_point = np.asarray(best_point, dtype=float)
        self.gradient_norm = float(gradient_norm)
        self.iterations = int(iterations)
        self.starts_tried = int(starts_tried)


def objective_mul(point, prior: GaussianTriple, weight: float):
    """Refinement objective for the multiplicative constraint.

    Accepts a single 3-vector or an array of points with a trailing axis of
    length 3 (batched evaluation for grid scans).
    """
    p = np.asarray(point, dtype=float)
    d = p - prior.means
    quad = np.einsum("...i,ij,...j->...", d, prior.precision.entries, d)
    r = p[..., 0] * p[..., 1] - p[..., 2]
    value = 0.5 * (quad + weight * r * r)
    return float(value) if value.ndim == 0 else value


def gradient_mul(point, prior: GaussianTriple, weight: float) -> np.ndarray:
    """Gradient of :func:`objective_mul`: ``P (v - m) + w*r*(y, x, -1)``."""
    p = _as_vector3(point, "point")
    x, y, _ = p
    r = x * y - p[2]
    return prior.precision.entries @ (p - prior.means) + weight * r * np.array(
        [y, x, -1.0]
    )


def hessian_mul(point, prior: GaussianTriple, weight: float) -> np.ndarray:
    """Hessian of :func:`objective_mul`.

    The constraint contributes
    ``w * [[y^2, 2xy - z, -y], [2xy - z, x^2, -x], [-y, -x, 1]]``;
    note the first two diagonal entries are ``w*y^2`` and ``w*x^2``.
    """
    x, y, z = _as_vector3(point, "point")
    curvature = np.array(
        [
            [y * y, 2.0 * x * y - z, -y],
            [2.0 * x * y - z, x * x, -x],
            [-y, -x, 1.0],
        ]
    )
    return prior.precision.entries + weight * curvature


def candidate_starts(prior: GaussianTriple, theta: float) -> list[np.ndarray]:
    """Deterministic multi-start list for the damped Newton iteration.

    In order: the prior means; the two division-consistent points
    (c/b, b, c) and (a, c/a, c) when the divisor is safely nonzero; the two
    square-root factorization points (+-sqrt|c|, +-sqrt|c|*sign c, c) when
    |c| > 1e-12; and the prior means perturbed by theta in x and y (an
    escape hatch when the prior sits exactly on a stationary ridge).
    """
    a, b, c = prior.means
    starts = [np.array([a, b, c])]
    if abs(b) > 1e-8:
        starts.append(np.array([c / b, b, c]))
    if abs(a) > 1e-8:
        starts.append(np.array([a, c / a, c]))
    if abs(c) > 1e-12:
        root = math.sqrt(abs(c))
        sign = 1.0 if c >= 0.0 else -1.0
        starts.append(np.array([root, root * sign, c]))
        starts.append(np.array([-root, -root * sign, c]))
    starts.append(np.array([a + theta, b + theta, c]))
    return starts


@dataclass
class _StartResult:
    point: np.ndarray
    converged: bool
    iterations: int
    gradient_norm: float


def _gradient_scale(prior: GaussianTriple) -> float:
    return 1.0 + float(np.linalg.norm(prior.precision.entries @ prior.means))


def _newton(start, prior, weight, config, scale) -> _StartResult:
    """Damped Newton from one start: solve (H + lam*I) step = -grad,
    adapt lam by the ratio of actual to predicted decrease."""
    x = np.array(start, dtype=float)
    f = objective_mul(x, prior, weight)
    g = gradient_mul(x, prior, weight)
    lam = config.damping_initial
    nu = 2.0
    for iteration in range(config.max_iterations):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= config.gradient_tolerance * scale:
            return _StartResult(x, True, iteration, gnorm)
        hessian = hessian_mul(x, prior, weight)
        step = None
        while lam <= _DAMPING_MAX:
            factor = cholesky3(hessian + lam * _EYE)
            if factor is not None:
                step = _cho_solve(factor, -g)
                break
            lam *= 10.0
        if step is None:
            break
        trial = x + step
        f_trial = objective_mul(trial, prior, weight)
        predicted = -(g @ step + 0.5 * (step @ (hessian @ step)))
        if math.isfinite(f_trial) and predicted > 0.0 and f_trial < f:
            ratio = (f - f_trial) / predicted
            x, f = trial, f_trial
            g = gradient_mul(x, prior, weight)
            lam = max(lam * max(1.0 / 3.0, 1.0 - (2.0 * ratio - 1.0) ** 3), 1e-15)
            nu = 2.0
        else:
            lam *= nu
            nu *= 2.0
            if lam > _DAMPING_MAX:
                break
    gnorm = float(np.linalg.norm(gradient_mul(x, prior, weight)))
    converged = gnorm <= config.gradient_tolerance * scale
    return _StartResult(x, converged, config.max_iterations, gnorm)


def refined_from_point(
    prior: GaussianTriple,
    spec: OperationSpec,
    point,
    *,
    converged: bool,
    iterations: int,
    starts_tried: int,
    gradient_norm: float,
) -> RefinedTriple:
    """Package a solver iterate as a RefinedTriple.

    The refined precision is the objective Hessian at the point; when it
    fails the positive-definiteness check the result is flagged through
    ``diagnostics.hessian_spd`` instead of being rejected.
    """
    p = _as_vector3(point, "point")
    weight = spec.weight
    hessian = hessian_mul(p, prior, weight)
    try:
        precision = PrecisionMatrix3(hessian)
        spd = True
    except NotPositiveDefiniteError:
        precision = PrecisionMatrix3.unchecked(hessian)
        spd = False
    if spd and converged:
        eigenvalues = np.linalg.eigvalsh(precision.entries)
        if eigenvalues[0] < -_SADDLE_RTOL * float(np.abs(eigenvalues).max()):
            spd = False
    return RefinedTriple(
        means=p,
        precision=precision,
        residual=float(p[0] * p[1] - p[2]),
        objective=objective_mul(p, prior, weight),
        diagnostics=SolverDiagnostics(
            iterations=iterations,
            converged=converged,
            starts_tried=starts_tried,
            gradient_norm=gradient_norm,
            hessian_spd=spd,
        ),
    )


def refine_mul(
    prior: GaussianTriple,
    spec: OperationSpec,
    config: MulSolverConfig | None = None,
    *,
    starts=None,
) -> RefinedTriple:
    """Numerical MAP refinement under x * y ~= z.

    Runs the damped Newton iteration from every candidate start (or from the
    explicitly supplied ``starts``) and returns the converged result with the
    lowest objective.  Ties within 1e-12 are broken by Euclidean distance
    from the prior means, then by start order.  Raises
    :class:`NonConvergenceError` when no start converges.
    """
    if spec.kind is not Operation.MUL:
        raise InvalidInputError(f"refine_mul requires a MUL spec, got {spec.kind}")
    if config is None:
        config = MulSolverConfig()
    weight = spec.weight
    scale = _gradient_scale(prior)
    if starts is None:
        start_list = candidate_starts(prior, spec.theta)
    else:
        start_list = [_as_vector3(s, "start") for s in starts]
        if not start_list:
            raise InvalidInputError("starts must be non-empty when given")
    start_list = start_list[: config.max_starts]

    results = [_newton(s, prior, weight, config, scale) for s in start_list]
    converged = [r for r in results if r.converged]
    if not converged:
        best = min(results, key=lambda r: objective_mul(r.point, prior, weight))
        raise NonConvergenceError(
            f"no start converged after {config.max_iterations} iterations "
            f"(best gradient norm {best.gradient_norm:.3e})",
            best_point=best.point,
            gradient_norm=best.gradient_norm,
            iterations=best.iterations,
            starts_tried=len(results),
        )

    objectives = [objective_mul(r.point, prior, weight) for r in converged]
    best_objective = min(objectives)
    tie = 1e-12 * (1.0 + abs(best_objective))
    pool = [
        (float(np.linalg.norm(r.point - prior.means)), index)
        for index, (r, f) in enumerate(zip(converged, objectives))
        if f <= best_objective + tie
    ]
    _, winner_index = min(pool)
    winner = converged[winner_index]
    return refined_from_point(
        prior,
        spec,
        winner.point,
        converged=True,
        iterations=winner.iterations,
        starts_tried=len(results),
        gradient_norm=winner.gradient_norm,
    )
