"""Sweep one prior mean across an interval and trace the refined curve.

For the multiplicative constraint the traced second mean follows the
ordinary hyperbola y = c/x at large |sweep| but stays finite through zero;
depending on the prior precisions the curve can jump between branches.
``WARM_START`` follows a branch (each solution seeds the next solve, so the
pass is inherently sequential and can show hysteresis at branch ends);
``COLD_MULTI_START`` re-runs the full multi-start solver at every sample and
therefore reports the global (lowest-objective) curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .addition import refine_add
from .model import (
    GaussianTriple,
    InvalidInputError,
    Operation,
    OperationSpec,
    RefinedTriple,
)
from .multiplication import (
    MulSolverConfig,
    NonConvergenceError,
    refine_mul,
    refined_from_point,
)

__all__ = [
    "SweepMode",
    "SweepSpec",
    "TraceSample",
    "TraceCurve",
    "CurveExtremum",
    "CurveJump",
    "CurveFeatures",
    "EmptyCurveError",
    "trace_sweep",
    "detect_features",
]


class SweepMode(Enum):
    WARM_START = "warm"
    COLD_MULTI_START = "cold"


class EmptyCurveError(ValueError):
    """Feature detection on a curve with no converged samples."""


@dataclass(frozen=True)
class SweepSpec:
    """Which prior mean sweeps (operand index 0, 1 or 2), over what grid."""

    operand: int
    start: float
    stop: float
    steps: int = 401
    mode: SweepMode = SweepMode.WARM_START

    def __post_init__(self):
        if self.operand not in (0, 1, 2):
            raise InvalidInputError(f"operand must be 0, 1 or 2, got {self.operand}")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "stop", float(self.stop))
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise InvalidInputError("sweep bounds must be finite")
        if not self.start < self.stop:
            raise InvalidInputError(
                f"sweep start must be < stop, got [{self.start}, {self.stop}]"
            )
        if int(self.steps) != self.steps or self.steps < 2:
            raise InvalidInputError(f"steps must be an integer >= 2, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))
        if not isinstance(self.mode, SweepMode):
            raise InvalidInputError(f"mode must be a SweepMode, got {self.mode!r}")

    def grid(self) -> np.ndarray:
        """Uniform sample grid, inclusive of both endpoints."""
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class TraceSample:
    sweep_value: float
    refined: RefinedTriple


@dataclass(frozen=True)
class TraceCurve:
    """Ordered trace samples plus the sweep and base configuration used."""

    samples: tuple[TraceSample, ...]
    sweep: SweepSpec
    base: GaussianTriple


@dataclass(frozen=True)
class CurveExtremum:
    value: float
    at_sweep_value: float


@dataclass(frozen=True)
class CurveJump:
    """A discontinuity between two grid-adjacent converged samples."""

    between: tuple[float, float]
    magnitude: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.between[0] + self.between[1])


@dataclass(frozen=True)
class CurveFeatures:
    """Summary features of a traced curve (converged samples only).

    ``asymptote_max_rel_dev`` is None when no converged sample lies beyond
    the configured |sweep| threshold.
    """

    max_second_mean: CurveExtremum
    jumps: tuple[CurveJump, ...]
    asymptote_max_rel_dev: float | None


def trace_sweep(
    base: GaussianTriple,
    spec: OperationSpec,
    sweep: SweepSpec,
    config: MulSolverConfig | None = None,
) -> TraceCurve:
    """Refine at every grid point of the sweep, never dropping samples.

    ADD uses the closed form (no mode distinction).  For MUL, non-converged
    samples are recorded with ``converged=False`` carrying the best iterate.
    """
    samples = []
    previous = None
    for value in sweep.grid():
        means = np.array(base.means)
        means[sweep.operand] = value
        prior = GaussianTriple(means, base.precision)
        if spec.kind is Operation.ADD:
            refined = refine_add(prior, spec)
        else:
            refined = _refine_mul_sample(prior, spec, sweep.mode, previous, config)
            if refined.diagnostics.converged:
                previous = refined.means
        samples.append(TraceSample(float(value), refined))
    return TraceCurve(tuple(samples), sweep, base)


def _refine_mul_sample(prior, spec, mode, previous, config) -> RefinedTriple:
    if mode is SweepMode.WARM_START and previous is not None:
        try:
            return refine_mul(prior, spec, config, starts=[previous])
        except NonConvergenceError:
            pass  # fall back to the full multi-start
    try:
        return refine_mul(prior, spec, config)
    except NonConvergenceError as err:
        return refined_from_point(
            prior,
            spec,
            err.best_point,
            converged=False,
            iterations=err.iterations,
            starts_tried=err.starts_tried,
            gradient_norm=err.gradient_norm,
        )


def detect_features(
    curve: TraceCurve,
    jump_threshold: float = 10.0,
    asymptote_min_abs: float = 50.0,
) -> CurveFeatures:
    """Extract maximum, discontinuities and hyperbola agreement from a curve.

    Jumps are grid-adjacent converged sample pairs whose refined-mean
    distance exceeds ``jump_threshold`` times the median such distance.
    The asymptote deviation compares the refined second mean against the
    ordinary hyperbola ``c / sweep_value`` (c = base third mean) over
    samples with ``|sweep_value| >= asymptote_min_abs``; it is meaningful
    for first-operand sweeps.
    """
    if jump_threshold <= 0 or asymptote_min_abs <= 0:
        raise InvalidInputError("thresholds must be > 0")
    converged = [s for s in curve.samples if s.refined.diagnostics.converged]
    if not converged:
        raise EmptyCurveError("curve has no converged samples")

    seconds = np.array([s.refined.means[1] for s in converged])
    peak = int(np.argmax(seconds))
    max_second = CurveExtremum(
        value=float(seconds[peak]), at_sweep_value=converged[peak].sweep_value
    )

    pairs = []
    for left, right in zip(curve.samples, curve.samples[1:]):
        if left.refined.diagnostics.converged and right.refined.diagnostics.converged:
            distance = float(np.linalg.norm(right.refined.means - left.refined.means))
            pairs.append((left.sweep_value, right.sweep_value, distance))
    jumps: tuple[CurveJump, ...] = ()
    if pairs:
        median = float(np.median([d for _, _, d in pairs]))
        if median > 0.0:
            jumps = tuple(
                CurveJump(between=(lo, hi), magnitude=d)
                for lo, hi, d in pairs
                if d > jump_threshold * median
            )

    reference_c = float(curve.base.means[2])
    deviations = [
        abs(s.refined.means[1] - reference_c / s.sweep_value)
        / abs(reference_c / s.sweep_value)
        for s in converged
        if abs(s.sweep_value) >= asymptote_min_abs and reference_c != 0.0
    ]
    asymptote = float(max(deviations)) if deviations else None

    return CurveFeatures(
        max_second_mean=max_second,
        jumps=jumps,
        asymptote_max_rel_dev=asymptote,
    )
