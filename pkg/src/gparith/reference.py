"""Built-in worked examples with published reference values.

Six canonical refinement cases (addition, subtraction, multiplication,
division, factorization, and a mixed multiply-divide case) are stored with
their expected refined means and, where available, the expected refined
precision matrix.  The ``examples`` CLI command replays them as a
self-checking report; the acceptance tests assert them individually.

Note on the multiplication case: published tabulations of its refined
precision list the first two diagonal entries in swapped order; the matrix
stored here is in the orientation confirmed by finite differences of the
gradient (the (1,1) entry carries y^2, the (2,2) entry x^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .addition import refine_add
from .model import (
    Operation,
    OperationSpec,
    RefinedTriple,
    UncertainScalar,
    triple_from_independent,
)
from .multiplication import refine_mul

__all__ = [
    "PrecisionExpectation",
    "WorkedExample",
    "CheckOutcome",
    "ExampleReport",
    "WORKED_EXAMPLES",
    "run_example",
    "run_all",
]

_OFF_DIAGONAL = ~np.eye(3, dtype=bool)


@dataclass(frozen=True)
class PrecisionExpectation:
    """Expected refined precision, compared entrywise.

    Exactly one of ``atol``/``rtol`` is set; ``mask`` restricts the compared
    entries (None means all nine).
    """

    expected: np.ndarray
    atol: float | None = None
    rtol: float | None = None
    mask: np.ndarray | None = None


@dataclass(frozen=True)
class WorkedExample:
    name: str
    operation: Operation
    theta: float
    means: tuple[float, float, float]
    stds: tuple[float, float, float]
    expected_means: tuple[float, float, float]
    means_tol: float
    expected_residual: float | None = None
    residual_tol: float | None = None
    precision: PrecisionExpectation | None = None

    def prior(self):
        return triple_from_independent(
            *(UncertainScalar(m, s) for m, s in zip(self.means, self.stds))
        )

    def spec(self) -> OperationSpec:
        return OperationSpec(self.operation, self.theta)


@dataclass(frozen=True)
class CheckOutcome:
    label: str
    deviation: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass(frozen=True)
class ExampleReport:
    example: WorkedExample
    refined: RefinedTriple
    checks: tuple[CheckOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def max_mean_deviation(self) -> float:
        return next(c.deviation for c in self.checks if c.label == "means")


WORKED_EXAMPLES: tuple[WorkedExample, ...] = (
    WorkedExample(
        name="addition",
        operation=Operation.ADD,
        theta=0.1,
        means=(1.0, 10.0, 50.0),
        stds=(1.0, 5.0, 10.0),
        expected_means=(1.3095, 17.7375, 19.0501),
        means_tol=1e-3,
        expected_residual=-3.095e-3,
        residual_tol=1e-5,
        precision=PrecisionExpectation(
            expected=np.array(
                [
                    [101.0, 100.0, -100.0],
                    [100.0, 100.04, -100.0],
                    [-100.0, -100.0, 100.01],
                ]
            ),
            atol=1e-9,
        ),
    ),
    WorkedExample(
        name="subtraction",
        operation=Operation.ADD,
        theta=0.1,
        means=(1.0, 2.0, 7.0),
        stds=(1.0, 10.0, 3.0),
        expected_means=(1.036, 5.636, 6.672),
        means_tol=1e-3,
        precision=PrecisionExpectation(
            expected=np.array(
                [
                    [101.0, 100.0, -100.0],
                    [100.0, 100.01, -100.0],
                    [-100.0, -100.0, 100.111],
                ]
            ),
            atol=1e-2,
        ),
    ),
    WorkedExample(
        name="multiplication",
        operation=Operation.MUL,
        theta=0.1,
        means=(0.5, 2.0, 5.0),
        stds=(1.0, 1.0, 10.0),
        expected_means=(0.577, 2.022, 1.167),
        means_tol=5e-3,
        precision=PrecisionExpectation(
            expected=100.0
            * np.array(
                [
                    [4.099, 1.167, -2.022],
                    [1.167, 0.343, -0.577],
                    [-2.022, -0.577, 1.000],
                ]
            ),
            atol=1.0,
        ),
    ),
    WorkedExample(
        name="division",
        operation=Operation.MUL,
        theta=0.1,
        means=(0.7, 2.0, 5.0),
        stds=(1.0, 10.0, 1.0),
        expected_means=(0.908, 5.463, 4.962),
        means_tol=5e-3,
    ),
    WorkedExample(
        name="factorization",
        operation=Operation.MUL,
        theta=0.01,
        means=(1.0, 1.0, 7.0),
        stds=(10.0, 10.0, 2.0),
        expected_means=(2.641, 2.641, 6.975),
        means_tol=5e-3,
        precision=PrecisionExpectation(
            expected=1e4
            * np.array(
                [
                    [6.975, 6.975, -2.641],
                    [6.975, 6.975, -2.641],
                    [-2.641, -2.641, 1.0],
                ]
            ),
            rtol=5e-3,
        ),
    ),
    WorkedExample(
        name="mixed mul-div",
        operation=Operation.MUL,
        theta=0.1,
        means=(1.2, -2.0, 7.0),
        stds=(0.4, 10.0, 6.0),
        expected_means=(1.234, 4.205, 5.189),
        means_tol=5e-3,
        precision=PrecisionExpectation(
            expected=100.0
            * np.array(
                [
                    [0.0, 5.188, -4.205],
                    [5.188, 0.0, -1.234],
                    [-4.205, -1.234, 0.0],
                ]
            ),
            rtol=1e-2,
            mask=_OFF_DIAGONAL,
        ),
    ),
)


def run_example(example: WorkedExample) -> ExampleReport:
    """Refine one worked example and compare against its reference values."""
    prior = example.prior()
    spec = example.spec()
    if example.operation is Operation.ADD:
        refined = refine_add(prior, spec)
    else:
        refined = refine_mul(prior, spec)

    checks = [
        CheckOutcome(
            label="means",
            deviation=float(
                np.abs(refined.means - np.array(example.expected_means)).max()
            ),
            tolerance=example.means_tol,
        )
    ]
    if example.expected_residual is not None:
        checks.append(
            CheckOutcome(
                label="residual",
                deviation=abs(refined.residual - example.expected_residual),
                tolerance=example.residual_tol,
            )
        )
    if example.precision is not None:
        exp = example.precision
        difference = np.abs(refined.precision.entries - exp.expected)
        if exp.rtol is not None:
            denominator = np.where(exp.expected == 0.0, 1.0, np.abs(exp.expected))
            difference = difference / denominator
            tolerance = exp.rtol
        else:
            tolerance = exp.atol
        if exp.mask is not None:
            difference = np.where(exp.mask, difference, 0.0)
        checks.append(
            CheckOutcome(
                label="precision",
                deviation=float(difference.max()),
                tolerance=tolerance,
            )
        )
    return ExampleReport(example=example, refined=refined, checks=tuple(checks))


def run_all(examples=None) -> list[ExampleReport]:
    if examples is None:
        examples = WORKED_EXAMPLES
    return [run_example(e) for e in examples]
