"""The built-in worked examples and their self-check report."""

import dataclasses

import numpy as np
import pytest

from gparith import WORKED_EXAMPLES, Operation, run_all, run_example
from gparith.reference import CheckOutcome


def test_six_examples_in_canonical_order():
    names = [e.name for e in WORKED_EXAMPLES]
    assert names == [
        "addition",
        "subtraction",
        "multiplication",
        "division",
        "factorization",
        "mixed mul-div",
    ]
    operations = [e.operation for e in WORKED_EXAMPLES]
    assert operations == [
        Operation.ADD,
        Operation.ADD,
        Operation.MUL,
        Operation.MUL,
        Operation.MUL,
        Operation.MUL,
    ]


def test_all_examples_pass():
    reports = run_all()
    assert len(reports) == 6
    for report in reports:
        assert report.passed, (
            f"{report.example.name}: "
            + ", ".join(
                f"{c.label} dev {c.deviation:.3e} > tol {c.tolerance:.3e}"
                for c in report.checks
                if not c.ok
            )
        )


@pytest.mark.parametrize("example", WORKED_EXAMPLES, ids=lambda e: e.name)
def test_each_example_mean_deviation_under_tolerance(example):
    report = run_example(example)
    assert report.max_mean_deviation <= example.means_tol
    assert report.refined.diagnostics.converged


def test_addition_example_checks_residual():
    report = run_example(WORKED_EXAMPLES[0])
    labels = [c.label for c in report.checks]
    assert labels == ["means", "residual", "precision"]
    residual_check = report.checks[1]
    assert residual_check.ok
    assert residual_check.tolerance == 1e-5


def test_mixed_example_compares_only_off_diagonal_precision():
    example = WORKED_EXAMPLES[5]
    assert example.precision.mask is not None
    assert not example.precision.mask.diagonal().any()
    assert run_example(example).passed


def test_fault_injection_flips_the_verdict():
    broken = dataclasses.replace(
        WORKED_EXAMPLES[0], expected_means=(9.0, 9.0, 9.0)
    )
    report = run_example(broken)
    assert not report.passed
    assert report.max_mean_deviation > broken.means_tol


def test_fault_injection_on_precision():
    example = WORKED_EXAMPLES[0]
    broken = dataclasses.replace(
        example,
        precision=dataclasses.replace(
            example.precision, expected=example.precision.expected + 1.0
        ),
    )
    assert not run_example(broken).passed


def test_run_all_accepts_explicit_examples():
    reports = run_all([WORKED_EXAMPLES[2]])
    assert len(reports) == 1
    assert reports[0].example.name == "multiplication"


def test_check_outcome_boundary_inclusive():
    assert CheckOutcome("means", 1e-3, 1e-3).ok
    assert not CheckOutcome("means", 1.0000001e-3, 1e-3).ok


def test_example_prior_round_trip():
    example = WORKED_EXAMPLES[3]
    prior = example.prior()
    np.testing.assert_array_equal(prior.means, example.means)
    np.testing.assert_allclose(
        np.diag(prior.precision.entries),
        1.0 / np.array(example.stds) ** 2,
        rtol=1e-15,
    )
    assert example.spec().theta == example.theta
