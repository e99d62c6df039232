"""Shared constructors for the test suite."""

import numpy as np

from gparith import (
    GaussianTriple,
    Operation,
    OperationSpec,
    UncertainScalar,
    triple_from_independent,
)


def triple(means, stds) -> GaussianTriple:
    return triple_from_independent(
        *(UncertainScalar(m, s) for m, s in zip(means, stds))
    )


def add_spec(theta=0.1) -> OperationSpec:
    return OperationSpec(Operation.ADD, theta)


def mul_spec(theta=0.1) -> OperationSpec:
    return OperationSpec(Operation.MUL, theta)


# The six canonical configurations (means, stds, theta).
WIDE_ADDITION = ((1.0, 10.0, 50.0), (1.0, 5.0, 10.0), 0.1)
SUBTRACTION = ((1.0, 2.0, 7.0), (1.0, 10.0, 3.0), 0.1)
MULTIPLICATION = ((0.5, 2.0, 5.0), (1.0, 1.0, 10.0), 0.1)
DIVISION = ((0.7, 2.0, 5.0), (1.0, 10.0, 1.0), 0.1)
FACTORIZATION = ((1.0, 1.0, 7.0), (10.0, 10.0, 2.0), 0.01)
MIXED_MUL_DIV = ((1.2, -2.0, 7.0), (0.4, 10.0, 6.0), 0.1)


def random_spd(rng, cond_max=1e6) -> np.ndarray:
    """Random symmetric positive definite 3x3 with condition <= cond_max."""
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    span = 0.5 * np.log10(cond_max)
    eigenvalues = 10.0 ** rng.uniform(-span, span, size=3)
    m = (q * eigenvalues) @ q.T
    return 0.5 * (m + m.T)


def random_diagonal_config(rng):
    """Random diagonal prior (means, precisions) plus a constraint weight."""
    means = rng.uniform(-20.0, 20.0, size=3)
    precisions = 10.0 ** rng.uniform(-2.0, 2.0, size=3)
    weight = 10.0 ** rng.uniform(-2.0, 4.0)
    return means, precisions, weight
