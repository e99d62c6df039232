"""Grid scans and finite differences used to cross-check the solvers."""

import numpy as np
import pytest

from gparith import (
    GridBox,
    InvalidInputError,
    fd_gradient,
    fd_hessian,
    grid_min,
    gradient_add,
    gradient_mul,
    hessian_mul,
    objective_add,
    objective_mul,
    refine_add,
    refine_mul,
    refined_precision_add,
)

from helpers import FACTORIZATION, WIDE_ADDITION, add_spec, mul_spec, triple


def test_grid_box_validation():
    with pytest.raises(InvalidInputError):
        GridBox(np.zeros(3), np.array([1.0, 1.0, -1.0]))
    with pytest.raises(InvalidInputError):
        GridBox(np.zeros(3), np.ones(3), points_per_axis=20)  # even
    with pytest.raises(InvalidInputError):
        GridBox(np.zeros(3), np.ones(3), points_per_axis=1)


def test_grid_box_axes_hit_center_and_edges():
    box = GridBox(np.array([1.0, 2.0, 3.0]), np.array([0.5, 0.5, 0.5]), 5)
    for axis, center in zip(box.axes(), (1.0, 2.0, 3.0)):
        assert len(axis) == 5
        assert axis[0] == center - 0.5
        assert axis[2] == center
        assert axis[-1] == center + 0.5


def test_grid_min_finds_quadratic_center_exactly():
    target = np.array([0.5, -0.25, 1.0])

    def objective(p):
        d = np.asarray(p) - target
        return np.einsum("...i,...i->...", d, d)

    # choose the box so the target is a grid point
    box = GridBox(target, np.ones(3), points_per_axis=9)
    found = grid_min(objective, box)
    np.testing.assert_array_equal(found.point, target)
    assert found.value == 0.0


def test_grid_min_wide_addition_brackets_the_solver():
    means, stds, theta = WIDE_ADDITION
    prior = triple(means, stds)
    spec = add_spec(theta)
    solved = refine_add(prior, spec)
    box = GridBox(solved.means, np.full(3, 0.05), points_per_axis=21)
    found = grid_min(lambda p: objective_add(p, prior, spec.weight), box)
    cell = 0.05 * 2 / 20
    assert np.abs(found.point - solved.means).max() <= cell
    assert found.value >= solved.objective


def test_grid_min_factorization_prefers_positive_branch():
    means, stds, theta = FACTORIZATION
    prior = triple(means, stds)
    spec = mul_spec(theta)
    solved = refine_mul(prior, spec)
    box = GridBox(solved.means, np.full(3, 0.2), points_per_axis=11)
    found = grid_min(lambda p: objective_mul(p, prior, spec.weight), box)
    mirrored = solved.means * np.array([-1.0, -1.0, 1.0])
    assert found.value < objective_mul(mirrored, prior, spec.weight)


def test_grid_min_monotone_under_refinement():
    means, stds, theta = WIDE_ADDITION
    prior = triple(means, stds)
    w = add_spec(theta).weight
    objective = lambda p: objective_add(p, prior, w)
    center = np.array([1.3, 17.7, 19.0])
    coarse = grid_min(objective, GridBox(center, np.ones(3), 11))
    fine = grid_min(objective, GridBox(center, np.ones(3), 21))
    # the 21-point grid contains every 11-point grid node
    assert fine.value <= coarse.value


def test_grid_min_first_lexicographic_point_wins_ties():
    box = GridBox(np.zeros(3), np.ones(3), points_per_axis=3)
    found = grid_min(lambda p: 0.0, box)
    np.testing.assert_array_equal(found.point, [-1.0, -1.0, -1.0])


def test_grid_min_pointwise_fallback_matches_batched():
    means, stds, theta = WIDE_ADDITION
    prior = triple(means, stds)
    w = add_spec(theta).weight
    box = GridBox(np.array([1.3, 17.7, 19.0]), np.full(3, 0.5), 9)

    def strict_scalar(p):
        if np.shape(p) != (3,):
            raise TypeError("scalar evaluation only")
        return objective_add(p, prior, w)

    batched = grid_min(lambda p: objective_add(p, prior, w), box)
    pointwise = grid_min(strict_scalar, box)
    np.testing.assert_array_equal(batched.point, pointwise.point)
    assert batched.value == pointwise.value


def test_grid_min_rejects_non_finite_objective():
    box = GridBox(np.zeros(3), np.ones(3), 3)
    with pytest.raises(InvalidInputError):
        grid_min(lambda p: float("inf"), box)


def test_fd_gradient_linear_function_is_exact():
    slope = np.array([2.0, -3.0, 0.5])
    grad = fd_gradient(lambda p: float(slope @ p), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(grad, slope, rtol=1e-9)


def test_fd_gradient_matches_analytic_add():
    means, stds, theta = WIDE_ADDITION
    prior = triple(means, stds)
    w = add_spec(theta).weight
    point = np.array([0.8, 12.0, 40.0])
    numeric = fd_gradient(lambda p: objective_add(p, prior, w), point)
    np.testing.assert_allclose(numeric, gradient_add(point, prior, w), rtol=1e-6)


def test_fd_gradient_matches_analytic_mul():
    means, stds, theta = FACTORIZATION
    prior = triple(means, stds)
    w = mul_spec(theta).weight
    point = np.array([2.5, 2.8, 6.9])
    numeric = fd_gradient(lambda p: objective_mul(p, prior, w), point)
    np.testing.assert_allclose(numeric, gradient_mul(point, prior, w), rtol=1e-5)


def test_fd_hessian_of_constant_gradient_is_zero():
    h = fd_hessian(lambda p: np.array([1.0, 2.0, 3.0]), np.zeros(3))
    np.testing.assert_array_equal(h, np.zeros((3, 3)))


def test_fd_hessian_confirms_add_curvature():
    # the additive objective is quadratic, so central differences are exact
    # up to rounding: the Hessian equals precision + coupling, any point
    means, stds, theta = WIDE_ADDITION
    prior = triple(means, stds)
    w = add_spec(theta).weight
    expected = refined_precision_add(prior.precision, w).entries
    for point in (np.zeros(3), np.array([5.0, -3.0, 11.0])):
        numeric = fd_hessian(lambda p: gradient_add(p, prior, w), point)
        np.testing.assert_allclose(numeric, expected, rtol=1e-6)


def test_fd_hessian_confirms_mul_curvature_orientation():
    # decisive check for the quadratic-term layout: at (3, 5, 0) the first
    # diagonal entry carries 5^2 = 25, the second 3^2 = 9
    prior = triple((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    point = np.array([3.0, 5.0, 0.0])
    numeric = fd_hessian(lambda p: gradient_mul(p, prior, 1.0), point)
    np.testing.assert_allclose(numeric[0, 0], 26.0, rtol=1e-7)
    np.testing.assert_allclose(numeric[1, 1], 10.0, rtol=1e-7)
    assert numeric[0, 0] > numeric[1, 1]
    np.testing.assert_allclose(
        numeric, hessian_mul(point, prior, 1.0), rtol=1e-6, atol=1e-7
    )


def test_fd_hessian_matches_analytic_mul_generic_point():
    means, stds, theta = FACTORIZATION
    prior = triple(means, stds)
    w = mul_spec(theta).weight
    point = np.array([2.64, 2.64, 6.97])
    numeric = fd_hessian(lambda p: gradient_mul(p, prior, w), point)
    np.testing.assert_allclose(numeric, hessian_mul(point, prior, w), rtol=1e-5)


def test_fd_step_validation():
    with pytest.raises(InvalidInputError):
        fd_gradient(lambda p: 0.0, np.zeros(3), rel_step=0.0)
    with pytest.raises(InvalidInputError):
        fd_hessian(lambda p: np.zeros(3), np.zeros(3), rel_step=-1.0)
