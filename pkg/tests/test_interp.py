import math

import numpy as np
import pytest

from kdvlab.grid import Grid, GridFunction
from kdvlab.interp import Kind, l2_distance, l2_error, l2_norm, p0, p1, p1_derivative


def test_eval_examples():
    g = Grid(1.0, 0.0, 5, "zero-extension")
    u = GridFunction(g, [0, 2, 0, 0, 0])
    assert p1(u)(0.5) == 1.0
    assert p0(u)(0.5) == 0.0
    assert p0(u)(1.0) == 2.0  # cells are closed on the left


def test_nodes_reproduced_exactly():
    rng = np.random.default_rng(3)
    for bnd in ("periodic", "zero-extension"):
        g = Grid(0.37, -1.3, 17, bnd)
        u = GridFunction(g, rng.normal(size=17))
        np.testing.assert_array_equal(p1(u)(g.x), u.values)


def test_p1_continuous_at_nodes():
    rng = np.random.default_rng(4)
    g = Grid(0.5, 0.0, 11, "periodic")
    u = GridFunction(g, rng.normal(size=11))
    eps = 1e-12
    left = p1(u)(g.x[1:] - eps)
    right = p1(u)(g.x[1:] + eps)
    np.testing.assert_allclose(left, right, atol=1e-10)


def test_outside_domain_is_zero_and_periodic_wraps():
    g = Grid(1.0, 0.0, 5, "zero-extension")
    u = GridFunction(g, [1, 2, 3, 4, 5])
    assert p1(u)(-0.5) == 0.0
    assert p1(u)(4.5) == 0.0
    gp = Grid(1.0, 0.0, 5, "periodic")
    up = GridFunction(gp, [1, 2, 3, 4, 5])
    assert p1(up)(4.5) == pytest.approx(3.0)  # between u_4 = 5 and u_0 = 1
    assert p1(up)(6.25) == pytest.approx(p1(up)(1.25))


def test_p1_derivative_examples():
    g = Grid(1.0, 0.0, 5, "zero-extension")
    dv = p1_derivative(GridFunction(g, [0, 2, 4, 6, 8]))
    assert dv.kind is Kind.P0
    np.testing.assert_array_equal(dv.source.values[:4], [2, 2, 2, 2])
    const = p1_derivative(GridFunction(Grid(1.0, 0.0, 5, "periodic"), np.full(5, 3.0)))
    np.testing.assert_array_equal(const.source.values, 0.0)


def test_p1_derivative_matches_difference_quotient_of_p1():
    rng = np.random.default_rng(5)
    for bnd in ("periodic", "zero-extension"):
        g = Grid(0.25, -2.0, 32, bnd)
        u = GridFunction(g, rng.normal(size=32))
        mids = g.x[:-1] + 0.5 * g.h
        delta = 1e-3 * g.h
        quotient = (p1(u)(mids + delta) - p1(u)(mids - delta)) / (2 * delta)
        np.testing.assert_allclose(quotient, p1_derivative(u)(mids), rtol=0, atol=1e-10)


def test_l2_error_linear_is_exact():
    g = Grid.from_domain(-3, 3, 31, "zero-extension")
    u = g.sample(lambda x: 2 * x + 1)
    assert l2_error(u, lambda x: 2 * x + 1, 2.0) <= 1e-12


def test_l2_error_constant_integrand():
    g = Grid.from_domain(-5, 5, 41, "zero-extension")
    R = 1.7
    assert l2_error(g.zeros(), lambda x: np.ones_like(x), R) == pytest.approx(math.sqrt(2 * R), rel=1e-14)


def test_l2_error_second_order_for_smooth_data():
    f = lambda x: 1 / np.cosh(x) ** 2
    errs = []
    for n in (101, 201, 401):
        g = Grid.from_domain(-10, 10, n, "zero-extension")
        errs.append(l2_error(g.sample(f), f, 8.0))
    # h halves exactly since n - 1 doubles
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_l2_error_relative_and_window_pair():
    g = Grid.from_domain(-4, 4, 81, "zero-extension")
    f = lambda x: x + 5.0
    u = g.sample(f) * 1.1
    assert l2_error(u, f, (-4.0, 4.0), relative=True) == pytest.approx(0.1, rel=1e-12)
    assert l2_error(u, f, (-3.3, 2.1), relative=True) == pytest.approx(0.1, rel=1e-12)


def test_l2_error_reports_non_finite_reference():
    g = Grid.from_domain(-1, 1, 11, "zero-extension")
    with pytest.raises(ValueError, match="x="):
        with np.errstate(divide="ignore"):
            l2_error(g.zeros(), lambda x: 1 / (x - x[0, 0]), 1.0)


def test_p1_minus_p0_shrinks_at_least_first_order():
    f = lambda x: np.sin(x) * np.exp(-0.1 * x**2)
    dists = []
    for n in (100, 200, 400, 800):
        g = Grid.from_domain(-6, 6, n, "periodic")
        u = g.sample(f)
        dists.append(l2_distance(p1(u), p0(u), 5.0))
    orders = [math.log2(a / b) for a, b in zip(dists, dists[1:])]
    assert min(orders) >= 1.0 - 0.05


def test_l2_norm_of_constant():
    g = Grid.from_domain(-2, 2, 21, "periodic")
    assert l2_norm(p1(GridFunction(g, np.full(21, 3.0))), 1.0) == pytest.approx(3 * math.sqrt(2))
