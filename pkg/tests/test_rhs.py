import numpy as np
import pytest

from kdvlab.grid import Grid, GridFunction, bilaplacian, d3, inner_product, laplacian, norm_lp
from kdvlab.linalg import BandedMatrix, matvec
from kdvlab.rhs import ModelParams, implicit_residual, jacobian, nonlinear_term, semidiscrete_rhs


def random_state(n=32, boundary="periodic", seed=0, scale=1.0, length=8.0):
    rng = np.random.default_rng(seed)
    g = Grid.from_domain(-length / 2, length / 2, n, boundary)
    return GridFunction(g, scale * rng.normal(size=n))


def dense_linear_operator(grid, eta):
    """D3 + eta h Lap^2 assembled from the written-out stencils."""
    h, n = grid.h, grid.n
    stencil = np.array([-0.5, 1.0, 0.0, -1.0, 0.5]) / h**3 + eta * h * np.array([1, -4, 6, -4, 1]) / h**4
    a = np.zeros((n, n))
    for i in range(n):
        for m, coef in zip(range(-2, 3), stencil):
            j = i + m
            if grid.periodic:
                a[i, j % n] += coef
            elif 0 <= j < n:
                a[i, j] += coef
    return a


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(k=3)
    with pytest.raises(ValueError):
        ModelParams(beta=0.0)
    with pytest.raises(ValueError):
        ModelParams(eta=-1.0)
    ModelParams(beta=0.0, linear=True)
    ModelParams(eta=0.0)


def test_nonlinear_term_vanishes_on_constants():
    g = Grid.from_domain(0, 1, 10, "periodic")
    for k in (1, 2):
        np.testing.assert_array_equal(nonlinear_term(GridFunction(g, 2.5), k, 1.0).values, 0.0)


@pytest.mark.parametrize("k", [1, 2])
def test_nonlinear_term_orthogonal_to_state(k):
    for seed in range(20):
        u = random_state(seed=seed)
        val = inner_product(nonlinear_term(u, k, 1.3), u)
        assert abs(val) <= 1e-12 * norm_lp(u, 2) ** (k + 2) * 10


def test_nonlinear_term_linear_data():
    g = Grid.from_domain(-2, 2, 17, "zero-extension")
    u = g.sample(lambda x: x)
    out = nonlinear_term(u, 1, 1.0).values
    np.testing.assert_allclose(out[1:-1], 2 * g.x[1:-1], rtol=0, atol=1e-12)


def test_rhs_fixed_points():
    g = Grid.from_domain(0, 5, 20, "periodic")
    p = ModelParams(1, 1.0, 0.3)
    np.testing.assert_array_equal(semidiscrete_rhs(g.zeros(), p).values, 0.0)
    np.testing.assert_allclose(semidiscrete_rhs(GridFunction(g, 1.7), p).values, 0.0, atol=1e-12)


def test_rhs_linear_mode_isolates_terms():
    u = random_state(seed=4)
    p = ModelParams(1, 0.0, 0.2, linear=True)
    expected = -(d3(u).values + 0.2 * u.grid.h * bilaplacian(u).values)
    np.testing.assert_allclose(semidiscrete_rhs(u, p).values, expected, rtol=1e-14, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("beta", [1.0, -2.0])
def test_energy_budget_without_stabilization(k, beta):
    for seed in range(10):
        u = random_state(seed=seed, n=48)
        r = semidiscrete_rhs(u, ModelParams(k, beta, 0.0))
        scale = u.grid.h * np.sum(np.abs(r.values * u.values))
        assert abs(inner_product(r, u)) <= 1e-12 * scale


@pytest.mark.parametrize("k", [1, 2])
def test_dissipation_identity(k):
    for seed in range(10):
        u = random_state(seed=seed, n=40)
        eta = 0.05
        r = semidiscrete_rhs(u, ModelParams(k, 1.0, eta))
        expected = -eta * u.grid.h * norm_lp(laplacian(u), 2) ** 2
        scale = u.grid.h * np.sum(np.abs(r.values * u.values))
        assert abs(inner_product(r, u) - expected) <= 1e-12 * scale


def test_residual_examples():
    g = Grid.from_domain(0, 4, 16, "periodic")
    p = ModelParams(1, 1.0, 0.1)
    assert implicit_residual(g.zeros(), g.zeros(), 0.1, p).norm_inf == 0.0
    a, b = random_state(16, seed=1, length=4.0), random_state(16, seed=2, length=4.0)
    for tau in (0.1, 0.2):
        # F(a; b) - F(a; a) keeps only the time difference
        diff = implicit_residual(a, b, tau, p).values.values - implicit_residual(a, a, tau, p).values.values
        np.testing.assert_allclose(diff, (a.values - b.values) / tau, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("boundary", ["periodic", "zero-extension"])
def test_residual_vanishes_at_dense_implicit_euler_solution(boundary):
    u_prev = random_state(24, boundary, seed=5)
    tau, eta = 0.01, 0.3
    a = dense_linear_operator(u_prev.grid, eta)
    u_next = np.linalg.solve(np.eye(24) / tau + a, u_prev.values / tau)
    res = implicit_residual(GridFunction(u_prev.grid, u_next), u_prev, tau, ModelParams(1, 0.0, eta, linear=True))
    assert res.norm_inf <= 1e-10 * norm_lp(u_prev, 2) / tau


def test_jacobian_at_zero_is_linear_operator():
    g = Grid.from_domain(-3, 3, 20, "periodic")
    tau, eta = 0.05, 0.2
    J = jacobian(g.zeros(), tau, ModelParams(2, 1.0, eta))
    expected = np.eye(20) / tau + dense_linear_operator(g, eta)
    np.testing.assert_allclose(J.to_dense(), expected, rtol=1e-14, atol=1e-10)


def test_jacobian_flux_part_kernel_contains_constants():
    g = Grid.from_domain(-3, 3, 20, "periodic")
    for k in (1, 2):
        jf = jacobian(GridFunction(g, 1.3), 1.0, ModelParams(k, 1.0, 0.0)).to_dense()
        jl = jacobian(GridFunction(g, 1.3), 1.0, ModelParams(k, 0.0, 0.0, linear=True)).to_dense()
        np.testing.assert_allclose((jf - jl).sum(axis=1), 0.0, atol=1e-12)


def directional_check(u, w, tau, params, eps=1e-6):
    fp = implicit_residual(u + eps * w, u, tau, params).values.values
    fm = implicit_residual(u - eps * w, u, tau, params).values.values
    fd = (fp - fm) / (2 * eps)
    jw = matvec(jacobian(u, tau, params), w.values)
    return np.max(np.abs(jw - fd)) / np.max(np.abs(jw))


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("boundary", ["periodic", "zero-extension"])
def test_jacobian_matches_central_differences(k, boundary):
    rng = np.random.default_rng(100 + k)
    for trial in range(25):
        u = random_state(16, boundary, seed=int(rng.integers(1 << 30)))
        w = random_state(16, boundary, seed=int(rng.integers(1 << 30)))
        params = ModelParams(k, float(rng.uniform(0.5, 2)), float(rng.uniform(0, 1)))
        assert directional_check(u, w, 0.1, params) <= 1e-6


def test_jacobian_structure():
    u = random_state(16, "periodic", seed=3)
    assert jacobian(u, 0.1, ModelParams()).cyclic
    z = random_state(16, "zero-extension", seed=3)
    J = jacobian(z, 0.1, ModelParams())
    assert not J.cyclic
    assert isinstance(J, BandedMatrix)
