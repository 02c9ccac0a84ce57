import numpy as np
import pytest

from kdvlab.linalg import BandedMatrix, SingularMatrixError, lu_factor, matvec, solve


def random_dominant(rng, n, cyclic):
    bands = rng.uniform(-1, 1, size=(5, n))
    bands[2] = np.sign(bands[2]) * (np.abs(bands).sum(axis=0) + 0.5)
    return BandedMatrix(bands, cyclic=cyclic)


def test_matvec_identity():
    w = np.arange(7.0)
    np.testing.assert_array_equal(matvec(BandedMatrix.identity(7), w), w)
    np.testing.assert_array_equal(matvec(BandedMatrix.identity(7, cyclic=True), w), w)


def test_matvec_bilaplacian_stencil():
    a = BandedMatrix.from_stencil([1, -4, 6, -4, 1], 9)
    e = np.zeros(9)
    e[4] = 1.0
    np.testing.assert_array_equal(matvec(a, e), [0, 0, 1, -4, 6, -4, 1, 0, 0])


@pytest.mark.parametrize("cyclic", [False, True])
def test_matvec_matches_dense(cyclic):
    rng = np.random.default_rng(11)
    a = BandedMatrix(rng.normal(size=(5, 10)), cyclic=cyclic)
    w = rng.normal(size=10)
    np.testing.assert_allclose(matvec(a, w), a.to_dense() @ w, rtol=0, atol=1e-13)


def test_dense_round_trip():
    rng = np.random.default_rng(12)
    a = BandedMatrix(rng.normal(size=(5, 8)), cyclic=True)
    np.testing.assert_array_equal(BandedMatrix.from_dense(a.to_dense(), cyclic=True).bands, a.bands)


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        matvec(BandedMatrix.identity(5), np.ones(6))


def test_solve_identity():
    b = np.array([3.0, -1.0, 2.0, 0.5, 7.0, 1.0])
    np.testing.assert_array_equal(solve(lu_factor(BandedMatrix.identity(6)), b), b)


def test_small_system_matches_dense_gaussian_elimination():
    rng = np.random.default_rng(13)
    a = random_dominant(rng, 5, False)
    b = rng.normal(size=5)
    np.testing.assert_allclose(solve(lu_factor(a), b), np.linalg.solve(a.to_dense(), b), rtol=0, atol=1e-11)


def test_cyclic_shifted_laplacian():
    n = 12
    a = BandedMatrix.from_stencil([0, -1, 3, -1, 0], n, cyclic=True)
    b = np.ones(n)
    x = solve(lu_factor(a), b)
    np.testing.assert_allclose(x, np.linalg.solve(a.to_dense(), b), rtol=0, atol=1e-11)
    np.testing.assert_allclose(x, 1.0, atol=1e-12)  # row sums are 1


@pytest.mark.parametrize("cyclic", [False, True])
def test_random_dominant_family(cyclic):
    rng = np.random.default_rng(14 + cyclic)
    for _ in range(100):
        n = int(rng.integers(5, 65))
        a = random_dominant(rng, n, cyclic)
        b = rng.normal(size=n)
        lu = lu_factor(a)
        x_dense = np.linalg.solve(a.to_dense(), b)
        x = solve(lu, b)
        assert np.max(np.abs(x - x_dense)) <= 1e-10 * np.max(np.abs(x_dense))
        w = rng.normal(size=n)
        np.testing.assert_allclose(solve(lu, matvec(a, w)), w, rtol=1e-9, atol=1e-9 * np.abs(w).max())


def test_partial_pivoting_handles_zero_diagonal():
    rng = np.random.default_rng(15)
    n = 20
    bands = rng.normal(size=(5, n))
    bands[2] = 0.0
    a = BandedMatrix(bands)
    b = rng.normal(size=n)
    x = solve(lu_factor(a), b)
    assert np.max(np.abs(a.to_dense() @ x - b)) <= 1e-10 * (a.norm_inf() * np.abs(x).max() + np.abs(b).max())


def test_backward_error_bound():
    rng = np.random.default_rng(16)
    for cyclic in (False, True):
        a = BandedMatrix(rng.normal(size=(5, 40)) + np.array([[0], [0], [4], [0], [0]]), cyclic=cyclic)
        b = rng.normal(size=40)
        x = solve(lu_factor(a), b)
        resid = np.max(np.abs(matvec(a, x) - b))
        assert resid <= 1e-10 * (a.norm_inf() * np.abs(x).max() + np.abs(b).max())


def test_factorization_metadata():
    lu = lu_factor(BandedMatrix.from_stencil([1, -4, 10, -4, 1], 16))
    assert lu.valid
    assert lu.pivot_growth >= 1.0


def test_singular_matrix_rejected():
    bands = np.zeros((5, 6))
    bands[2] = [1, 1, 0, 1, 1, 1]
    with pytest.raises(SingularMatrixError):
        lu_factor(BandedMatrix(bands))


def test_non_finite_rejected():
    bands = np.ones((5, 6))
    bands[2, 3] = np.nan
    with pytest.raises(ValueError):
        lu_factor(BandedMatrix(bands))
    with pytest.raises(ValueError):
        solve(lu_factor(BandedMatrix.identity(6)), np.array([1, 2, np.inf, 0, 0, 0]))


def test_cyclic_needs_five_rows():
    with pytest.raises(ValueError):
        BandedMatrix(np.ones((5, 4)), cyclic=True)
