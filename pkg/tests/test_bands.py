"""Banded kernel against dense numpy/scipy oracles."""

import numpy as np
import pytest

from anoma import _bands


def random_banded(rng, n, lower, upper):
    diags = {}
    for k in range(-lower, upper + 1):
        v = np.zeros(n)
        i0, i1 = max(0, -k), min(n, n - k)
        v[i0:i1] = rng.normal(size=i1 - i0)
        diags[k] = v
    return _bands.BandedMatrix(n, diags)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def test_dense_round_trip(rng):
    a = random_banded(rng, 7, 2, 1)
    assert np.array_equal(_bands.from_dense(a.to_dense()).to_dense(),
                          a.to_dense())


def test_algebra_matches_dense(rng):
    for _ in range(20):
        n = int(rng.integers(2, 12))
        a = random_banded(rng, n, int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        b = random_banded(rng, n, int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        ad, bd = a.to_dense(), b.to_dense()
        assert np.allclose((a + b).to_dense(), ad + bd)
        assert np.allclose((a - b).to_dense(), ad - bd)
        assert np.allclose(a.matmul(b).to_dense(), ad @ bd)
        assert np.allclose(a.T.to_dense(), ad.T)
        x = rng.normal(size=n)
        assert np.allclose(a.matvec(x), ad @ x)
        d = rng.normal(size=n)
        assert np.allclose(a.row_scaled(d).to_dense(), np.diag(d) @ ad)
        assert np.allclose(a.col_scaled(d).to_dense(), ad @ np.diag(d))
        assert np.allclose(a.scaled(-2.5).to_dense(), -2.5 * ad)


def test_out_of_band_slots_are_zeroed():
    n = 4
    m = _bands.BandedMatrix(n, {1: np.ones(n), -1: np.ones(n)})
    # slot n-1 of the superdiagonal and slot 0 of the subdiagonal are outside
    assert m.diags[1][n - 1] == 0.0
    assert m.diags[-1][0] == 0.0


def test_spd_logdet_and_solves(rng):
    for _ in range(10):
        n = int(rng.integers(2, 30))
        a = random_banded(rng, n, 2, 2)
        s = a.matmul(a.T) + _bands.identity(n).scaled(n)
        sd = s.to_dense()
        assert np.isclose(_bands.logdet2_sym_pd(s),
                          np.linalg.slogdet(sd)[1] / np.log(2))
        b = rng.normal(size=(n, 3))
        assert np.allclose(_bands.solve_sym_pd(s, b), np.linalg.solve(sd, b))
        assert np.allclose(_bands.solve_general(a, b),
                           np.linalg.solve(a.to_dense(), b))


def test_logdet_rejects_indefinite():
    n = 4
    m = _bands.BandedMatrix(n, {0: -np.ones(n)})
    with pytest.raises(np.linalg.LinAlgError):
        _bands.logdet2_sym_pd(m)


def test_colored_factor_reproduces_covariance(rng):
    n = 6
    a = random_banded(rng, n, 1, 1)
    s = a.matmul(a.T) + _bands.identity(n).scaled(3.0)
    factor = _bands.cholesky_upper(s)
    w = rng.normal(size=n)
    dense_u = np.zeros((n, n))
    u = factor.shape[0] - 1
    for j in range(n):
        for i in range(max(0, j - u), j + 1):
            dense_u[i, j] = factor[u + i - j, j]
    assert np.allclose(dense_u.T @ dense_u, s.to_dense())
    assert np.allclose(_bands.colored_factor_apply(factor, w), dense_u.T @ w)
