import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from lup import matrixcore
from lup.matrixcore import (
    ConvergenceError,
    HermitianMatrix,
    eigenvalues_hermitian,
    jacobi_eigh,
    sample_ginibre,
    sample_lue,
    sample_lue_batch,
    trace,
)
from lup.rng import RngStream
from lup.stats import ks_critical


def random_hermitian(n, seed):
    g = RngStream(seed, 0).normal((2, n, n))
    h = g[0] + 1j * g[1]
    return 0.5 * (h + h.conj().T)


def charpoly_roots(h):
    """Eigenvalues as roots of the characteristic polynomial (Faddeev-LeVerrier, 60 digits)."""
    n = h.shape[0]
    with mp.workdps(60):
        a = mp.matrix([[mp.mpc(complex(v)) for v in row] for row in h])
        m = mp.zeros(n, n)
        coeffs = [mp.mpf(1)]
        for k in range(1, n + 1):
            m = a * m + coeffs[-1] * mp.eye(n)
            am = a * m
            coeffs.append(-sum(am[i, i] for i in range(n)) / k)
        roots = mp.polyroots(coeffs, maxsteps=200, extraprec=200)
        return np.sort([float(mp.re(r)) for r in roots])


# ---------------------------------------------------------------- HermitianMatrix


def test_hermitian_validation_and_value_semantics():
    with pytest.raises(ValueError):
        HermitianMatrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        HermitianMatrix(np.zeros((2, 3)))
    h = HermitianMatrix([[1, 1j], [-1j, 2]])
    assert h.dim == 2
    assert h == HermitianMatrix([[1, 1j], [-1j, 2]])
    assert hash(h) == hash(HermitianMatrix([[1, 1j], [-1j, 2]]))
    with pytest.raises(ValueError):
        h.entries[0, 0] = 5
    assert np.allclose(np.asarray(h + h), 2 * np.asarray(h))


def test_conjugation_preserves_spectrum():
    h = HermitianMatrix(random_hermitian(5, 1))
    q, _ = np.linalg.qr(random_hermitian(5, 2) + 1j * random_hermitian(5, 3))
    assert np.allclose(h.eigenvalues(), h.conjugate_by(q).eigenvalues(), atol=1e-10)


# ---------------------------------------------------------------- eigensolver


def test_eigen_examples():
    assert np.allclose(eigenvalues_hermitian(HermitianMatrix(np.diag([3.0, 1.0, 2.0]))), [1, 2, 3], atol=1e-15)
    assert np.allclose(eigenvalues_hermitian(HermitianMatrix([[2.0, 1.0], [1.0, 2.0]])), [1, 3], atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_eigenvalues_match_characteristic_polynomial(seed):
    h = random_hermitian(6, seed)
    assert np.allclose(eigenvalues_hermitian(HermitianMatrix(h)), charpoly_roots(h), atol=1e-10, rtol=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32))
def test_reconstruction_residual(n, seed):
    h = random_hermitian(n, seed)
    w, v = eigenvalues_hermitian(HermitianMatrix(h), vectors=True)
    assert np.all(np.diff(w) >= 0)
    resid = np.linalg.norm(h - (v * w) @ v.conj().T)
    assert resid <= 1e-13 * np.linalg.norm(h) * max(n, 4)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-13 * max(n, 4))


def test_batched_jacobi_against_lapack():
    stack = np.stack([random_hermitian(8, s) for s in range(200)])
    assert np.max(np.abs(jacobi_eigh(stack) - np.linalg.eigvalsh(stack))) < 1e-12


def test_nonfinite_and_sweep_cap(monkeypatch):
    with pytest.raises(ValueError):
        eigenvalues_hermitian(np.array([[np.nan, 0], [0, 1.0]]))
    monkeypatch.setattr(matrixcore, "MAX_SWEEPS", 2)
    with pytest.raises(ConvergenceError):
        jacobi_eigh(random_hermitian(30, 0))


def test_trace():
    assert trace(HermitianMatrix(np.eye(4))) == 4.0
    assert trace(HermitianMatrix(np.diag([1.0, -2.0, 0.5]))) == -0.5
    g = sample_ginibre(3, 5, 1.0, RngStream(0, 0))
    assert trace(HermitianMatrix(g @ g.conj().T)) == pytest.approx(np.linalg.norm(g) ** 2, rel=1e-14)


# ---------------------------------------------------------------- sampling


def test_ginibre_moments():
    g = sample_ginibre(1, 100000, 1.0, RngStream(5, 0)).ravel()
    n = len(g)
    for stat, target in ((g, 0.0), (np.abs(g) ** 2, 1.0), (g * g, 0.0)):
        mean = stat.mean()
        se = np.sqrt(np.var(stat.real, ddof=1) / n + np.var(np.imag(stat), ddof=1) / n)
        assert abs(mean - target) < 4 * se
    assert np.var(g.real) == pytest.approx(0.5, abs=4 * np.sqrt(2 * 0.25 / n))
    with pytest.raises(ValueError):
        sample_ginibre(2, 2, 0.0, RngStream(0))


def test_lue_scalar_case_is_exponential():
    x = sample_lue_batch(1, 0, 1.0, RngStream(6, np.arange(100000)))[:, 0, 0].real
    assert stats.kstest(x, "expon").statistic < 0.006


def test_lue_trace_mean_and_law():
    x = sample_lue_batch(2, 0, 1.0, RngStream(7, np.arange(100000)))
    tr = trace(x)
    assert abs(tr.mean() - 4.0) < 4 * tr.std(ddof=1) / np.sqrt(len(tr))
    assert stats.kstest(tr, stats.gamma(4).cdf).statistic < ks_critical(len(tr))
    y = sample_lue_batch(3, 2, 2.0, RngStream(8, np.arange(100000)))
    assert stats.kstest(trace(y), stats.gamma(15, scale=0.5).cdf).statistic < ks_critical(100000)


def test_lue_determinant_mean():
    # E det(G G*) for G of shape N x M with E|g|^2 = 1/b is M!/(M-N)! / b^N
    x = sample_lue_batch(3, 2, 2.0, RngStream(9, np.arange(100000)))
    d = np.linalg.det(x).real
    assert abs(d.mean() - 7.5) < 4 * d.std(ddof=1) / np.sqrt(len(d))


def test_lue_positive_definite_and_unitary_invariance():
    x = sample_lue_batch(8, 0, 1.0, RngStream(10, np.arange(10000)))
    assert np.all(jacobi_eigh(x)[:, 0] > 0)
    x3 = sample_lue_batch(3, 1, 1.0, RngStream(11, np.arange(10000)))
    q, _ = np.linalg.qr(random_hermitian(3, 4) + 1j * random_hermitian(3, 5))
    y = q @ x3 @ q.conj().T
    assert np.max(np.abs(jacobi_eigh(x3) - jacobi_eigh(y))) < 1e-10
    # same law for a diagonal entry of the original and of the rotated copy (independent draws)
    z = sample_lue_batch(3, 1, 1.0, RngStream(12, np.arange(10000)))
    d = stats.ks_2samp(z[:, 0, 0].real, y[:, 0, 0].real).statistic
    assert d < ks_critical(10000, 10000)


def test_lue_parameter_checks():
    with pytest.raises(ValueError):
        sample_lue(2, 0.5, 1.0, RngStream(0))
    with pytest.raises(TypeError):
        sample_lue(2, 0, 1.0, RngStream(0, np.arange(3)))
    assert sample_lue(2, 1, 1.0, RngStream(0)).dim == 2
