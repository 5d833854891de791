import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from lup.polybasis import (
    LogValue,
    WeightParams,
    hermite_monic,
    hermite_norm,
    hermite_orthonormal_table,
    kappa,
    laguerre_monic,
    laguerre_monic_derivative,
    laguerre_monic_table,
    laguerre_norm,
    log_signed_sum,
    weight_gamma,
)
from lup.quadrature import integrate

mp.mp.dps = 60


def half_line_integral(f, hi, n=256, panels=4):
    """``int_0^hi f(x) dx`` after ``x = u^2``, which smooths ``x^a`` endpoint behaviour."""
    return integrate(lambda u: 2 * u * f(u * u), 0.0, math.sqrt(hi), n, panels)


def laguerre_sum(k, a, x):
    """Explicit finite sum for the monic Laguerre polynomial, in mpmath."""
    a, x = mp.mpf(a), mp.mpf(x)
    return sum(
        (-1) ** (k - j) * mp.binomial(k, j) * mp.gamma(a + k + 1) / mp.gamma(a + j + 1) * x**j for j in range(k + 1)
    )


def hermite_sum(k, x):
    x = mp.mpf(x)
    return sum(
        (-1) ** j * mp.factorial(k) / (mp.factorial(j) * mp.factorial(k - 2 * j)) * (2 * x) ** (k - 2 * j)
        for j in range(k // 2 + 1)
    ) / mp.mpf(2) ** k


# ---------------------------------------------------------------- LogValue


def test_logvalue_product_adds_logs():
    p = LogValue(-1, 2.0) * LogValue(-1, 3.5)
    assert p.sign == 1 and p.logmag == pytest.approx(5.5)


@given(st.floats(min_value=-1e30, max_value=1e30, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-30))
def test_logvalue_round_trip(v):
    assert LogValue.from_float(v).to_float() == pytest.approx(v, rel=1e-14, abs=0)


def test_logvalue_zero_and_arithmetic():
    z = LogValue.zero()
    assert z.to_float() == 0.0
    assert (LogValue.from_float(3.0) + LogValue.from_float(-3.0)).to_float() == 0.0
    assert (LogValue.from_float(2.5) - LogValue.from_float(4.0)).to_float() == pytest.approx(-1.5, rel=1e-15)
    assert (LogValue.from_float(-2.0) ** 3).to_float() == pytest.approx(-8.0, rel=1e-15)
    assert (LogValue.from_float(6.0) / LogValue.from_float(-4.0)).to_float() == pytest.approx(-1.5, rel=1e-15)
    with pytest.raises(ZeroDivisionError):
        LogValue.from_float(1.0) / z


def test_log_signed_sum_beyond_double_range():
    s, l = log_signed_sum([1, -1, 1], [1000.0, 1000.0 + math.log(0.5), 990.0])
    assert s == 1 and l == pytest.approx(1000.0 + math.log(0.5 + math.exp(-10.0)), rel=1e-15)


# ---------------------------------------------------------------- weights


def test_weight_params_validation():
    with pytest.raises(ValueError):
        WeightParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        WeightParams(0.0, 0.0)


def test_weight_examples():
    assert weight_gamma(WeightParams(0, 1), 1.0).to_float() == pytest.approx(math.exp(-1), rel=1e-15)
    assert weight_gamma(WeightParams(0, 1), -2.0).sign == 0
    expected = mp.mpf(2) ** 4 * mp.mpf(1.5) ** 3 * mp.e ** -3 / mp.gamma(4)
    assert weight_gamma(WeightParams(3, 2), 1.5).to_float() == pytest.approx(float(expected), rel=1e-14)


@pytest.mark.parametrize("a", [0, 0.5, 2, 10, 100])
@pytest.mark.parametrize("b", [1.0, 2.5])
def test_weight_normalised(a, b):
    hi = (a + 40 * math.sqrt(a + 1) + 40) / b
    total = half_line_integral(lambda x: weight_gamma(WeightParams(a, b), x).to_float(), hi)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_kappa_examples():
    assert kappa(1, 1, 0.5).to_float() == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert kappa(2, 1, 1.0).to_float() == pytest.approx(math.exp(-1), rel=1e-15)
    assert kappa(1, 3, 2.0).to_float() == pytest.approx(2.0 * math.exp(-2), rel=1e-15)
    with pytest.raises(ValueError):
        kappa(0, 2, 1.0)


def test_kappa_is_triple_exponential_convolution():
    # Exp(1) * Exp(1) * Exp(1) evaluated by nested quadrature
    def conv2(z):
        return integrate(lambda u: np.exp(-u) * np.exp(-(z - u)), 0.0, z, 32)

    val = integrate(lambda v: np.array([conv2(z) for z in 2.0 - v]) * np.exp(-v), 0.0, 2.0, 32)
    assert kappa(1, 3, 2.0).to_float() == pytest.approx(val, rel=1e-12)


# ---------------------------------------------------------------- Laguerre


def test_laguerre_examples():
    assert laguerre_monic(0, 3.7, 11.0).to_float() == 1.0
    assert laguerre_monic(1, 2, 5.0).to_float() == pytest.approx(2.0)
    assert laguerre_monic(2, 0, 1.0).to_float() == pytest.approx(-1.0, rel=1e-14)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 10),
    st.floats(min_value=-0.9, max_value=50.0),
    st.floats(min_value=-100.0, max_value=100.0, allow_subnormal=False),
)
def test_laguerre_recurrence_matches_sum(k, a, x):
    ref = laguerre_sum(k, a, x)
    got = laguerre_monic(k, a, x).to_float()
    # relative to the size of the largest summand, since the sum may cancel
    scale = max(
        abs(mp.binomial(k, j) * mp.gamma(mp.mpf(a) + k + 1) / mp.gamma(mp.mpf(a) + j + 1) * mp.mpf(x) ** j)
        for j in range(k + 1)
    )
    assert abs(got - float(ref)) <= 1e-10 * max(abs(float(ref)), 1e-3 * float(scale))


@pytest.mark.parametrize("a", [0, 0.5, 2, 10, 100])
def test_laguerre_orthogonality(a):
    kmax = 12
    hi = a + 40 * math.sqrt(a + 1) + 80
    # x = u^2 on 8 panels of 256 Gauss-Legendre nodes
    edges = np.linspace(0, math.sqrt(hi), 9)
    nodes, weights = [], []
    g, w = np.polynomial.legendre.leggauss(256)
    for lo_, hi_ in zip(edges[:-1], edges[1:]):
        u = 0.5 * (hi_ - lo_) * g + 0.5 * (hi_ + lo_)
        nodes.append(u * u)
        weights.append(0.5 * (hi_ - lo_) * w * 2 * u)
    x, wx = np.concatenate(nodes), np.concatenate(weights)
    s, l = laguerre_monic_table(kmax, a, x)
    wt = weight_gamma(WeightParams(a, 1.0), x)
    # scale each product into range before summing
    logs = l[:, None, :] + l[None, :, :] + wt.logmag[None, None, :] + np.log(wx)[None, None, :]
    signs = s[:, None, :] * s[None, :, :] * wt.sign[None, None, :]
    gs, gl = log_signed_sum(signs, logs, axis=2)
    norms = np.array([float(laguerre_norm(k, a).logmag) for k in range(kmax + 1)])
    diag = np.exp(np.diag(gl) - norms)
    assert np.max(np.abs(diag - 1)) < 1e-8
    off = np.where(np.eye(kmax + 1, dtype=bool) | (gs == 0), -np.inf, gl)
    assert np.max(off) - norms.max() < math.log(1e-8)


def test_laguerre_monic_leading_coefficient():
    for k in range(9):
        x = 1e5
        ratio = laguerre_monic(k, 1.5, x).to_float() / x**k
        assert ratio == pytest.approx(1.0, rel=1e-3 * (k + 1) / 1e0)


def test_laguerre_derivative_by_differences():
    for k in range(1, 7):
        x, h = 3.3, 1e-5
        fd = (laguerre_monic(k, 2.0, x + h).to_float() - laguerre_monic(k, 2.0, x - h).to_float()) / (2 * h)
        assert laguerre_monic_derivative(k, 2.0, x).to_float() == pytest.approx(fd, rel=1e-7, abs=1e-7)


def test_laguerre_large_index_stays_finite():
    v = laguerre_monic(150, 900.0, 2000.0)
    assert np.isfinite(v.logmag) and v.logmag > 710  # beyond the double range
    with mp.workdps(300):  # the alternating sum cancels about 250 digits here
        ref = laguerre_sum(150, 900, 2000)
    assert float(mp.log(abs(ref))) == pytest.approx(v.logmag, rel=1e-12)
    assert v.sign == int(mp.sign(ref))


def test_laguerre_norm_examples():
    assert laguerre_norm(0, 7).to_float() == pytest.approx(1.0)
    assert laguerre_norm(1, 2).to_float() == pytest.approx(3.0, rel=1e-14)
    quad = half_line_integral(
        lambda x: laguerre_monic(3, 0.5, x).to_float() ** 2 * weight_gamma(WeightParams(0.5, 1.0), x).to_float(),
        120.0,
    )
    assert laguerre_norm(3, 0.5).to_float() == pytest.approx(quad, rel=1e-10)
    assert laguerre_norm(3, 0.5).to_float() == pytest.approx(6 * gamma(4.5) / gamma(1.5), rel=1e-13)


# ---------------------------------------------------------------- Hermite


def test_hermite_examples():
    assert hermite_monic(1, 0.7).to_float() == pytest.approx(0.7)
    assert hermite_monic(2, 0.0).to_float() == pytest.approx(-0.5)
    x = 1.3
    assert hermite_monic(4, x).to_float() == pytest.approx(x**4 - 3 * x**2 + 0.75, rel=1e-14)


@given(st.integers(0, 10), st.floats(min_value=-100, max_value=100, allow_subnormal=False))
def test_hermite_recurrence_matches_sum(k, x):
    ref = hermite_sum(k, x)
    scale = sum(
        abs(mp.factorial(k) / (mp.factorial(j) * mp.factorial(k - 2 * j)) * (2 * mp.mpf(x)) ** (k - 2 * j))
        for j in range(k // 2 + 1)
    ) / mp.mpf(2) ** k
    assert abs(hermite_monic(k, x).to_float() - float(ref)) <= 1e-10 * max(abs(float(ref)), 1e-3 * float(scale))


def test_hermite_norm():
    assert hermite_norm(0).to_float() == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert hermite_norm(1).to_float() == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    quad = integrate(lambda x: hermite_monic(6, x).to_float() ** 2 * np.exp(-x * x), -12.0, 12.0, 256)
    assert hermite_norm(6).to_float() == pytest.approx(quad, rel=1e-12)


def test_hermite_orthonormal_table_is_orthonormal():
    g, w = np.polynomial.legendre.leggauss(400)
    x, wx = 12 * g, 12 * w
    psi = hermite_orthonormal_table(15, x)
    gram = (psi * np.exp(-x * x)) @ (psi * wx).T
    assert np.max(np.abs(gram - np.eye(16))) < 1e-12
