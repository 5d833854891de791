import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lup.quadrature import QuadratureError, gauss_nodes, integrate, integrate_adaptive


def test_two_point_rule():
    r = gauss_nodes("gauss_legendre", 2)
    assert np.allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(r.weights, [1.0, 1.0], atol=1e-15)
    assert gauss_nodes("gauss_legendre", 2, (0.0, 1.0)).integrate(lambda x: x**3) == pytest.approx(0.25, abs=1e-16)


def test_gaussian_integral():
    r = gauss_nodes("gauss_legendre", 64, (-10.0, 10.0))
    assert r.integrate(lambda x: np.exp(-x * x)) == pytest.approx(math.sqrt(math.pi), abs=1e-12)


@pytest.mark.parametrize("n", [1, 3, 8, 17, 64, 255, 1024, 2048])
def test_legendre_nodes_and_weights(n):
    r = gauss_nodes("gauss_legendre", n)
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(2.0, abs=1e-12)
    if n <= 512:
        x, _ = np.polynomial.legendre.leggauss(n)
        assert np.max(np.abs(r.nodes - x)) < 1e-14
    # weights against a 50-digit Newton refinement at the ends and in the middle
    for i in sorted({0, min(1, n - 1), n // 3, n - 1}):
        root, w = _mp_node_weight(n, r.nodes[i])
        assert abs(r.nodes[i] - root) < 1e-15
        # endpoint weights lose roughly n ulps through 1 - x^2 at the rounded node
        assert abs(r.weights[i] / w - 1) < 1e-13 * max(n, 100)


def _mp_node_weight(n, guess):
    with mp.workdps(50):
        z = mp.mpf(guess)
        for _ in range(6):
            p0, p1 = mp.mpf(1), z
            for k in range(1, n):
                p0, p1 = p1, ((2 * k + 1) * z * p1 - k * p0) / (k + 1)
            dp = n * (z * p1 - p0) / (z * z - 1)
            z -= p1 / dp
        return float(z), float(2 / ((1 - z * z) * dp * dp))


@settings(deadline=None, max_examples=40)
@given(st.integers(1, 40), st.data())
def test_legendre_exactness(n, data):
    # monomials x^d on [0, 1] up to degree 2n - 1
    r = gauss_nodes("gauss_legendre", n, (0.0, 1.0))
    d = data.draw(st.integers(0, 2 * n - 1))
    assert r.integrate(lambda x: x**d) == pytest.approx(1.0 / (d + 1), rel=1e-12)


@pytest.mark.parametrize("n", [3, 7, 10, 15, 30])
def test_kronrod_exactness_and_embedding(n):
    r = gauss_nodes("gauss_kronrod", n)
    assert len(r) == 2 * n + 1
    assert np.all(r.weights > 0)
    g = gauss_nodes("gauss_legendre", n)
    assert np.max(np.abs(r.nodes[1::2] - g.nodes)) < 1e-14
    assert np.max(np.abs(r.gauss_weights - g.weights)) < 1e-13
    # exact through degree 3n + 1 (n odd: 3n+1, n even: 3n+2)
    for d in range(0, 3 * n + 2):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert r.integrate(lambda x: x**d) == pytest.approx(exact, abs=1e-13)


def test_known_g7k15_constants():
    r = gauss_nodes("gauss_kronrod", 7)
    # the centre weight and outermost node of the classical 15-point rule
    assert r.weights[7] == pytest.approx(0.209482141084727828012999174891714, abs=1e-15)
    assert r.nodes[-1] == pytest.approx(0.991455371120812639206854697526329, abs=1e-15)


def test_composite_and_adaptive():
    assert integrate(np.sin, 0.0, math.pi, 32, 2) == pytest.approx(2.0, abs=1e-14)
    val, err = integrate_adaptive(lambda x: np.sqrt(x), 0.0, 1.0, tol=1e-12)
    assert val == pytest.approx(2 / 3, abs=1e-11) and err <= 1e-12
    with pytest.raises(QuadratureError):
        integrate_adaptive(lambda x: 1 / x, 0.0, 1.0, tol=1e-12, max_intervals=50)


def test_rejects_bad_sizes():
    with pytest.raises(ValueError):
        gauss_nodes("gauss_legendre", 4096)
    with pytest.raises(ValueError):
        gauss_nodes("gauss_kronrod", 31)
    with pytest.raises(ValueError):
        gauss_nodes("simpson", 4)
