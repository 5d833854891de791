"""Gauss-Legendre and Gauss-Kronrod rules plus a small adaptive integrator."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureRule",
    "gauss_nodes",
    "integrate",
    "integrate_adaptive",
    "QuadratureError",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""


@dataclass(frozen=True)
class QuadratureRule:
    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    # Gauss weights on the embedded nodes (odd positions); Kronrod rules only
    gauss_weights: np.ndarray | None = None

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def __len__(self):
        return len(self.nodes)


def _legendre_and_derivative(n, x):
    p0, p1 = np.ones_like(x), x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=64)
def _gauss_legendre_reference(n: int):
    # Golub-Welsch on the Jacobi matrix, then two Newton steps on P_n
    k = np.arange(1, n)
    off = k / np.sqrt(4.0 * k * k - 1)
    x = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    for _ in range(2):
        p, dp = _legendre_and_derivative(n, x)
        x = x - p / dp
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1 - x * x) * dp * dp)
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


@lru_cache(maxsize=16)
def _gauss_kronrod_reference(n: int):
    """Nodes/weights of the (2n+1)-point Kronrod extension of n-point Gauss-Legendre.

    The Stieltjes polynomial is found in the Legendre basis at 40 digits, its
    zeros are bracketed between the Gauss nodes, and the weights come from
    exactness on ``P_0 .. P_{2n}``.
    """
    with mpmath.workdps(40):
        gx = sorted(mpmath.mpf(v) for v in _mp_legendre_roots(n))
        m = n + 1
        # E_{n+1} = P_{n+1} + sum_{j<=n} c_j P_j, orthogonal to P_n * x^k, k=0..n
        qx, qw = _mp_gauss(2 * n + 3)
        Pvals = [[mpmath.legendre(j, xi) for xi in qx] for j in range(m + 1)]
        A = mpmath.matrix(n + 1, n + 1)
        rhs = mpmath.matrix(n + 1, 1)
        for k in range(n + 1):
            base = [qw[i] * Pvals[n][i] * qx[i] ** k for i in range(len(qx))]
            for j in range(n + 1):
                A[k, j] = mpmath.fsum(base[i] * Pvals[j][i] for i in range(len(qx)))
            rhs[k] = -mpmath.fsum(base[i] * Pvals[m][i] for i in range(len(qx)))
        c = mpmath.lu_solve(A, rhs)

        def stieltjes(x):
            return mpmath.legendre(m, x) + mpmath.fsum(c[j] * mpmath.legendre(j, x) for j in range(n + 1))

        edges = [mpmath.mpf(-1)] + gx + [mpmath.mpf(1)]
        kx = [mpmath.findroot(stieltjes, (edges[i], edges[i + 1]), solver="anderson") for i in range(m)]
        allx = sorted(gx + kx)
        size = 2 * n + 1
        V = mpmath.matrix(size, size)
        mom = mpmath.matrix(size, 1)
        for j in range(size):
            for i, xi in enumerate(allx):
                V[j, i] = mpmath.legendre(j, xi)
            mom[j] = 2 if j == 0 else 0
        w = mpmath.lu_solve(V, mom)
        nodes = np.array([float(v) for v in allx])
        weights = np.array([float(v) for v in w])
    gauss_w = _gauss_legendre_reference(n)[1]
    return nodes, weights, gauss_w


def _mp_legendre_roots(n):
    x, _ = _gauss_legendre_reference(n)
    roots = []
    for x0 in x:
        roots.append(mpmath.findroot(lambda z: mpmath.legendre(n, z), mpmath.mpf(float(x0))))
    return roots


def _mp_gauss(n):
    roots = sorted(_mp_legendre_roots(n))
    weights = [2 / ((1 - r * r) * mpmath.diff(lambda z: mpmath.legendre(n, z), r) ** 2) for r in roots]
    return roots, weights


def gauss_nodes(kind: str, n: int, interval: tuple[float, float] = (-1.0, 1.0)) -> QuadratureRule:
    """Build a quadrature rule mapped onto ``interval``.

    ``kind='gauss_legendre'`` gives the ``n``-point Gauss rule (exact through
    degree ``2n-1``).  ``kind='gauss_kronrod'`` gives the ``2n+1``-point Kronrod
    extension of the ``n``-point Gauss rule.
    """
    if n < 1 or n > 2048:
        raise ValueError(f"node count must be in [1, 2048], got {n}")
    lo, hi = float(interval[0]), float(interval[1])
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    if kind == "gauss_legendre":
        x, w = _gauss_legendre_reference(n)
        return QuadratureRule(kind, mid + half * x, half * w, (lo, hi))
    if kind == "gauss_kronrod":
        if n > 30:
            raise ValueError("Kronrod extensions are tabulated up to n=30")
        x, w, gw = _gauss_kronrod_reference(n)
        return QuadratureRule(kind, mid + half * x, half * w, (lo, hi), half * gw)
    raise ValueError(f"unknown quadrature kind {kind!r}")


def integrate(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n: int = 256, panels: int = 1) -> float:
    """Composite Gauss-Legendre with ``panels`` equal panels of ``n`` nodes."""
    x, w = _gauss_legendre_reference(n)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return float(np.dot(weights, f(nodes)))


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    rtol: float = 0.0,
    order: int = 7,
    max_intervals: int = 4000,
) -> tuple[float, float]:
    """Globally adaptive Gauss-Kronrod integration of a vectorised ``f``.

    Returns ``(value, error_estimate)``; raises :class:`QuadratureError` if the
    interval budget runs out before ``error <= max(tol, rtol*|value|)``.
    """
    x, wk, wg = _gauss_kronrod_reference(order)

    def panel(a, b):
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        fx = f(mid + half * x)
        k = half * np.dot(wk, fx)
        g = half * np.dot(wg, fx[1::2])
        return k, abs(k - g)

    panels = [(lo, hi) + panel(lo, hi)]
    while True:
        total = sum(p[2] for p in panels)
        err = sum(p[3] for p in panels)
        if err <= max(tol, rtol * abs(total)):
            return float(total), float(err)
        if len(panels) >= max_intervals:
            raise QuadratureError(f"adaptive quadrature stalled at error {err:.3e}")
        i = max(range(len(panels)), key=lambda j: panels[j][3])
        a, b, _, _ = panels.pop(i)
        m = 0.5 * (a + b)
        panels.append((a, m) + panel(a, m))
        panels.append((m, b) + panel(m, b))
