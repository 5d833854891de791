"""Extended correlation kernels and correlation determinants.

Kernel arguments follow the ``K(y, t | x, s)`` convention: the first point is
the "row" space-time point and the second the "column" point.  Positions may
be numpy arrays; they broadcast against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from .airy import AIRY_RANGE, airy_ai
from .polybasis import (
    WeightParams,
    kappa,
    laguerre_monic,
    laguerre_monic_derivative,
    laguerre_monic_table,
    laguerre_norm,
    log_signed_sum,
    weight_gamma,
)
from .quadrature import integrate_adaptive

__all__ = [
    "SpaceTimePoint",
    "KernelSpec",
    "KernelError",
    "kernel_laguerre",
    "kernel_laguerre_cd",
    "kernel_hermite",
    "hermite_tail_sum",
    "kernel_sine",
    "kernel_airy",
    "kernel_value",
    "kernel_matrix",
    "correlation_det",
    "FAMILIES",
]

FAMILIES = ("laguerre_extended", "hermite_extended", "sine_extended", "airy_extended")

MEHLER_TERM_CAP = 2000
MEHLER_PATIENCE = 5


class KernelError(RuntimeError):
    """A series or integral defining a kernel failed to converge."""


class SpaceTimePoint(NamedTuple):
    x: float
    t: float


@dataclass(frozen=True)
class KernelSpec:
    family: str
    N: int = 1
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if not 0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        if self.N < 1:
            raise ValueError("N must be a positive integer")


def _int_time(t) -> int:
    if int(t) != t or t < 1:
        raise ValueError(f"the Laguerre kernel needs integer times >= 1, got {t}")
    return int(t)


def _laguerre_sum_part(y, t, x, s, N):
    """``sum_k L_k^{N(t-1)}(y) L_k^{N(s-1)}(x) w_{N(s-1),1}(x) / r_k^{N(s-1)}`` in plain doubles."""
    a_t, a_s = N * (t - 1), N * (s - 1)
    y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
    sy, ly = laguerre_monic_table(N - 1, a_t, y)
    sx, lx = laguerre_monic_table(N - 1, a_s, x)
    w = weight_gamma(WeightParams(a_s, 1.0), x)
    k = np.arange(N)
    log_r = gammaln(k + 1) + gammaln(a_s + k + 1) - gammaln(a_s + 1)
    log_r = log_r.reshape((N,) + (1,) * y.ndim)
    signs = sy * sx * np.asarray(w.sign)[None]
    with np.errstate(invalid="ignore"):
        logs = ly + lx + np.asarray(w.logmag)[None] - log_r
    sign, logmag = log_signed_sum(signs, logs, axis=0)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(sign == 0, 0.0, sign * np.exp(np.where(sign == 0, 0.0, logmag)))


def kernel_laguerre(y: SpaceTimePoint, x: SpaceTimePoint, N: int):
    """Extended Laguerre kernel ``K_N(y, t | x, s)`` at integer times.

    ``sum_{k<N} L_k^{N(t-1)}(y) L_k^{N(s-1)}(x) w_{N(s-1),1}(x) / r_k^{N(s-1)}
    - 1[s > t] kappa_{s-t}(x - y)``.
    """
    t, s = _int_time(y.t), _int_time(x.t)
    out = _laguerre_sum_part(y.x, t, x.x, s, N)
    if s > t:
        out = out - np.asarray(kappa(s - t, N, np.asarray(x.x, float) - np.asarray(y.x, float)).to_float())
    return float(out) if np.ndim(out) == 0 else out


def kernel_laguerre_cd(y: float, x: float, t: int, N: int) -> float:
    """Equal-time Laguerre kernel in Christoffel-Darboux form.

    Uses the two-term quotient for ``x != y`` and the derivative (confluent)
    form at ``x == y``.
    """
    t = _int_time(t)
    a = N * (t - 1)
    w = weight_gamma(WeightParams(a, 1.0), x)
    if w.sign == 0:
        return 0.0
    norm = laguerre_norm(N - 1, a)
    if y == x:
        d_n = laguerre_monic_derivative(N, a, x)
        d_m = laguerre_monic_derivative(N - 1, a, x)
        num = d_n * laguerre_monic(N - 1, a, x) - d_m * laguerre_monic(N, a, x)
        return float((num * w / norm).to_float())
    num = laguerre_monic(N, a, y) * laguerre_monic(N - 1, a, x) - laguerre_monic(N - 1, a, y) * laguerre_monic(N, a, x)
    return float((num * w / norm).to_float()) / (y - x)


def _hermite_psi_start(z):
    z = np.asarray(z, float)
    p0 = np.full_like(z, np.pi**-0.25)
    return p0, np.sqrt(2.0) * z * p0


def _psi_step(k, z, cur, prev):
    return np.sqrt(2.0 / (k + 1)) * z * cur - np.sqrt(k / (k + 1.0)) * prev


def _hermite_finite_sum(yy, xx, ratio, N):
    # sum_{k<N} ratio^{k/2} psi_k(yy) psi_k(xx)
    py0, py1 = _hermite_psi_start(yy)
    px0, px1 = _hermite_psi_start(xx)
    total = py0 * px0
    zk = 1.0
    sq = np.sqrt(ratio)
    for k in range(1, N):
        zk *= sq
        total = total + zk * py1 * px1
        py0, py1 = py1, _psi_step(k, yy, py1, py0)
        px0, px1 = px1, _psi_step(k, xx, px1, px0)
    return total


def hermite_tail_sum(yy, xx, ratio, start, tol, cap=MEHLER_TERM_CAP, return_terms=False):
    """``sum_{k>=start} ratio^{k/2} psi_k(yy) psi_k(xx)`` for ``ratio < 1`` (scalars).

    Stops after ``MEHLER_PATIENCE`` consecutive increments below
    ``tol * |partial sum|``; raises :class:`KernelError` at ``cap`` terms.
    """
    if not 0 <= ratio < 1:
        raise ValueError("tail sum needs 0 <= t/s < 1")
    yy, xx = float(yy), float(xx)
    sq = np.sqrt(ratio)
    py0, py1 = _hermite_psi_start(yy)
    px0, px1 = _hermite_psi_start(xx)
    py0, py1, px0, px1 = float(py0), float(py1), float(px0), float(px1)
    for k in range(1, start):
        py0, py1 = py1, float(_psi_step(k, yy, py1, py0))
        px0, px1 = px1, float(_psi_step(k, xx, px1, px0))
    # now py0 = psi_{start-1}, py1 = psi_start (for start >= 1)
    if start == 0:
        cur_y, cur_x = py0, px0
        prev_y = prev_x = 0.0
    else:
        cur_y, cur_x, prev_y, prev_x = py1, px1, py0, px0
    zk = sq**start
    total = 0.0
    quiet = 0
    terms = []
    for k in range(start, start + cap):
        inc = zk * cur_y * cur_x
        total += inc
        if return_terms:
            terms.append(inc)
        if abs(inc) <= tol * max(abs(total), np.finfo(float).tiny):
            quiet += 1
            if quiet >= MEHLER_PATIENCE:
                return (total, np.array(terms)) if return_terms else total
        else:
            quiet = 0
        zk *= sq
        nxt_y = float(_psi_step(k, yy, cur_y, prev_y)) if k >= 1 else np.sqrt(2.0) * yy * cur_y
        nxt_x = float(_psi_step(k, xx, cur_x, prev_x)) if k >= 1 else np.sqrt(2.0) * xx * cur_x
        prev_y, cur_y = cur_y, nxt_y
        prev_x, cur_x = cur_x, nxt_x
    raise KernelError(f"Mehler tail did not reach tol={tol} within {cap} terms")


def kernel_hermite(y: SpaceTimePoint, x: SpaceTimePoint, N: int, tol: float = 1e-12):
    """Extended Hermite kernel at real times ``t, s > 0``.

    Finite sum over ``k < N`` when ``s <= t``; minus the tail ``k >= N`` of the
    Mehler series when ``s > t``.
    """
    t, s = float(y.t), float(x.t)
    if not (t > 0 and s > 0):
        raise ValueError("Hermite kernel needs positive times")
    yy = np.asarray(y.x, float) / np.sqrt(2 * t)
    xx = np.asarray(x.x, float) / np.sqrt(2 * s)
    gauss = np.exp(-np.asarray(x.x, float) ** 2 / (2 * s)) / np.sqrt(2 * s)
    if s <= t:
        out = _hermite_finite_sum(yy, xx, t / s, N) * gauss
        return float(out) if np.ndim(out) == 0 else out
    ratio = t / s
    if np.ndim(yy) == 0 and np.ndim(xx) == 0:
        return -float(hermite_tail_sum(yy, xx, ratio, N, tol)) * float(gauss)
    yb, xb = np.broadcast_arrays(yy, xx)
    tail = np.array([hermite_tail_sum(a, b, ratio, N, tol) for a, b in zip(yb.ravel(), xb.ravel())]).reshape(yb.shape)
    return -tail * gauss


def _scalar_or_map(fn, y, x):
    if np.ndim(y) == 0 and np.ndim(x) == 0:
        return fn(float(y), float(x))
    yb, xb = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
    return np.array([fn(a, b) for a, b in zip(yb.ravel(), xb.ravel())]).reshape(yb.shape)


def kernel_sine(y: SpaceTimePoint, x: SpaceTimePoint, tol: float = 1e-12):
    """Extended sine kernel.

    ``int_0^1 exp(-pi^2 u^2 (s-t)) cos(pi u (y-x)) du`` for ``s <= t``, and
    ``-int_1^inf`` of the same integrand for ``s > t``.
    """
    tau = float(x.t) - float(y.t)

    def one(yv, xv):
        d = yv - xv

        def f(u):
            return np.exp(-np.pi**2 * u * u * tau) * np.cos(np.pi * u * d)

        if tau <= 0:
            return integrate_adaptive(f, 0.0, 1.0, tol=tol)[0]
        # Gaussian tail bound: int_U^inf e^{-c u^2} du <= e^{-c U^2} / (2 c U)
        c = np.pi**2 * tau
        upper = 1.0
        while np.exp(-c * upper * upper) / (2 * c * upper) > 1e-3 * tol:
            upper *= 1.5
        return -integrate_adaptive(f, 1.0, upper, tol=tol)[0]

    return _scalar_or_map(one, y.x, x.x)


def kernel_airy(y: SpaceTimePoint, x: SpaceTimePoint, tol: float = 1e-10):
    """Extended Airy kernel.

    ``int_0^inf e^{u(s-t)/2} Ai(y+u) Ai(x+u) du`` for ``s <= t`` and
    ``-int_{-inf}^0`` of the same integrand for ``s > t``.  Raises
    :class:`KernelError` if the semi-infinite tail cannot be bounded by ``tol``
    inside the supported Airy range.
    """
    tau = float(x.t) - float(y.t)
    lo_lim, hi_lim = AIRY_RANGE

    def one(yv, xv):
        lo, hi = min(yv, xv), max(yv, xv)
        if lo < lo_lim or hi > hi_lim:
            raise ValueError(f"positions must lie in {AIRY_RANGE}")

        def f(u):
            return np.exp(0.5 * u * tau) * airy_ai(yv + u) * airy_ai(xv + u)

        if tau <= 0:
            upper = hi_lim - hi
            return integrate_adaptive(f, 0.0, upper, tol=tol)[0]
        lower = lo_lim - lo
        # |Ai(z)| <= pi^{-1/2} |z|^{-1/4} for z <= -15
        tail = np.exp(0.5 * lower * tau) * 2.0 / tau / (np.pi * np.sqrt(-lo_lim))
        if tail > tol:
            raise KernelError(f"Airy tail bound {tail:.2e} exceeds tol={tol}; positions too negative or s-t too small")
        return -integrate_adaptive(f, lower, 0.0, tol=tol)[0]

    return _scalar_or_map(one, y.x, x.x)


def kernel_value(y: SpaceTimePoint, x: SpaceTimePoint, spec: KernelSpec):
    if spec.family == "laguerre_extended":
        return kernel_laguerre(y, x, spec.N)
    if spec.family == "hermite_extended":
        return kernel_hermite(y, x, spec.N, spec.tolerance)
    if spec.family == "sine_extended":
        return kernel_sine(y, x, spec.tolerance)
    return kernel_airy(y, x, spec.tolerance)


def kernel_matrix(points: Sequence[SpaceTimePoint], spec: KernelSpec) -> np.ndarray:
    """``[K(p_i | p_j)]`` assembled row by row in input order."""
    n = len(points)
    out = np.empty((n, n))
    for i, p in enumerate(points):
        for j, q in enumerate(points):
            out[i, j] = kernel_value(p, q, spec)
    return out


def correlation_det(points: Sequence[SpaceTimePoint], spec: KernelSpec) -> float:
    """Correlation function ``det[K(p_i | p_j)]`` for 1 to 8 space-time points."""
    if not 1 <= len(points) <= 8:
        raise ValueError("correlation_det supports 1 to 8 points")
    points = [SpaceTimePoint(*p) for p in points]
    if len(points) == 1:
        return float(kernel_value(points[0], points[0], spec))
    return float(np.linalg.det(kernel_matrix(points, spec)))
