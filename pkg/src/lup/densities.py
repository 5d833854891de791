"""Closed-form eigenvalue densities of the Laguerre unitary process.

Every density is returned as a :class:`~lup.polybasis.LogValue`.  Eigenvalue
configurations are plain sequences of reals with unordered-tuple semantics.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.special import gammaln

from .polybasis import LogValue, WeightParams, kappa, weight_gamma

__all__ = [
    "vandermonde",
    "log_normalisation",
    "eig_jpdf",
    "transition_density",
    "spatiotemporal_jpdf",
    "signed_logdet",
]


def _config(points, N=None) -> np.ndarray:
    x = np.asarray(points, dtype=float).ravel()
    if N is not None and len(x) != N:
        raise ValueError(f"expected {N} points, got {len(x)}")
    return x


def _check_int_time(t, name):
    if int(t) != t or t < 1:
        raise ValueError(f"{name} must be a positive integer, got {t}")
    return int(t)


def vandermonde(points: Sequence[float]) -> LogValue:
    """``prod_{k<l} (x_k - x_l)``; exactly zero when two points coincide."""
    x = _config(points)
    i, j = np.triu_indices(len(x), k=1)
    diff = x[i] - x[j]
    if np.any(diff == 0):
        return LogValue.zero()
    sign = int(np.prod(np.sign(diff)))
    return LogValue(sign, float(np.sum(np.log(np.abs(diff)))))


def log_normalisation(N: int, a: float, b: float) -> float:
    """log of ``N! b^{-N(N-1)} prod_{j=1}^N Gamma(j) Gamma(a+j) / Gamma(a+1)``."""
    j = np.arange(1, N + 1)
    return float(gammaln(N + 1) - N * (N - 1) * np.log(b) + np.sum(gammaln(j) + gammaln(a + j) - gammaln(a + 1)))


def signed_logdet(sign: np.ndarray, logmag: np.ndarray) -> LogValue:
    """Determinant of a matrix given entrywise in sign/log form.

    The largest log-magnitude is factored out of each row, then the scaled
    matrix goes through LU with partial pivoting.
    """
    sign = np.asarray(sign, dtype=float)
    logmag = np.where(sign == 0, -np.inf, np.asarray(logmag, dtype=float))
    rowmax = np.max(logmag, axis=1)
    if np.any(~np.isfinite(rowmax)):
        return LogValue.zero()
    scaled = sign * np.exp(logmag - rowmax[:, None])
    s, ld = np.linalg.slogdet(scaled)
    if s == 0 or not np.isfinite(ld):
        return LogValue.zero()
    return LogValue(int(s), float(ld + rowmax.sum()))


def _kappa_det(y, x, step, N) -> LogValue:
    k = kappa(step, N, y[:, None] - x[None, :])
    return signed_logdet(k.sign, k.logmag)


def eig_jpdf(points: Sequence[float], N: int, a: float, b: float) -> LogValue:
    """LUE eigenvalue density ``Delta(x)^2 prod w_{a,b}(x_i) / Z_{a,b}(N)``."""
    x = _config(points, N)
    w = weight_gamma(WeightParams(a, b), x)
    if np.any(np.asarray(w.sign) == 0):
        return LogValue.zero()
    vdm = vandermonde(x)
    if vdm.sign == 0:
        return LogValue.zero()
    return LogValue(1, 2 * vdm.logmag + float(np.sum(w.logmag)) - log_normalisation(N, a, b))


def transition_density(y: Sequence[float], x: Sequence[float], t: int, s: int, N: int) -> LogValue:
    """Eigenvalue transition density from time ``s`` to time ``t > s``.

    ``(1/N!) Delta(y)/Delta(x) det[kappa_{t-s}(y_k - x_l)]``.  Coincident
    starting points are rejected; coincident end points give zero.
    """
    t = _check_int_time(t, "t")
    s = _check_int_time(s, "s")
    if not t > s:
        raise ValueError(f"need t > s, got t={t}, s={s}")
    y = _config(y, N)
    x = _config(x, N)
    dx = vandermonde(x)
    if dx.sign == 0:
        raise ValueError("starting configuration has coincident points")
    dy = vandermonde(y)
    if dy.sign == 0:
        return LogValue.zero()
    det = _kappa_det(y, x, t - s, N)
    if det.sign == 0:
        return LogValue.zero()
    out = dy / dx * det
    return LogValue(out.sign, out.logmag - float(gammaln(N + 1)))


def spatiotemporal_jpdf(configs: Sequence[Sequence[float]], times: Sequence[int], N: int) -> LogValue:
    """Joint density of eigenvalue configurations at increasing integer times."""
    times = [_check_int_time(t, "time") for t in times]
    if len(configs) != len(times) or not configs:
        raise ValueError("need one configuration per time")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    xs = [_config(c, N) for c in configs]
    n = len(times) - 1
    a0 = N * (times[0] - 1)
    w = weight_gamma(WeightParams(a0, 1.0), xs[0])
    if np.any(np.asarray(w.sign) == 0):
        return LogValue.zero()
    out = vandermonde(xs[-1]) * vandermonde(xs[0])
    if out.sign == 0:
        return LogValue.zero()
    out = LogValue(out.sign, out.logmag + float(np.sum(w.logmag)) - n * float(gammaln(N + 1)) - log_normalisation(N, a0, 1.0))
    for m in range(1, n + 1):
        out = out * _kappa_det(xs[m], xs[m - 1], times[m] - times[m - 1], N)
        if out.sign == 0:
            return LogValue.zero()
    return out
