"""Monic Laguerre/Hermite polynomials, gamma weights and their norms.

Everything here is evaluated in sign + log-magnitude form.  Laguerre indices
of the form ``N*(t-1)`` reach several hundred in ordinary use, where
``Gamma(a + l + 1)`` and the polynomial values themselves overflow doubles.

All functions accept scalars or numpy arrays for the position argument and
broadcast over it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "LogValue",
    "WeightParams",
    "log_gamma",
    "weight_gamma",
    "kappa",
    "laguerre_monic",
    "laguerre_monic_table",
    "laguerre_monic_derivative",
    "hermite_monic",
    "hermite_orthonormal_table",
    "laguerre_norm",
    "hermite_norm",
    "log_signed_sum",
]

# rescale the recurrence state once magnitudes leave this window
_BIG = 1e150
_SMALL = 1e-150


def log_gamma(z):
    """Natural log of ``|Gamma(z)|``."""
    return gammaln(z)


@dataclass(frozen=True)
class LogValue:
    """Real number stored as ``sign * exp(logmag)``.

    ``sign`` is -1, 0 or +1; ``logmag`` is ignored (conventionally ``-inf``)
    when ``sign == 0``.  Both fields may be numpy arrays of equal shape.
    """

    sign: ArrayLike
    logmag: ArrayLike

    @classmethod
    def from_float(cls, value: ArrayLike) -> "LogValue":
        value = np.asarray(value, dtype=float)
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(value))
        return cls._wrap(np.sign(value), logmag)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0, -np.inf)

    @staticmethod
    def _wrap(sign, logmag) -> "LogValue":
        sign = np.asarray(sign)
        logmag = np.asarray(logmag, dtype=float)
        logmag = np.where(sign == 0, -np.inf, logmag)
        if sign.ndim == 0 and logmag.ndim == 0:
            return LogValue(int(sign), float(logmag))
        return LogValue(sign.astype(np.int8), logmag)

    def to_float(self) -> ArrayLike:
        sign = np.asarray(self.sign)
        with np.errstate(over="ignore"):
            out = np.where(sign == 0, 0.0, sign * np.exp(np.where(sign == 0, 0.0, self.logmag)))
        return float(out) if out.ndim == 0 else out

    def __float__(self) -> float:
        return float(self.to_float())

    def __mul__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(other)
        sign = np.asarray(self.sign) * np.asarray(other.sign)
        with np.errstate(invalid="ignore"):
            logmag = np.asarray(self.logmag) + np.asarray(other.logmag)
        return LogValue._wrap(sign, logmag)

    __rmul__ = __mul__

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(other)
        if np.any(np.asarray(other.sign) == 0):
            raise ZeroDivisionError("division by a zero LogValue")
        sign = np.asarray(self.sign) * np.asarray(other.sign)
        logmag = np.asarray(self.logmag) - np.asarray(other.logmag)
        return LogValue._wrap(sign, logmag)

    def __neg__(self) -> "LogValue":
        return LogValue._wrap(-np.asarray(self.sign), self.logmag)

    def __pow__(self, power: int) -> "LogValue":
        sign = np.asarray(self.sign) ** power
        return LogValue._wrap(sign, np.asarray(self.logmag) * power)

    def __add__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(other)
        signs = np.stack(np.broadcast_arrays(np.asarray(self.sign), np.asarray(other.sign)))
        logs = np.stack(np.broadcast_arrays(np.asarray(self.logmag, float), np.asarray(other.logmag, float)))
        sign, logmag = log_signed_sum(signs, logs, axis=0)
        return LogValue._wrap(sign, logmag)

    def __sub__(self, other: "LogValue") -> "LogValue":
        return self + (-other)


def log_signed_sum(signs, logs, axis=0):
    """Sum ``sign * exp(log)`` along ``axis``; returns ``(sign, log|sum|)``.

    The largest term is factored out before summing in plain doubles.
    """
    signs = np.asarray(signs)
    logs = np.where(signs == 0, -np.inf, np.asarray(logs, dtype=float))
    peak = np.max(logs, axis=axis, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    total = np.sum(signs * np.exp(logs - peak), axis=axis)
    peak = np.squeeze(peak, axis=axis)
    with np.errstate(divide="ignore"):
        return np.sign(total), np.log(np.abs(total)) + peak


@dataclass(frozen=True)
class WeightParams:
    """Index ``a > -1`` and rate ``b > 0`` of the gamma weight."""

    a: float
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > -1):
            raise ValueError(f"weight index a must exceed -1, got {self.a}")
        if not (self.b > 0):
            raise ValueError(f"weight rate b must be positive, got {self.b}")


def _log_weight(a, b, x):
    x = np.asarray(x, dtype=float)
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    logw = (a + 1) * np.log(b) + a * np.log(xs) - b * xs - gammaln(a + 1)
    return pos.astype(np.int8), np.where(pos, logw, -np.inf)


def weight_gamma(p: WeightParams, x: ArrayLike) -> LogValue:
    """Gamma weight ``b^(a+1) x^a exp(-b x) / Gamma(a+1)``, zero for ``x <= 0``."""
    sign, logw = _log_weight(p.a, p.b, x)
    return LogValue._wrap(sign, logw)


def kappa(step: float, N: int, x: ArrayLike) -> LogValue:
    """Increment kernel ``w_{N*step-1, 1}(x)``: the Gamma(N*step, 1) density."""
    if not N * step > 0:
        raise ValueError(f"kappa needs N*step > 0, got N={N}, step={step}")
    return weight_gamma(WeightParams(N * step - 1, 1.0), x)


def _laguerre_coeffs(n, a):
    # monic recurrence: L_{n+1} = (x - (2n + a + 1)) L_n - n (n + a) L_{n-1}
    return 2 * n + a + 1, n * (n + a)


def _scaled_recurrence(kmax, x, step, p1, keep_all):
    """Run a monic three-term recurrence with running rescaling.

    ``step(n, x, p_n, p_{n-1}) -> p_{n+1}``; ``p1`` is the degree-one value.
    Returns (signs, logs) for degree ``kmax`` or for every degree ``0..kmax``.
    """
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    cur = np.asarray(p1, dtype=float) * np.ones_like(x)
    scale = np.zeros_like(x)
    out_s, out_l = [], []

    def record(v, sc):
        with np.errstate(divide="ignore"):
            out_s.append(np.sign(v).astype(np.int8))
            out_l.append(np.log(np.abs(v)) + sc)

    if keep_all:
        record(prev, scale)
        if kmax >= 1:
            record(cur, scale)
    if kmax == 0:
        cur = prev
    for n in range(1, kmax):
        nxt = step(n, x, cur, prev)
        prev, cur = cur, nxt
        mag = np.maximum(np.abs(cur), np.abs(prev))
        rescale = (mag > _BIG) | ((mag < _SMALL) & (mag > 0))
        if np.any(rescale):
            fac = np.where(rescale, mag, 1.0)
            cur = cur / fac
            prev = prev / fac
            scale = scale + np.log(fac)
        if keep_all:
            record(cur, scale)
    if keep_all:
        return np.stack(out_s), np.stack(out_l)
    with np.errstate(divide="ignore"):
        return np.sign(cur).astype(np.int8), np.log(np.abs(cur)) + scale


def laguerre_monic_table(kmax: int, a: float, x: ArrayLike):
    """Signs and log-magnitudes of monic Laguerre ``L_k^a(x)`` for ``k = 0..kmax``.

    Returns two arrays of shape ``(kmax + 1,) + x.shape``.
    """
    def step(n, x, cur, prev):
        c, d = _laguerre_coeffs(n, a)
        return (x - c) * cur - d * prev

    x = np.asarray(x, dtype=float)
    return _scaled_recurrence(kmax, x, step, x - (a + 1), keep_all=True)


def laguerre_monic(k: int, a: float, x: ArrayLike) -> LogValue:
    """Monic Laguerre polynomial of degree ``k`` and index ``a`` at ``x``."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if k == 0:
        x = np.asarray(x, dtype=float)
        return LogValue._wrap(np.ones_like(x, dtype=np.int8), np.zeros_like(x))

    def step(n, x, cur, prev):
        c, d = _laguerre_coeffs(n, a)
        return (x - c) * cur - d * prev

    x = np.asarray(x, dtype=float)
    sign, logv = _scaled_recurrence(k, x, step, x - (a + 1), keep_all=False)
    return LogValue._wrap(sign, logv)


def laguerre_monic_derivative(k: int, a: float, x: ArrayLike) -> LogValue:
    """Derivative of the monic Laguerre polynomial: ``k * L_{k-1}^{a+1}(x)``."""
    if k == 0:
        x = np.asarray(x, dtype=float)
        return LogValue._wrap(np.zeros_like(x, dtype=np.int8), np.full_like(x, -np.inf))
    return laguerre_monic(k - 1, a + 1, x) * LogValue(1, float(np.log(k)))


def hermite_monic(k: int, x: ArrayLike) -> LogValue:
    """Monic Hermite polynomial ``H_k(x)``: ``H_{k+1} = x H_k - (k/2) H_{k-1}``."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    if k == 0:
        return LogValue._wrap(np.ones_like(x, dtype=np.int8), np.zeros_like(x))

    def step(n, x, cur, prev):
        return x * cur - 0.5 * n * prev

    sign, logv = _scaled_recurrence(k, x, step, x, keep_all=False)
    return LogValue._wrap(sign, logv)


def hermite_orthonormal_table(kmax: int, x: ArrayLike) -> np.ndarray:
    """``H_k(x) / sqrt(m_k)`` for ``k = 0..kmax`` in plain doubles.

    The orthonormal family stays bounded by ``pi**-0.25 * exp(x**2 / 2)``, so no
    rescaling is needed for moderate ``|x|``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25
    if kmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out


def laguerre_norm(ell: int, a: float) -> LogValue:
    """Squared norm ``ell! Gamma(a + ell + 1) / Gamma(a + 1)`` of the monic Laguerre family."""
    return LogValue(1, float(gammaln(ell + 1) + gammaln(a + ell + 1) - gammaln(a + 1)))


def hermite_norm(k: int) -> LogValue:
    """Squared norm ``sqrt(pi) k! / 2^k`` of the monic Hermite family."""
    return LogValue(1, float(0.5 * np.log(np.pi) + gammaln(k + 1) - k * np.log(2.0)))
