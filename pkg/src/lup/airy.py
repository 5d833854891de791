"""Airy function Ai and its derivative on [-15, 30].

Maclaurin series (in extended precision) on ``[-8, 6]``, Poincare
asymptotic expansions outside.  The positive switch sits lower because the
series cancels like ``exp(4/3 x^1.5)`` there.  Absolute error is below 1e-10 on the
supported range.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

__all__ = ["airy_ai", "airy_ai_prime", "AIRY_RANGE"]

AIRY_RANGE = (-15.0, 30.0)
_SWITCH = 8.0
_SWITCH_POS = 6.0

_AI0 = 3.0 ** (-2.0 / 3.0) / np.exp(gammaln(2.0 / 3.0))
_AIP0 = 3.0 ** (-1.0 / 3.0) / np.exp(gammaln(1.0 / 3.0))


def _u_coeffs(n):
    k = np.arange(n)
    u = np.exp(gammaln(3 * k + 0.5) - k * np.log(54.0) - gammaln(k + 1) - gammaln(k + 0.5))
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


_U, _V = _u_coeffs(40)


def _check_range(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < AIRY_RANGE[0]) | (x > AIRY_RANGE[1])) or np.any(~np.isfinite(x)):
        raise ValueError(f"Airy argument outside supported range {AIRY_RANGE}")
    return x


def _maclaurin(x):
    xl = x.astype(np.longdouble)
    x3 = xl**3
    f = np.ones_like(xl)
    g = xl.copy()
    fp = xl * xl / 2
    gp = np.ones_like(xl)
    tf, tg, tfp, tgp = f.copy(), g.copy(), fp.copy(), gp.copy()
    f_sum, g_sum, fp_sum, gp_sum = f, g, fp, gp
    for k in range(1, 80):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        tgp = tgp * x3 / ((3 * k) * (3 * k - 2))
        if k >= 2:
            tfp = tfp * x3 / ((3 * k - 3) * (3 * k - 1))
            fp_sum = fp_sum + tfp
        f_sum = f_sum + tf
        g_sum = g_sum + tg
        gp_sum = gp_sum + tgp
        if np.all(np.abs(tf) + np.abs(tg) + np.abs(tfp) + np.abs(tgp) < 1e-22):
            break
    c1 = np.longdouble(_AI0)
    c2 = np.longdouble(_AIP0)
    ai = c1 * f_sum - c2 * g_sum
    aip = c1 * fp_sum - c2 * gp_sum
    return ai.astype(float), aip.astype(float)


def _truncated(coeffs, zeta, alternate=True):
    # sum coeffs[k] (-1)^k zeta^-k, stopping at the smallest term
    total = np.zeros_like(zeta)
    last = np.full_like(zeta, np.inf)
    active = np.ones_like(zeta, dtype=bool)
    for k, c in enumerate(coeffs):
        term = c * ((-1.0) ** k if alternate else 1.0) * zeta ** (-float(k))
        active &= np.abs(term) < np.abs(last)
        total = total + np.where(active, term, 0.0)
        last = np.where(active, term, last)
    return total


def _asymptotic_pos(x):
    zeta = 2.0 / 3.0 * x**1.5
    pref = np.exp(-zeta) / (2.0 * np.sqrt(np.pi))
    ai = pref * x**-0.25 * _truncated(_U, zeta)
    aip = -pref * x**0.25 * _truncated(_V, zeta)
    return ai, aip


def _asymptotic_neg(x):
    z = -x
    zeta = 2.0 / 3.0 * z**1.5
    phase = zeta - np.pi / 4
    c, s = np.cos(phase), np.sin(phase)
    # even/odd sub-series with alternating signs in k
    ue = _truncated(_U[0::2], zeta**2)
    uo = _truncated(_U[1::2], zeta**2) / zeta
    ve = _truncated(_V[0::2], zeta**2)
    vo = _truncated(_V[1::2], zeta**2) / zeta
    ai = (c * ue + s * uo) / (np.sqrt(np.pi) * z**0.25)
    aip = z**0.25 / np.sqrt(np.pi) * (s * ve - c * vo)
    return ai, aip


def _airy_pair(x):
    x = _check_range(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    mid = (x >= -_SWITCH) & (x <= _SWITCH_POS)
    pos = x > _SWITCH_POS
    neg = x < -_SWITCH
    if mid.any():
        ai[mid], aip[mid] = _maclaurin(x[mid])
    if pos.any():
        ai[pos], aip[pos] = _asymptotic_pos(x[pos])
    if neg.any():
        ai[neg], aip[neg] = _asymptotic_neg(x[neg])
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip


def airy_ai(x):
    """Airy function ``Ai(x)`` for ``x`` in [-15, 30]."""
    return _airy_pair(x)[0]


def airy_ai_prime(x):
    """Derivative ``Ai'(x)`` for ``x`` in [-15, 30]."""
    return _airy_pair(x)[1]
