"""Kolmogorov-Smirnov and z-score helpers for the Monte Carlo checks."""

from __future__ import annotations

import numpy as np
from scipy import stats

__all__ = ["ks_critical", "ks_one_sample", "ks_two_sample", "mean_and_se", "ALPHA"]

ALPHA = 1e-3


def ks_critical(n: int, m: int | None = None, alpha: float = ALPHA) -> float:
    """Asymptotic KS critical distance at level ``alpha``.

    One-sample when ``m`` is None, two-sample otherwise.
    """
    c = np.sqrt(-0.5 * np.log(alpha / 2))
    if m is None:
        return float(c / np.sqrt(n))
    return float(c * np.sqrt((n + m) / (n * m)))


def ks_one_sample(sample, cdf) -> tuple[float, float]:
    """``(D, D_crit)`` for a sample against a callable CDF."""
    sample = np.asarray(sample)
    d = stats.kstest(sample, cdf).statistic
    return float(d), ks_critical(len(sample))


def ks_two_sample(a, b) -> tuple[float, float]:
    """``(D, D_crit)`` for two samples."""
    d = stats.ks_2samp(np.asarray(a), np.asarray(b)).statistic
    return float(d), ks_critical(len(a), len(b))


def mean_and_se(values, axis=0):
    """Sample mean and its standard error along ``axis``."""
    v = np.asarray(values, dtype=float)
    n = v.shape[axis]
    return v.mean(axis=axis), v.std(axis=axis, ddof=1) / np.sqrt(n)
