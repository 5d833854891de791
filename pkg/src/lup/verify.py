"""Quadrature and Monte Carlo checks of the identities satisfied by the process.

Each ``check_*`` function returns a :class:`VerificationReport`.  Checks that
combine several error measures report a normalised error (each measure divided
by its own tolerance) against a tolerance of 1; the raw measures are kept in
``details``.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .densities import signed_logdet
from .kernels import (
    SpaceTimePoint,
    _hermite_finite_sum,
    kernel_airy,
    kernel_hermite,
    kernel_laguerre,
    kernel_laguerre_cd,
    kernel_sine,
)
from .airy import airy_ai, airy_ai_prime
from .matrixcore import jacobi_eigh
from .polybasis import (
    WeightParams,
    hermite_monic,
    kappa,
    laguerre_monic,
    laguerre_monic_table,
    laguerre_norm,
    weight_gamma,
)
from .process import chunked_map, characteristic_function_lue, sample_sum_pairs, simulate_lup_eigenvalues
from .quadrature import QuadratureRule, gauss_nodes, integrate
from .rng import RngStream
from .stats import ks_two_sample

__all__ = [
    "VerificationReport",
    "QuadratureRule",
    "gauss_nodes",
    "moment_closed_form",
    "check_moments",
    "check_moment_determinant",
    "check_biorthogonality",
    "check_convolution",
    "check_sum_property",
    "estimate_correlations_mc",
    "check_scaling_limit",
    "scaled_laguerre_kernel",
    "check_lemma_limits",
    "check_kernel_consistency",
    "check_universality",
    "SUITES",
    "run_suites",
]

# stream-id namespaces so that different checks never share random streams
_TAG_MOMENTS = 1 << 56
_TAG_SUM = 2 << 56
_TAG_CORR = 3 << 56
_TAG_T = 4 << 56

LOG_GAMMA_SAFE = 1e7

# Largest k, l used by the Monte Carlo moment check.  Sample means of
# higher-degree monomials in gamma variables are too skewed at 1e6 draws for a
# Gaussian 4-sigma band (skewness of the mean is ~0.6 at total degree 6 and
# ~0.06 at total degree 4).
MC_MOMENT_K_MAX = 2


@dataclass
class VerificationReport:
    identity: str
    params: dict
    observed_error: float
    tolerance: float
    effort: int
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)
    blocking: bool = True

    @property
    def passed(self) -> bool:
        return bool(self.observed_error <= self.tolerance)

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not timing:
            d.pop("wall_time")
        return _plain(d)

    def line(self) -> str:
        status = "PASS" if self.passed else ("WARN" if not self.blocking else "FAIL")
        return f"[{status}] {self.identity} {self.params}: error={self.observed_error:.3e} tol={self.tolerance:.1e}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _panels(lo, hi, n, panels):
    rule = gauss_nodes("gauss_legendre", n)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * rule.nodes[None, :]).ravel()
    w = (half[:, None] * rule.weights[None, :]).ravel()
    return x, w


def _gamma_extent(shape, extra=0):
    """Upper truncation point for a Gamma(shape) weight times degree-``extra`` polynomial."""
    m = shape + extra
    return m + 40.0 * np.sqrt(m + 1.0) + 40.0


def _float_table(kmax, a, x):
    s, l = laguerre_monic_table(kmax, a, x)
    return np.where(s == 0, 0.0, s * np.exp(np.where(s == 0, 0.0, l)))


def _check_times(t, s):
    if int(t) != t or int(s) != s or not t > s > 0:
        raise ValueError(f"need integer times t > s > 0, got t={t}, s={s}")
    return int(t), int(s)


# ---------------------------------------------------------------- moments

def moment_closed_form(N, t, s, k_max):
    """Closed-form moment matrix ``M[k, l]`` for ``0 <= k, l <= k_max``."""
    a_s, a_t = N * (s - 1), N * (t - 1)
    k = np.arange(k_max + 1)[:, None]
    l = np.arange(k_max + 1)[None, :]
    return np.exp(gammaln(a_s + l + 1) - gammaln(a_s + 1) + gammaln(a_t + k + l + 1) - gammaln(a_t + l + 1))


def check_moments(
    N: int,
    t: int,
    s: int,
    k_max: int,
    method: str = "quadrature",
    n_samples: int = 10**6,
    seed: int = 0,
    workers: int = 1,
    tolerance: float | None = None,
) -> VerificationReport:
    """Closed-form moments against ``E[(X+Z)^k X^l]`` with independent gammas.

    ``X ~ Gamma(N(s-1)+1)``, ``Z ~ Gamma(N(t-s))``.  Quadrature mode reports the
    maximal relative error; Monte Carlo mode reports the maximal |z-score|.
    """
    t, s = _check_times(t, s)
    if k_max > 8:
        raise ValueError("k_max must be at most 8")
    a_s, mu = N * (s - 1), N * (t - s)
    closed = moment_closed_form(N, t, s, k_max)
    params = dict(N=N, t=t, s=s, k_max=k_max, method=method)
    with _Timer() as tm:
        if method == "quadrature":
            x, wx = _panels(0.0, _gamma_extent(a_s + 1, 2 * k_max), 96, 4)
            z, wz = _panels(0.0, _gamma_extent(mu, k_max), 96, 4)
            wx = wx * weight_gamma(WeightParams(a_s, 1.0), x).to_float()
            wz = wz * kappa(t - s, N, z).to_float()
            xz = x[:, None] + z[None, :]
            oracle = np.empty_like(closed)
            for k in range(k_max + 1):
                inner = (xz**k) @ wz
                for l in range(k_max + 1):
                    oracle[k, l] = np.dot(wx * x**l, inner)
            err = float(np.max(np.abs(oracle / closed - 1)))
            tol = 1e-6 if tolerance is None else tolerance
            effort = len(x) * len(z)
            details = dict(max_rel_err=err)
        elif method == "monte_carlo":

            def draw(a, b):
                # each (N, t, s) gets its own block of streams
                base = _TAG_MOMENTS + ((N * 1000 + t) * 1000 + s) * (1 << 24)
                rng = RngStream(seed, base + np.arange(a, b))
                gx = rng.gamma_int(a_s + 1)
                gz = rng.gamma_int(mu)
                return gx, gz

            gx, gz = chunked_map(draw, n_samples, chunk=200000, workers=workers)
            zscores = np.empty_like(closed)
            y = gx + gz
            for k in range(k_max + 1):
                yk = y**k
                for l in range(k_max + 1):
                    if k == l == 0:
                        zscores[k, l] = 0.0  # the constant 1 has no sampling error
                        continue
                    v = yk * gx**l
                    zscores[k, l] = (v.mean() - closed[k, l]) / (v.std(ddof=1) / np.sqrt(n_samples))
            err = float(np.max(np.abs(zscores)))
            tol = 4.0 if tolerance is None else tolerance
            effort = n_samples
            details = dict(max_abs_z=err)
        else:
            raise ValueError("method must be 'quadrature' or 'monte_carlo'")
    details["closed_form"] = closed
    return VerificationReport("moments", params, err, tol, effort, tm.elapsed, details)


def _bareiss_det(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _exact_moment(N, t, s, k, l):
    a_s, a_t = N * (s - 1), N * (t - 1)
    f = math.factorial
    return (f(a_s + l) // f(a_s)) * (f(a_t + k + l) // f(a_t + l))


def check_moment_determinant(N: int, t: int, s: int, n_max: int, tolerance: float = 1e-8) -> VerificationReport:
    """Product formula for the moment determinants and ``h_l = D_l / D_{l-1}``.

    The oracle is the exact integer determinant of the moment matrix.
    """
    t, s = _check_times(t, s)
    if n_max > 6:
        raise ValueError("n_max must be at most 6")
    a_s = N * (s - 1)
    with _Timer() as tm:
        dets = []
        det_err, h_err, positive = 0.0, 0.0, True
        for n in range(n_max + 1):
            m = [[_exact_moment(N, t, s, k, l) for l in range(n + 1)] for k in range(n + 1)]
            d = _bareiss_det(m)
            dets.append(d)
            positive &= d > 0
            k = np.arange(n + 1)
            log_formula = float(np.sum(gammaln(a_s + k + 1) + gammaln(k + 1) - gammaln(a_s + 1)))
            if d > 0:
                det_err = max(det_err, abs(math.expm1(log_formula - math.log(d))))
            prev = dets[n - 1] if n else 1
            h_exact = Fraction(d, prev)
            h_formula = math.exp(gammaln(n + 1) + gammaln(a_s + n + 1) - gammaln(a_s + 1))
            h_err = max(h_err, abs(float(h_exact) / h_formula - 1))
        err = max(det_err, h_err) if positive else math.inf
    details = dict(det_rel_err=det_err, h_rel_err=h_err, positive=positive, determinants=[str(d) for d in dets])
    return VerificationReport(
        "moment_determinant", dict(N=N, t=t, s=s, n_max=n_max), err, tolerance, n_max + 1, tm.elapsed, details
    )


# ---------------------------------------------------------------- bi-orthogonality

def _transform_p(k_max, a_t, step, N, z):
    """``P_k(z) = int L_k^{a_t}(z + v) kappa_step(v) dv`` on a node array ``z``."""
    v, wv = _panels(0.0, _gamma_extent(N * step, k_max), 96, 2)
    wv = wv * kappa(step, N, v).to_float()
    table = _float_table(k_max, a_t, z[:, None] + v[None, :])
    return table @ wv


def _transform_q(k_max, a_s, step, N, z):
    """``Q_l(z) = int_0^z kappa_step(z - x) L_l^{a_s}(x) w_{a_s,1}(x) dx``."""
    xi, wxi = _panels(0.0, 1.0, 64, 1)
    x = z[:, None] * xi[None, :]
    wts = z[:, None] * wxi[None, :]
    integrand = kappa(step, N, z[:, None] - x).to_float() * weight_gamma(WeightParams(a_s, 1.0), x).to_float()
    table = _float_table(k_max, a_s, x)
    return np.einsum("lij,ij->li", table, integrand * wts)


def check_biorthogonality(
    N: int,
    t: int,
    s: int,
    k_max: int,
    u: int | None = None,
    tolerance: float = 1.0,
    diag_tol: float = 1e-7,
    off_tol: float = 1e-8,
) -> VerificationReport:
    """Bi-orthogonality of the Laguerre families under the kappa pairing.

    Without ``u``: the double integral of ``L_k^{N(t-1)}(y) kappa_{t-s}(y-x)
    L_l^{N(s-1)}(x) w(x)`` against ``h_l delta_kl``.  With ``s <= u <= t``: the
    integral transforms ``P_k``, ``Q_l`` are built by quadrature from their
    definitions, paired, and also compared with their closed forms.
    Normalised error: max of diag/diag_tol, off/(off_tol * h_max), closed-form
    deviation/diag_tol.
    """
    t, s = _check_times(t, s)
    if u is not None and not s <= u <= t:
        raise ValueError("need s <= u <= t")
    a_t, a_s = N * (t - 1), N * (s - 1)
    h = np.exp(gammaln(np.arange(k_max + 1) + 1) + gammaln(a_s + np.arange(k_max + 1) + 1) - gammaln(a_s + 1))
    closed_dev = 0.0
    with _Timer() as tm:
        if u is None:
            x, wx = _panels(0.0, _gamma_extent(a_s + 1, 2 * k_max), 96, 4)
            z, wz = _panels(0.0, _gamma_extent(N * (t - s), 2 * k_max), 96, 4)
            wx = wx * weight_gamma(WeightParams(a_s, 1.0), x).to_float()
            wz = wz * kappa(t - s, N, z).to_float()
            lt = _float_table(k_max, a_t, x[:, None] + z[None, :])
            ls = _float_table(k_max, a_s, x)
            gram = np.einsum("kij,j,li,i->kl", lt, wz, ls, wx)
            effort = len(x) * len(z)
        else:
            a_u = N * (u - 1)
            z, wz = _panels(0.0, _gamma_extent(a_u + 1, 2 * k_max), 96, 4)
            pk = _transform_p(k_max, a_t, t - u, N, z) if u < t else _float_table(k_max, a_t, z)
            if u > s:
                ql = _transform_q(k_max, a_s, u - s, N, z)
            else:
                ql = _float_table(k_max, a_s, z) * weight_gamma(WeightParams(a_s, 1.0), z).to_float()
            gram = np.einsum("ki,li,i->kl", pk, ql, wz)
            effort = len(z)
            # closed forms: P_k = L_k^{a_u}, Q_l = (r_l^{a_s} / r_l^{a_u}) L_l^{a_u} w_{a_u}
            lu = _float_table(k_max, a_u, z)
            ratio = np.array([float(laguerre_norm(l, a_s) / laguerre_norm(l, a_u)) for l in range(k_max + 1)])
            q_closed = ratio[:, None] * lu * weight_gamma(WeightParams(a_u, 1.0), z).to_float()
            # compare on the bulk of the weight, where both sides are O(1) relative to their scale
            mask = z < _gamma_extent(a_u + 1, k_max) * 0.6
            p_scale = np.max(np.abs(lu[:, mask]), axis=1, keepdims=True)
            q_scale = np.max(np.abs(q_closed[:, mask]), axis=1, keepdims=True)
            closed_dev = float(
                max(
                    np.max(np.abs(pk[:, mask] - lu[:, mask]) / p_scale),
                    np.max(np.abs(ql[:, mask] - q_closed[:, mask]) / q_scale),
                )
            )
        diag_err = float(np.max(np.abs(np.diag(gram) / h - 1)))
        off = gram - np.diag(np.diag(gram))
        off_err = float(np.max(np.abs(off)) / h.max())
        err = max(diag_err / diag_tol, off_err / off_tol, closed_dev / diag_tol)
    params = dict(N=N, t=t, s=s, k_max=k_max, u=u)
    details = dict(diag_rel_err=diag_err, offdiag_rel_err=off_err, closed_form_dev=closed_dev, diag_tol=diag_tol, off_tol=off_tol)
    return VerificationReport("biorthogonality", params, err, tolerance, effort, tm.elapsed, details)


# ---------------------------------------------------------------- convolution

def check_convolution(
    N_values: Sequence[int] = (1, 2, 3),
    triples: Sequence[tuple[int, int, int]] = ((3, 2, 1), (5, 4, 1), (4, 2, 1)),
    grid: np.ndarray | None = None,
    tolerance: float = 1e-9,
) -> VerificationReport:
    """Semigroup ``int kappa_{t-u}(y-z) kappa_{u-s}(z-x) dz = kappa_{t-s}(y-x)`` (sup norm)."""
    d = np.linspace(0.1, 30.0, 300) if grid is None else np.asarray(grid, float)
    xi, wxi = _panels(0.0, 1.0, 64, 1)
    worst = 0.0
    with _Timer() as tm:
        for N in N_values:
            for t, u, s in triples:
                z = d[:, None] * xi[None, :]
                lhs = np.sum(d[:, None] * wxi[None, :] * kappa(t - u, N, d[:, None] - z).to_float() * kappa(u - s, N, z).to_float(), axis=1)
                rhs = kappa(t - s, N, d).to_float()
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    params = dict(N_values=list(N_values), triples=[list(x) for x in triples], grid=[float(d.min()), float(d.max()), len(d)])
    return VerificationReport("kappa_convolution", params, worst, tolerance, len(d) * len(xi), tm.elapsed, dict(sup_norm=worst))


# ---------------------------------------------------------------- addition theorem

def _random_hermitian(N, seed, index, target):
    rng = RngStream(seed, _TAG_T + index)
    g = rng.normal((2, N, N))
    h = g[0] + 1j * g[1]
    h = 0.5 * (h + h.conj().T)
    scale = 0.25 + 0.75 * float(rng.uniform(1)[0])
    return h * np.sqrt(scale * target / np.sum(np.linalg.eigvalsh(h) ** 2))


def check_sum_property(
    N: int,
    a: int,
    a2: int,
    b: float = 1.0,
    n_pairs: int = 10**5,
    seed: int = 0,
    workers: int = 1,
    n_T: int = 5,
    tolerance: float = 1.0,
) -> VerificationReport:
    """``LUE(a) + LUE(a2)`` against fresh ``LUE(a+a2+N)`` draws.

    Two-sample KS on trace, largest and smallest eigenvalue (alpha = 0.001), and
    empirical characteristic functions of the sums at ``n_T`` random Hermitian
    ``T`` against the closed form.  Normalised error: max of D/D_crit and
    |z|/4.
    """
    a_tot = a + a2 + N
    # scale T so that |phi(T)| is about exp(-1/4)
    Ts = [_random_hermitian(N, seed, i, 0.5 * b * b / (N + a_tot)) for i in range(n_T)]
    stack_T = np.stack(Ts)

    def run(lo, hi):
        rng = RngStream(seed, _TAG_SUM + np.arange(lo, hi))
        sums, refs = sample_sum_pairs(N, a, a2, b, rng)
        es, er = jacobi_eigh(sums), jacobi_eigh(refs)
        phases = np.einsum("bij,tji->bt", sums, stack_T).real
        return es, er, phases

    with _Timer() as tm:
        es, er, phases = chunked_map(run, n_pairs, workers=workers)
        ks = {}
        for name, f in (("trace", lambda e: e.sum(axis=1)), ("largest", lambda e: e[:, -1]), ("smallest", lambda e: e[:, 0])):
            d, crit = ks_two_sample(f(es), f(er))
            ks[name] = dict(D=d, D_crit=crit)
        zmax = 0.0
        ecf = []
        for i, T in enumerate(Ts):
            zvals = np.exp(1j * phases[:, i])
            mean = zvals.mean()
            se_re = zvals.real.std(ddof=1) / np.sqrt(n_pairs)
            se_im = zvals.imag.std(ddof=1) / np.sqrt(n_pairs)
            exact = characteristic_function_lue(np.linalg.eigvalsh(T), N, a_tot, b)
            z = float(max(abs(mean.real - exact.real) / se_re, abs(mean.imag - exact.imag) / se_im))
            zmax = max(zmax, z)
            ecf.append(dict(empirical=[float(mean.real), float(mean.imag)], exact=[exact.real, exact.imag], z=z))
        err = max(max(v["D"] / v["D_crit"] for v in ks.values()), zmax / 4.0)
    params = dict(N=N, a=a, a2=a2, b=b, n_pairs=n_pairs, seed=seed)
    return VerificationReport("sum_property", params, err, tolerance, n_pairs, tm.elapsed, dict(ks=ks, ecf=ecf))


# ---------------------------------------------------------------- correlations

def _one_point_density(N, t):
    return lambda x: kernel_laguerre(SpaceTimePoint(x, t), SpaceTimePoint(x, t), N)


def _central_range(N, t, mass=0.995):
    rho = _one_point_density(N, t)
    hi_cap = _gamma_extent(N * t, 2 * N)
    nodes, w = _panels(0.0, hi_cap, 64, 16)
    dens = rho(nodes) * w / N
    cdf = np.cumsum(dens)
    tail = 0.5 * (1 - mass)

    def quantile(p):
        def f(q):
            return integrate(rho, 0.0, q, 64, 4) / N - p
        i = int(np.searchsorted(cdf, p))
        lo = nodes[max(i - 2, 0)] if i > 1 else 0.0
        hi = nodes[min(i + 2, len(nodes) - 1)]
        return brentq(f, lo, hi, xtol=1e-12)

    return quantile(tail), quantile(1 - tail)


def _bin_integral(f, edges, n=24):
    return np.array([integrate(f, a, b, n) for a, b in zip(edges[:-1], edges[1:])])


def _rect_integral(f2, A, B, n=24):
    gy = gauss_nodes("gauss_legendre", n, A)
    gx = gauss_nodes("gauss_legendre", n, B)
    Y, X = np.meshgrid(gy.nodes, gx.nodes, indexing="ij")
    return float(np.einsum("i,j,ij->", gy.weights, gx.weights, f2(Y, X)))


def _two_point_det(N, t, s):
    P = SpaceTimePoint

    def f(y, x):
        kyy = kernel_laguerre(P(y, t), P(y, t), N)
        kxx = kernel_laguerre(P(x, s), P(x, s), N)
        kyx = kernel_laguerre(P(y, t), P(x, s), N)
        kxy = kernel_laguerre(P(x, s), P(y, t), N)
        return kyy * kxx - kyx * kxy

    return f


DEFAULT_RECTS = (
    ((1.0, 2.0), (0.5, 1.5)),
    ((3.0, 5.0), (1.0, 2.0)),
    ((2.0, 4.0), (2.0, 4.0)),
    ((5.0, 8.0), (0.0, 1.0)),
)


def estimate_correlations_mc(
    N: int,
    times: Sequence[int],
    n_traj: int = 10**5,
    bins: int = 40,
    seed: int = 0,
    workers: int = 1,
    rects: Sequence | None = None,
    pair_bins: int = 6,
    tolerance: float = 4.0,
) -> VerificationReport:
    """Monte Carlo correlation functions against kernel determinants.

    One time ``t``: per-bin 1-point intensity (``bins`` bins over the central
    99.5% of the 1-point mass) and, for ``N >= 2``, equal-time pair
    intensities on a ``pair_bins x pair_bins`` grid.  Two times ``s < t``:
    cross-time pair intensities on rectangle pairs ``(A at t, B at s)``.
    Reports the largest |z-score|.
    """
    times = sorted(int(v) for v in times)
    if len(times) not in (1, 2):
        raise ValueError("give one or two times")
    if N > 4:
        raise ValueError("correlation estimates support N <= 4")
    details: dict = dict(insufficient_samples=n_traj < 10**4)
    with _Timer() as tm:
        ev = simulate_lup_eigenvalues(N, times[-1], times, n_traj, seed, stream_offset=_TAG_CORR, workers=workers)
        zs = []
        if len(times) == 1:
            t = times[0]
            e = ev[:, 0, :]
            lo, hi = _central_range(N, t)
            edges = np.linspace(lo, hi, bins + 1)
            counts = _bin_counts(e, edges)
            mean = counts.mean(axis=0)
            se = counts.std(axis=0, ddof=1) / np.sqrt(n_traj)
            expected = _bin_integral(_one_point_density(N, t), edges)
            z1 = (mean - expected) / se
            zs.append(np.abs(z1).max())
            details.update(edges=edges, one_point_mc=mean, one_point_kernel=expected, one_point_z=z1)
            details["family_note"] = f"{bins} bins tested at |z| <= {tolerance}; two-sided per-bin level {math.erfc(tolerance / math.sqrt(2)):.1e}"
            if N >= 2:
                pedges = np.linspace(lo, hi, pair_bins + 1)
                pc = _bin_counts(e, pedges)
                f2 = _two_point_det(N, t, t)
                if N == 2 and t == 1:
                    # closed form of the two-point function of LUE(0, 1) with N = 2
                    f2 = lambda y, x: (y - x) ** 2 * np.exp(-y - x)  # noqa: E731
                rows = []
                for i in range(pair_bins):
                    for j in range(i, pair_bins):
                        per = pc[:, i] * (pc[:, i] - 1) if i == j else pc[:, i] * pc[:, j]
                        m, sd = float(per.mean()), float(per.std(ddof=1) / np.sqrt(n_traj))
                        ex = _rect_integral(f2, tuple(pedges[i : i + 2]), tuple(pedges[j : j + 2]))
                        # rare cells: the sample deviation is unreliable, use the Poisson value
                        sd = max(sd, math.sqrt(ex / n_traj))
                        rows.append(dict(A=pedges[i : i + 2], B=pedges[j : j + 2], mc=m, kernel=ex, z=(m - ex) / sd))
                zs.append(max(abs(r["z"]) for r in rows))
                details["pairs"] = rows
        else:
            s, t = times
            rects = DEFAULT_RECTS if rects is None else rects
            f2 = _two_point_det(N, t, s)
            rows = []
            for A, B in rects:
                ca = ((ev[:, 1, :] >= A[0]) & (ev[:, 1, :] < A[1])).sum(axis=1)
                cb = ((ev[:, 0, :] >= B[0]) & (ev[:, 0, :] < B[1])).sum(axis=1)
                per = ca * cb
                m, sd = float(per.mean()), float(per.std(ddof=1) / np.sqrt(n_traj))
                ex = _rect_integral(f2, tuple(A), tuple(B))
                sd = max(sd, math.sqrt(ex / n_traj))
                rows.append(dict(A=list(A), B=list(B), mc=m, kernel=ex, z=(m - ex) / sd))
            zs.append(max(abs(r["z"]) for r in rows))
            details["cross_time"] = rows
        err = float(max(zs))
    params = dict(N=N, times=times, n_traj=n_traj, bins=bins, seed=seed)
    return VerificationReport("correlations", params, err, tolerance, n_traj, tm.elapsed, details)


def _bin_counts(e, edges):
    idx = np.searchsorted(edges, e, side="right") - 1
    nb = len(edges) - 1
    inside = (idx >= 0) & (idx < nb)
    counts = np.zeros((e.shape[0], nb), dtype=np.int64)
    rows = np.broadcast_to(np.arange(e.shape[0])[:, None], e.shape)
    np.add.at(counts, (rows[inside], idx[inside]), 1)
    return counts


# ---------------------------------------------------------------- scaling limits

def scaled_laguerre_kernel(N: int, gamma: float, y: float, x: float, t: float, s: float) -> float:
    """``sqrt(N g) K^Laguerre(sqrt(N g) y + N g t, g t | sqrt(N g) x + N g s, g s)``."""
    gt, gs = gamma * t, gamma * s
    if abs(gt - round(gt)) > 1e-9 or abs(gs - round(gs)) > 1e-9:
        raise ValueError("gamma*t and gamma*s must be integers")
    gt, gs = int(round(gt)), int(round(gs))
    if N * (max(gt, gs) - 1) > LOG_GAMMA_SAFE:
        raise ValueError(f"gamma={gamma} pushes the Laguerre index past the validated range {LOG_GAMMA_SAFE:.0e}")
    c = math.sqrt(N * gamma)
    return c * kernel_laguerre(SpaceTimePoint(c * y + N * gamma * t, gt), SpaceTimePoint(c * x + N * gamma * s, gs), N)


def check_scaling_limit(
    N: int,
    gammas: Sequence[float],
    test_points: Sequence[tuple[float, float, float, float]],
    slope_band: tuple[float, float] = (-0.7, -0.3),
    hermite_tol: float = 1e-14,
) -> VerificationReport:
    """Convergence of the rescaled Laguerre kernel to the extended Hermite kernel.

    ``test_points`` are ``(y, x, t, s)``.  Passes when the error decreases
    along ``gammas`` at every point and each fitted log-log slope lies in
    ``slope_band``; the reported error is the largest distance of a slope from
    the band centre (infinite if some error sequence is not decreasing).
    """
    gammas = list(gammas)
    if not gammas:
        raise ValueError("gamma list is empty")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gammas must be ascending")
    centre = 0.5 * (slope_band[0] + slope_band[1])
    half = 0.5 * (slope_band[1] - slope_band[0])
    rows = []
    worst = 0.0
    with _Timer() as tm:
        for y, x, t, s in test_points:
            target = kernel_hermite(SpaceTimePoint(y, t), SpaceTimePoint(x, s), N, hermite_tol)
            errs = [abs(scaled_laguerre_kernel(N, g, y, x, t, s) - target) for g in gammas]
            slope = float(np.polyfit(np.log(gammas), np.log(errs), 1)[0]) if len(gammas) > 1 else float("nan")
            decreasing = all(b < a for a, b in zip(errs, errs[1:]))
            rows.append(dict(point=[y, x, t, s], hermite=target, errors=errs, slope=slope, decreasing=decreasing))
            worst = max(worst, abs(slope - centre) if decreasing else math.inf)
    params = dict(N=N, gammas=gammas, n_points=len(test_points))
    return VerificationReport("scaling_limit", params, worst, half, len(gammas) * len(test_points), tm.elapsed, dict(points=rows))


def _lemma_error(kind, a, b_values, ks, xs):
    if kind == "L2H":
        worst = 0.0
        for b in b_values:
            for k in ks:
                arg = math.sqrt(2 * a) * xs + a
                lag = laguerre_monic(k, a + b, arg)
                scaled = np.asarray(lag.sign) * np.exp(np.asarray(lag.logmag) - 0.5 * k * math.log(2 * a))
                herm = hermite_monic(k, xs).to_float()
                worst = max(worst, float(np.max(np.abs(scaled - herm))))
        return worst
    if kind == "norm":
        worst = 0.0
        for b in b_values:
            for k in ks:
                val = math.exp(float(laguerre_norm(k, a + b).logmag) - k * math.log(a))
                worst = max(worst, abs(val - math.factorial(k)))
        return worst
    if kind == "weight":
        worst = 0.0
        gauss = np.exp(-xs**2 / 2) / math.sqrt(2 * math.pi)
        for b in b_values:
            w = weight_gamma(WeightParams(a + b, 1.0), math.sqrt(a) * xs + a)
            val = np.exp(np.asarray(w.logmag) + 0.5 * math.log(a))
            worst = max(worst, float(np.max(np.abs(val - gauss))))
        return worst
    raise ValueError("kind must be one of 'L2H', 'norm', 'weight'")


def check_lemma_limits(
    kind: str,
    a_values: Sequence[float] = (1e3, 1e5, 1e7),
    params: dict | None = None,
    tolerance: float = 1e-2,
) -> VerificationReport:
    """Large-index limits of monic Laguerre polynomials, their norms and the weight.

    Errors must decrease monotonically along ``a_values`` and the final error
    must be below ``tolerance``.
    """
    params = dict(params or {})
    a_values = list(a_values)
    if any(b <= a for a, b in zip(a_values, a_values[1:])) or max(a_values) > 1e8:
        raise ValueError("a_values must be ascending and at most 1e8")
    b_values = params.get("b", (0.0, 1.0, 2.5))
    ks = params.get("k", range(6))
    if kind == "weight":
        xs = np.asarray(params.get("x", np.linspace(-3, 3, 61)), float)
    else:
        xs = np.asarray(params.get("x", (-1.0, 0.0, 0.7)), float)
    with _Timer() as tm:
        errs = [_lemma_error(kind, a, b_values, ks, xs) for a in a_values]
        monotone = all(b < a for a, b in zip(errs, errs[1:]))
        err = errs[-1] if monotone else math.inf
    p = dict(kind=kind, a_values=a_values, b=list(b_values))
    return VerificationReport(f"lemma_{kind}", p, err, tolerance, len(a_values), tm.elapsed, dict(errors=errs, monotone=monotone))


# ---------------------------------------------------------------- kernel internals

def check_kernel_consistency(tolerance: float = 1.0) -> VerificationReport:
    """Internal consistency of the kernel evaluators.

    * Christoffel-Darboux vs sum form (relative 1e-9)
    * Mehler closed form vs finite + tail sums (1e-10)
    * equal-time sine and Airy reductions (1e-8)
    * projection trace ``int K(x,x) dx = N`` (1e-8)
    """
    P = SpaceTimePoint
    out = {}
    with _Timer() as tm:
        cd = 0.0
        for N, t, y, x in [(2, 1, 1.0, 1.0), (3, 2, 5.0, 2.5), (3, 2, 1.5, 7.0), (4, 3, 10.0, 14.0), (5, 2, 3.0, 3.0), (1, 4, 2.0, 6.0)]:
            ref = kernel_laguerre(P(y, t), P(x, t), N)
            scale = _laguerre_term_scale(N, t, y, x)
            cd = max(cd, abs(kernel_laguerre_cd(y, x, t, N) - ref) / max(abs(ref), scale * 1e-3))
        out["cd_vs_sum"] = (cd, 1e-9)
        mehler = 0.0
        for y, x, t, s, N in [(0.3, -0.4, 1.0, 2.0, 1), (0.3, -0.4, 1.0, 2.0, 3), (1.1, 0.2, 1.0, 1.5, 2), (-0.5, 0.8, 0.5, 3.0, 4)]:
            mehler = max(mehler, abs(_mehler_resummed(y, x, t, s, N) - _heat(y, x, t, s)))
        out["mehler"] = (mehler, 1e-10)
        red = 0.0
        for d in (0.25, 0.5, 1.7, -2.3):
            red = max(red, abs(kernel_sine(P(d, 1.0), P(0.0, 1.0)) - np.sinc(d)))
        red = max(red, abs(kernel_sine(P(0.4, 2.0), P(0.4, 2.0)) - 1.0))
        for y, x in ((0.5, -0.3), (1.2, 0.4), (-2.0, -1.0)):
            classical = (airy_ai(y) * airy_ai_prime(x) - airy_ai_prime(y) * airy_ai(x)) / (y - x)
            red = max(red, abs(kernel_airy(P(y, 1.0), P(x, 1.0)) - classical))
        red = max(red, abs(kernel_airy(P(0.0, 1.0), P(0.0, 1.0)) - airy_ai_prime(0.0) ** 2))
        out["equal_time_reductions"] = (red, 1e-8)
        trace = 0.0
        for N, t in ((1, 1), (2, 1), (3, 2), (4, 3)):
            total = integrate(_one_point_density(N, t), 0.0, _gamma_extent(N * t, 2 * N), 128, 8)
            trace = max(trace, abs(total - N))
        for N in (1, 2, 4):
            total = integrate(lambda v: kernel_hermite(P(v, 1.0), P(v, 1.0), N), -12 - 2 * N, 12 + 2 * N, 128, 8)
            trace = max(trace, abs(total - N))
        out["projection_trace"] = (trace, 1e-8)
        err = max(v / tol for v, tol in out.values())
    details = {k: dict(error=v, tol=tol) for k, (v, tol) in out.items()}
    return VerificationReport("kernel_consistency", {}, err, tolerance, len(out), tm.elapsed, details)


def _laguerre_term_scale(N, t, y, x):
    # size of the largest individual summand, used when the kernel itself vanishes
    a = N * (t - 1)
    terms = [
        abs(laguerre_monic(k, a, y).to_float() * laguerre_monic(k, a, x).to_float() / laguerre_norm(k, a).to_float())
        for k in range(N)
    ]
    return max(terms) * weight_gamma(WeightParams(a, 1.0), x).to_float()


def _heat(y, x, t, s):
    return math.exp(-((y - x) ** 2) / (2 * (s - t))) / math.sqrt(2 * math.pi * (s - t))


def _mehler_resummed(y, x, t, s, N, tol=1e-15):
    """Finite head ``k < N`` minus the kernel (the tail) for ``s > t``: the full Mehler sum."""
    P = SpaceTimePoint
    xx = x / math.sqrt(2 * s)
    gauss = math.exp(-x * x / (2 * s)) / math.sqrt(2 * s)
    head = float(_hermite_finite_sum(y / math.sqrt(2 * t), xx, t / s, N))
    return head * gauss - kernel_hermite(P(y, t), P(x, s), N, tol)


# ---------------------------------------------------------------- universality

def check_universality(
    N: int = 64,
    points: Sequence[tuple[float, float]] = ((0.0, 0.3), (0.2, -0.3), (-0.4, 0.1), (0.5, 0.0), (0.1, 0.9)),
    t: float = 0.0,
    tolerance: float = 2e-2,
) -> VerificationReport:
    """Equal-time Hermite kernel in the bulk scaling against the sine kernel.

    The Hermite time is ``2t + N/pi^2`` and the gauge factor
    ``exp(-y^2/4T) / exp(-x^2/4T)`` uses that same Hermite time ``T``.
    Non-blocking: finite-N corrections are not controlled.
    """
    P = SpaceTimePoint
    T = 2 * t + N / math.pi**2
    rows = []
    worst = 0.0
    with _Timer() as tm:
        for y, x in points:
            herm = kernel_hermite(P(y, T), P(x, T), N)
            gauge = math.exp(-(y * y) / (4 * T) + (x * x) / (4 * T))
            sine = kernel_sine(P(y, t), P(x, t))
            rows.append(dict(y=y, x=x, hermite=herm * gauge, sine=sine))
            worst = max(worst, abs(herm * gauge - sine))
    return VerificationReport(
        "universality_sine", dict(N=N, t=t), worst, tolerance, len(points), tm.elapsed, dict(points=rows), blocking=False
    )


# ---------------------------------------------------------------- suites

SCALING_POINTS = {
    1: [(0.5, 0.5, 1, 1), (0.7, -0.3, 1, 1), (0.3, 0.6, 2, 1), (0.2, -0.1, 1, 2)],
    2: [(0.5, 0.2, 1, 1), (-0.4, 0.9, 2, 1), (0.3, -0.5, 1, 2), (0.2, -0.1, 1, 2)],
}


def _suite_moments(seed, workers, tol, quick):
    out = []
    n_mc = 10**5 if quick else 10**6
    for N in (1, 2, 3):
        for t, s in ((2, 1), (3, 2), (5, 1)):
            out.append(check_moments(N, t, s, 6, "quadrature", tolerance=tol))
            out.append(check_moments(N, t, s, MC_MOMENT_K_MAX, "monte_carlo", n_samples=n_mc, seed=seed, workers=workers, tolerance=tol))
    return out


def _suite_determinant(seed, workers, tol, quick):
    return [
        check_moment_determinant(N, t, s, 6, **({} if tol is None else dict(tolerance=tol)))
        for N in (1, 2, 3)
        for t, s in ((2, 1), (3, 2), (5, 1))
    ]


BIORTHO_CASES = ((1, 2, 1), (2, 3, 2), (2, 4, 2), (3, 5, 2))


def _suite_biortho(seed, workers, tol, quick):
    kw = {} if tol is None else dict(tolerance=tol)
    out = []
    for N, t, s in BIORTHO_CASES:
        out.append(check_biorthogonality(N, t, s, 8, **kw))
        for u in sorted({s, s + 1, t}):
            out.append(check_biorthogonality(N, t, s, 8, u=u, **kw))
    return out


def _suite_convolution(seed, workers, tol, quick):
    return [check_convolution(**({} if tol is None else dict(tolerance=tol)))]


def _suite_sum(seed, workers, tol, quick):
    n = 2 * 10**4 if quick else 10**5
    kw = {} if tol is None else dict(tolerance=tol)
    return [check_sum_property(N, a, a2, 1.0, n, seed=seed, workers=workers, **kw) for N, a, a2 in ((1, 0, 0), (2, 0, 0), (3, 1, 2))]


def _suite_correlations(seed, workers, tol, quick):
    n = 2 * 10**4 if quick else 10**5
    kw = {} if tol is None else dict(tolerance=tol)
    out = [estimate_correlations_mc(N, [t], n, seed=seed, workers=workers, **kw) for N, t in ((2, 1), (2, 3), (3, 2))]
    out.append(estimate_correlations_mc(2, [1, 2], 2 * n, seed=seed, workers=workers, **kw))
    return out


def _suite_limits(seed, workers, tol, quick):
    out = [check_scaling_limit(N, (1e2, 1e3, 1e4), pts) for N, pts in SCALING_POINTS.items()]
    if tol is not None:
        for r in out:
            r.tolerance = tol
    return out


def _suite_lemmas(seed, workers, tol, quick):
    kw = {} if tol is None else dict(tolerance=tol)
    return [check_lemma_limits(kind, **kw) for kind in ("L2H", "norm", "weight")]


def _suite_kernels(seed, workers, tol, quick):
    kw = {} if tol is None else dict(tolerance=tol)
    return [check_kernel_consistency(**kw), check_universality()]


SUITES: dict[str, Callable] = {
    "moments": _suite_moments,
    "determinant": _suite_determinant,
    "biortho": _suite_biortho,
    "convolution": _suite_convolution,
    "sum": _suite_sum,
    "correlations": _suite_correlations,
    "limits": _suite_limits,
    "lemmas": _suite_lemmas,
    "kernels": _suite_kernels,
}


def run_suites(
    names: Sequence[str] | None = None,
    seed: int = 0,
    workers: int = 1,
    tolerance: float | None = None,
    quick: bool = False,
) -> list[VerificationReport]:
    """Run the named suites (all by default) in a fixed order."""
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    reports = []
    for name in names:
        reports.extend(SUITES[name](seed, workers, tolerance, quick))
    return reports
