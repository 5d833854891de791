# %% [markdown]
# # The Laguerre unitary process: paths and marginals
#
# `L(t) = L(t-1) + X(t)` with independent `X(t) ~ LUE(0, 1)`.  The marginal at
# time `t` is `LUE(N(t-1), 1)`, and its one-point function is the diagonal of
# the extended Laguerre kernel.  This script simulates paths, compares the
# eigenvalue histogram with the kernel, and checks the addition theorem.

# %%
import numpy as np
from scipy import stats

from lup import RngStream, SpaceTimePoint, kernel_laguerre, simulate_lup
from lup.matrixcore import jacobi_eigh, trace
from lup.process import sample_sum_pairs, simulate_lup_eigenvalues
from lup.quadrature import integrate

# %% [markdown]
# One path for `N = 3`, recorded at every time step.  Eigenvalues drift to the
# right and never cross.

# %%
path = simulate_lup(3, 5, range(1, 6), RngStream(1, 0))
for t in path.times:
    print(t, np.round(path.eigenvalues_at(t), 3))

# %% [markdown]
# Histogram of all eigenvalues at `t = 2` for `N = 3` against
# `K(x, t | x, t) / N`, integrated over each bin.

# %%
N, t, n = 3, 2, 50_000
eig = simulate_lup_eigenvalues(N, t, [t], n, seed=2)[:, 0, :].ravel()
edges = np.linspace(0, 25, 26)
counts, _ = np.histogram(eig, edges)
print(" bin          mc      kernel")
for lo, hi, c in zip(edges[:-1], edges[1:], counts):
    p = integrate(lambda x: kernel_laguerre(SpaceTimePoint(x, t), SpaceTimePoint(x, t), N), lo, hi, 32) / N
    print(f"[{lo:4.1f},{hi:4.1f})  {c / (n * N):.5f}  {p:.5f}")

# %% [markdown]
# Addition theorem: `LUE(a) + LUE(a')` has the law of `LUE(a + a' + N)`.
# The trace of the sum and of the reference should both be Gamma(27, 1/b)
# for `N = 3, a = 1, a' = 2`.

# %%
s, r = sample_sum_pairs(3, 1, 2, 2.0, RngStream(3, np.arange(100_000)))
law = stats.gamma(27, scale=0.5)
print("KS sum      ", stats.kstest(trace(s), law.cdf))
print("KS reference", stats.kstest(trace(r), law.cdf))
print("largest eigenvalue, two-sample KS", stats.ks_2samp(jacobi_eigh(s)[:, -1], jacobi_eigh(r)[:, -1]))
