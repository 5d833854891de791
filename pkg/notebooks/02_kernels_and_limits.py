# %% [markdown]
# # Extended kernels and the Laguerre to Hermite limit
#
# Under `y -> sqrt(N g) y + N g t` the extended Laguerre kernel at times
# `g t, g s` converges to the extended Hermite kernel as `g -> infinity`.  The
# error decays like `g^(-1/2)`.  In the bulk, the Hermite kernel at large `N`
# is close to the sine kernel.

# %%
import math

import numpy as np

from lup import SpaceTimePoint as P, kernel_hermite, kernel_sine
from lup.airy import airy_ai, airy_ai_prime
from lup.kernels import kernel_airy
from lup.verify import SCALING_POINTS, check_universality, scaled_laguerre_kernel

# %% [markdown]
# Convergence table at the default scan points, both time orderings.

# %%
gammas = [1e2, 1e3, 1e4]
for N, points in SCALING_POINTS.items():
    for y, x, t, s in points:
        target = kernel_hermite(P(y, t), P(x, s), N, 1e-14)
        errs = [abs(scaled_laguerre_kernel(N, g, y, x, t, s) - target) for g in gammas]
        slope = np.polyfit(np.log(gammas), np.log(errs), 1)[0]
        print(f"N={N} (y,x,t,s)=({y},{x},{t},{s})  K_H={target:+.6f}  errors={np.array(errs)}  slope={slope:.3f}")

# %% [markdown]
# The origin at equal times is special: the leading correction is odd and
# vanishes there, so the error falls like `1/g`.

# %%
errs = [abs(scaled_laguerre_kernel(1, g, 0.0, 0.0, 1, 1) - 1 / math.sqrt(2 * math.pi)) for g in gammas]
print(errs)

# %% [markdown]
# Bulk universality at `N = 64`: gauged Hermite kernel against
# `sin(pi d) / (pi d)`.

# %%
rep = check_universality()
for row in rep.details["points"]:
    print(row)
print(rep.line())

# %% [markdown]
# Extended sine and Airy kernels: at equal times they reduce to the classical
# kernels; for `s > t` they pick up the negative tail integral.

# %%
for d in (0.0, 0.5, 1.0):
    print("sine", d, kernel_sine(P(d, 1.0), P(0.0, 1.0)), kernel_sine(P(d, 1.0), P(0.0, 1.5)))
y, x = 0.5, -0.3
cd = (airy_ai(y) * airy_ai_prime(x) - airy_ai_prime(y) * airy_ai(x)) / (y - x)
print("airy equal time", kernel_airy(P(y, 1.0), P(x, 1.0)), "classical", cd)
print("airy s > t", kernel_airy(P(y, 1.0), P(x, 4.0)))
