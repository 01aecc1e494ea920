# %% [markdown]
# # Two routes to the joint diagonal CDF
#
# With a common skewness `theta`, `P(X1 <= y, X2 <= y) = P(X* <= y)` where
# `X* = theta W + sqrt(W) max(Z1, Z2)` and `max(Z1, Z2)` is skew normal with
# `alpha = sqrt((1 - rho)/(1 + rho))`.  One route mixes skew normal CDFs over
# the GIG law; the other integrates the density of `X*`.  A Monte Carlo
# sample provides a third opinion at moderate levels.

# %%
import math

import numpy as np

from vgtail.skew_gh import EquiSkewGHParams, joint_log_cdf_diagonal, sample_bivariate, xstar_log_cdf

prm = EquiSkewGHParams.vg(nu=1.0, theta=0.3, rho=0.5)
n = 2_000_000
pairs = sample_bivariate(prm, n, seed=2026).pairs
hi = pairs.max(axis=1)

# %%
print(f"{'y':>6} | {'log P mixture':>16} {'log P via X*':>16} {'rel diff':>9} | {'MC':>10} {'z':>6}")
for y in (1.0, 0.0, -1.0, -2.0, -3.0, -5.0, -10.0, -30.0):
    lm = joint_log_cdf_diagonal(y, prm)
    lx = xstar_log_cdf(y, prm)
    p = math.exp(lm)
    est = np.count_nonzero(hi <= y) / n
    z = (est - p) / math.sqrt(p * (1 - p) / n)
    print(f"{y:6.1f} | {lm:16.10f} {lx:16.10f} {abs(math.expm1(lx - lm)):9.1e} | {est:10.3e} {z:6.2f}")
