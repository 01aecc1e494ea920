# %% [markdown]
# # Sampling the GIG mixing law
#
# Three regimes: `a = 0` is a gamma law, `b = 0` an inverse gamma law, and
# `a, b > 0` goes through a ratio-of-uniforms rejection sampler.

# %%
import numpy as np
from scipy import stats

from vgtail.gig import GIGParams, gig_mean, gig_sample, gig_variance

n = 200_000
cases = [GIGParams(0.5, 0.0, np.sqrt(2.0)), GIGParams(0.5, 1.0, 1.0), GIGParams(2.5, 1.0, 1.0),
         GIGParams(-1.7, 1.2, 0.4), GIGParams(-1.5, 1.2, 0.0)]

# %%
print(f"{'p':>6} {'a':>5} {'b':>5} | {'sample mean':>12} {'E[W]':>10} {'z':>6} | {'KS':>7}")
for prm in cases:
    w = gig_sample(prm, n, seed=1)
    if prm.a == 0:
        ref = stats.gamma(prm.p, scale=2 / prm.b**2)
    elif prm.b == 0:
        ref = stats.invgamma(-prm.p, scale=prm.a**2 / 2)
    else:
        ref = stats.geninvgauss(prm.p, prm.a * prm.b, scale=prm.a / prm.b)
    ks = stats.kstest(w, ref.cdf).statistic
    try:
        m = gig_mean(prm)
        z = (w.mean() - m) / np.sqrt(gig_variance(prm) / n)
    except ValueError:
        m, z = np.inf, np.nan
    print(f"{prm.p:6.2f} {prm.a:5.2f} {prm.b:5.2f} | {w.mean():12.5f} {m:10.5f} {z:6.2f} | {ks:7.5f}")
print(f"KS critical value at 0.1%: {1.95 / np.sqrt(n):.5f}")
