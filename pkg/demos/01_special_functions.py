# %% [markdown]
# # Log-domain Bessel K and the skew normal lower tail
#
# Everything downstream is built from two special functions.  Both are
# evaluated in the log domain so that deep-tail values stay representable.

# %%
import numpy as np
from scipy import special

from vgtail.skew_gh import log_skew_normal_cdf
from vgtail.special_fn import log_bessel_k

# %% [markdown]
# `kve` returns `K_p(x) e^x`, so `log kve - x` is fine until `kve` itself
# overflows (huge order, tiny argument).  There the integral representation
# `K_p(x) = int_0^inf exp(-x cosh t) cosh(p t) dt` takes over.

# %%
for p, x in [(0.5, 2.0), (1.0, 1.0), (50.0, 1e-10), (200.0, 1e-3), (3.0, 800.0)]:
    with np.errstate(divide="ignore"):
        naive = np.log(special.kv(p, x))
    print(f"p={p:6.1f} x={x:8.1e}   log K = {log_bessel_k(p, x): .12e}   log(kv) = {naive: .6e}")

# %% [markdown]
# The skew normal CDF `F_SN(t; alpha) = Phi(t) - 2 T(t, alpha)` cancels
# catastrophically for negative `t`.  Rewriting it as a positive integral
# keeps full relative accuracy down to `t = -300`.

# %%
with np.errstate(divide="ignore"):
    for t in (-2.0, -8.0, -20.0, -40.0, -300.0):
        plain = special.ndtr(t) - 2 * special.owens_t(t, 1.0)
        print(f"t={t:7.1f}   log F_SN = {log_skew_normal_cdf(t, 1.0): .10e}   plain form = {plain:.3e}")
