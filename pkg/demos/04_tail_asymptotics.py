# %% [markdown]
# # Closed-form tails against exact numerics
#
# The margin decays like `A |x|^(p-1) e^(-delta |x|)` and the joint diagonal
# like `K |y|^(p-3/2) e^(-(phi_alpha + theta)|y|)`.  Both relative errors
# should halve when `|x|` doubles.

# %%
import math

from vgtail.skew_gh import EquiSkewGHParams, joint_log_cdf_diagonal, marginal_log_cdf
from vgtail.tail_asymptotics import (
    compute_constants,
    joint_log_cdf_diagonal_asymptotic,
    marginal_log_cdf_asymptotic,
)

prm = EquiSkewGHParams.gh(p=-0.5, a=1.0, b=1.5, theta=0.3, rho=0.5)
consts = compute_constants(prm)
for key, val in consts.as_dict().items():
    if not key.startswith("log_"):
        print(f"{key:>14} = {val:.12g}")

# %%
print(f"\n{'x':>6} | {'marginal ratio - 1':>19} | {'joint ratio - 1':>16}")
for x in (-10.0, -20.0, -40.0, -80.0, -160.0):
    m = math.expm1(marginal_log_cdf_asymptotic(x, consts, prm) - marginal_log_cdf(x, prm))
    j = math.expm1(joint_log_cdf_diagonal_asymptotic(x, consts, prm) - joint_log_cdf_diagonal(x, prm))
    print(f"{x:6.0f} | {m:19.6f} | {j:16.6f}")
