"""
Lower-tail dependence of the bivariate equi-skew generalized hyperbolic and
variance gamma distributions: exact log-domain numerics next to the
closed-form tail-order asymptotics ``C(u, u) = u^tau L(u)``.
"""

__version__ = "0.1.0"

from .gig import GIGParams, ParameterError, gig_log_pdf, gig_mean, gig_sample, kbar, log_kbar
from .skew_gh import (
    EquiSkewGHParams,
    SampleBatch,
    joint_log_cdf_diagonal,
    marginal_log_cdf,
    marginal_log_pdf,
    marginal_quantile,
    sample_bivariate,
    xstar_log_cdf,
    xstar_log_pdf,
)
from .tail_asymptotics import AsymptoticConstants, compute_constants, copula_diag_asymptotic
from .dependence import (
    TailCurvePoint,
    TailOrderFit,
    copula_diag_exact,
    empirical_copula_diag,
    lambda_L_curve,
    tail_order_fit,
)
