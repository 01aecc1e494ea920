"""
Closed-form lower-tail asymptotics of the equi-skew GH model.

As ``y -> -inf`` (all ``1 + O(1/|y|)``)::

    F_1(y)               ~ A |y|^(p-1) exp(-delta |y|)
    P(X1<=y, X2<=y)      ~ K |y|^(p-3/2) exp(-(phi_alpha + theta) |y|)

with ``K = theta_tilde_0 / (sqrt(2 pi) Kbar_p(a,b) beta^(p-1/2) (phi_alpha + theta))``.
Composing the second with the quantile expansion of the first gives the
diagonal copula ``C(u, u) = u^tau L(u)`` with

    L(u) ~ C1 C2 |log u|^((p-1)(1-tau) - 1/2).

All CDF-like outputs are logs.
"""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .gig import log_kbar
from .numerics import QuadratureSpec, integrate_log
from .skew_gh import EquiSkewGHParams

__all__ = [
    "AsymptoticConstants",
    "InvariantViolation",
    "AsymptoticRegimeWarning",
    "compute_constants",
    "phi",
    "phi_prime",
    "exp_tail_integral_leading",
    "marginal_log_cdf_asymptotic",
    "quantile_asymptotic",
    "joint_log_cdf_diagonal_asymptotic",
    "svf_L",
    "log_svf_L",
    "svf_exponent",
    "copula_diag_asymptotic",
    "boundary_laplace_log_integral",
    "boundary_laplace_log_leading",
]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class InvariantViolation(ArithmeticError):
    """A closed-form constant broke an identity it must satisfy."""


class AsymptoticRegimeWarning(UserWarning):
    """An asymptotic formula was evaluated at a moderate argument."""


@dataclass(frozen=True)
class AsymptoticConstants:
    alpha: float
    beta: float
    phi_alpha: float
    theta_tilde_0: float
    A: float
    gamma: float
    delta: float
    tau: float
    C1: float
    C2: float
    log_A: float
    log_C1: float
    log_C2: float

    def as_dict(self):
        return asdict(self)


def _check(cond, what):
    if not cond:
        raise InvariantViolation(what)


def compute_constants(params: EquiSkewGHParams) -> AsymptoticConstants:
    """
    Every constant of the tail expansion for ``params``.

    ``C1`` is grouped so that ``C1 C2 |log u|^(...)`` reproduces the product
    of the joint tail prefactor ``K`` and the quantile substitution exactly:
    ``C1 = (1+alpha^2)^((p-3/2)/2) / (sqrt(2 pi) Kbar_p beta^(p-1/2) alpha
    gamma^2 delta^(p-3/2))``.  Logs of ``A``, ``C1``, ``C2`` are kept as well
    since ``C2 = A^-tau delta^((p-1) tau)`` can be huge.
    """
    p, a, b, th = params.p, params.a, params.b, params.theta
    al = params.alpha
    s = math.sqrt(1.0 + al * al)
    beta = math.sqrt(th * th * s * s + b * b)
    phi_alpha = beta * s + al * al * th
    gamma = beta + s * th
    b1 = math.sqrt(th * th + b * b)
    delta = b1 + th
    tau = s * gamma / delta
    theta_tilde_0 = s ** (p - 0.5) / (al * gamma)
    log_kp = log_kbar(p, a, b)
    log_A = -(math.log(2.0) + log_kp + p * math.log(b1) + math.log(delta))
    log_C1 = ((p - 1.5) * math.log(s) - LOG_SQRT_2PI - log_kp - (p - 0.5) * math.log(beta)
              - math.log(al) - 2.0 * math.log(gamma) - (p - 1.5) * math.log(delta))
    log_C2 = -tau * log_A + (p - 1.0) * tau * math.log(delta)

    _check(phi_alpha > abs(th) and phi_alpha + th > 0, "phi(alpha) > |theta| and phi(alpha) + theta > 0")
    _check(delta > 0, "delta > 0")
    _check(gamma > 0, "gamma > 0")
    _check(math.isclose(s * gamma, phi_alpha + th, rel_tol=1e-12), "sqrt(1+alpha^2) gamma = phi(alpha) + theta")
    _check(tau > 1.0, f"tau > 1 (got {tau!r})")
    return AsymptoticConstants(
        alpha=al, beta=beta, phi_alpha=phi_alpha, theta_tilde_0=theta_tilde_0,
        A=math.exp(log_A), gamma=gamma, delta=delta, tau=tau,
        C1=math.exp(log_C1), C2=math.exp(log_C2),
        log_A=log_A, log_C1=log_C1, log_C2=log_C2,
    )


def _beta(params):
    th = params.theta
    return math.sqrt(th * th * (1.0 + params.alpha ** 2) + params.b ** 2)


def _check_phi_domain(s, x_abs, params):
    s = np.asarray(s, float)
    if np.any(s < params.alpha * (1.0 - 1e-12)):
        raise ValueError(f"phi is defined for s >= alpha = {params.alpha}")
    if not x_abs > 0:
        raise ValueError("x_abs must be positive")
    if params.a > 0 and not x_abs > abs(params.theta * params.a) / params.b:
        raise ValueError(
            f"phi' > 0 needs |x| > |theta a| / b = {abs(params.theta * params.a) / params.b}"
        )
    return s


def phi(s, x_abs, params: EquiSkewGHParams):
    """``beta sqrt(1 + a^2/x^2 + s^2) + alpha theta s``."""
    s = _check_phi_domain(s, x_abs, params)
    r = np.sqrt(1.0 + (params.a / x_abs) ** 2 + s * s)
    out = _beta(params) * r + params.alpha * params.theta * s
    return out if np.ndim(out) else float(out)


def phi_prime(s, x_abs, params: EquiSkewGHParams):
    """``d phi / d s = beta s / sqrt(1 + a^2/x^2 + s^2) + alpha theta``."""
    s = _check_phi_domain(s, x_abs, params)
    r = np.sqrt(1.0 + (params.a / x_abs) ** 2 + s * s)
    out = _beta(params) * s / r + params.alpha * params.theta
    return out if np.ndim(out) else float(out)


def exp_tail_integral_leading(s, alpha_exp, beta_rate):
    """
    Log of ``s^(alpha-1) e^(-beta s) / beta``, the leading term of
    ``int_s^inf y^(alpha-1) e^(-beta y) dy`` as ``s -> inf``.
    """
    if not (s > 0 and beta_rate > 0):
        raise ValueError("need s > 0 and beta_rate > 0")
    return (alpha_exp - 1.0) * math.log(s) - beta_rate * s - math.log(beta_rate)


def _regime_warning(cond, msg, warn):
    if warn and cond:
        warnings.warn(msg, AsymptoticRegimeWarning, stacklevel=3)


def marginal_log_cdf_asymptotic(x, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    """``log[A |x|^(p-1) e^(-delta |x|)]`` for ``x < 0``."""
    if not x < 0:
        raise ValueError("the marginal tail expansion needs x < 0")
    _regime_warning(x > -5, f"x={x} is outside the asymptotic regime", warn)
    ax = -x
    return consts.log_A + (params.p - 1.0) * math.log(ax) - consts.delta * ax


def _check_u(u, warn):
    if not 0.0 < u < 0.1:
        raise ValueError(f"asymptotic formulas need 0 < u < 0.1, got u={u!r}")
    _regime_warning(u > 1e-3, f"u={u} is outside the asymptotic regime", warn)


def quantile_asymptotic(u, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    """
    Tail quantile expansion::

        [log u - (p-1) log|log u| - log A + (p-1) log delta] / delta

    This is the generalized-gamma tail inversion with the
    ``(p-1) log(A^(1/(p-1)) / delta)`` group expanded, so ``p = 1`` is fine.
    """
    _check_u(u, warn)
    lu = math.log(u)
    pm1 = params.p - 1.0
    return (lu - pm1 * math.log(-lu) - consts.log_A + pm1 * math.log(consts.delta)) / consts.delta


def joint_log_cdf_diagonal_asymptotic(y, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    """
    ``log P(X1 <= y, X2 <= y)`` to leading order as ``y -> -inf``::

        theta_tilde_0 / (sqrt(2 pi) Kbar_p(a, b) beta^(p-1/2) (phi_alpha + theta))
            * |y|^(p-3/2) exp(-|y| (phi_alpha + theta))
    """
    if not y < 0:
        raise ValueError("the joint tail expansion needs y < 0")
    _regime_warning(y > -5, f"y={y} is outside the asymptotic regime", warn)
    p = params.p
    rate = consts.phi_alpha + params.theta
    ay = -y
    return (math.log(consts.theta_tilde_0) - LOG_SQRT_2PI - log_kbar(p, params.a, params.b)
            - (p - 0.5) * math.log(consts.beta) - math.log(rate)
            + (p - 1.5) * math.log(ay) - rate * ay)


def svf_exponent(consts: AsymptoticConstants, params: EquiSkewGHParams) -> float:
    """Exponent of ``|log u|`` in ``L(u)``: ``(p-1)(1-tau) - 1/2``."""
    return (params.p - 1.0) * (1.0 - consts.tau) - 0.5


def log_svf_L(u, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    _check_u(u, warn)
    return consts.log_C1 + consts.log_C2 + svf_exponent(consts, params) * math.log(-math.log(u))


def svf_L(u, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    """Slowly varying factor ``L(u) = C1 C2 |log u|^((p-1)(1-tau) - 1/2)``."""
    return math.exp(log_svf_L(u, consts, params, warn))


def copula_diag_asymptotic(u, consts: AsymptoticConstants, params: EquiSkewGHParams, warn=True):
    """``log C(u, u) = tau log u + log L(u)``."""
    return consts.tau * math.log(u) + log_svf_L(u, consts, params, warn)


# --- boundary Laplace integral ---------------------------------------------


def boundary_laplace_log_integral(x_abs, params: EquiSkewGHParams, spec: QuadratureSpec | None = None):
    """
    Log of ``|x|^(p-1/2) int_alpha^inf (1 + a^2/x^2 + s^2)^((p-3/2)/2) e^(-|x| phi(s)) ds``
    by direct quadrature.
    """
    p, a, al = params.p, params.a, params.alpha
    beta = _beta(params)
    c = 1.0 + (a / x_abs) ** 2

    def log_f(s):
        r2 = c + s * s
        return 0.5 * (p - 1.5) * np.log(r2) - x_abs * (beta * np.sqrt(r2) + al * params.theta * s)

    # the integrand decays on the scale 1/(|x| phi'(alpha)) away from s = alpha
    scale = 1.0 / (x_abs * max(phi_prime(al, x_abs, params), 1e-300))
    pts = [al + k * scale for k in (1.0, 10.0, 100.0)]
    return (p - 0.5) * math.log(x_abs) + integrate_log(log_f, (al, np.inf), spec, points=pts)


def boundary_laplace_log_leading(x_abs, consts: AsymptoticConstants, params: EquiSkewGHParams):
    """Log of ``theta_tilde_0 |x|^(p-3/2) e^(-|x| phi_alpha)``."""
    return math.log(consts.theta_tilde_0) + (params.p - 1.5) * math.log(x_abs) - x_abs * consts.phi_alpha
