"""
Tail-dependence functionals: the diagonal copula ``C(u, u)``, the lower tail
dependence function ``lambda_L(u) = C(u, u) / u`` and a tail-order regression.
"""

import math
from concurrent.futures import Executor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .numerics import QuadratureSpec
from .skew_gh import EquiSkewGHParams, SampleBatch, joint_log_cdf_diagonal, marginal_quantile
from .tail_asymptotics import compute_constants, copula_diag_asymptotic, quantile_asymptotic

__all__ = [
    "TailCurvePoint",
    "TailOrderFit",
    "InsufficientDataError",
    "copula_diag_exact",
    "tail_curve_point",
    "lambda_L_curve",
    "tail_order_fit",
    "empirical_copula_diag",
    "CURVE_COLUMNS",
]

CURVE_COLUMNS = (
    "u",
    "quantile_exact",
    "quantile_asymptotic",
    "log_C_exact",
    "log_C_asymptotic",
    "lambda_L",
    "ratio_log_gap",
)

# asymptotic columns are only filled below this level
ASYMPTOTIC_U_MAX = 0.1


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class TailCurvePoint:
    u: float
    quantile_exact: float
    quantile_asymptotic: float
    log_C_exact: float
    log_C_asymptotic: float
    lambda_L: float
    ratio_log_gap: float

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class TailOrderFit:
    tau_hat: float
    svf_exponent_hat: float
    intercept: float
    residual_max: float
    grid: tuple

    def as_dict(self):
        d = asdict(self)
        d["grid"] = list(self.grid)
        return d


def copula_diag_exact(u, params: EquiSkewGHParams, spec: QuadratureSpec | None = None) -> float:
    """
    ``log C(u, u)``: the joint diagonal CDF at the common ``u``-quantile.

    The margins coincide under equi-skewness, so one quantile serves both.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u!r}")
    return joint_log_cdf_diagonal(marginal_quantile(u, params, spec), params, spec)


def tail_curve_point(u, params: EquiSkewGHParams, spec: QuadratureSpec | None = None) -> TailCurvePoint:
    q = marginal_quantile(u, params, spec)
    log_c = joint_log_cdf_diagonal(q, params, spec)
    if u < ASYMPTOTIC_U_MAX:
        consts = compute_constants(params)
        q_asy = quantile_asymptotic(u, consts, params, warn=False)
        log_c_asy = copula_diag_asymptotic(u, consts, params, warn=False)
    else:
        q_asy = log_c_asy = math.nan
    return TailCurvePoint(
        u=float(u),
        quantile_exact=q,
        quantile_asymptotic=q_asy,
        log_C_exact=log_c,
        log_C_asymptotic=log_c_asy,
        lambda_L=math.exp(log_c - math.log(u)),
        ratio_log_gap=log_c - log_c_asy,
    )


def lambda_L_curve(
    u_grid,
    params: EquiSkewGHParams,
    spec: QuadratureSpec | None = None,
    executor: Executor | None = None,
) -> list[TailCurvePoint]:
    """
    Exact and asymptotic tail quantities on a strictly decreasing ``u`` grid.

    Points are independent; pass an ``executor`` to evaluate them
    concurrently.  Results always come back in grid order.  Asymptotic
    columns are NaN for ``u >= 0.1``.
    """
    grid = [float(u) for u in u_grid]
    if any(not 0.0 < u <= 0.5 for u in grid):
        raise ValueError("u grid values must lie in (0, 0.5]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("u grid must be strictly decreasing")
    if executor is None:
        return [tail_curve_point(u, params, spec) for u in grid]
    return list(executor.map(tail_curve_point, grid, [params] * len(grid), [spec] * len(grid)))


def tail_order_fit(curve, p=None) -> TailOrderFit:
    """
    Least squares ``log C(u,u) ~ tau log u + c log|log u| + d``.

    The ``log|log u|`` regressor absorbs the slowly varying factor, whose
    exact form is a power of ``|log u|``.  Needs at least four points with
    ``u <= 1e-4``.

    Parameters
    ----------
    curve : sequence of TailCurvePoint, or of ``(u, log_C)`` pairs
    p : float, optional
        Unused by the fit itself; accepted for interface symmetry with the
        closed-form exponent ``(p - 1)(1 - tau) - 1/2``.
    """
    del p
    rows = [(pt.u, pt.log_C_exact) if isinstance(pt, TailCurvePoint) else tuple(pt) for pt in curve]
    rows = [(u, lc) for u, lc in rows if u <= 1e-4]
    if len(rows) < 4:
        raise InsufficientDataError(f"need at least 4 points with u <= 1e-4, got {len(rows)}")
    u = np.array([r[0] for r in rows])
    y = np.array([r[1] for r in rows])
    lu = np.log(u)
    design = np.column_stack([lu, np.log(-lu), np.ones_like(lu)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return TailOrderFit(
        tau_hat=float(coef[0]),
        svf_exponent_hat=float(coef[1]),
        intercept=float(coef[2]),
        residual_max=float(np.max(np.abs(resid))),
        grid=tuple(float(v) for v in u),
    )


def empirical_copula_diag(batch: SampleBatch | np.ndarray, u: float) -> float:
    """
    Rank estimate of ``C(u, u)``: the fraction of pairs whose pseudo
    observations ``rank / n`` are both at most ``u``.  Ties get average ranks.
    """
    pairs = batch.pairs if isinstance(batch, SampleBatch) else np.asarray(batch, float)
    n = pairs.shape[0]
    if u * n < 20:
        raise InsufficientDataError(f"u * n = {u * n:g} < 20 expected tail points")
    r1 = rankdata(pairs[:, 0], method="average") / n
    r2 = rankdata(pairs[:, 1], method="average") / n
    # guard against u*n landing a hair below an integer rank
    level = u + 1e-12
    return float(np.count_nonzero((r1 <= level) & (r2 <= level)) / n)
