"""
Adaptive quadrature and bracketing root finding.

Both integrators share one vectorized Gauss-Kronrod (G10/K21) engine.  The
integrand is called with a 1-D array of abscissae and must return an array of
the same shape.  Half-infinite pieces are mapped onto ``[0, 1)`` with
``x = lo + t / (1 - t)`` (or its mirror image), so every integrand here is
assumed to decay at least exponentially in its tails.

``integrate_log`` never leaves the log domain: each interval estimate is a
log-sum-exp over the Kronrod nodes and intervals are combined with a
max-shifted sum, so integrals far below ``1e-300`` are still resolved.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

__all__ = [
    "QuadratureSpec",
    "RootSpec",
    "QuadratureError",
    "BracketError",
    "RootFindingError",
    "integrate",
    "integrate_log",
    "find_root",
    "expand_bracket",
    "log_mode_breakpoints",
]


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget runs out before the tolerance is met."""


class BracketError(ValueError):
    """Raised when a root bracket does not contain a sign change."""


class RootFindingError(RuntimeError):
    """Raised when the root finder fails to converge."""


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-10
    absolute_log_tolerance: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_log_tolerance > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


@dataclass(frozen=True)
class RootSpec:
    abscissa_tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if not self.abscissa_tolerance > 0:
            raise ValueError("abscissa_tolerance must be strictly positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()
DEFAULT_ROOT = RootSpec()

# QUADPACK qk21 abscissae/weights; odd indices are the 10-point Gauss nodes.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525883903,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full 21-node rule on [-1, 1].
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_gauss_half = np.zeros(10)
_gauss_half[1::2] = _WG
GAUSS_WEIGHTS = np.concatenate([_gauss_half, [0.0], _gauss_half[::-1]])
_LOG_WK = np.log(KRONROD_WEIGHTS)
with np.errstate(divide="ignore"):
    _LOG_WG = np.log(GAUSS_WEIGHTS)


class _Segment:
    """One piece of the integration domain with its map from t-space."""

    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi
        if np.isfinite(lo) and np.isfinite(hi):
            self.kind = "finite"
            self.t_range = (lo, hi)
        elif np.isfinite(lo):
            self.kind = "right"
            self.t_range = (0.0, 1.0)
        elif np.isfinite(hi):
            self.kind = "left"
            self.t_range = (0.0, 1.0)
        else:
            raise ValueError("segments must have at least one finite endpoint")

    def map(self, t):
        """Return abscissae and the log of the Jacobian for t-nodes."""
        if self.kind == "finite":
            return t, np.zeros_like(t)
        s = 1.0 - t
        with np.errstate(divide="ignore"):
            log_jac = -2.0 * np.log(s)
        if self.kind == "right":
            return self.lo + t / s, log_jac
        return self.hi - t / s, log_jac


def _split_domain(interval, points):
    lo, hi = float(interval[0]), float(interval[1])
    if np.isnan(lo) or np.isnan(hi):
        raise ValueError("interval endpoints must not be NaN")
    if not lo < hi:
        raise ValueError(f"empty or reversed interval ({lo}, {hi})")
    inner = sorted({float(p) for p in (points or ()) if lo < p < hi})
    if not np.isfinite(lo) and not np.isfinite(hi) and not inner:
        inner = [0.0]
    edges = [lo] + inner + [hi]
    return [_Segment(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _initial_intervals(segments):
    seg_ids, lefts, rights = [], [], []
    for k, seg in enumerate(segments):
        if seg.kind == "finite":
            cuts = [seg.lo, seg.hi]
        else:
            # a few fixed cuts so one GK panel never has to see the whole tail
            cuts = [0.0, 0.5, 0.8, 0.95, 1.0]
        for a, b in zip(cuts[:-1], cuts[1:]):
            seg_ids.append(k)
            lefts.append(a)
            rights.append(b)
    return np.array(seg_ids), np.array(lefts, float), np.array(rights, float)


def _evaluate(func, segments, seg_ids, lefts, rights, log_mode):
    """Kronrod and Gauss estimates (plain or log) for a batch of intervals."""
    half = 0.5 * (rights - lefts)
    mid = 0.5 * (rights + lefts)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    x = np.empty_like(t)
    log_jac = np.empty_like(t)
    for k, seg in enumerate(segments):
        rows = seg_ids == k
        if np.any(rows):
            x[rows], log_jac[rows] = seg.map(t[rows])
    # deep subdivision next to t = 1 can round a node onto x = +-inf, where a
    # convergent integrand has no mass
    at_inf = np.isinf(x)
    if np.any(at_inf):
        x[at_inf] = np.where(x[at_inf] > 0, np.finfo(float).max, -np.finfo(float).max)
        log_jac[at_inf] = 0.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
    if np.any(at_inf):
        vals[at_inf] = -np.inf if log_mode else 0.0
    if np.any(np.isnan(vals)):
        bad = x[np.isnan(vals)][0]
        raise QuadratureError(f"integrand returned NaN at x={bad!r}")
    if log_mode:
        # a zero-width interval (coincident breakpoints) contributes exp(-inf) = 0
        with np.errstate(divide="ignore"):
            lv = vals + log_jac + np.log(half)[:, None]
        k_est = logsumexp(lv + _LOG_WK[None, :], axis=1)
        g_est = logsumexp(lv + _LOG_WG[None, :], axis=1)
        return k_est, g_est
    v = vals * np.exp(log_jac) * half[:, None]
    return v @ KRONROD_WEIGHTS, v @ GAUSS_WEIGHTS


def _adaptive(func, interval, spec, points, log_mode):
    spec = spec or DEFAULT_QUADRATURE
    segments = _split_domain(interval, points)
    seg_ids, lefts, rights = _initial_intervals(segments)
    k_est, g_est = _evaluate(func, segments, seg_ids, lefts, rights, log_mode)
    tiny = 64 * np.finfo(float).eps

    while True:
        if log_mode:
            shift = np.max(k_est)
            if shift == -np.inf:
                return -np.inf, 0.0
            kk = np.exp(k_est - shift)
            err = np.abs(kk - np.exp(g_est - shift))
            total = kk.sum()
            rel_err = err.sum() / total
            target = min(spec.relative_tolerance, spec.absolute_log_tolerance)
            done = rel_err <= target
            share = target * total / len(kk)
        else:
            err = np.abs(k_est - g_est)
            total = np.abs(k_est.sum())
            tol = spec.relative_tolerance * max(total, np.abs(k_est).sum() * tiny)
            done = err.sum() <= tol
            rel_err = err.sum()
            share = tol / len(k_est)
        if done:
            break
        width = rights - lefts
        splittable = width > tiny * np.maximum(np.abs(lefts), np.abs(rights)).clip(min=1e-300)
        split = (err > share) & splittable
        if not np.any(split):
            break
        if len(k_est) + np.count_nonzero(split) > spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence within {spec.max_subdivisions} subdivisions "
                f"on {tuple(interval)} (error estimate {rel_err:.3g})"
            )
        keep = ~split
        mids = 0.5 * (lefts[split] + rights[split])
        new_ids = np.concatenate([seg_ids[split], seg_ids[split]])
        new_l = np.concatenate([lefts[split], mids])
        new_r = np.concatenate([mids, rights[split]])
        nk, ng = _evaluate(func, segments, new_ids, new_l, new_r, log_mode)
        seg_ids = np.concatenate([seg_ids[keep], new_ids])
        lefts = np.concatenate([lefts[keep], new_l])
        rights = np.concatenate([rights[keep], new_r])
        k_est = np.concatenate([k_est[keep], nk])
        g_est = np.concatenate([g_est[keep], ng])

    if log_mode:
        return float(shift + np.log(total)), float(rel_err)
    return float(k_est.sum()), float(rel_err)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
    full_output: bool = False,
):
    """
    Integrate a vectorized function over a (possibly infinite) interval.

    Parameters
    ----------
    f : callable
        Maps an array of abscissae to an array of integrand values.
    interval : (lo, hi)
        Either endpoint may be infinite.
    spec : QuadratureSpec, optional
    points : sequence of float, optional
        Interior breakpoints (kinks, singularities, the location of a peak).
    full_output : bool
        Also return the absolute error estimate.

    Raises
    ------
    QuadratureError
        If ``spec.max_subdivisions`` intervals do not reach the tolerance.
    """
    value, err = _adaptive(f, interval, spec, points, log_mode=False)
    return (value, err) if full_output else value


def integrate_log(
    log_f: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
    full_output: bool = False,
):
    """
    Return ``log(integral of exp(log_f))`` without leaving the log domain.

    ``log_f`` may return ``-inf`` where the integrand vanishes.  The error
    estimate returned with ``full_output`` is relative, i.e. an absolute
    error in the log.  Convergence requires both tolerances of ``spec``.
    """
    value, err = _adaptive(log_f, interval, spec, points, log_mode=True)
    return (value, err) if full_output else value


def log_mode_breakpoints(log_f, grid, width=4):
    """
    Breakpoints bracketing the peak of ``log_f`` on a coarse grid.

    Returns the grid points ``width`` steps either side of the maximum and
    the maximum itself; the adaptive integrator then starts with the peak
    isolated instead of having to discover it.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(log_f(grid), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    if not np.any(np.isfinite(vals)):
        return []
    k = int(np.argmax(vals))
    idx = {max(k - width, 0), k, min(k + width, len(grid) - 1)}
    return sorted(float(grid[i]) for i in idx)


def find_root(
    g: Callable[[float], float],
    bracket: tuple[float, float],
    spec: RootSpec | None = None,
) -> float:
    """
    Root of a monotone function on a sign-changing bracket.

    Brent's method (bisection-safeguarded inverse quadratic interpolation).
    """
    spec = spec or DEFAULT_ROOT
    lo, hi = float(bracket[0]), float(bracket[1])
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if np.isnan(g_lo) or np.isnan(g_hi) or np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={g_lo!r}, {g_hi!r}")
    try:
        root, info = optimize.brentq(
            g, lo, hi,
            xtol=spec.abscissa_tolerance,
            rtol=4 * np.finfo(float).eps,
            maxiter=spec.max_iterations,
            full_output=True,
            disp=False,
        )
    except ValueError as exc:
        raise BracketError(str(exc)) from exc
    if not info.converged:
        raise RootFindingError(f"no convergence after {info.iterations} iterations")
    return float(root)


def expand_bracket(g, x0, step=1.0, factor=2.0, max_expansions=200):
    """
    Grow ``[x0 - step, x0 + step]`` geometrically until ``g`` changes sign.

    ``g`` is assumed increasing, so only the side that can contain the root
    is expanded.
    """
    lo, hi = x0 - step, x0 + step
    g_lo, g_hi = g(lo), g(hi)
    for _ in range(max_expansions):
        if g_lo <= 0.0 <= g_hi:
            return lo, hi
        if g_lo > 0.0:
            hi, g_hi = lo, g_lo
            step *= factor
            lo = lo - step
            g_lo = g(lo)
        else:
            lo, g_lo = hi, g_hi
            step *= factor
            hi = hi + step
            g_hi = g(hi)
    raise BracketError(
        f"no sign change found after {max_expansions} expansions from x0={x0}"
    )
