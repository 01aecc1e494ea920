"""
Exact (non-asymptotic) computations for the bivariate equi-skew GH model

    X = theta * W * (1, 1) + sqrt(W) * Z,   W ~ GIG(p, a, b),  Z ~ N(0, R),

with unit variances and correlation ``rho`` in ``R``.

Because both coordinates share ``theta``, the diagonal joint CDF reduces to a
one-dimensional problem: ``max(Z1, Z2)`` is skew normal with shape
``alpha = sqrt((1 - rho) / (1 + rho))``, so

    P(X1 <= y, X2 <= y) = E_W[ F_SN((y - theta W) / sqrt(W); alpha) ]
                        = P(X* <= y),   X* = theta W + sqrt(W) max(Z1, Z2).

Both sides are computed here by independent quadratures.  All CDF-like
quantities are returned as logs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .gig import GIGParams, GIGSampler, ParameterError, _log_kbar, gig_log_pdf, gig_mean
from .numerics import (
    QuadratureSpec,
    RootSpec,
    expand_bracket,
    find_root,
    integrate,
    integrate_log,
    log_mode_breakpoints,
)
from .special_fn import LOG_2PI, owen_t

__all__ = [
    "EquiSkewGHParams",
    "SampleBatch",
    "alpha_from_rho",
    "skew_normal_cdf",
    "log_skew_normal_cdf",
    "bivariate_normal_cdf",
    "marginal_log_pdf",
    "marginal_log_cdf",
    "marginal_quantile",
    "xstar_log_pdf",
    "xstar_log_cdf",
    "joint_log_cdf_diagonal",
    "joint_cdf",
    "sample_bivariate",
]

RHO_MARGIN = 1e-6
_LOG_PI = math.log(math.pi)


def alpha_from_rho(rho: float) -> float:
    """Skew-normal shape of ``max(Z1, Z2)``: ``sqrt((1 - rho) / (1 + rho))``."""
    if not -1.0 < rho < 1.0:
        raise ParameterError(f"correlation must satisfy -1 < rho < 1, got {rho!r}")
    return math.sqrt((1.0 - rho) / (1.0 + rho))


@dataclass(frozen=True)
class EquiSkewGHParams:
    """
    Bivariate equi-skew GH model ``GH(0, R, (theta, theta), p, a, b)``.

    Requires ``b > 0`` and ``|rho| < 1 - 1e-6``.
    """

    gig: GIGParams
    theta: float
    rho: float
    alpha: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.rho)):
            raise ParameterError("theta and rho must be finite")
        if not self.gig.b > 0:
            raise ParameterError(f"the equi-skew model requires b > 0, got b={self.gig.b}")
        if not -1.0 + RHO_MARGIN < self.rho < 1.0 - RHO_MARGIN:
            raise ParameterError(
                f"correlation must satisfy |rho| < 1 - {RHO_MARGIN:g}, got rho={self.rho}"
            )
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "alpha", alpha_from_rho(self.rho))

    @classmethod
    def gh(cls, p, a, b, theta, rho):
        return cls(GIGParams(p, a, b), theta, rho)

    @classmethod
    def vg(cls, nu, theta, rho):
        """VG special case ``a = 0, b = sqrt(2/nu), p = 1/2``."""
        return cls(GIGParams.vg(nu), theta, rho)

    @property
    def p(self):
        return self.gig.p

    @property
    def a(self):
        return self.gig.a

    @property
    def b(self):
        return self.gig.b


@dataclass(frozen=True)
class SampleBatch:
    pairs: np.ndarray
    seed: int
    n: int
    params: EquiSkewGHParams

    def __post_init__(self):
        if self.pairs.shape != (self.n, 2):
            raise ValueError(f"pairs has shape {self.pairs.shape}, expected ({self.n}, 2)")


# --- skew normal CDF -------------------------------------------------------

_LAG_X, _LAG_W = np.polynomial.laguerre.laggauss(64)
_gl_x, _gl_w = np.polynomial.legendre.leggauss(32)
# four Gauss-Legendre panels covering [0, 12]
_PANEL_Y = np.concatenate([1.5 * (_gl_x + 1.0) + 3.0 * k for k in range(4)])
_PANEL_W = np.concatenate([1.5 * _gl_w] * 4)


def _log_sn_lower(t, alpha):
    """
    ``log F_SN(t; alpha)`` for ``t < 0``, ``alpha > 0`` without cancellation.

    Uses ``F_SN(t; alpha) = exp(-t^2/2) / pi * I`` where
    ``I = int_alpha^inf exp(-t^2 x^2 / 2) / (1 + x^2) dx`` has a positive
    integrand.  ``alpha |t| > 3``: substitute ``x^2 = alpha^2 + 2v/t^2`` and
    use 64-point Gauss-Laguerre.  Otherwise, for ``|t| >= 1``, ``x = y/|t|``
    and a panelled Gauss-Legendre rule on ``y - alpha|t| in [0, 12]``.
    Shallow points (``|t| < 1``) use Owen's T directly.
    """
    out = np.empty_like(t)
    c = alpha * np.abs(t)
    deep = c > 3.0
    mid = ~deep & (t <= -1.0)
    shallow = ~(deep | mid)
    if np.any(deep):
        td = t[deep]
        x = np.sqrt(alpha * alpha + 2.0 * _LAG_X[None, :] / np.square(td)[:, None])
        g = 1.0 / (x * (1.0 + x * x))
        out[deep] = (-0.5 * td * td * (1.0 + alpha * alpha) - _LOG_PI
                     - 2.0 * np.log(-td) + np.log(g @ _LAG_W))
    if np.any(mid):
        tm = -t[mid]
        cm = c[mid][:, None]
        y = cm + _PANEL_Y[None, :]
        f = np.exp(-0.5 * _PANEL_Y[None, :] * (y + cm)) * (tm[:, None] / (tm[:, None] ** 2 + y * y))
        out[mid] = -0.5 * tm * tm * (1.0 + alpha * alpha) - _LOG_PI + np.log(f @ _PANEL_W)
    if np.any(shallow):
        ts = t[shallow]
        out[shallow] = np.log(sc.ndtr(ts) - 2.0 * sc.owens_t(ts, alpha))
    return out


def log_skew_normal_cdf(t, alpha):
    """
    Log CDF of the skew normal law with shape ``alpha``, density
    ``2 phi(z) Phi(alpha z)``; accurate far into the lower tail.
    """
    t = np.asarray(t, float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t).astype(float)
    alpha = float(alpha)
    if alpha == 0.0:
        out = sc.log_ndtr(t)
    elif alpha > 0.0:
        out = np.empty_like(t)
        neg = t < 0
        if np.any(neg):
            out[neg] = _log_sn_lower(t[neg], alpha)
        pos = ~neg
        if np.any(pos):
            tp = t[pos]
            out[pos] = np.log1p(-(sc.ndtr(-tp) + 2.0 * sc.owens_t(tp, alpha)))
    else:
        # F(t; alpha) = 1 - F(-t; -alpha)
        out = np.empty_like(t)
        pos = t >= 0
        if np.any(pos):
            out[pos] = np.log1p(-np.exp(log_skew_normal_cdf(-t[pos], -alpha)))
        neg = ~pos
        if np.any(neg):
            s = -t[neg]
            with np.errstate(divide="ignore"):
                out[neg] = np.log(sc.ndtr(-s) + 2.0 * sc.owens_t(s, -alpha))
    return float(out[0]) if scalar else out


def skew_normal_cdf(t, alpha):
    """``F_SN(t; alpha) = Phi(t) - 2 T(t, alpha)``."""
    t = np.asarray(t, float)
    out = sc.ndtr(t) - 2.0 * owen_t(t, alpha)
    return out if np.ndim(out) else float(out)


def bivariate_normal_cdf(h, k, rho):
    """
    ``P(Z1 <= h, Z2 <= k)`` for standard normals with correlation ``rho``,
    via Owen's T.  Plain (not log) domain.
    """
    h, k = np.broadcast_arrays(np.asarray(h, float), np.asarray(k, float))
    h = np.where(h == 0.0, 1e-300, h)
    k = np.where(k == 0.0, 1e-300, k)
    s = math.sqrt(1.0 - rho * rho)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        ah = (k - rho * h) / (h * s)
        ak = (h - rho * k) / (k * s)
    ah = np.nan_to_num(ah, nan=0.0)
    ak = np.nan_to_num(ak, nan=0.0)
    # compare signs rather than h * k, which underflows for the nudged zeros
    corr = np.where((h > 0) == (k > 0), 0.0, 0.5)
    out = 0.5 * (sc.ndtr(h) + sc.ndtr(k)) - sc.owens_t(h, ah) - sc.owens_t(k, ak) - corr
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


# --- marginal law ----------------------------------------------------------


def marginal_log_pdf(x, params: EquiSkewGHParams):
    """
    Log density of each margin ``X_i = theta W + sqrt(W) Z_i``::

        theta x - log(2 pi)/2 - log Kbar_p(a, b)
            + log Kbar_{p-1/2}(sqrt(x^2 + a^2), sqrt(theta^2 + b^2))

    With ``a = 0`` and ``p <= 1/2`` the density is unbounded at ``x = 0``;
    there ``+inf`` is returned (integrable singularity).
    """
    x = np.asarray(x, float)
    p, a, b, th = params.p, params.a, params.b, params.theta
    out = (th * x - 0.5 * LOG_2PI - _log_kbar(p, a, b)
           + _log_kbar(p - 0.5, np.sqrt(x * x + a * a), math.sqrt(th * th + b * b)))
    return out if np.ndim(out) else float(out)


def _singular_points(params, lo, hi):
    return [0.0] if params.a == 0 and lo < 0.0 < hi else []


def marginal_log_cdf(x, params: EquiSkewGHParams, spec: QuadratureSpec | None = None):
    """
    ``log F_1(x)`` by log-domain quadrature of the marginal density.

    Points above the mean are computed as ``log(1 - upper tail)`` so that
    both tails keep full relative accuracy.
    """
    x = float(x)
    if x == np.inf:
        return 0.0
    if x == -np.inf:
        return -np.inf

    def log_f(t):
        return marginal_log_pdf(t, params)

    mean = params.theta * gig_mean(params.gig)
    if x <= mean:
        pts = _singular_points(params, -np.inf, x)
        return integrate_log(log_f, (-np.inf, x), spec, points=pts)
    pts = _singular_points(params, x, np.inf)
    log_upper = integrate_log(log_f, (x, np.inf), spec, points=pts)
    return float(np.log1p(-np.exp(log_upper)))


def marginal_quantile(
    u,
    params: EquiSkewGHParams,
    spec: QuadratureSpec | None = None,
    root_spec: RootSpec | None = None,
) -> float:
    """
    ``F_1^{-1}(u)`` by bracketed root finding on ``log F_1(x) - log u``.

    Below ``u = 0.01`` the bracket is centred on the asymptotic quantile
    expansion; otherwise on zero with half-width
    ``1 + |theta| E[W] + 5 sqrt(E[W])``.
    """
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u!r}")
    log_u = math.log(u)

    def g(x):
        return marginal_log_cdf(x, params, spec) - log_u

    if u < 0.01:
        from .tail_asymptotics import compute_constants, quantile_asymptotic

        x0 = quantile_asymptotic(u, compute_constants(params), params, warn=False)
        bracket = expand_bracket(g, x0, step=1.0)
    else:
        ew = gig_mean(params.gig)
        half = 1.0 + abs(params.theta) * ew + 5.0 * math.sqrt(ew)
        bracket = expand_bracket(g, 0.0, step=half)
    return find_root(g, bracket, root_spec)


# --- the X* route ----------------------------------------------------------

_INNER_SPEC = QuadratureSpec(relative_tolerance=1e-12, absolute_log_tolerance=1e-12)


def _log_y_integral(x, params):
    """
    ``log int_{-inf}^{alpha x} e^{alpha theta z} Kbar_{p-1}(sqrt(a^2+x^2+z^2), beta) dz``.

    This is ``sqrt(2 pi) Kbar_{p-1/2}(sqrt(a^2+x^2), sqrt(theta^2+b^2)) P(Y <= alpha x)``
    for the univariate GH variable ``Y`` of the X* density; the normalizer
    is left out because it cancels against the X* prefactor.
    """
    p, a, b, th, al = params.p, params.a, params.b, params.theta, params.alpha
    beta = math.sqrt(th * th * (1.0 + al * al) + b * b)
    r2 = a * a + x * x
    upper = al * x

    def log_f(z):
        return al * th * z + _log_kbar(p - 1.0, np.sqrt(r2 + z * z), beta)

    pts = [0.0] if upper > 0.0 else None
    return integrate_log(log_f, (-np.inf, upper), _INNER_SPEC, points=pts)


def xstar_log_pdf(x, params: EquiSkewGHParams):
    """
    Log density of ``X* = theta W + sqrt(W) max(Z1, Z2)``::

        f(x) = 2 e^{theta x} / (sqrt(2 pi) Kbar_p(a, b))
               * Kbar_{p-1/2}(sqrt(a^2+x^2), sqrt(theta^2+b^2)) * P(Y <= alpha x)

    where ``Y`` is univariate GH with skewness ``alpha theta``, index
    ``p - 1/2`` and GIG arguments ``(sqrt(a^2+x^2), sqrt(theta^2+b^2))``.
    ``P(Y <= alpha x)`` is evaluated by direct quadrature of the density of
    ``Y``.  Returns ``+inf`` at the integrable singularity ``x = 0`` when
    ``a = 0`` and ``p <= 1``.
    """
    x = np.asarray(x, float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    p, a = params.p, params.a
    base = math.log(2.0) - LOG_2PI - _log_kbar(p, a, params.b)
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        if a == 0.0 and xi == 0.0 and p <= 1.0:
            out[i] = np.inf
        else:
            out[i] = params.theta * xi + base + _log_y_integral(xi, params)
    return float(out[0]) if scalar else out


def xstar_log_cdf(y, params: EquiSkewGHParams, spec: QuadratureSpec | None = None):
    """``log P(X* <= y)`` by quadrature of :func:`xstar_log_pdf`."""
    y = float(y)
    pts = _singular_points(params, -np.inf, y)
    return integrate_log(lambda t: xstar_log_pdf(t, params), (-np.inf, y), spec, points=pts)


# --- the mixture route -----------------------------------------------------


def _w_grid(params, y):
    scale = max(1.0, abs(y), abs(params.theta) + 1.0)
    return np.geomspace(1e-8, 1e4 * scale, 241)


def joint_log_cdf_diagonal(y, params: EquiSkewGHParams, spec: QuadratureSpec | None = None):
    """
    ``log P(X1 <= y, X2 <= y)`` as the GIG mixture of skew normal CDFs::

        log int_0^inf F_SN((y - theta w) / sqrt(w); alpha) f_GIG(w) dw

    The peak of the integrand is located on a geometric grid first and used
    as breakpoints.  Usable to ``y`` around -200.
    """
    y = float(y)
    th, al = params.theta, params.alpha

    def log_f(w):
        return log_skew_normal_cdf((y - th * w) / np.sqrt(w), al) + gig_log_pdf(w, params.gig)

    pts = log_mode_breakpoints(log_f, _w_grid(params, y))
    return integrate_log(log_f, (0.0, np.inf), spec, points=pts)


def joint_cdf(y1, y2, params: EquiSkewGHParams, spec: QuadratureSpec | None = None):
    """
    ``P(X1 <= y1, X2 <= y2)`` (plain domain) via the mixture of bivariate
    normal rectangle probabilities.  Not tail-accurate; the diagonal
    pipeline uses :func:`joint_log_cdf_diagonal`.
    """
    y1, y2 = float(y1), float(y2)
    th, rho = params.theta, params.rho

    def f(w):
        sw = np.sqrt(w)
        prob = bivariate_normal_cdf((y1 - th * w) / sw, (y2 - th * w) / sw, rho)
        return prob * np.exp(gig_log_pdf(w, params.gig))

    def log_f(w):
        with np.errstate(divide="ignore"):
            return np.log(np.maximum(f(w), 0.0))

    pts = log_mode_breakpoints(log_f, _w_grid(params, min(y1, y2)))
    return integrate(f, (0.0, np.inf), spec, points=pts)


# --- sampling --------------------------------------------------------------


def sample_bivariate(params: EquiSkewGHParams, n: int, seed: int, theta_pair=None) -> SampleBatch:
    """
    Draw ``n`` pairs ``theta W + sqrt(W) Z`` with ``Z ~ N(0, R)`` by Cholesky
    factor of ``R``.  Deterministic given ``(params, n, seed)``.

    ``theta_pair`` optionally gives each coordinate its own skewness; the
    default uses ``params.theta`` for both.  Only the equi-skew case is
    covered by the exact and asymptotic formulas elsewhere in the package.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if theta_pair is None:
        theta = np.array([params.theta, params.theta])
    else:
        theta = np.asarray(theta_pair, float)
        if theta.shape != (2,) or not np.all(np.isfinite(theta)):
            raise ParameterError("theta_pair must hold two finite values")
    rng = np.random.default_rng(seed)
    w = GIGSampler(params.gig, rng).draw(n)
    z = rng.standard_normal((n, 2))
    rho = params.rho
    z[:, 1] = rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1]
    sw = np.sqrt(w)
    z *= sw[:, None]
    z += w[:, None] * theta[None, :]
    return SampleBatch(pairs=z, seed=seed, n=n, params=params)
