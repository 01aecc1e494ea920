"""
Scalar special functions with log-domain variants.

Everything here accepts numpy arrays and broadcasts.  Tail-critical callers
should use the ``log_*`` functions; plain values such as ``bessel_k``
underflow to zero in deep tails.
"""

import numpy as np
from scipy import special as sc

from .numerics import QuadratureSpec, integrate_log

__all__ = [
    "log_bessel_k",
    "bessel_k",
    "bessel_k_leading",
    "log_bessel_k_leading",
    "owen_t",
    "std_normal_pdf",
    "std_normal_logpdf",
    "std_normal_cdf",
    "std_normal_logcdf",
    "std_normal_quantile",
    "log_gamma_fn",
]

LOG_2PI = np.log(2.0 * np.pi)
_FALLBACK_SPEC = QuadratureSpec(relative_tolerance=1e-14, absolute_log_tolerance=1e-14)


def _require_finite(name, *arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name}: arguments must be finite")


def _log_bessel_k_integral(p, x):
    # K_p(x) = int_0^inf exp(-x cosh t) cosh(p t) dt, summed in the log domain
    p = abs(float(p))
    x = float(x)

    def log_f(t):
        with np.errstate(over="ignore"):
            return -x * np.cosh(t) + p * t + np.log1p(np.exp(-2.0 * p * t)) - np.log(2.0)

    # the integrand peaks where x sinh(t) = p
    t_peak = float(np.arcsinh(p / x)) if p > 0 else 0.0
    pts = [t_peak] if t_peak > 0 else None
    return integrate_log(log_f, (0.0, np.inf), _FALLBACK_SPEC, points=pts)


def log_bessel_k(p, x):
    """
    Natural log of the modified Bessel function of the second kind.

    Parameters
    ----------
    p : float or array_like
        Real order.
    x : float or array_like
        Strictly positive argument.

    Returns
    -------
    ndarray or float
        ``log K_p(x)``.  Because the result is a log it neither overflows for
        small ``x`` and large ``|p|`` nor underflows for large ``x``.

    Notes
    -----
    The exponentially scaled ``scipy.special.kve`` (AMOS) does the work.  Where
    it overflows (tiny ``x``, large order) the integral representation
    ``K_p(x) = int_0^inf exp(-x cosh t) cosh(pt) dt`` is integrated in the log
    domain instead.
    """
    p_arr, x_arr = np.broadcast_arrays(np.asarray(p, float), np.asarray(x, float))
    _require_finite("log_bessel_k", p_arr, x_arr)
    if np.any(x_arr <= 0):
        raise ValueError("log_bessel_k: x must be strictly positive")
    with np.errstate(divide="ignore", over="ignore"):
        scaled = sc.kve(p_arr, x_arr)
        out = np.log(scaled) - x_arr
    bad = ~np.isfinite(out) | (scaled == 0)
    if np.any(bad):
        out = np.array(out, dtype=float)
        flat_out = out.reshape(-1)
        for i in np.flatnonzero(bad.reshape(-1)):
            flat_out[i] = _log_bessel_k_integral(p_arr.reshape(-1)[i], x_arr.reshape(-1)[i])
    return out if out.ndim else float(out)


def bessel_k(p, x):
    """
    ``K_p(x)`` in the plain domain; prefer :func:`log_bessel_k` for tails.

    scipy's ``kv`` is used wherever the value is representable, since
    exponentiating a large log would amplify its rounding error.
    """
    _require_finite("bessel_k", p, x)
    x = np.asarray(x, float)
    if np.any(x <= 0):
        raise ValueError("bessel_k: x must be strictly positive")
    out = np.asarray(sc.kv(p, x), float)
    bad = ~np.isfinite(out) | (out == 0.0)
    if np.any(bad):
        out = np.where(bad, np.exp(log_bessel_k(p, x)), out)
    return out if out.ndim else float(out)


def log_bessel_k_leading(x):
    """Log of the large-argument leading term ``sqrt(pi / 2x) e^{-x}``."""
    x = np.asarray(x, float)
    if np.any(x <= 0):
        raise ValueError("bessel_k_leading: x must be strictly positive")
    out = 0.5 * np.log(np.pi / (2.0 * x)) - x
    return out if out.ndim else float(out)


def bessel_k_leading(p, x):
    """
    Leading asymptotic term of ``K_p(x)`` as ``x -> inf``.

    The order does not enter the leading term; ``p`` is accepted so the call
    mirrors :func:`log_bessel_k`.  Exact for ``|p| = 1/2``.
    """
    del p
    return np.exp(log_bessel_k_leading(x))


def owen_t(h, a):
    """
    Owen's T function ``T(h, a) = 1/(2 pi) int_0^a exp(-h^2 (1+x^2)/2) / (1+x^2) dx``.

    Backed by ``scipy.special.owens_t`` (Patefield-Tandy).
    """
    h, a = np.asarray(h, float), np.asarray(a, float)
    _require_finite("owen_t", h, a)
    out = sc.owens_t(h, a)
    return out if np.ndim(out) else float(out)


def std_normal_pdf(t):
    return np.exp(-0.5 * np.square(t) - 0.5 * LOG_2PI)


def std_normal_logpdf(t):
    return -0.5 * np.square(t) - 0.5 * LOG_2PI


def std_normal_cdf(t):
    return sc.ndtr(t)


def std_normal_logcdf(t):
    """Log of the standard normal CDF, accurate far into the lower tail."""
    return sc.log_ndtr(t)


def std_normal_quantile(u):
    u = np.asarray(u, float)
    if np.any((u <= 0) | (u >= 1)):
        raise ValueError("std_normal_quantile: u must lie in (0, 1)")
    out = sc.ndtri(u)
    return out if out.ndim else float(out)


def log_gamma_fn(z):
    z = np.asarray(z, float)
    if np.any(z <= 0):
        raise ValueError("log_gamma_fn: z must be positive")
    out = sc.gammaln(z)
    return out if out.ndim else float(out)
