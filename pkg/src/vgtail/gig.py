"""
Generalised inverse Gaussian mixing law GIG(p, a, b).

Density::

    f(w) = w^(p-1) exp(-(a^2/w + b^2 w)/2) / (2 Kbar_p(a, b)),   w > 0

with the three-branch normalizer ``Kbar`` below.  Note that ``a`` and ``b``
enter squared: the usual (lambda, chi, psi) parameterization has
``chi = a**2`` and ``psi = b**2``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .special_fn import log_bessel_k

__all__ = [
    "GIGParams",
    "ParameterError",
    "SamplerError",
    "kbar",
    "log_kbar",
    "gig_log_pdf",
    "gig_mean",
    "gig_variance",
    "gig_sample",
    "GIGSampler",
]

LOG2 = math.log(2.0)


class ParameterError(ValueError):
    """Parameters outside the model's validity domain."""


class SamplerError(RuntimeError):
    """The rejection sampler's acceptance rate collapsed."""


def _validity_case(p, a, b):
    if a > 0 and b > 0:
        return "ab"
    if a == 0 and b > 0 and p > 0:
        return "a0"
    if b == 0 and a > 0 and p < 0:
        return "b0"
    return None


@dataclass(frozen=True)
class GIGParams:
    """
    Parameters ``(p, a, b)`` of GIG(p, a, b), validated on construction.

    Valid combinations are ``a, b > 0`` (any real ``p``), ``a = 0, b, p > 0``
    and ``b = 0, a > 0, p < 0``.
    """

    p: float
    a: float
    b: float

    def __post_init__(self):
        for name in ("p", "a", "b"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ParameterError(f"GIG parameter {name} must be finite, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.a < 0 or self.b < 0:
            raise ParameterError(f"GIG requires a >= 0 and b >= 0, got a={self.a}, b={self.b}")
        if _validity_case(self.p, self.a, self.b) is None:
            raise ParameterError(
                "GIG(p, a, b) needs a, b > 0; or a = 0 with b, p > 0; or b = 0 "
                f"with a > 0, p < 0 (got p={self.p}, a={self.a}, b={self.b})"
            )

    @classmethod
    def vg(cls, nu: float) -> "GIGParams":
        """Variance gamma mixing law: ``a = 0, b = sqrt(2/nu), p = 1/2``."""
        if not nu > 0:
            raise ParameterError(f"VG requires nu > 0, got {nu!r}")
        return cls(p=0.5, a=0.0, b=math.sqrt(2.0 / nu))

    @property
    def case(self) -> str:
        return _validity_case(self.p, self.a, self.b)


def _log_kbar(p, a, b):
    """
    Array version of ``log Kbar_p(a, b)``; ``+inf`` on the singular boundary.

    ``a`` and ``b`` broadcast; ``p`` is a scalar.
    """
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    out = np.full(a.shape, np.inf)
    both = (a > 0) & (b > 0)
    if np.any(both):
        ab, bb = a[both], b[both]
        out[both] = p * (np.log(ab) - np.log(bb)) + log_bessel_k(p, ab * bb)
    a_zero = (a == 0) & (b > 0)
    if np.any(a_zero) and p > 0:
        out[a_zero] = -2.0 * p * np.log(b[a_zero]) + gammaln(p) + (p - 1.0) * LOG2
    b_zero = (b == 0) & (a > 0)
    if np.any(b_zero) and p < 0:
        out[b_zero] = 2.0 * p * np.log(a[b_zero]) + gammaln(-p) + (-p - 1.0) * LOG2
    return out if out.ndim else float(out)


def log_kbar(p: float, a: float, b: float) -> float:
    """Log of :func:`kbar`; raises ``ParameterError`` outside the three cases."""
    if _validity_case(p, a, b) is None:
        raise ParameterError(f"Kbar_p(a, b) undefined for p={p}, a={a}, b={b}")
    return _log_kbar(p, a, b)


def kbar(p: float, a: float, b: float) -> float:
    """
    GIG normalizer.

    ``(a/b)^p K_p(ab)`` if ``a, b > 0``; ``b^(-2p) Gamma(p) 2^(p-1)`` if
    ``a = 0``; ``a^(2p) Gamma(-p) 2^(-p-1)`` if ``b = 0``.  Equal to half the
    integral of ``w^(p-1) exp(-(a^2/w + b^2 w)/2)`` over ``w > 0``.
    """
    return math.exp(log_kbar(p, a, b))


def gig_log_pdf(w, params: GIGParams):
    w = np.asarray(w, float)
    if np.any(w <= 0):
        raise ValueError("gig_log_pdf: w must be strictly positive")
    p, a, b = params.p, params.a, params.b
    out = (p - 1.0) * np.log(w) - 0.5 * (a * a / w + b * b * w) - LOG2 - _log_kbar(p, a, b)
    return out if out.ndim else float(out)


def _moment(params, k):
    p, a, b = params.p, params.a, params.b
    if _validity_case(p + k, a, b) is None:
        raise ParameterError(f"E[W^{k}] is infinite for GIG(p={p}, a={a}, b={b})")
    return math.exp(_log_kbar(p + k, a, b) - _log_kbar(p, a, b))


def gig_mean(params: GIGParams) -> float:
    """``E[W] = Kbar_{p+1}(a, b) / Kbar_p(a, b)``."""
    return _moment(params, 1)


def gig_variance(params: GIGParams) -> float:
    m1 = _moment(params, 1)
    return _moment(params, 2) - m1 * m1


# --- sampling --------------------------------------------------------------
#
# Standardized law: X ~ GIG(lam, omega) with density proportional to
# x^(lam-1) exp(-omega (x + 1/x) / 2).  For a, b > 0, W = (a/b) X with
# omega = a b.  Negative lam uses 1/X ~ GIG(-lam, omega).  The three
# generators follow Hormann & Leydold (2014): ratio-of-uniforms with and
# without mode shift, and a dominating-density rejection for the
# non-T-concave corner (lam < 1, small omega).

_MIN_ACCEPTANCE = 1e-3


def _log_g(x, lam, omega):
    return (lam - 1.0) * np.log(x) - 0.5 * omega * (x + 1.0 / x)


def _mode(lam, omega):
    if lam >= 1.0:
        return (math.sqrt((lam - 1.0) ** 2 + omega * omega) + (lam - 1.0)) / omega
    return omega / (math.sqrt((1.0 - lam) ** 2 + omega * omega) + (1.0 - lam))


def _rou_shift_setup(lam, omega):
    m = _mode(lam, omega)
    # extremes of (x - m) sqrt(g(x)) solve the depressed cubic below
    a = -2.0 * (lam + 1.0) / omega - m
    b = 2.0 * (lam - 1.0) * m / omega - 1.0
    c = m
    pp = b - a * a / 3.0
    qq = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    phi = math.acos(-0.5 * qq * math.sqrt(-27.0 / pp ** 3))
    fd = 2.0 * math.sqrt(-pp / 3.0)
    x_plus = fd * math.cos(phi / 3.0) - a / 3.0
    x_minus = fd * math.cos(phi / 3.0 + 4.0 * math.pi / 3.0) - a / 3.0
    log_gm = _log_g(m, lam, omega)
    v_plus = 1.0
    u_plus = (x_plus - m) * math.exp(0.5 * (_log_g(x_plus, lam, omega) - log_gm))
    u_minus = (x_minus - m) * math.exp(0.5 * (_log_g(x_minus, lam, omega) - log_gm))
    return m, log_gm, u_minus, u_plus, v_plus


def _batch_rou_shift(rng, size, lam, omega, setup):
    m, log_gm, u_minus, u_plus, v_plus = setup
    u = rng.uniform(u_minus, u_plus, size)
    v = rng.uniform(0.0, v_plus, size)
    x = u / v + m
    ok = x > 0
    xs = np.where(ok, x, 1.0)
    ok &= 2.0 * np.log(v) <= _log_g(xs, lam, omega) - log_gm
    return x[ok]


def _rou_plain_setup(lam, omega):
    m = _mode(lam, omega)
    log_gm = _log_g(m, lam, omega)
    x_plus = ((1.0 + lam) + math.sqrt((1.0 + lam) ** 2 + omega * omega)) / omega
    u_plus = x_plus * math.exp(0.5 * (_log_g(x_plus, lam, omega) - log_gm))
    return log_gm, u_plus


def _batch_rou_plain(rng, size, lam, omega, setup):
    log_gm, u_plus = setup
    u = rng.uniform(0.0, u_plus, size)
    v = rng.uniform(0.0, 1.0, size)
    x = u / v
    ok = 2.0 * np.log(v) <= _log_g(x, lam, omega) - log_gm
    return x[ok]


def _concave_setup(lam, omega):
    m = _mode(lam, omega)
    x0 = omega / (1.0 - lam)
    xs = max(x0, 2.0 / omega)
    k1 = math.exp(_log_g(m, lam, omega))
    a1 = k1 * x0
    if x0 < 2.0 / omega:
        k2 = math.exp(-omega)
        if lam > 0:
            a2 = k2 * ((2.0 / omega) ** lam - x0 ** lam) / lam
        else:
            a2 = k2 * math.log(2.0 / omega ** 2)
    else:
        k2, a2 = 0.0, 0.0
    k3 = xs ** (lam - 1.0)
    a3 = 2.0 * k3 * math.exp(-xs * omega / 2.0) / omega
    return x0, xs, k1, k2, k3, a1, a2, a3


def _batch_concave(rng, size, lam, omega, setup):
    x0, xs, k1, k2, k3, a1, a2, a3 = setup
    total = a1 + a2 + a3
    u = rng.uniform(0.0, 1.0, size)
    v = rng.uniform(0.0, total, size)
    x = np.empty(size)
    h = np.empty(size)
    r1 = v <= a1
    x[r1] = x0 * v[r1] / a1
    h[r1] = k1
    r2 = ~r1 & (v <= a1 + a2)
    if np.any(r2):
        v2 = v[r2] - a1
        if lam == 0:
            x[r2] = omega * np.exp(v2 * math.exp(omega))
        else:
            x[r2] = (x0 ** lam + v2 * lam / k2) ** (1.0 / lam)
        h[r2] = k2 * x[r2] ** (lam - 1.0)
    r3 = ~(r1 | r2)
    if np.any(r3):
        v3 = v[r3] - (a1 + a2)
        x[r3] = -2.0 / omega * np.log(math.exp(-xs * omega / 2.0) - v3 * omega / (2.0 * k3))
        h[r3] = k3 * np.exp(-x[r3] * omega / 2.0)
    ok = np.isfinite(x) & (x > 0)
    xs_ = np.where(ok, x, 1.0)
    ok &= u * h <= np.exp(_log_g(xs_, lam, omega))
    return x[ok]


def _standard_gig(rng, n, lam, omega):
    if lam > 1.0 or omega > 1.0:
        setup, batch = _rou_shift_setup(lam, omega), _batch_rou_shift
    elif omega >= min(0.5, 2.0 / 3.0 * math.sqrt(1.0 - lam)):
        setup, batch = _rou_plain_setup(lam, omega), _batch_rou_plain
    else:
        setup, batch = _concave_setup(lam, omega), _batch_concave

    chunks, have, tried = [], 0, 0
    rate = 0.5
    while have < n:
        size = int(min(max((n - have) / rate * 1.1 + 64, 1024), 4_000_000))
        got = batch(rng, size, lam, omega, setup)
        tried += size
        have += got.size
        chunks.append(got)
        rate = max(have / tried, _MIN_ACCEPTANCE)
        if tried >= 100_000 and have / tried < _MIN_ACCEPTANCE:
            raise SamplerError(
                f"GIG acceptance rate {have / tried:.2e} below {_MIN_ACCEPTANCE} "
                f"(lambda={lam}, omega={omega})"
            )
    return np.concatenate(chunks)[:n]


class GIGSampler:
    """
    Seeded GIG generator owning its own ``numpy.random.Generator``.

    One instance must not be shared between threads; independent instances
    with distinct seeds may run in parallel.
    """

    def __init__(self, params: GIGParams, seed: int | np.random.Generator):
        self.params = params
        if isinstance(seed, np.random.Generator):
            self.rng = seed
        else:
            self.rng = np.random.default_rng(seed)

    def draw(self, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be at least 1")
        p, a, b = self.params.p, self.params.a, self.params.b
        rng = self.rng
        if a == 0:
            return rng.gamma(shape=p, scale=2.0 / (b * b), size=n)
        if b == 0:
            return 1.0 / rng.gamma(shape=-p, scale=2.0 / (a * a), size=n)
        omega = a * b
        x = _standard_gig(rng, n, abs(p), omega)
        if p < 0:
            x = 1.0 / x
        return (a / b) * x


def gig_sample(params: GIGParams, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. GIG draws, deterministic given ``(params, n, seed)``."""
    return GIGSampler(params, seed).draw(n)
