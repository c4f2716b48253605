"""Integration kernels for log-power weights on (0, 1).

Everything here works with weights of the form ``t**a * (1 - log t)**b``.
Under the substitution ``u = 1 - log t`` the cumulative integral of such a
weight is an upper incomplete gamma function, which we evaluate in log
space so that tiny ``t`` neither underflows nor overflows.
"""

import numpy as np
from scipy import special

# Nodes below exp(X_MIN) are never generated; the integrands we meet decay
# like a positive power of t there.
X_MIN = -700.0

_CF_MAX_ITER = 500
_CF_TINY = 1e-300


def _log_upper_gamma_cf(nu, x):
    """Modified Lentz continued fraction for log Gamma(nu, x), x > 0."""
    x = np.asarray(x, dtype=float)
    b = x + 1.0 - nu
    c = np.full_like(x, 1.0 / _CF_TINY)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER):
        an = -i * (i - nu)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all():
            break
    return -x + nu * np.log(x) + np.log(h)


def _log_upper_gamma_small_x(nu, x):
    """log Gamma(nu, x) for nu <= 0 and 0 < x < 1 by downward recurrence."""
    k = int(np.ceil(-nu)) if nu < 0 else 0
    start = nu + k
    if start == 0.0:
        g = special.exp1(x)
    else:
        g = special.gammaincc(start, x) * special.gamma(start)
    s = start
    for _ in range(k):
        s -= 1.0
        # Gamma(s, x) = (Gamma(s + 1, x) - x**s e**-x) / s
        g = (g - x**s * np.exp(-x)) / s
    return np.log(g)


def log_upper_gamma(nu, x):
    """Natural log of the (non-regularized) upper incomplete gamma function.

    Works for any real ``nu`` and ``x > 0``; vectorized over ``x``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    if nu > 0:
        series = x < nu + 1.0
    else:
        series = x < 1.0
    cf = ~series
    if cf.any():
        out[cf] = _log_upper_gamma_cf(nu, x[cf])
    if series.any():
        xs = x[series]
        if nu > 0:
            with np.errstate(divide="ignore"):
                out[series] = np.log(special.gammaincc(nu, xs)) + special.gammaln(nu)
        else:
            out[series] = _log_upper_gamma_small_x(nu, xs)
    return out


def weight_is_integrable_at_zero(a, b):
    """True when t**a (1 - log t)**b is integrable near t = 0."""
    return a > -1.0 or (a == -1.0 and b < -1.0)


def log_cumulative_weight(t, a, b):
    """log of F(t) = integral_0^t s**a (1 - log s)**b ds, vectorized over t.

    Returns ``+inf`` where the integral diverges at 0 and ``-inf`` at t = 0.
    """
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, -np.inf)
    pos = t > 0
    if not pos.any():
        return out
    if not weight_is_integrable_at_zero(a, b):
        out[pos] = np.inf
        return out
    u = 1.0 - np.log(t[pos])
    s = a + 1.0
    if s == 0.0:
        # integral_U^inf v**b dv with b < -1
        out[pos] = (b + 1.0) * np.log(u) - np.log(-(b + 1.0))
    else:
        nu = b + 1.0
        out[pos] = s - nu * np.log(s) + log_upper_gamma(nu, s * u)
    return out


def cumulative_weight(t, a, b):
    return np.exp(log_cumulative_weight(t, a, b))


_GL_CACHE = {}


def gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def log_nodes(breaks, x_min=X_MIN, max_width=1.0, order=8):
    """Gauss-Legendre nodes in x = log t covering (exp(x_min), 1).

    Subinterval edges include ``log`` of every breakpoint in (0, 1), so any
    function that is smooth between breakpoints is integrated accurately.
    Returns ``(x, wx)`` with ``integral_0^1 h(t) dt ~ sum(h(e**x) e**x wx)``.
    """
    breaks = np.asarray(breaks, dtype=float)
    inner = np.log(breaks[(breaks > np.exp(x_min)) & (breaks < 1.0)])
    edges = np.unique(np.concatenate(([x_min, 0.0], inner)))
    widths = np.diff(edges)
    counts = np.maximum(1, np.ceil(widths / max_width).astype(int))
    starts = np.repeat(edges[:-1], counts)
    steps = np.repeat(widths / counts, counts)
    starts = starts + steps * (np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts))
    z, wz = gauss_legendre(order)
    x = (starts[:, None] + 0.5 * steps[:, None] * (z[None, :] + 1.0)).ravel()
    wx = (0.5 * steps[:, None] * wz[None, :]).ravel()
    return x, wx
