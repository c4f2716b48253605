"""Test families of simple functions used by the reports and experiments."""

import numpy as np

from .rearrange import SimpleFunction

T_MIN = 1e-12


def indicator(m):
    """Indicator of a set of measure ``m`` in the unit domain."""
    if not 0 <= m <= 1:
        raise ValueError("indicator measure must lie in [0, 1]")
    if m == 1:
        return SimpleFunction.from_pieces([(1.0, 1.0)])
    return SimpleFunction.from_pieces([(1.0, m), (0.0, 1.0 - m)])


def indicator_family(count=12, m_min=1e-6):
    return [indicator(m) for m in np.geomspace(m_min, 1.0, count)]


def profile_function(profile, n=2048, t_min=T_MIN):
    """Sample a nonincreasing profile ``f_*`` on ``n`` geometric cells of (0, 1).

    Cell ``[t_k, t_{k+1})`` takes the value at its geometric midpoint; the
    first cell ``(0, t_min)`` takes the value at ``t_min``.
    """
    edges = np.concatenate(([0.0], np.geomspace(t_min, 1.0, n)))
    mids = np.concatenate(([t_min], np.sqrt(edges[1:-1]) * np.sqrt(edges[2:])))
    widths = np.diff(edges)
    widths[-1] = 1.0 - np.sum(widths[:-1])
    return SimpleFunction(profile(mids), widths)


def power_log(rho, delta=0.0, n=2048, t_min=T_MIN):
    """f_*(t) = t**(-1/rho) * (1 - log t)**(-delta) sampled on a geometric grid."""
    return profile_function(lambda t: t ** (-1.0 / rho) * (1.0 - np.log(t)) ** (-delta), n, t_min)


def power_log_family(rhos, deltas=(0.0,), n=2048, t_min=T_MIN):
    return [power_log(r, d, n, t_min) for r in rhos for d in deltas]


def random_simple(rng, max_pieces=30, decades=3.0, signed=True):
    """Random simple function with log-uniform magnitudes and Dirichlet measures."""
    k = int(rng.integers(1, max_pieces + 1))
    vals = 10.0 ** rng.uniform(-decades, decades, size=k)
    if signed:
        vals *= rng.choice([-1.0, 1.0], size=k)
    meas = rng.dirichlet(np.ones(k))
    return SimpleFunction(vals, meas / meas.sum())


def random_family(count, seed=0, **kw):
    rng = np.random.default_rng(seed)
    return [random_simple(rng, **kw) for _ in range(count)]


def coupled_pair(rng, max_pieces=30):
    """(f, g) on the same pieces with |f| <= |g| pointwise."""
    g = random_simple(rng, max_pieces)
    shrink = rng.uniform(0.0, 1.0, size=g.values.size)
    f = SimpleFunction(g.values * shrink, g.measures)
    return f, g
