"""Real interpolation with a logarithmic functor.

The Peetre K-functional of a couple of rearrangement-invariant spaces is
bounded above by splitting ``f`` at a height ``tau``::

    f = (|f| - tau)_+ sign f  +  min(|f|, tau) sign f

and minimizing the cost over ``tau``.  For (L^1, L^inf) this is exact; for
the Lorentz and Lorentz-Zygmund couples used here it is equivalent to K up
to a constant, so comparisons built on it assert bounded ratios only.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .rearrange import DivergenceError, SimpleFunction, StepFunction
from .spaces import (
    INF,
    LogPowerWeight,
    SpaceSpec,
    SpecError,
    _as_step,
    _inv,
    _sup_weight_on,
    embedding_registered,
    space_norm,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ParameterError(ValueError):
    """Interpolation parameters outside the admissible range."""


class IdentificationUnsupported(SpecError):
    """No identification theorem covers the requested couple and parameters."""


@dataclass(frozen=True)
class CoupleSpec:
    x0: SpaceSpec
    x1: SpaceSpec

    @property
    def x1_inside_x0(self):
        return embedding_registered(self.x1, self.x0)

    def swapped(self):
        return CoupleSpec(self.x1, self.x0)

    def to_dict(self):
        return {"x0": self.x0.to_dict(), "x1": self.x1.to_dict()}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(SpaceSpec.from_dict(d["x0"]), SpaceSpec.from_dict(d["x1"]))
        except KeyError as exc:
            raise SpecError(f"couple: missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class InterpParams:
    theta: float
    q: float
    alpha: float = 0.0

    def __post_init__(self):
        th, q, a = self.theta, self.q, self.alpha
        if not 0.0 <= th <= 1.0:
            raise ParameterError("theta must lie in [0, 1]")
        if not q >= 1.0:
            raise ParameterError("q must lie in [1, inf]")
        if th == 0.0 and not a >= -_inv(q):
            raise ParameterError("theta = 0 requires alpha >= -1/q")
        if th == 1.0 and not (a < -_inv(q) or (q == INF and a == 0.0)):
            raise ParameterError("theta = 1 requires alpha < -1/q, or q = inf with alpha = 0")


# ----------------------------------------------------------------------
# truncation costs


class _TruncationNorms:
    """Norms of (f_* - tau)_+ and min(f_*, tau) in one space, vectorized over tau."""

    def __init__(self, g, spec):
        self.g = g
        self.spec = spec
        c = g.levels
        self.c = c
        lz = spec.as_lz()
        self.mode = "generic"
        if lz is None:
            return
        p, q, lam = lz
        if p == INF and q == INF and lam == 0.0:
            self.mode = "linf"
            return
        if q == INF:
            self.mode = "sup"
            self.logh = _sup_weight_on(_inv(p), lam, g.starts, g.breakpoints)
            self.h = np.exp(self.logh)
            if not np.all(np.isfinite(self.h)):
                raise DivergenceError(f"{spec} norm of a nonzero function is infinite")
            self.ch = c * self.h
            self.prefix_h = np.concatenate(([0.0], np.maximum.accumulate(self.h)))
            suffix = np.maximum.accumulate(self.ch[::-1])[::-1]
            self.suffix_ch = np.concatenate((suffix, [0.0]))
            return
        self.mode = "integral"
        self.r = q
        a, b = q * _inv(p) - 1.0, lam * q
        F = quadrature.cumulative_weight(np.concatenate(([0.0], g.breakpoints)), a, b)
        if not np.all(np.isfinite(F)):
            raise DivergenceError(f"{spec} norm of a nonzero function is infinite")
        self.F = F
        self.dF = np.diff(F)
        cr = c**q * self.dF
        self.suffix = np.concatenate((np.cumsum(cr[::-1])[::-1], [0.0]))
        self.powers = None
        if q == int(q) and q <= 4:
            # (c - tau)**r expands into prefix sums of c**j dF
            self.powers = [np.concatenate(([0.0], np.cumsum(c**j * self.dF))) for j in range(int(q) + 1)]

    def _k(self, tau):
        # number of levels strictly above tau
        return np.searchsorted(-self.c, -tau, side="left")

    def lower(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.mode == "linf":
            return np.minimum(tau, self.c[0])
        k = self._k(tau)
        if self.mode == "sup":
            return np.maximum(tau * self.prefix_h[k], self.suffix_ch[k])
        if self.mode == "integral":
            s = tau**self.r * self.F[k] + self.suffix[k]
            return s ** (1.0 / self.r)
        return np.array([space_norm(_clip(self.g, t, upper=False), self.spec) for t in np.ravel(tau)]).reshape(tau.shape)

    def upper(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.mode == "linf":
            return np.maximum(self.c[0] - tau, 0.0)
        if self.mode == "integral" and self.powers is not None:
            k = self._k(tau)
            r = int(self.r)
            s = sum(math.comb(r, j) * (-tau) ** (r - j) * self.powers[j][k] for j in range(r + 1))
            return np.maximum(s, 0.0) ** (1.0 / r)
        if self.mode in ("integral", "sup"):
            out = np.empty(tau.shape)
            flat_t, flat_o = tau.ravel(), out.ravel()
            chunk = max(1, 2_000_000 // max(self.c.size, 1))
            for s in range(0, flat_t.size, chunk):
                d = np.maximum(self.c[None, :] - flat_t[s:s + chunk, None], 0.0)
                if self.mode == "sup":
                    flat_o[s:s + chunk] = np.max(d * self.h[None, :], axis=1)
                else:
                    flat_o[s:s + chunk] = np.sum(d**self.r * self.dF[None, :], axis=1) ** (1.0 / self.r)
            return flat_o.reshape(tau.shape)
        return np.array([space_norm(_clip(self.g, t, upper=True), self.spec) for t in np.ravel(tau)]).reshape(tau.shape)


def _clip(g, tau, upper):
    if upper:
        lv = g.levels - tau
        keep = lv > 0
        return StepFunction(g.breakpoints[keep], lv[keep], g.total)
    if tau <= 0:
        return StepFunction(np.zeros(0), np.zeros(0), g.total)
    # levels >= tau merge into one flat top
    k = int(np.count_nonzero(g.levels >= tau))
    if k == 0:
        return g
    b = g.breakpoints[k - 1:]
    lv = np.concatenate(([tau], g.levels[k:]))
    return StepFunction(b, lv, g.total)


def _golden(fun, a, b, rtol):
    """Vectorized golden-section minimizer of ``fun`` on the intervals [a, b]."""
    scale = np.maximum(b, 1e-300)
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(200):
        if np.all(b - a <= rtol * scale):
            break
        left = f1 < f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        nx1 = np.where(left, b - GOLDEN * (b - a), x2)
        nx2 = np.where(left, x1, a + GOLDEN * (b - a))
        nf1 = np.where(left, fun(nx1), f2)
        nf2 = np.where(left, f1, fun(nx2))
        x1, x2, f1, f2 = nx1, nx2, nf1, nf2
    return np.where(f1 < f2, x1, x2)


def _is_l1_linf(couple):
    return couple.x0.as_lz() == (1.0, 1.0, 0.0) and couple.x1.as_lz() == (INF, INF, 0.0)


def k_functional_grid(f, ts, couple, fast=True, rtol=1e-6, n_refine=4):
    """Truncation upper bound for K(f, t; X0, X1) at every t in ``ts``.

    Both assignments of the two truncation parts to X0 and X1 are tried.
    The height is first chosen among the levels of ``f_*`` and then refined
    by golden-section search between neighbouring levels.  Every candidate
    is an explicit decomposition with costs (A, B), so the result is the
    lower envelope of the lines A + t B found over the whole grid.
    """
    g = _as_step(f)
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ValueError("K-functional is defined for t > 0")
    if g.is_zero:
        return np.zeros_like(ts)
    if fast and _is_l1_linf(couple):
        return g.cumulative(ts)
    n0 = _TruncationNorms(g, couple.x0)
    n1 = _TruncationNorms(g, couple.x1)

    def cost(tau, t, orient):
        if orient == 0:
            return n0.upper(tau) + t * n1.lower(tau)
        return n0.lower(tau) + t * n1.upper(tau)

    cand = np.concatenate((g.levels, [0.0]))  # decreasing
    lines_a, lines_b = [], []
    for orient in (0, 1):
        part0 = n0.upper if orient == 0 else n0.lower
        part1 = n1.lower if orient == 0 else n1.upper
        A, B = part0(cand), part1(cand)
        vals = A[None, :] + ts[:, None] * B[None, :]
        j = np.argmin(vals, axis=1)
        lines_a.append(A[j])
        lines_b.append(B[j])
        # the cost is convex between neighbouring levels; search the intervals
        # next to the few best levels
        order = np.argsort(vals, axis=1)[:, :n_refine]
        for r in range(order.shape[1]):
            j = order[:, r]
            for side in (-1, 1):
                nb = np.clip(j + side, 0, cand.size - 1)
                lo, hi = np.minimum(cand[j], cand[nb]), np.maximum(cand[j], cand[nb])
                tau = _golden(lambda x: cost(x, ts, orient), lo, hi, rtol)
                lines_a.append(part0(tau))
                lines_b.append(part1(tau))
    # every (A, B) is an explicit decomposition, so the lower envelope of
    # the lines A + t B bounds K at every t
    # keep the line that is best at its own t, one per grid point
    la, lb = np.array(lines_a), np.array(lines_b)
    own = la + ts[None, :] * lb
    own[~np.isfinite(own)] = np.inf
    pick = np.argmin(own, axis=0)
    la, lb = la[pick, np.arange(ts.size)], lb[pick, np.arange(ts.size)]
    best = np.empty(ts.shape)
    chunk = max(1, 4_000_000 // max(la.size, 1))
    for s in range(0, ts.size, chunk):
        best[s:s + chunk] = np.min(la[None, :] + ts[s:s + chunk, None] * lb[None, :], axis=1)
    return best


def k_functional(f, t, couple, fast=True):
    """K(f, t; X0, X1), exact for (L^1, L^inf) and an upper bound otherwise."""
    if t <= 0:
        raise ValueError("K-functional is defined for t > 0")
    return float(k_functional_grid(f, np.array([float(t)]), couple, fast=fast)[0])


# ----------------------------------------------------------------------
# logarithmic interpolation norm


@dataclass
class InterpNorm:
    value: float
    coarse: float
    richardson_error: float


def log_interp_norm_details(f, couple, params, n_grid=2048, t_min=1e-12, domain="unit", fast=True):
    theta, q, alpha = params.theta, params.q, params.alpha
    if domain not in ("unit", "half_line"):
        raise ParameterError(f"unknown integration domain {domain!r}")
    if domain == "half_line" and alpha != 0.0:
        raise ParameterError("the half-line norm is defined for alpha = 0 only")
    g = _as_step(f)
    if g.is_zero:
        return InterpNorm(0.0, 0.0, 0.0)
    if domain == "unit":
        ts = np.geomspace(t_min, 1.0, n_grid)
    else:
        ts = np.geomspace(t_min, 1.0 / t_min, 2 * n_grid - 1)
    x = np.log(ts)
    K = k_functional_grid(g, ts, couple, fast=fast)
    with np.errstate(divide="ignore"):
        logK = np.log(K)
    logw = -theta * x + (alpha * np.log1p(-x) if alpha else 0.0)
    if theta == 1.0 and q == INF and alpha == 0.0:
        v = float(np.max(K / ts))
        return InterpNorm(v, v, 0.0)
    if q == INF:
        v = float(np.exp(np.max(logw + logK)))
        return InterpNorm(v, v, 0.0)
    h = np.exp(q * (logw + logK))
    # (0, t_min): K(t) ~ t K(t_min) / t_min
    slope = K[0] / ts[0]
    tail_a, tail_b = q * (1.0 - theta) - 1.0, alpha * q
    tail = slope**q * float(quadrature.cumulative_weight(np.array([ts[0]]), tail_a, tail_b)[0])
    if not math.isfinite(tail):
        raise DivergenceError("the interpolation integral diverges at t = 0")
    if domain == "half_line":
        # (1/t_min, inf): K is flat at K(1/t_min)
        if theta == 0.0:
            raise DivergenceError("the half-line integral diverges at infinity for theta = 0")
        tail += K[-1] ** q * ts[-1] ** (-theta * q) / (theta * q)
    fine = tail + np.trapezoid(h, x)
    half = np.unique(np.concatenate((np.arange(0, h.size, 2), [h.size - 1])))
    coarse = tail + np.trapezoid(h[half], x[half])
    return InterpNorm(fine ** (1.0 / q), coarse ** (1.0 / q), abs(fine - coarse) / 3.0 / max(fine, 1e-300))


def log_interp_norm(f, couple, params, n_grid=2048, t_min=1e-12, domain="unit", fast=True):
    """|| t**(-theta - 1/q) (1 - log t)**alpha K(f, t) ||_{L^q(0, 1)}."""
    return log_interp_norm_details(f, couple, params, n_grid, t_min, domain, fast).value


# ----------------------------------------------------------------------
# identification


def _identify(couple, params, gamma=0.0):
    l0, l1 = couple.x0.as_lz(), couple.x1.as_lz()
    if l0 is None or l1 is None:
        raise IdentificationUnsupported("identification needs Lebesgue, Lorentz or Lorentz-Zygmund members")
    (p0, q0, a0), (p1, q1, a1) = l0, l1
    theta, q, alpha = params.theta, params.q, params.alpha
    if not (1.0 <= p0 < p1 <= INF):
        raise IdentificationUnsupported("identification needs 1 <= p0 < p1 <= inf")
    if theta == 1.0 and q == INF and alpha == 0.0:
        return couple.x1, "theta=1,q=inf reduction"
    if q == INF:
        raise IdentificationUnsupported("identification needs 1 <= q < inf")
    if 0.0 < theta < 1.0:
        p_theta = 1.0 / ((1.0 - theta) * _inv(p0) + theta * _inv(p1))
        lam = (1.0 - theta) * a0 + theta * a1 + alpha
        case = "(1)" if a0 == a1 == 0.0 else "lorentz-zygmund couple"
        return SpaceSpec.lorentz_zygmund(p_theta, q, lam), case
    if a0 != 0.0 or a1 != 0.0:
        raise IdentificationUnsupported("limiting cases are identified for Lorentz couples only")
    if theta == 0.0:
        if alpha < -1.0 / q:
            raise IdentificationUnsupported("theta = 0 needs alpha >= -1/q")
        w1 = LogPowerWeight(-1.0, alpha * q)
        if q0 < INF:
            return SpaceSpec.ggamma(q0, q, w1, LogPowerWeight(q0 / p0 - 1.0, 0.0)), "(2)"
        return SpaceSpec.ggamma(INF, q, w1, LogPowerWeight(1.0 / p0, 0.0)), "(3)"
    if not alpha < -1.0 / q:
        raise IdentificationUnsupported("theta = 1 needs alpha < -1/q")
    if q1 == INF:
        return SpaceSpec.ggamma(INF, q, LogPowerWeight(-1.0, alpha * q), LogPowerWeight(1.0 / p1, 0.0)), "(5)"
    if q1 != p1:
        raise IdentificationUnsupported("theta = 1 with finite q1 is identified for q1 = p1 only")
    beta = (alpha - gamma / q) * p1
    if not (gamma > -1.0 and gamma + beta * q / p1 + 1.0 < 0.0):
        raise IdentificationUnsupported("no admissible (gamma, beta) for this alpha")
    return SpaceSpec.ggamma(p1, q, LogPowerWeight(-1.0, gamma), LogPowerWeight(0.0, beta)), "(4)"


def identify_interp_space(couple, params, gamma=0.0):
    """Space equal (with equivalent norms) to ``(X0, X1)_{theta, q; alpha}``.

    ``gamma`` picks the parametrization of the theta = 1 case with finite
    ``q1 = p1``; the default ``gamma = 0`` is admissible for every
    ``alpha < -1/q``.
    """
    return _identify(couple, params, gamma)[0]


def identification_case(couple, params, gamma=0.0):
    return _identify(couple, params, gamma)[1]


def identification_json(couple, params, gamma=0.0):
    spec, case = _identify(couple, params, gamma)
    d = spec.to_dict()
    d["provenance"] = f"interpolation identification, case {case}"
    return json.dumps(d)


def b_sharp_quotient(t, p0, p1, alpha0=0.0, alpha1=0.0):
    """[1 - log(t**(1/p0 - 1/p1) (1 - log t)**(alpha0 - alpha1))] / (1 - log t)."""
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    num = 1.0 - ((_inv(p0) - _inv(p1)) * lt + (alpha0 - alpha1) * np.log1p(-lt))
    return num / (1.0 - lt)


@dataclass
class IdentificationReport:
    identified: SpaceSpec
    case: str
    interp_norms: list
    space_norms: list
    ratios: list
    excluded: list
    quotients: dict = field(default_factory=dict)
    limit: float = math.nan
    limit_ok: bool = True
    budget: float = 1e3
    sweep_medians: list = field(default_factory=list)
    drift_budget: float = 2.0

    @property
    def min(self):
        return min(self.ratios) if self.ratios else math.nan

    @property
    def max(self):
        return max(self.ratios) if self.ratios else math.nan

    @property
    def spread(self):
        return self.max / self.min if self.ratios and self.min > 0 else INF

    @property
    def drift(self):
        m = self.sweep_medians
        return max(m) / min(m) if m and min(m) > 0 else 1.0

    @property
    def passed(self):
        ok = bool(self.ratios) and all(math.isfinite(r) and r > 0 for r in self.ratios)
        return ok and self.spread <= self.budget and self.drift < self.drift_budget


def _ratio_rows(couple, params, spec, family, n_grid):
    ni, ns, ratios, excluded = [], [], [], []
    for i, f in enumerate(family):
        try:
            a = log_interp_norm(f, couple, params, n_grid=n_grid)
            b = space_norm(f, spec)
        except (DivergenceError, OverflowError):
            ni.append(math.nan)
            ns.append(math.nan)
            excluded.append(i)
            continue
        ni.append(a)
        ns.append(b)
        ratios.append(1.0 if a == 0 and b == 0 else (a / b if b else INF))
    return ni, ns, ratios, excluded


def verify_identification(couple, params, family, sweep=None, budget=1e3, drift_budget=2.0,
                          limit_ts=(1e-4, 1e-8, 1e-12), limit_tol=0.05, n_grid=2048, gamma=0.0):
    """Compare the interpolation norm with the norm of the identified space.

    ``sweep`` is an optional list of families along a tail-exponent sweep;
    the medians of their ratios must drift by less than ``drift_budget``.
    For Lorentz-Zygmund couples the slowly varying quotient of the
    Lorentz-Karamata identification is also tabulated at ``limit_ts``.
    """
    spec, case = _identify(couple, params, gamma)
    ni, ns, ratios, excluded = _ratio_rows(couple, params, spec, family, n_grid)
    rep = IdentificationReport(spec, case, ni, ns, ratios, excluded, budget=budget, drift_budget=drift_budget)
    if sweep:
        for fam in sweep:
            r = _ratio_rows(couple, params, spec, fam, n_grid)[2]
            rep.sweep_medians.append(float(np.median(r)) if r else math.nan)
    (p0, _, a0), (p1, _, a1) = couple.x0.as_lz(), couple.x1.as_lz()
    if 0.0 < params.theta < 1.0:
        vals = b_sharp_quotient(np.array(limit_ts), p0, p1, a0, a1)
        rep.quotients = dict(zip(limit_ts, vals.tolist()))
        rep.limit = _inv(p0) - _inv(p1)
        rep.limit_ok = bool(abs(vals[-1] - rep.limit) <= limit_tol * rep.limit)
    return rep


# ----------------------------------------------------------------------
# Hoelder mappings and the K-functional


@dataclass
class HolderProfile:
    """Hoelder data of a mapping T between two couples.

    Either constants ``M0``, ``M1`` or nondecreasing functions ``f(s1, s2)``
    and ``g(s)`` are given; constants are promoted to constant functions.
    """

    alpha: float
    beta: float = None
    M0: float = None
    M1: float = None
    f: object = None
    g: object = None

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.beta is None:
            self.beta = self.alpha
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.f is None:
            if self.M0 is None:
                raise ValueError("give M0 or f")
            self.f = lambda s1, s2, _m=self.M0: _m
        if self.g is None:
            if self.M1 is None:
                raise ValueError("give M1 or g")
            self.g = lambda s, _m=self.M1: _m

    def G(self, sigma):
        return max(self.g(2.0 * sigma), self.f(sigma, 2.0 * sigma))

    @property
    def M(self):
        return max(self.M0 if self.M0 is not None else 0.0, self.M1 if self.M1 is not None else 0.0)


def magnitude(x):
    """SimpleFunction of |x| for a SimpleFunction or anything with ``vectors`` and ``measures``."""
    if isinstance(x, SimpleFunction):
        return x.abs()
    v = np.asarray(x.vectors, dtype=float)
    return SimpleFunction.from_samples(np.linalg.norm(v.reshape(v.shape[0], -1), axis=1), x.measures)


def difference(x, y):
    """|x - y| as a SimpleFunction; both arguments live on the same pieces."""
    if isinstance(x, SimpleFunction):
        if x.measures.shape != y.measures.shape or np.any(x.measures != y.measures):
            raise ValueError("differences need functions on identical pieces")
        return SimpleFunction(x.values - y.values, x.measures, x.total)
    v = np.asarray(x.vectors, dtype=float) - np.asarray(y.vectors, dtype=float)
    return SimpleFunction.from_samples(np.linalg.norm(v.reshape(v.shape[0], -1), axis=1), x.measures)


@dataclass
class HolderCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    branch: str

    @property
    def slack(self):
        return self.rhs - self.lhs

    def violations(self, rtol=1e-6, atol=1e-12):
        return int(np.count_nonzero(self.lhs > self.rhs * (1.0 + rtol) + atol))


def holder_k_check(pairs, profile, couple_x, couple_y, t_grid, mode="difference", rtol=1e-6):
    """Evaluate the K-functional inequalities for Hoelder mappings.

    ``pairs`` is a list of ``(a, Ta, b, Tb)``.  In ``"difference"`` mode the
    check is  K(Ta - Tb, t**alpha; Y) <= 2 max(M0, M1) K(a - b, t; X)**alpha.
    In ``"single"`` mode each ``(a, Ta)`` is checked against
    K(Ta, t**beta) <= G(|a|_X0) (K(a, t)**beta + K(a, t)**alpha)  and, when
    beta >= alpha, against  G(|a|_X0) (1 + |a|_X0**(beta - alpha)) K(a, t)**alpha.
    Returns a dict with the per-pair checks and the violation count.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0) or np.any(t_grid >= 1):
        raise ValueError("t_grid must lie in (0, 1)")
    al, be = profile.alpha, profile.beta
    checks = []
    for item in pairs:
        if len(item) != 4:
            raise ValueError("each pair must be (a, Ta, b, Tb)")
        a, Ta, b, Tb = item
        if mode == "difference":
            dx, dy = difference(a, b), difference(Ta, Tb)
            kx = k_functional_grid(dx, t_grid, couple_x)
            ky = k_functional_grid(dy, t_grid**al, couple_y)
            checks.append(HolderCheck(ky, 2.0 * profile.M * kx**al, "difference"))
        elif mode == "single":
            for x, Tx in ((a, Ta), (b, Tb)):
                ax, ay = magnitude(x), magnitude(Tx)
                nrm = space_norm(ax, couple_x.x0)
                G = profile.G(nrm)
                kx = k_functional_grid(ax, t_grid, couple_x)
                ky = k_functional_grid(ay, t_grid**be, couple_y)
                checks.append(HolderCheck(ky, G * (kx**be + kx**al), "sum"))
                if be >= al:
                    checks.append(HolderCheck(ky, G * (1.0 + nrm ** (be - al)) * kx**al, "beta>=alpha"))
        else:
            raise ValueError(f"unknown mode {mode!r}")
    total = sum(c.violations(rtol) for c in checks)
    min_slack = min((float(np.min(c.slack)) for c in checks), default=math.inf)
    return {"checks": checks, "violations": total, "min_slack": min_slack, "passed": total == 0}
