"""Norms of rearrangement-invariant spaces on a domain of measure one.

Supported kinds: Lebesgue, Lorentz, Lorentz-Zygmund, grand and small
Lebesgue, and the generalized Gamma spaces with two log-power weights.
Every norm is computed from the decreasing rearrangement of the input.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from . import quadrature
from .rearrange import (
    DivergenceError,
    LogPowerWeight,
    SimpleFunction,
    StepFunction,
    integrate_weighted,
    log_integrate_weighted,
    rearrange,
)

INF = math.inf

KINDS = ("lebesgue", "lorentz", "lorentz_zygmund", "grand", "small", "ggamma")


class SpecError(ValueError):
    """Invalid or unsupported space description."""


class UnsupportedEmbedding(SpecError):
    """The requested inclusion is not one of the registered chains."""


def _inv(x):
    return 0.0 if x == INF else 1.0 / x


def _fmt(x):
    return "inf" if x == INF else repr(float(x))


def _num(x):
    if x is None:
        return None
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        return float(x)
    return float(x)


@dataclass(frozen=True)
class SpaceSpec:
    """Symbolic description of a function space.

    ``variant`` selects an alternative but equivalent norm: ``"maximal"``
    computes a Lorentz norm with ``f_**`` instead of ``f_*``; ``"fk"``
    computes the grand Lebesgue norm through the tail-integral quasi-norm.
    """

    kind: str
    p: float
    q: float = None
    lam: float = 0.0
    alpha: float = 0.0
    m: float = None
    w1: LogPowerWeight = None
    w2: LogPowerWeight = None
    variant: str = None

    def __post_init__(self):
        for name in ("p", "q", "m"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _num(val))
        p, q = self.p, self.q
        if self.kind not in KINDS:
            raise SpecError(f"unknown space kind {self.kind!r}")
        if self.kind == "lebesgue":
            if not p > 0:
                raise SpecError("Lebesgue exponent must be positive")
        elif self.kind == "lorentz":
            if q is None or q < 1:
                raise SpecError("Lorentz spaces need 1 <= q <= inf")
            if not (1 <= p < INF or (p == INF and q == INF)):
                raise SpecError("Lorentz spaces need 1 <= p < inf (p = inf only with q = inf)")
        elif self.kind == "lorentz_zygmund":
            if q is None or not (p > 0 and q > 0):
                raise SpecError("Lorentz-Zygmund spaces need 0 < p, q <= inf")
        elif self.kind in ("grand", "small"):
            if not (1 < p < INF and self.alpha > 0):
                raise SpecError(f"{self.kind} Lebesgue spaces need 1 < p < inf and alpha > 0")
        elif self.kind == "ggamma":
            if not p >= 1 or self.m is None or not self.m >= 1:
                raise SpecError("GGamma spaces need p >= 1 and 1 <= m <= inf")
            if self.w1 is None:
                object.__setattr__(self, "w1", LogPowerWeight())
            if self.w2 is None:
                object.__setattr__(self, "w2", LogPowerWeight())
        if self.variant not in (None, "maximal", "fk"):
            raise SpecError(f"unknown variant {self.variant!r}")
        if self.variant == "maximal" and self.kind != "lorentz":
            raise SpecError("the maximal-function variant applies to Lorentz spaces only")
        if self.variant == "fk" and self.kind != "grand":
            raise SpecError("the tail-integral variant applies to grand Lebesgue spaces only")

    # constructors -------------------------------------------------------

    @classmethod
    def lebesgue(cls, p):
        return cls("lebesgue", p)

    @classmethod
    def lorentz(cls, p, q, maximal=False):
        return cls("lorentz", p, q, variant="maximal" if maximal else None)

    @classmethod
    def lorentz_zygmund(cls, p, q, lam):
        return cls("lorentz_zygmund", p, q, lam=float(lam))

    @classmethod
    def grand(cls, p, alpha=1.0, fk=False):
        return cls("grand", p, alpha=float(alpha), variant="fk" if fk else None)

    @classmethod
    def small(cls, p, alpha=1.0):
        return cls("small", p, alpha=float(alpha))

    @classmethod
    def ggamma(cls, p, m, w1=None, w2=None):
        return cls("ggamma", p, m=m, w1=w1 or LogPowerWeight(), w2=w2 or LogPowerWeight())

    # properties ---------------------------------------------------------

    def as_lz(self):
        """(p, q, lambda) when the space is a Lorentz-Zygmund space, else None."""
        if self.variant is not None:
            return None
        if self.kind == "lebesgue":
            return (self.p, self.p, 0.0)
        if self.kind == "lorentz":
            return (self.p, self.q, 0.0)
        if self.kind == "lorentz_zygmund":
            return (self.p, self.q, self.lam)
        return None

    @property
    def weight_conditions(self):
        if self.kind != "ggamma":
            raise SpecError("weight conditions apply to GGamma specs only")
        return check_weight_conditions(self)

    @property
    def valid(self):
        if self.kind != "ggamma":
            return True
        c = self.weight_conditions
        return c["c1"] and c["c2"]

    def to_dict(self):
        d = {"kind": self.kind, "p": _fmt(self.p) if self.p == INF else self.p}
        if self.kind in ("lorentz", "lorentz_zygmund"):
            d["q"] = _fmt(self.q) if self.q == INF else self.q
        if self.kind == "lorentz_zygmund":
            d["lambda"] = self.lam
        if self.kind in ("grand", "small"):
            d["alpha"] = self.alpha
        if self.kind == "ggamma":
            d["m"] = _fmt(self.m) if self.m == INF else self.m
            d["w1"] = self.w1.to_dict()
            d["w2"] = self.w2.to_dict()
        if self.variant:
            d["variant"] = self.variant
        return d

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind", None)
        if kind == "lz":
            kind = "lorentz_zygmund"
        if kind not in KINDS:
            raise SpecError(f"unknown space kind {kind!r}")
        try:
            p = _num(d["p"])
        except KeyError:
            raise SpecError(f"{kind}: missing field 'p'") from None
        kw = {"variant": d.get("variant")}
        if kind in ("lorentz", "lorentz_zygmund"):
            if "q" not in d:
                raise SpecError(f"{kind}: missing field 'q'")
            kw["q"] = _num(d["q"])
        if kind == "lorentz_zygmund":
            kw["lam"] = float(d.get("lambda", d.get("lam", 0.0)))
        if kind in ("grand", "small"):
            kw["alpha"] = float(d.get("alpha", 1.0))
        if kind == "ggamma":
            if "m" not in d:
                raise SpecError("ggamma: missing field 'm'")
            kw["m"] = _num(d["m"])
            kw["w1"] = LogPowerWeight(**{k: float(v) for k, v in d.get("w1", {}).items()})
            kw["w2"] = LogPowerWeight(**{k: float(v) for k, v in d.get("w2", {}).items()})
        return cls(kind, p, **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __str__(self):
        k = self.kind
        if k == "lebesgue":
            return f"L^{_fmt(self.p)}"
        if k == "lorentz":
            s = f"L^({_fmt(self.p)},{_fmt(self.q)})"
            return s + "[f**]" if self.variant else s
        if k == "lorentz_zygmund":
            return f"L^({_fmt(self.p)},{_fmt(self.q)})(log L)^{self.lam:g}"
        if k == "grand":
            return f"L^{_fmt(self.p)}),{self.alpha:g}" + ("[fk]" if self.variant else "")
        if k == "small":
            return f"L^(({_fmt(self.p)},{self.alpha:g}"
        return (f"GGamma({_fmt(self.p)},{_fmt(self.m)};"
                f"t^{self.w1.a:g}(1-log t)^{self.w1.b:g},t^{self.w2.a:g}(1-log t)^{self.w2.b:g})")


# ----------------------------------------------------------------------
# helpers on step functions


def _as_step(f):
    if isinstance(f, StepFunction):
        return f
    if isinstance(f, SimpleFunction):
        return rearrange(f.normalized())
    raise TypeError(f"expected SimpleFunction or StepFunction, got {type(f).__name__}")


def _sup_weight_on(a, b, lo, hi):
    """sup of t**a (1 - log t)**b over [lo, hi] in (0, 1], vectorized.

    ``lo == 0`` means the limit t -> 0+ is included.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    def logw(x):
        return a * x + b * np.log1p(-x)

    with np.errstate(divide="ignore"):
        xlo = np.log(lo)
        xhi = np.log(hi)
    best = logw(xhi)
    at_zero = lo <= 0
    if a > 0 or (a == 0 and b < 0):
        lim0 = -np.inf
    elif a == 0 and b == 0:
        lim0 = 0.0
    else:
        lim0 = np.inf
    best = np.maximum(best, np.where(at_zero, lim0, logw(np.where(at_zero, -1.0, xlo))))
    if a != 0:
        xs = 1.0 - b / a
        if xs < 0:
            inside = (xs >= np.where(at_zero, -np.inf, xlo)) & (xs <= xhi)
            best = np.where(inside, np.maximum(best, logw(xs)), best)
    return best  # log of the sup


def _lz_sup(g, p, lam):
    """sup_t t**(1/p) (1 - log t)**lam f_*(t)."""
    if g.is_zero:
        return 0.0
    logs = _sup_weight_on(_inv(p), lam, g.starts, g.breakpoints)
    val = np.max(np.log(g.levels) + logs)
    if np.isposinf(val):
        raise DivergenceError("weighted supremum is infinite")
    return float(np.exp(val))


def _lorentz_maximal(g, p, q):
    """Lorentz (quasi)norm computed with f_** in place of f_*."""
    if g.is_zero:
        return 0.0
    if q == INF:
        if p == 1:
            return float(g.levels[0])
        # on [s, b): t**(1/p) f_**(t) = A t**(1/p - 1) + c t**(1/p)
        area = g.cumulative(g.starts)
        A = area - g.levels * g.starts
        c = g.levels
        cand = [g.breakpoints, np.where(g.starts > 0, g.starts, g.breakpoints)]
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = (p - 1.0) * A / c
        ts = np.where((ts > g.starts) & (ts < g.breakpoints), ts, g.breakpoints)
        cand.append(ts)
        t = np.concatenate(cand)
        B = g.breakpoints[-1]
        t = np.append(t, B)
        vals = t ** (1.0 / p) * g.cumulative(t) / t
        return float(np.max(vals))
    x, wx = quadrature.log_nodes(g.breakpoints)
    t = np.exp(x)
    fss = g.cumulative(t) / t
    with np.errstate(divide="ignore"):
        integrand = np.exp(q * np.log(fss) + (q / p) * x)
    return float(np.sum(integrand * wx)) ** (1.0 / q)


def _grand_eps(g, p, alpha):
    """sup over 0 < eps < p-1 of (eps**alpha integral f**(p-eps))**(1/(p-eps))."""
    if g.is_zero:
        return 0.0
    logc = np.log(g.levels)
    logw = np.log(g.widths)

    def objective(eps):
        eps = np.atleast_1d(eps)
        e = p - eps
        s = np.logaddexp.reduce(e[:, None] * logc[None, :] + logw[None, :], axis=1)
        return (alpha * np.log(eps) + s) / e

    top = p - 1.0
    grid = top * np.geomspace(1e-10, 1.0 - 1e-12, 64)
    vals = objective(grid)
    for _ in range(2):
        k = int(np.argmax(vals))
        lo = grid[k - 1] if k > 0 else grid[0] * 1e-3
        hi = grid[k + 1] if k < grid.size - 1 else top * (1.0 - 1e-15)
        grid = np.linspace(lo, hi, 64)
        vals = objective(grid)
    return float(np.exp(np.max(vals)))


def _grand_fk(g, p, alpha):
    """sup_t (1 - log t)**(-alpha/p) (integral_t^1 f_*^p)**(1/p)."""
    if g.is_zero:
        return 0.0
    pw = StepFunction(g.breakpoints, g.levels**p, g.total)
    total = float(pw.cumulative(1.0))

    def logphi(x):
        rest = np.maximum(total - pw.cumulative(np.exp(x)), 0.0)
        with np.errstate(divide="ignore"):
            return -(alpha / p) * np.log1p(-x) + np.log(rest) / p

    x, _ = quadrature.log_nodes(g.breakpoints, order=4)
    x = np.concatenate((x, np.log(g.breakpoints[g.breakpoints < 1.0])))
    vals = logphi(x)
    k = int(np.argmax(vals))
    best = vals[k]
    xs = np.sort(x)
    j = int(np.searchsorted(xs, x[k]))
    lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, xs.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda y: -logphi(np.array([y]))[0], bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return float(np.exp(best))


def _small(g, p, alpha):
    """integral_0^1 (1 - log t)**(alpha/p' - 1) (integral_0^t f_*^p)**(1/p) dt/t."""
    if g.is_zero:
        return 0.0
    pconj = p / (p - 1.0)
    beta = alpha / pconj - 1.0
    pw = StepFunction(g.breakpoints, g.levels**p, g.total)
    x, wx = quadrature.log_nodes(g.breakpoints)
    inner = pw.cumulative(np.exp(x))
    with np.errstate(divide="ignore"):
        integrand = np.exp(beta * np.log1p(-x) + np.log(inner) / p)
    return float(np.sum(integrand * wx))


def _near_zero_exponents(spec):
    """(a, b) such that w1(t) J(t)**m ~ t**a (1 - log t)**b as t -> 0 for
    any f with f_* constant near 0; None if the inner functional is infinite."""
    p, m, w1, w2 = spec.p, spec.m, spec.w1, spec.w2
    if p == INF:
        if w2.a > 0 or (w2.a == 0 and w2.b <= 0):
            inner = (w2.a, w2.b) if not (w2.a == 0 and w2.b == 0) else (0.0, 0.0)
        else:
            return None
        ia, ib = inner
    else:
        if not w2.integrable_at_zero:
            return None
        s2 = w2.a + 1.0
        ia, ib = (s2 / p, w2.b / p) if s2 > 0 else (0.0, (w2.b + 1.0) / p)
    if m == INF:
        return (w1.a, w1.b, ia, ib)
    return (w1.a + m * ia, w1.b + m * ib)


def _ggamma(g, spec):
    if g.is_zero:
        return 0.0
    p, m, w1, w2 = spec.p, spec.m, spec.w1, spec.w2
    ex = _near_zero_exponents(spec)
    if ex is None:
        raise DivergenceError(f"inner functional of {spec} is infinite")
    if m != INF and not quadrature.weight_is_integrable_at_zero(*ex):
        raise DivergenceError(f"outer weight of {spec} is not integrable at 0")
    x, wx = quadrature.log_nodes(g.breakpoints)
    t = np.exp(x)
    idx = np.searchsorted(g.breakpoints, t, side="right")
    levels = np.concatenate((g.levels, [0.0]))
    starts = np.concatenate((g.starts, [g.breakpoints[-1]]))
    if p == INF:
        piece_sup = _sup_weight_on(w2.a, w2.b, g.starts, g.breakpoints) + np.log(g.levels)
        prev = np.concatenate(([-np.inf], np.maximum.accumulate(piece_sup)))
        with np.errstate(divide="ignore"):
            cur = np.log(levels[idx]) + _sup_weight_on(w2.a, w2.b, starts[idx], t)
        logJ = np.maximum(prev[idx], cur)
    else:
        bounds = np.concatenate(([0.0], g.breakpoints))
        F = w2.cumulative(bounds)
        done = np.concatenate(([0.0], np.cumsum(g.levels**p * np.diff(F))))
        Ft = w2.cumulative(t)
        inner = done[idx] + levels[idx] ** p * np.maximum(Ft - F[np.minimum(idx, F.size - 1)], 0.0)
        with np.errstate(divide="ignore"):
            logJ = np.log(inner) / p
    if m == INF:
        if not (ex[0] + ex[2] > 0 or (ex[0] + ex[2] == 0 and ex[1] + ex[3] <= 0)):
            raise DivergenceError(f"{spec} norm is infinite")
        val = np.max(w1.log(x) + logJ)
        if np.isposinf(val):
            raise DivergenceError(f"{spec} norm is infinite")
        return float(np.exp(val))
    integrand = np.exp(w1.log(x) + x + m * logJ)
    return float(np.sum(integrand * wx)) ** (1.0 / m)


def _weighted_root(g, w, r):
    # (integral g**r w)**(1/r) evaluated in log space so large r cannot underflow
    return math.exp(log_integrate_weighted(g, w, r) / r)


def space_norm(f, spec):
    """(Quasi-)norm of ``f`` in ``spec``; ``f`` is a SimpleFunction or its rearrangement."""
    g = _as_step(f)
    k = spec.kind
    if k == "lebesgue":
        if spec.p == INF:
            return float(g.levels[0]) if not g.is_zero else 0.0
        return _weighted_root(g, LogPowerWeight(), spec.p)
    if k == "lorentz":
        p, q = spec.p, spec.q
        if spec.variant == "maximal":
            return _lorentz_maximal(g, p, q)
        if q == INF:
            return _lz_sup(g, p, 0.0)
        return _weighted_root(g, LogPowerWeight(q / p - 1.0, 0.0), q)
    if k == "lorentz_zygmund":
        p, q, lam = spec.p, spec.q, spec.lam
        if q == INF:
            return _lz_sup(g, p, lam)
        return _weighted_root(g, LogPowerWeight(q * _inv(p) - 1.0, lam * q), q)
    if k == "grand":
        if spec.variant == "fk":
            return _grand_fk(g, spec.p, spec.alpha)
        return _grand_eps(g, spec.p, spec.alpha)
    if k == "small":
        return _small(g, spec.p, spec.alpha)
    return _ggamma(g, spec)


# ----------------------------------------------------------------------
# GGamma weight conditions


def check_weight_conditions(spec):
    """Doubling condition on w2 and integrability of the inner weight.

    Returns ``{"c1": bool, "K": float, "c2": bool, "c2_value": float}``.
    For ``w2 = t**a (1 - log t)**b`` the doubling constant over (0, 1/2) is
    ``2**a * max(1, (1 + log 2)**(-b))``.
    """
    if spec.kind != "ggamma":
        raise SpecError("weight conditions apply to GGamma specs only")
    a, b = spec.w2.a, spec.w2.b
    K = 2.0**a * max(1.0, (1.0 + math.log(2.0)) ** (-b))
    c1 = math.isfinite(K)
    ex = _near_zero_exponents(spec)
    if ex is None:
        return {"c1": c1, "K": K, "c2": False, "c2_value": INF}
    if spec.m == INF:
        c2 = (ex[0] + ex[2] > 0) or (ex[0] + ex[2] == 0 and ex[1] + ex[3] <= 0)
    else:
        c2 = quadrature.weight_is_integrable_at_zero(*ex)
    value = INF
    if c2:
        # the inner functional of the indicator of (0, 1)
        value = space_norm(StepFunction(np.array([1.0]), np.array([1.0])), spec)
        if spec.m != INF:
            value = value**spec.m
    return {"c1": c1, "K": K, "c2": bool(c2 and math.isfinite(value)), "c2_value": value}


# ----------------------------------------------------------------------
# inclusion registry


def _lz_included(a, b, tol=1e-12):
    (p, q, l1), (r, s, l2) = a, b
    if r < p:
        return True
    if r != p:
        return False
    if q <= s and l1 >= l2 - tol:
        return True
    if q > s and l1 + _inv(q) > l2 + _inv(s) + tol:
        return True
    if p == INF and q < s and abs(l1 + _inv(q) - (l2 + _inv(s))) <= tol:
        return True
    return False


def inclusion_chains(p, theta=1.0):
    """The grand/small chains at exponent p, each listed from smallest to largest space."""
    pconj = p / (p - 1.0)
    chains = []
    if theta == 1.0:
        chains.append([SpaceSpec.small(p, 1.0), SpaceSpec.lebesgue(p), SpaceSpec.lorentz(p, INF),
                       SpaceSpec.grand(p, 1.0), SpaceSpec.lorentz_zygmund(p, INF, -1.0 / p)])
    chains.append([SpaceSpec.small(p, theta), SpaceSpec.lorentz_zygmund(p, p, theta / (pconj - 1.0)),
                   SpaceSpec.lebesgue(p)])
    chains.append([SpaceSpec.lebesgue(p), SpaceSpec.lorentz_zygmund(p, p, -theta), SpaceSpec.grand(p, theta)])
    return chains


def _same_space(a, b):
    la, lb = a.as_lz(), b.as_lz()
    if la is not None and lb is not None:
        return la[0] == lb[0] and la[1] == lb[1] and abs(la[2] - lb[2]) < 1e-12
    return replace(a, variant=None) == replace(b, variant=None)


def _direct(a, b):
    if _same_space(a, b):
        return True
    la, lb = a.as_lz(), b.as_lz()
    return la is not None and lb is not None and _lz_included(la, lb)


def embedding_registered(source, target):
    """True when ``source`` is contained in ``target`` by a listed inclusion."""
    if _direct(source, target):
        return True
    ps = {s.p for s in (source, target) if 1 < s.p < INF}
    thetas = {1.0} | {s.alpha for s in (source, target) if s.kind in ("grand", "small")}
    for p in ps:
        for theta in thetas:
            for chain in inclusion_chains(p, theta):
                src = [i for i, s in enumerate(chain) if _same_space(s, source)]
                tgt = [i for i, s in enumerate(chain) if _same_space(s, target)]
                if src and tgt and min(src) <= max(tgt):
                    return True
                if src and any(_direct(s, target) for s in chain[min(src):]):
                    return True
                if tgt and any(_direct(source, s) for s in chain[:max(tgt) + 1]):
                    return True
    return False


# ----------------------------------------------------------------------
# reports


@dataclass
class RatioReport:
    """Per-member norms and ratio statistics for a family of functions."""

    spec_a: SpaceSpec
    spec_b: SpaceSpec
    norms_a: list
    norms_b: list
    ratios: list
    excluded: list = field(default_factory=list)
    passed: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def max(self):
        return max(self.ratios) if self.ratios else math.nan

    @property
    def min(self):
        return min(self.ratios) if self.ratios else math.nan

    @property
    def median(self):
        return float(np.median(self.ratios)) if self.ratios else math.nan

    def rows(self, family_id="family"):
        out = []
        j = 0
        for i, (na, nb) in enumerate(zip(self.norms_a, self.norms_b)):
            if i in self.excluded:
                out.append((family_id, i, na, nb, math.nan))
            else:
                out.append((family_id, i, na, nb, self.ratios[j]))
                j += 1
        return out

    def to_csv(self, family_id="family"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family_id", "member_id", "norm_a", "norm_b", "ratio"])
        for row in self.rows(family_id):
            w.writerow([row[0], row[1]] + [repr(float(v)) for v in row[2:]])
        return buf.getvalue()


def _ratios(spec_num, spec_den, family):
    num, den, ratios, excluded = [], [], [], []
    for i, f in enumerate(family):
        try:
            a = space_norm(f, spec_num)
            b = space_norm(f, spec_den)
        except (DivergenceError, OverflowError):
            num.append(math.nan)
            den.append(math.nan)
            excluded.append(i)
            continue
        num.append(a)
        den.append(b)
        if a == 0 and b == 0:
            ratios.append(1.0)
        elif b == 0:
            ratios.append(INF)
        else:
            ratios.append(a / b)
    return num, den, ratios, excluded


def _monotone_blowup(values, growth=2.0):
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return False
    if not np.all(np.isfinite(v)):
        return True
    return bool(np.all(np.diff(v) > 0) and v[-1] / v[0] > growth)


def embedding_report(source, target, family, sweep=None, growth=2.0):
    """Ratios ||f||_target / ||f||_source over ``family``.

    ``sweep`` is an optional list of families along a parameter that pushes
    toward the edge of ``source``; the report fails if the maximal ratio
    grows monotonically by more than ``growth`` along it.
    """
    if not embedding_registered(source, target):
        raise UnsupportedEmbedding(f"{source} -> {target} is not a registered inclusion")
    nt, ns, ratios, excluded = _ratios(target, source, family)
    rep = RatioReport(source, target, ns, nt, ratios, excluded)
    finite = bool(ratios) and all(math.isfinite(r) for r in ratios)
    sweep_max = []
    if sweep:
        for fam in sweep:
            r = _ratios(target, source, fam)[2]
            sweep_max.append(max(r) if r else math.nan)
    stable = not _monotone_blowup(sweep_max, growth) if sweep_max else True
    rep.detail = {"finite": finite, "stable": stable, "sweep_max": sweep_max}
    rep.passed = finite and stable
    return rep


def equivalence_report(spec_a, spec_b, family, budget=1e3):
    """Two-sided ratios ||f||_A / ||f||_B; passes when min > 0, max < inf and
    max/min <= budget."""
    na, nb, ratios, excluded = _ratios(spec_a, spec_b, family)
    rep = RatioReport(spec_a, spec_b, na, nb, ratios, excluded)
    ok = bool(ratios) and all(math.isfinite(r) and r > 0 for r in ratios)
    spread = rep.max / rep.min if ok else INF
    rep.detail = {"spread": spread, "budget": budget}
    rep.passed = ok and spread <= budget
    return rep
