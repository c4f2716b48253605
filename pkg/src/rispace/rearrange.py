"""Rearrangement calculus for piecewise-constant functions.

A :class:`SimpleFunction` is a finite list of ``(value, measure)`` pieces on a
domain of total measure one.  Its decreasing rearrangement is a
:class:`StepFunction` on ``(0, 1)``.  All norms in the package are computed
from the step function, so they depend on ``f`` only through ``f_*``.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from . import quadrature


class DivergenceError(ArithmeticError):
    """A weighted integral is infinite for mathematical reasons."""


_MEASURE_TOL = 1e-12


@dataclass(frozen=True)
class SimpleFunction:
    """Finitely-valued function given as parallel arrays of values and measures."""

    values: np.ndarray
    measures: np.ndarray
    total: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        m = np.asarray(self.measures, dtype=float).ravel()
        if v.shape != m.shape:
            raise ValueError("values and measures must have the same length")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("measures must be finite and nonnegative")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if v.size and abs(math.fsum(m) - self.total) > _MEASURE_TOL * max(1.0, self.total):
            raise ValueError(f"measures sum to {math.fsum(m)!r}, expected {self.total!r}")
        v.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "measures", m)

    @classmethod
    def from_pieces(cls, pieces, total=1.0):
        pieces = list(pieces)
        if not pieces:
            return cls(np.zeros(0), np.zeros(0), total)
        v, m = zip(*pieces)
        return cls(np.array(v, dtype=float), np.array(m, dtype=float), total)

    @classmethod
    def zero(cls):
        return cls(np.zeros(0), np.zeros(0))

    @classmethod
    def from_samples(cls, values, measures=None):
        """Grid samples with (optionally unequal) cell measures, normalized to total 1."""
        values = np.asarray(values, dtype=float).ravel()
        if measures is None:
            measures = np.full(values.size, 1.0 / values.size)
        measures = np.asarray(measures, dtype=float).ravel()
        return cls(values, measures / math.fsum(measures))

    @property
    def pieces(self):
        return list(zip(self.values.tolist(), self.measures.tolist()))

    def normalized(self):
        if self.total == 1.0 or not self.values.size:
            return self
        return SimpleFunction(self.values, self.measures / self.total, 1.0)

    def scale(self, c):
        return SimpleFunction(c * self.values, self.measures, self.total)

    def abs(self):
        return SimpleFunction(np.abs(self.values), self.measures, self.total)

    def to_json(self):
        return json.dumps([[float(v), float(m)] for v, m in self.pieces])

    @classmethod
    def from_json(cls, text, total=1.0):
        data = json.loads(text) if isinstance(text, str) else text
        return cls.from_pieces([(float(v), float(m)) for v, m in data], total)


@dataclass(frozen=True)
class StepFunction:
    """Nonincreasing right-open step function: level ``levels[i]`` on
    ``[breakpoints[i-1], breakpoints[i])`` (with ``breakpoints[-1] = 0``),
    zero beyond the last breakpoint."""

    breakpoints: np.ndarray
    levels: np.ndarray
    total: float = 1.0

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float).ravel()
        c = np.asarray(self.levels, dtype=float).ravel()
        if b.shape != c.shape:
            raise ValueError("breakpoints and levels must have the same length")
        if b.size:
            if b[0] <= 0 or np.any(np.diff(b) <= 0):
                raise ValueError("breakpoints must be positive and strictly increasing")
            if b[-1] > self.total * (1 + _MEASURE_TOL):
                raise ValueError("last breakpoint exceeds the domain measure")
            if np.any(c <= 0) or np.any(np.diff(c) >= 0):
                raise ValueError("levels must be positive and strictly decreasing")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "levels", c)

    @property
    def is_zero(self):
        return self.levels.size == 0

    @property
    def starts(self):
        return np.concatenate(([0.0], self.breakpoints[:-1]))

    @property
    def widths(self):
        return np.diff(np.concatenate(([0.0], self.breakpoints)))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.breakpoints, s, side="right")
        padded = np.concatenate((self.levels, [0.0]))
        return padded[idx]

    def distribution(self, t):
        """Measure of ``{f_* >= t}``; agrees exactly with the source function's."""
        if t < 0:
            raise ValueError("distribution threshold must be nonnegative")
        if t == 0:
            return self.total
        k = int(np.count_nonzero(self.levels >= t))
        return float(self.breakpoints[k - 1]) if k else 0.0

    def cumulative(self, s):
        """integral_0^s f_*, vectorized."""
        s = np.asarray(s, dtype=float)
        if self.is_zero:
            return np.zeros_like(s)
        area = np.concatenate(([0.0], np.cumsum(self.levels * self.widths)))
        starts = np.concatenate((self.starts, [self.breakpoints[-1]]))
        padded = np.concatenate((self.levels, [0.0]))
        idx = np.searchsorted(self.breakpoints, s, side="right")
        return area[idx] + padded[idx] * (s - starts[idx])

    def to_json(self):
        return json.dumps({"breakpoints": self.breakpoints.tolist(), "levels": self.levels.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        return cls(np.array(data["breakpoints"], dtype=float), np.array(data["levels"], dtype=float))


@dataclass(frozen=True)
class LogPowerWeight:
    """The weight ``t**a * (1 - log t)**b`` on (0, 1)."""

    a: float = 0.0
    b: float = 0.0

    def __mul__(self, other):
        return LogPowerWeight(self.a + other.a, self.b + other.b)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t**self.a * (1.0 - np.log(t)) ** self.b

    def log(self, x):
        """log w(e**x)."""
        return self.a * x + self.b * np.log1p(-x)

    def cumulative(self, t):
        """integral_0^t w, vectorized; ``inf`` where it diverges."""
        return quadrature.cumulative_weight(t, self.a, self.b)

    @property
    def integrable_at_zero(self):
        return quadrature.weight_is_integrable_at_zero(self.a, self.b)

    def to_dict(self):
        return {"a": self.a, "b": self.b}


def distribution(f, t):
    """D_f(t) = |{ |f| >= t }|."""
    if t < 0:
        raise ValueError("distribution threshold must be nonnegative")
    if t == 0:
        return float(f.total)
    return math.fsum(f.measures[np.abs(f.values) >= t])


def rearrange(f):
    """Decreasing rearrangement ``f_*`` of a simple function.

    Pieces are sorted by ``|value|``; ties merge into one step and zero
    values are dropped.  Breakpoints are correctly rounded partial sums, so
    they coincide bit-for-bit with :func:`distribution`.
    """
    mag = np.abs(f.values)
    keep = (mag > 0) & (f.measures > 0)
    mag, meas = mag[keep], f.measures[keep]
    if not mag.size:
        return StepFunction(np.zeros(0), np.zeros(0), f.total)
    levels, inverse = np.unique(mag, return_inverse=True)
    grouped = [Fraction(0)] * levels.size
    for j, m in zip(inverse.tolist(), meas.tolist()):
        grouped[j] += Fraction(m)
    breaks = []
    acc = Fraction(0)
    for j in range(levels.size - 1, -1, -1):
        acc += grouped[j]
        breaks.append(float(acc))
    return StepFunction(np.array(breaks), levels[::-1].copy(), f.total)


def maximal(g, s):
    """f_**(s) = (1/s) integral_0^s f_*  for 0 < s < 1."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0) or np.any(s_arr >= g.total):
        raise ValueError("maximal function is defined for 0 < s < 1")
    out = g.cumulative(s_arr) / s_arr
    return float(out) if out.ndim == 0 else out


def log_integrate_weighted(g, w, r):
    """Logarithm of :func:`integrate_weighted`, free of underflow and overflow.

    Returns ``-inf`` for the zero function.
    """
    if r <= 0:
        raise ValueError("exponent r must be positive")
    if g.is_zero:
        return -math.inf
    logF = quadrature.log_cumulative_weight(g.breakpoints, w.a, w.b)
    if np.isposinf(logF[0]):
        raise DivergenceError(f"weight t^{w.a} (1-log t)^{w.b} is not integrable at 0")
    logl = np.log(g.levels)
    # log(l_k**r - l_{k+1}**r), the last level drops to zero
    ratio = np.concatenate((r * (logl[1:] - logl[:-1]), [-np.inf]))
    log_jumps = r * logl + np.log1p(-np.exp(ratio))
    return float(logsumexp(log_jumps + logF))


def integrate_weighted(g, w, r):
    """integral_0^1 g(t)**r * t**a * (1 - log t)**b dt for a step function g.

    The integral is summed by parts against the cumulative weight
    ``F(t) = integral_0^t w``, which is evaluated through the upper incomplete
    gamma function.  Every term of the sum is nonnegative.
    """
    log_total = log_integrate_weighted(g, w, r)
    if log_total > 709.78:
        raise OverflowError("weighted integral overflowed double precision")
    return math.exp(log_total)
