"""Discrete weak solutions of  -div(|grad u|**(p-2) grad u) + V(x, u) = f.

Unknowns live on the nodes of a uniform grid over the unit interval or the
unit square, with u = 0 on boundary and masked-out nodes.  Gradients are
forward differences attached to cells, so for p = 2 the scheme reduces to
the standard 3-point / 5-point Laplacian.  The solution minimizes the
convex discrete energy

    J(u) = h**n * [ sum_cells (|grad u|**2 + eps)**(p/2) / p
                    + sum_nodes W(x, u) - sum_nodes f u ]

by Newton's method with the exact Hessian and Armijo backtracking.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import spsolve

from .rearrange import SimpleFunction
from .spaces import space_norm

EPS_REG = 1e-10
MAX_ITER = 100_000


class ConvergenceError(RuntimeError):
    """The solver stopped before reaching the residual tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class NotConverged(ValueError):
    """An operation that needs converged solutions received an unconverged one."""


def truncate(sigma, k):
    """T_k(sigma) = (|k + sigma| - |k - sigma|) / 2, i.e. sigma clamped to [-k, k]."""
    if not k > 0:
        raise ValueError("truncation level k must be positive")
    sigma = np.asarray(sigma, dtype=float)
    out = 0.5 * (np.abs(k + sigma) - np.abs(k - sigma))
    return float(out) if out.ndim == 0 else out


def exponents(p, n):
    """Sobolev bookkeeping: n', p*, (p*)'.

    For p >= n there is no Sobolev exponent; p* is then taken as 2p, any
    finite value being admissible in that range.
    """
    n_prime = n / (n - 1.0) if n > 1 else math.inf
    p_star = n * p / (n - p) if p < n else 2.0 * p
    p_star_conj = p_star / (p_star - 1.0)
    return {"n_prime": n_prime, "p_star": p_star, "p_star_conj": p_star_conj}


# ----------------------------------------------------------------------
# grids


def _rle(mask):
    flat = mask.ravel().astype(np.int8)
    change = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [flat.size])))
    return {"first": int(flat[0]) if flat.size else 0, "runs": lengths.tolist()}


def _unrle(data, shape):
    out = np.empty(int(np.prod(shape)), dtype=bool)
    pos, val = 0, bool(data["first"])
    for r in data["runs"]:
        out[pos:pos + r] = val
        pos += r
        val = not val
    return out.reshape(shape)


class Grid:
    """Uniform grid with ``n`` cells per axis on the unit interval or square.

    ``mask`` flags interior nodes; nodes on the box boundary are never
    interior.  Cell measures are normalized so that the active cells have
    total measure one.
    """

    def __init__(self, dim, n, mask=None):
        if dim not in (1, 2):
            raise ValueError("grids are 1-D or 2-D")
        if n < 2:
            raise ValueError("need at least two cells per axis")
        self.dim, self.n = dim, int(n)
        shape = (n + 1,) * dim
        if mask is None:
            mask = np.zeros(shape, dtype=bool)
            mask[(slice(1, n),) * dim] = True
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != shape:
            raise ValueError(f"mask must have shape {shape}")
        edge = np.ones(shape, dtype=bool)
        edge[(slice(1, n),) * dim] = False
        if np.any(mask & edge):
            raise ValueError("box boundary nodes cannot be interior")
        if not mask.any():
            raise ValueError("grid has no interior nodes")
        self.mask = mask
        self._build()

    @classmethod
    def square(cls, n):
        return cls(2, n)

    @classmethod
    def interval(cls, n):
        return cls(1, n)

    @classmethod
    def disk(cls, n):
        x = np.arange(n + 1) / n
        X, Y = np.meshgrid(x, x, indexing="ij")
        return cls(2, n, (X - 0.5) ** 2 + (Y - 0.5) ** 2 < 0.25 - 1e-12)

    @property
    def h(self):
        return 1.0 / self.n

    @property
    def shape(self):
        return self.mask.shape

    @property
    def weight(self):
        return self.h**self.dim

    def coords(self):
        x = np.arange(self.n + 1) * self.h
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def _build(self):
        n, h = self.n, self.h
        idx = np.full(self.shape, -1, dtype=np.int64)
        idx[self.mask] = np.arange(int(self.mask.sum()))
        self.index = idx
        self.size = int(self.mask.sum())
        anchors = idx[(slice(0, n),) * self.dim]
        ops = []
        for k in range(self.dim):
            sl = [slice(0, n)] * self.dim
            sl[k] = slice(1, n + 1)
            fwd = idx[tuple(sl)].ravel()
            back = anchors.ravel()
            cells = np.arange(back.size)
            rows, cols, vals = [], [], []
            for nodes, sgn in ((fwd, 1.0), (back, -1.0)):
                ok = nodes >= 0
                rows.append(cells[ok])
                cols.append(nodes[ok])
                vals.append(np.full(int(ok.sum()), sgn / h))
            ops.append(sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                     shape=(back.size, self.size)))
        active = np.zeros(anchors.size, dtype=bool)
        for D in ops:
            active |= np.diff(D.indptr) > 0
        self.active = active.reshape(anchors.shape)
        self.D = [D[active] for D in ops]
        self.cell_count = int(active.sum())
        self.cell_measure = 1.0 / self.cell_count
        self.node_measure = 1.0 / self.size

    def sample(self, func):
        """GridFunction from a callable of the node coordinates, zeroed off the interior."""
        vals = np.broadcast_to(np.asarray(func(*self.coords()), dtype=float), self.shape)
        return GridFunction(self, np.where(self.mask, vals, 0.0))

    def constant(self, c):
        return GridFunction(self, np.where(self.mask, float(c), 0.0))

    def header(self):
        return {"dim": self.dim, "n": self.n, "h": self.h, "mask": _rle(self.mask)}

    def to_json(self):
        return json.dumps(self.header())

    @classmethod
    def from_header(cls, d):
        shape = (d["n"] + 1,) * d["dim"]
        return cls(d["dim"], d["n"], _unrle(d["mask"], shape))

    @classmethod
    def from_json(cls, text):
        return cls.from_header(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, Grid) and self.dim == other.dim and self.n == other.n and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.dim, self.n, self.mask.tobytes()))


@dataclass
class SolveInfo:
    converged: bool
    iterations: int
    residual: float
    tol: float
    p: float
    residual_history: list = field(default_factory=list)
    energy_history: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


class GridFunction:
    """Node values on a grid, zero off the interior mask."""

    def __init__(self, grid, values, info=None):
        v = np.array(values, dtype=float)
        if v.shape != grid.shape:
            v = v.reshape(grid.shape)
        if np.any(v[~grid.mask] != 0):
            raise ValueError("grid functions vanish on boundary and masked-out nodes")
        v.setflags(write=False)
        self.grid, self.values, self.info = grid, v, info

    @classmethod
    def from_interior(cls, grid, vec, info=None):
        v = np.zeros(grid.shape)
        v[grid.mask] = vec
        return cls(grid, v, info)

    @property
    def interior(self):
        return self.values[self.grid.mask]

    def __add__(self, other):
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - other.values)

    def scale(self, c):
        return GridFunction(self.grid, c * self.values)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def as_simple(self):
        """Interior node values with equal measures summing to one."""
        return SimpleFunction.from_samples(self.interior)

    def l2(self):
        return math.sqrt(self.grid.weight * float(np.sum(self.interior**2)))

    def to_json(self):
        d = {"grid": self.grid.header(), "values": self.values.ravel().tolist()}
        if self.info is not None:
            d["run"] = self.info.to_dict()
        return json.dumps(d)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        grid = Grid.from_header(d["grid"])
        info = SolveInfo(**d["run"]) if "run" in d else None
        return cls(grid, np.array(d["values"]).reshape(grid.shape), info)


@dataclass(frozen=True)
class PotentialSpec:
    """V(x, sigma) = c(x) sign(sigma) |sigma|**m1 with a bounded coefficient c >= 0."""

    c: object = 0.0
    m1: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise ValueError("potential coefficient must be finite and nonnegative")
        if not self.m1 > 0:
            raise ValueError("potential exponent must be positive")

    @classmethod
    def zero(cls):
        return cls(0.0, 1.0)

    @property
    def is_zero(self):
        return not np.any(np.asarray(self.c))

    def coefficient(self, grid):
        c = np.asarray(self.c, dtype=float)
        if c.ndim == 0:
            return np.full(grid.size, float(c))
        return np.broadcast_to(c, grid.shape)[grid.mask]

    def upper_exponent(self, p, n):
        """Largest admissible growth exponent (exclusive) for p < n, else inf."""
        return (p - 1.0) * (1.0 + 1.0 / (n - p)) if p < n else math.inf

    def satisfies_growth(self, p, n):
        """Growth condition: p - 1 <= m1 < upper_exponent(p, n)."""
        return p - 1.0 <= self.m1 < self.upper_exponent(p, n)

    def value(self, c, u):
        return c * np.sign(u) * np.abs(u) ** self.m1

    def primitive(self, c, u):
        return c * np.abs(u) ** (self.m1 + 1.0) / (self.m1 + 1.0)

    def derivative(self, c, u):
        return c * self.m1 * (u * u + EPS_REG) ** ((self.m1 - 1.0) / 2.0)

    def on(self, u):
        """V(x, u) as a GridFunction."""
        c = self.coefficient(u.grid)
        return GridFunction.from_interior(u.grid, self.value(c, u.interior))

    def to_dict(self):
        c = np.asarray(self.c)
        return {"c": float(c) if c.ndim == 0 else c.tolist(), "m1": self.m1}


# ----------------------------------------------------------------------
# energy and solver


class _Energy:
    def __init__(self, grid, p, V, f, eps=EPS_REG):
        self.grid, self.p, self.V, self.eps = grid, p, V, eps
        self.f = f.interior
        self.c = V.coefficient(grid)
        self.w = grid.weight
        self.use_v = not V.is_zero

    def grads(self, u):
        return [D @ u for D in self.grid.D]

    def value(self, u):
        G = self.grads(u)
        s = sum(g * g for g in G)
        p = self.p
        J = np.sum((s + self.eps) ** (p / 2.0) - self.eps ** (p / 2.0)) / p
        if self.use_v:
            J += np.sum(self.V.primitive(self.c, u))
        return self.w * (J - np.dot(self.f, u))

    def gradient(self, u, G=None):
        G = self.grads(u) if G is None else G
        s = sum(g * g for g in G)
        a = (s + self.eps) ** ((self.p - 2.0) / 2.0)
        r = sum(D.T @ (a * g) for D, g in zip(self.grid.D, G)) - self.f
        if self.use_v:
            r = r + self.V.value(self.c, u)
        return self.w * r

    def hessian(self, u, G):
        s = sum(g * g for g in G)
        a = (s + self.eps) ** ((self.p - 2.0) / 2.0)
        b = (self.p - 2.0) * (s + self.eps) ** ((self.p - 4.0) / 2.0)
        D = self.grid.D
        H = None
        for k in range(len(D)):
            for l in range(len(D)):
                coef = b * G[k] * G[l] + (a if k == l else 0.0)
                term = D[k].T @ sp.diags(coef) @ D[l]
                H = term if H is None else H + term
        if self.use_v:
            H = H + sp.diags(self.V.derivative(self.c, u))
        return (self.w * H).tocsc()

    def residual(self, grad):
        # nodal residual -Delta_p u + V - f in the discrete L^2 norm
        return math.sqrt(np.sum((grad / self.w) ** 2) * self.w)


def _initial_guess(E):
    grid = E.grid
    L = sum(D.T @ D for D in grid.D).tocsc()
    u2 = spsolve(L, E.f)
    if not np.any(u2):
        return u2
    res = minimize_scalar(lambda z: E.value(math.exp(z) * u2), bounds=(-40.0, 40.0), method="bounded",
                          options={"xatol": 1e-6})
    return math.exp(res.x) * u2 if E.value(math.exp(res.x) * u2) < E.value(0 * u2) else 0 * u2


def solve_weak(grid, p, V, f, tol=1e-8, max_iter=MAX_ITER, eps=EPS_REG):
    """Discrete weak solution of the Dirichlet problem.

    Parameters
    ----------
    grid : Grid
    p : float
        Exponent of the p-Laplacian, p > 1.
    V : PotentialSpec or None
    f : GridFunction
    tol : float
        Stop when the residual norm is below ``tol * (1 + ||f||)``.

    Returns
    -------
    GridFunction
        The solution, with a :class:`SolveInfo` in ``.info``.
    """
    if not p > 1:
        raise ValueError("the p-Laplacian solver needs p > 1")
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if f.grid != grid:
        raise ValueError("data lives on a different grid")
    if not np.all(np.isfinite(f.values)):
        raise ValueError("data must be finite")
    V = PotentialSpec.zero() if V is None else V
    E = _Energy(grid, p, V, f, eps)
    target = tol * (1.0 + f.l2())
    u = _initial_guess(E)
    J = E.value(u)
    G = E.grads(u)
    g = E.gradient(u, G)
    res = E.residual(g)
    info = SolveInfo(False, 0, res, tol, p, [res], [J])
    for it in range(1, max_iter + 1):
        if res < target:
            info.converged = True
            break
        H = E.hessian(u, G)
        d = spsolve(H, -g)
        slope = float(np.dot(g, d))
        if not slope < 0:
            d, slope = -g, -float(np.dot(g, g))
        step, accepted = 1.0, False
        while step > 1e-12:
            un = u + step * d
            Jn = E.value(un)
            if Jn <= J + 1e-4 * step * slope:
                accepted = True
                break
            if abs(Jn - J) <= 1e-13 * max(abs(J), 1e-300):
                # energy is flat to roundoff: accept if the residual improves
                gn = E.gradient(un)
                if E.residual(gn) < res:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            info.iterations = it
            raise ConvergenceError("line search stalled", res)
        u, J = un, min(Jn, J)
        G = E.grads(u)
        g = E.gradient(u, G)
        res = E.residual(g)
        info.iterations = it
        info.residual = res
        info.residual_history.append(res)
        info.energy_history.append(float(J))
    if not info.converged:
        raise ConvergenceError(f"no convergence in {max_iter} iterations", res)
    return GridFunction.from_interior(grid, u, info)


# ----------------------------------------------------------------------
# gradients and checks


class GradientField:
    """Forward-difference gradient on the active cells of a grid."""

    def __init__(self, grid, vectors):
        self.grid = grid
        self.vectors = np.asarray(vectors, dtype=float).reshape(grid.cell_count, grid.dim)
        self.measures = np.full(grid.cell_count, grid.cell_measure)

    @classmethod
    def of(cls, u):
        return cls(u.grid, np.stack([D @ u.interior for D in u.grid.D], axis=1))

    @property
    def magnitude(self):
        return np.linalg.norm(self.vectors, axis=1)

    def as_simple(self):
        """|grad u| on each cell, measures summing to one."""
        return SimpleFunction.from_samples(self.magnitude, self.measures)

    def __sub__(self, other):
        return GradientField(self.grid, self.vectors - other.vectors)


def solution_map_gradient(grid, p, V, f, tol=1e-8):
    """The solution map f -> grad u."""
    return GradientField.of(solve_weak(grid, p, V, f, tol))


def gradient_norm(g, spec):
    return space_norm(g.as_simple(), spec)


def truncation_observable(u, k, p):
    """k**(-1/p) ||grad T_k(u)||_{L^p}."""
    tk = GridFunction(u.grid, truncate(u.values, k))
    mag = GradientField.of(tk).magnitude
    return k ** (-1.0 / p) * (np.sum(mag**p) * u.grid.weight) ** (1.0 / p)


def coercivity_ratio(xi, eta, p):
    """(|xi|^(p-2) xi - |eta|^(p-2) eta).(xi - eta) / |xi - eta|^p for row vectors."""
    xi, eta = np.atleast_2d(xi), np.atleast_2d(eta)
    nx = np.linalg.norm(xi, axis=1, keepdims=True)
    ne = np.linalg.norm(eta, axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(nx > 0, nx ** (p - 2.0), 0.0) * xi
        b = np.where(ne > 0, ne ** (p - 2.0), 0.0) * eta
    d = xi - eta
    return np.sum((a - b) * d, axis=1) / np.linalg.norm(d, axis=1) ** p


@dataclass
class MonotonicityReport:
    lhs: float
    rhs: float
    v_sum: float
    c_p: float

    @property
    def slack(self):
        return self.rhs - self.lhs

    def holds(self, slack_tol=1e-6, v_tol=1e-10):
        return self.slack >= -slack_tol and self.v_sum <= v_tol


def monotonicity_check(u1, u2, f1, f2, p, V=None):
    """Discrete coercivity chain for two converged solutions, p >= 2.

    ``lhs = 2**(2-p) sum |grad(u1 - u2)|**p``, ``rhs = sum (f1 - f2)(u1 - u2)``
    and ``v_sum = sum (V(u2) - V(u1))(u1 - u2)``, all against the grid weight.
    """
    if p < 2:
        raise ValueError("the coercivity chain needs p >= 2")
    for u in (u1, u2):
        if u.info is None or not u.info.converged:
            raise NotConverged("monotonicity check needs converged solutions")
    V = PotentialSpec.zero() if V is None else V
    grid, w = u1.grid, u1.grid.weight
    du = u1.interior - u2.interior
    dg = GradientField.of(u1 - u2).magnitude
    c_p = 2.0 ** (2.0 - p)
    lhs = c_p * float(np.sum(dg**p)) * w
    rhs = float(np.dot(f1.interior - f2.interior, du)) * w
    c = V.coefficient(grid)
    v_sum = float(np.dot(V.value(c, u2.interior) - V.value(c, u1.interior), du)) * w
    return MonotonicityReport(lhs, rhs, v_sum, c_p)
