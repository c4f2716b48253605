import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rispace.plap import (
    ConvergenceError,
    GradientField,
    Grid,
    GridFunction,
    NotConverged,
    PotentialSpec,
    coercivity_ratio,
    exponents,
    gradient_norm,
    monotonicity_check,
    solve_weak,
    truncate,
    truncation_observable,
)
from rispace.spaces import SpaceSpec


def one_dim_oracle(x, p):
    """Solution of -(|u'|^{p-2} u')' = 1 on (0, 1) with zero boundary values."""
    s = 1.0 / (p - 1.0)
    return (0.5 ** (s + 1) - np.abs(0.5 - x) ** (s + 1)) / (s + 1)


def poisson_square_oracle(x, y, terms=199):
    """Fourier series of -Laplace u = 1 on the unit square."""
    total = np.zeros(np.broadcast(x, y).shape)
    for m in range(1, terms + 1, 2):
        for n in range(1, terms + 1, 2):
            total += 16.0 / (math.pi**4 * m * n * (m * m + n * n)) * np.sin(m * math.pi * x) * np.sin(n * math.pi * y)
    return total


# small helpers ------------------------------------------------------------


def test_truncate_examples():
    assert truncate(5.0, 2.0) == 2.0
    assert truncate(-5.0, 2.0) == -2.0
    assert truncate(1.5, 2.0) == 1.5
    np.testing.assert_array_equal(truncate(np.array([-3.0, 0.0, 3.0]), 1.0), [-1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        truncate(1.0, 0.0)


@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e3))
def test_truncate_is_clamp(s, k):
    assert truncate(s, k) == pytest.approx(min(max(s, -k), k), abs=1e-9 * max(1.0, abs(s)))


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_exponent_fixed_point(n):
    # p = 2n/(n+1) is the exponent with (p*)' = p
    p = 2 * n / (n + 1)
    e = exponents(p, n)
    assert e["p_star_conj"] == pytest.approx(p)
    assert e["n_prime"] == pytest.approx(n / (n - 1))


def test_exponents_large_p():
    e = exponents(3.0, 2)
    assert e["p_star"] == 6.0 and e["p_star_conj"] == pytest.approx(1.2)
    assert exponents(2.0, 3)["p_star"] == pytest.approx(6.0)


def test_coercivity_ratio_bound():
    rng = np.random.default_rng(0)
    for p in (2.0, 2.5, 3.0, 5.0):
        xi, eta = rng.normal(size=(500, 2)), rng.normal(size=(500, 2)) * 3
        assert np.all(coercivity_ratio(xi, eta, p) >= 2.0 ** (2.0 - p) * (1 - 1e-12))
    # the bound is attained at eta = -xi
    xi = np.array([[1.0, 0.0]])
    assert coercivity_ratio(xi, -xi, 3.0)[0] == pytest.approx(0.5)


def test_potential_growth_window():
    V = PotentialSpec(1.0, 2.0)
    assert V.satisfies_growth(3.0, 2)  # p >= n: no upper limit
    assert V.upper_exponent(2.0, 3) == pytest.approx(2.0)
    assert not PotentialSpec(1.0, 2.0).satisfies_growth(2.0, 3)
    assert PotentialSpec(1.0, 1.5).satisfies_growth(2.0, 3)
    with pytest.raises(ValueError):
        PotentialSpec(-1.0, 1.0)
    with pytest.raises(ValueError):
        PotentialSpec(1.0, 0.0)


# grids and grid functions -------------------------------------------------


def test_grid_geometry():
    g = Grid.interval(8)
    assert g.h == 1 / 8 and g.size == 7 and g.shape == (9,)
    s = Grid.square(16)
    assert s.size == 15 * 15 and s.dim == 2
    assert s.cell_measure * s.cell_count == pytest.approx(1.0)
    d = Grid.disk(32)
    assert 0 < d.size < 31 * 31
    assert d.cell_measure * d.cell_count == pytest.approx(1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(3, 4)
    with pytest.raises(ValueError):
        Grid(1, 1)
    bad = np.ones(5, dtype=bool)
    with pytest.raises(ValueError):
        Grid(1, 4, bad)


@pytest.mark.parametrize("grid", [Grid.interval(10), Grid.square(12), Grid.disk(20)], ids=["interval", "square", "disk"])
def test_grid_json_round_trip(grid):
    assert Grid.from_json(grid.to_json()) == grid
    u = grid.sample(lambda *xs: sum(xs))
    v = GridFunction.from_json(u.to_json())
    assert v.grid == grid and np.array_equal(v.values, u.values)


def test_grid_function_rejects_boundary_values():
    g = Grid.interval(4)
    with pytest.raises(ValueError):
        GridFunction(g, np.ones(5))
    u = g.constant(2.0)
    with pytest.raises(ValueError):
        u.values[2] = 0.0


def test_discrete_l2_norm():
    g = Grid.interval(2000)
    u = g.sample(lambda x: 0.5 - x)
    assert u.l2() == pytest.approx(1 / math.sqrt(12), rel=1e-3)


# solver -------------------------------------------------------------------


def test_poisson_1d_is_nodally_exact():
    g = Grid.interval(64)
    u = solve_weak(g, 2.0, None, g.constant(1.0))
    x = g.coords()[0]
    np.testing.assert_allclose(u.values, x * (1 - x) / 2, atol=1e-9)
    assert u.info.converged and u.info.iterations <= 3


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
def test_p_laplacian_1d_against_closed_form(p):
    g = Grid.interval(256)
    u = solve_weak(g, p, None, g.constant(1.0))
    x = g.coords()[0]
    exact = one_dim_oracle(x, p)
    assert np.max(np.abs(u.values - exact)) <= 2e-3 * exact.max()


def test_p_laplacian_1d_converges_under_refinement():
    errs = []
    for n in (32, 64, 128):
        g = Grid.interval(n)
        u = solve_weak(g, 3.0, None, g.constant(1.0))
        errs.append(np.max(np.abs(u.values - one_dim_oracle(g.coords()[0], 3.0))))
    assert errs[2] < errs[1] < errs[0]


def test_poisson_square_against_series():
    g = Grid.square(64)
    u = solve_weak(g, 2.0, None, g.constant(1.0))
    X, Y = g.coords()
    exact = poisson_square_oracle(X, Y)
    assert np.max(np.abs(u.values - exact)) <= 1e-3 * exact.max()


def test_zero_data_gives_zero_solution():
    g = Grid.square(16)
    u = solve_weak(g, 3.0, PotentialSpec(1.0, 2.0), g.constant(0.0))
    assert u.max_abs() == 0.0


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_scaling_homogeneity(p):
    g = Grid.square(24)
    f = g.sample(lambda x, y: np.sin(3 * x) + y)
    lam = 8.0
    u1 = solve_weak(g, p, None, f, tol=1e-10)
    u2 = solve_weak(g, p, None, f.scale(lam), tol=1e-10)
    np.testing.assert_allclose(u2.values, lam ** (1 / (p - 1)) * u1.values, rtol=1e-6, atol=1e-9)


def test_energy_is_nonincreasing():
    g = Grid.square(32)
    u = solve_weak(g, 4.0, PotentialSpec(2.0, 3.0), g.sample(lambda x, y: 10 * np.exp(-20 * ((x - .3) ** 2 + y**2))))
    e = np.array(u.info.energy_history)
    assert np.all(np.diff(e) <= 1e-12 * np.abs(e[:-1]))
    assert u.info.residual_history[-1] < u.info.tol * (1 + 10)


@pytest.mark.parametrize("grid,p", [(Grid.interval(64), 3.0), (Grid.interval(64), 1.5), (Grid.square(24), 2.0)])
def test_comparison_principle(grid, p):
    rng = np.random.default_rng(1)
    base = rng.uniform(-1, 1, grid.shape)
    bump = rng.uniform(0, 1, grid.shape)
    f1 = GridFunction(grid, np.where(grid.mask, base, 0.0))
    f2 = GridFunction(grid, np.where(grid.mask, base + bump, 0.0))
    u1 = solve_weak(grid, p, None, f1, tol=1e-10)
    u2 = solve_weak(grid, p, None, f2, tol=1e-10)
    assert np.all(u1.values <= u2.values + 1e-9)


def test_solver_rejects_bad_input():
    g = Grid.interval(8)
    with pytest.raises(ValueError):
        solve_weak(g, 1.0, None, g.constant(1.0))
    with pytest.raises(ValueError):
        solve_weak(g, 2.0, None, Grid.interval(9).constant(1.0))
    with pytest.raises(ValueError):
        solve_weak(g, 2.0, None, g.constant(1.0), tol=0.0)


def test_convergence_error_carries_residual():
    g = Grid.square(24)
    with pytest.raises(ConvergenceError) as exc:
        solve_weak(g, 6.0, None, g.sample(lambda x, y: 100 * x * y), tol=1e-14, max_iter=1)
    assert exc.value.residual > 0


# checks on solutions ------------------------------------------------------


def test_monotonicity_chain():
    g = Grid.square(24)
    V = PotentialSpec(1.0, 2.0)
    f1 = g.sample(lambda x, y: 5 * np.sin(4 * x * y))
    f2 = g.sample(lambda x, y: 3 * np.cos(2 * x) - y)
    u1, u2 = (solve_weak(g, 3.0, V, f, tol=1e-10) for f in (f1, f2))
    rep = monotonicity_check(u1, u2, f1, f2, 3.0, V)
    assert rep.holds() and rep.v_sum <= 0 and rep.lhs > 0
    with pytest.raises(ValueError):
        monotonicity_check(u1, u2, f1, f2, 1.5, V)
    with pytest.raises(NotConverged):
        monotonicity_check(GridFunction(g, u1.values), u2, f1, f2, 3.0, V)


def test_linear_solution_map_bound():
    # for p = 2, ||grad u||_2 <= ||f||_2 / (sqrt(2) pi) on the unit square
    g = Grid.square(32)
    rng = np.random.default_rng(2)
    for _ in range(3):
        f = GridFunction(g, np.where(g.mask, rng.normal(size=g.shape), 0.0))
        u = solve_weak(g, 2.0, None, f)
        grad = GradientField.of(u)
        lhs = math.sqrt(np.sum(grad.magnitude**2) * g.h**2)
        assert lhs <= f.l2() / (math.sqrt(2) * math.pi) * 1.01


def test_gradient_norm_of_linear_function():
    g = Grid.interval(100)
    u = g.sample(lambda x: x * (1 - x))
    grad = GradientField.of(u)
    # |u'| = |1 - 2x| has L^1 norm 1/2 and sup 1
    assert gradient_norm(grad, SpaceSpec.lebesgue(1)) == pytest.approx(0.5, rel=1e-3)
    assert gradient_norm(grad, SpaceSpec.lebesgue(math.inf)) == pytest.approx(1.0, rel=0.02)


def test_truncation_observable():
    g = Grid.interval(128)
    u = solve_weak(g, 3.0, None, g.constant(1.0))
    vals = [truncation_observable(u, k, 3.0) for k in (0.01, 0.1, 1.0)]
    assert all(math.isfinite(v) and v > 0 for v in vals)
    # for k above max |u| the truncation is the identity
    full = (np.sum(GradientField.of(u).magnitude ** 3) * g.h) ** (1 / 3)
    assert vals[2] == pytest.approx(full)
