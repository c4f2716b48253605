import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rispace.families import (
    coupled_pair,
    indicator,
    power_log,
    power_log_family,
    random_family,
    random_simple,
)
from rispace.rearrange import DivergenceError, LogPowerWeight, SimpleFunction, rearrange
from rispace.spaces import (
    INF,
    SpaceSpec,
    SpecError,
    UnsupportedEmbedding,
    check_weight_conditions,
    embedding_registered,
    embedding_report,
    equivalence_report,
    inclusion_chains,
    space_norm,
)


def all_kind_specs():
    return [
        SpaceSpec.lebesgue(1.5),
        SpaceSpec.lebesgue(INF),
        SpaceSpec.lorentz(2, 1),
        SpaceSpec.lorentz(3, INF),
        SpaceSpec.lorentz(2, 3, maximal=True),
        SpaceSpec.lorentz_zygmund(2, 2, -0.5),
        SpaceSpec.lorentz_zygmund(1.5, INF, 1.0),
        SpaceSpec.lorentz_zygmund(2, 0.5, 0.3),
        SpaceSpec.grand(2, 1),
        SpaceSpec.grand(3, 0.5, fk=True),
        SpaceSpec.small(2, 1),
        SpaceSpec.ggamma(2, 3, LogPowerWeight(0.5, 1), LogPowerWeight(-0.5, 0.5)),
        SpaceSpec.ggamma(INF, 2, LogPowerWeight(-1, -2), LogPowerWeight(0.5, 0)),
    ]


def ggamma_indicator_oracle(m_meas, p, m, w1, w2):
    """GGamma norm of the indicator of (0, m_meas) by nested quadrature in u = 1 - log t."""

    def W2(t):
        if t <= 0:
            return 0.0
        u0 = 1 - math.log(t)
        return integrate.quad(lambda u: math.exp((w2.a + 1) * (1 - u)) * u**w2.b, u0, math.inf,
                              epsrel=1e-12, limit=200)[0]

    def J(t):
        return W2(min(t, m_meas)) ** (1 / p)

    def outer(u):
        t = math.exp(1 - u)
        if t == 0.0:
            return 0.0
        return t * w1(t) * J(t) ** m

    u_m = 1 - math.log(m_meas)
    val = integrate.quad(outer, 1, u_m, epsrel=1e-11, limit=200)[0]
    val += integrate.quad(outer, u_m, 700.0, epsrel=1e-11, limit=400)[0]
    return val ** (1 / m)


# closed forms -----------------------------------------------------------


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("q", [1, 2, 64])
@pytest.mark.parametrize("m", [1e-6, 0.01, 0.37, 1.0])
def test_lorentz_indicator_closed_form(p, q, m):
    got = space_norm(indicator(m), SpaceSpec.lorentz(p, q))
    assert got == pytest.approx((p / q) ** (1 / q) * m ** (1 / p), rel=1e-8)


@pytest.mark.parametrize("p", [1, 2, 3.5])
def test_lorentz_weak_indicator(p):
    assert space_norm(indicator(0.2), SpaceSpec.lorentz(p, INF)) == pytest.approx(0.2 ** (1 / p), rel=1e-12)


@pytest.mark.parametrize("m", [1e-4, 0.3, 1.0])
@pytest.mark.parametrize("p", [0.5, 1, 2, 7])
def test_lebesgue_indicator(m, p):
    assert space_norm(indicator(m), SpaceSpec.lebesgue(p)) == pytest.approx(m ** (1 / p), rel=1e-12)


@pytest.mark.parametrize("r", [1.0, 2.0, 5.0])
def test_weak_norm_of_power_profile(r):
    assert space_norm(power_log(r), SpaceSpec.lorentz(r, INF)) == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("p,q,lam", [(2, 1, 1), (1, 1, 2), (3, 2, 1), (2, 0.5, 4), (4, 3, 2)])
def test_lorentz_zygmund_constant_closed_form(p, q, lam):
    # integral_0^1 t**(s-1) (1 - log t)**n dt = n!/s**(n+1) sum_k s**k/k!  (s = q/p, n = lam q)
    s, n = q / p, int(lam * q)
    assert n == lam * q
    closed = math.factorial(n) / s ** (n + 1) * sum(s**k / math.factorial(k) for k in range(n + 1))
    got = space_norm(SimpleFunction.from_pieces([(1.0, 1.0)]), SpaceSpec.lorentz_zygmund(p, q, lam))
    assert got == pytest.approx(closed ** (1 / q), rel=1e-10)


@given(st.integers(0, 10_000), st.sampled_from([(1.5, 1.0), (2.0, 3.0), (4.0, 2.0), (1.2, 64.0)]))
@settings(max_examples=40)
def test_lorentz_pp_is_lebesgue(seed, pq):
    p, _ = pq
    f = random_simple(np.random.default_rng(seed))
    assert space_norm(f, SpaceSpec.lorentz(p, p)) == pytest.approx(space_norm(f, SpaceSpec.lebesgue(p)), rel=1e-10)


def test_grand_norm_against_dense_search():
    rng = np.random.default_rng(3)
    for p, alpha in [(2.0, 1.0), (3.0, 0.5), (1.5, 2.0)]:
        for _ in range(5):
            f = random_simple(rng, 10, decades=1)
            eps = np.linspace(1e-7, p - 1 - 1e-9, 400_001)
            a, m = np.abs(f.values), f.measures
            vals = (eps**alpha * np.sum(a[None, :] ** (p - eps[:, None]) * m[None, :], axis=1)) ** (1 / (p - eps))
            assert space_norm(f, SpaceSpec.grand(p, alpha)) == pytest.approx(vals.max(), rel=1e-6)


@pytest.mark.parametrize("p,alpha", [(2.0, 1.0), (3.0, 2.0), (1.5, 0.5)])
def test_small_norm_of_constant(p, alpha):
    pc = p / (p - 1)
    # integral_0^1 (1 - log t)**(alpha/p' - 1) t**(1/p) dt/t with t = e**(1-u)
    ref = integrate.quad(lambda u: u ** (alpha / pc - 1) * math.exp((1 - u) / p), 1, math.inf, epsrel=1e-12)[0]
    assert space_norm(SimpleFunction.from_pieces([(1.0, 1.0)]), SpaceSpec.small(p, alpha)) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("p,m,w1,w2", [
    (2, 3, LogPowerWeight(0.5, 1), LogPowerWeight(-0.5, 0.5)),
    (1, 1, LogPowerWeight(-1, -2), LogPowerWeight(0, 0)),
    (3, 2, LogPowerWeight(-1, 0.5), LogPowerWeight(-0.7, -1.0)),
])
@pytest.mark.parametrize("meas", [0.05, 0.6])
def test_ggamma_indicator_against_nested_quadrature(p, m, w1, w2, meas):
    got = space_norm(indicator(meas), SpaceSpec.ggamma(p, m, w1, w2))
    assert got == pytest.approx(ggamma_indicator_oracle(meas, p, m, w1, w2), rel=1e-7)


def test_ggamma_sup_inner_indicator():
    # J(t) = sup_{s<t} s**(1/2) 1_{s<m} = min(t, m)**(1/2)
    meas, w1 = 0.3, LogPowerWeight(-1.0, -2.0)
    ref = integrate.quad(lambda t: w1(t) * min(t, meas) ** 0.5, 0, 1, points=[meas], epsrel=1e-12)[0]
    got = space_norm(indicator(meas), SpaceSpec.ggamma(INF, 1, w1, LogPowerWeight(0.5, 0)))
    assert got == pytest.approx(ref, rel=1e-8)


def test_ggamma_sup_outer():
    # sup_t t**-1 ... with w1 = t**0: sup_t (integral_0^t 1_{s<m} ds)**(1/1) = m
    got = space_norm(indicator(0.4), SpaceSpec.ggamma(1, INF, LogPowerWeight(0, 0), LogPowerWeight(0, 0)))
    assert got == pytest.approx(0.4, rel=1e-12)


# properties -------------------------------------------------------------


@pytest.mark.parametrize("spec", all_kind_specs(), ids=str)
def test_homogeneity(spec):
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = random_simple(rng, 15)
        for c in (0.01, 3.0, -250.0):
            assert space_norm(f.scale(c), spec) == pytest.approx(abs(c) * space_norm(f, spec), rel=1e-10)


@pytest.mark.parametrize("spec", all_kind_specs(), ids=str)
def test_lattice_monotonicity(spec):
    rng = np.random.default_rng(6)
    for _ in range(10):
        f, g = coupled_pair(rng, 15)
        assert space_norm(f, spec) <= space_norm(g, spec) * (1 + 1e-9)


@pytest.mark.parametrize("spec", all_kind_specs(), ids=str)
def test_rearrangement_invariance(spec):
    rng = np.random.default_rng(7)
    for _ in range(5):
        f = random_simple(rng, 15)
        perm = rng.permutation(f.values.size)
        g = SimpleFunction(-f.values[perm], f.measures[perm])
        assert space_norm(g, spec) == pytest.approx(space_norm(f, spec), rel=1e-12)
        assert space_norm(rearrange(f), spec) == space_norm(f, spec)


@pytest.mark.parametrize("spec", all_kind_specs(), ids=str)
def test_zero_function_has_zero_norm(spec):
    assert space_norm(SimpleFunction.zero(), spec) == 0.0


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("q", [1.0, 2.0, INF])
def test_hardy_bound_for_maximal_variant(p, q):
    pc = p / (p - 1)
    for f in random_family(40, seed=int(10 * p)):
        a = space_norm(f, SpaceSpec.lorentz(p, q, maximal=True))
        b = space_norm(f, SpaceSpec.lorentz(p, q))
        assert b * (1 - 1e-9) <= a <= (pc + 0.01) * b


def test_divergent_norms_signal():
    f = indicator(0.5)
    with pytest.raises(DivergenceError):
        space_norm(f, SpaceSpec.ggamma(1, 1, LogPowerWeight(-2, 0), LogPowerWeight(0, 0)))
    with pytest.raises(DivergenceError):
        space_norm(f, SpaceSpec.lorentz_zygmund(INF, INF, 1.0))


# weight conditions -------------------------------------------------------


def test_weight_conditions():
    r = check_weight_conditions(SpaceSpec.ggamma(1, 1, LogPowerWeight(-1, 0), LogPowerWeight(0, 0)))
    assert r["c1"] and r["K"] == 1.0
    # integral_0^1 t**-1 * t dt = 1
    assert r["c2"] and r["c2_value"] == pytest.approx(1.0)
    r = check_weight_conditions(SpaceSpec.ggamma(2, 2, LogPowerWeight(0, 0), LogPowerWeight(0.5, 0)))
    assert r["c1"] and r["K"] == pytest.approx(math.sqrt(2))
    # Example-2 shape: integrable w1, w2 = t**(q/p - 1)
    p, q = 3.0, 2.0
    r = check_weight_conditions(SpaceSpec.ggamma(q, 4, LogPowerWeight(-0.5, 0), LogPowerWeight(q / p - 1, 0)))
    assert r["c1"] and r["c2"]
    # w1 = t**-1 against an inner functional of order t fails only at m = 0; here t**-2 w1 diverges
    r = check_weight_conditions(SpaceSpec.ggamma(1, 1, LogPowerWeight(-2, 0), LogPowerWeight(0, 0)))
    assert not r["c2"]


def test_doubling_constant_is_sharp_on_a_grid():
    for a, b in [(0.5, 0), (-0.3, 2.0), (1.0, -1.5), (0, -3)]:
        K = check_weight_conditions(SpaceSpec.ggamma(1, 1, LogPowerWeight(0, 0), LogPowerWeight(a, b)))["K"]
        w = LogPowerWeight(a, b)
        t = np.geomspace(1e-300, 0.5, 20001)
        observed = np.max(w(2 * t) / w(t))
        assert observed <= K * (1 + 1e-12)
        # for b > 0 the supremum is approached only as t -> 0, like 1 - b log 2 / |log t|
        assert observed >= K * (1 - 1e-2)


# serialization and validation -------------------------------------------


@pytest.mark.parametrize("spec", all_kind_specs(), ids=str)
def test_json_round_trip(spec):
    assert SpaceSpec.from_json(spec.to_json()) == spec


def test_json_tagged_union_shape():
    d = SpaceSpec.from_dict({"kind": "lorentz_zygmund", "p": 2, "q": 1, "lambda": -0.5})
    assert d == SpaceSpec.lorentz_zygmund(2, 1, -0.5)
    assert SpaceSpec.from_dict({"kind": "lorentz", "p": 2, "q": "inf"}).q == INF


@pytest.mark.parametrize("bad", [
    {"kind": "lorentz", "p": 2, "q": 0.5},
    {"kind": "lorentz", "p": INF, "q": 2},
    {"kind": "grand", "p": 1, "alpha": 1},
    {"kind": "small", "p": 2, "alpha": 0},
    {"kind": "ggamma", "p": 0.5, "m": 1},
    {"kind": "nope", "p": 2},
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(SpecError):
        SpaceSpec.from_dict(bad)


# registry and reports ---------------------------------------------------


@pytest.mark.parametrize("p,theta", [(2.0, 1.0), (3.0, 0.5), (1.5, 2.0)])
def test_chain_entries_registered(p, theta):
    for chain in inclusion_chains(p, theta):
        for a, b in itertools.combinations(chain, 2):
            assert embedding_registered(a, b)
            assert not embedding_registered(b, a), (a, b)


def test_reversed_inclusion_rejected():
    with pytest.raises(UnsupportedEmbedding):
        embedding_report(SpaceSpec.lorentz(2, INF), SpaceSpec.lebesgue(2), random_family(3))
    with pytest.raises(UnsupportedEmbedding):
        embedding_report(SpaceSpec.grand(2, 1), SpaceSpec.lebesgue(2), random_family(3))


def test_lorentz_second_index_inclusion():
    rep = embedding_report(SpaceSpec.lorentz(2, 1), SpaceSpec.lorentz(2, 3), random_family(200, seed=2))
    assert rep.passed and math.isfinite(rep.max)


def test_identical_spaces_ratio_one():
    spec = SpaceSpec.lorentz_zygmund(2, 1, 0.5)
    rep = embedding_report(spec, spec, random_family(20))
    assert rep.passed and rep.max == rep.min == 1.0
    rep = equivalence_report(spec, spec, random_family(20))
    assert rep.passed and rep.max == rep.min == 1.0


def test_embedding_sweep_detects_blowup():
    # L^2 -> L^{2,1} is false; sweeping toward the edge of L^2 blows the ratio up
    sweep = [[power_log(2.0, d, t_min=1e-250)] for d in (1.0, 0.7, 0.55, 0.5)]
    from rispace.spaces import _monotone_blowup, _ratios
    maxes = [max(_ratios(SpaceSpec.lorentz(2, 1), SpaceSpec.lebesgue(2), fam)[2]) for fam in sweep]
    assert _monotone_blowup(maxes)


def test_report_csv_columns():
    rep = equivalence_report(SpaceSpec.lebesgue(2), SpaceSpec.lorentz(2, 2), random_family(3))
    lines = rep.to_csv("rnd").splitlines()
    assert lines[0] == "family_id,member_id,norm_a,norm_b,ratio"
    assert len(lines) == 4


def test_grand_cross_check_equivalence():
    fam = random_family(100, seed=8)
    for p, alpha in [(2.0, 1.0), (3.0, 0.5)]:
        rep = equivalence_report(SpaceSpec.grand(p, alpha), SpaceSpec.grand(p, alpha, fk=True), fam)
        assert rep.passed
        # the constant is stable across halves of the family
        first = equivalence_report(SpaceSpec.grand(p, alpha), SpaceSpec.grand(p, alpha, fk=True), fam[:50])
        second = equivalence_report(SpaceSpec.grand(p, alpha), SpaceSpec.grand(p, alpha, fk=True), fam[50:])
        assert 0.5 < first.median / second.median < 2.0


def test_ggamma_examples_are_equivalent():
    fam = power_log_family([1.2, 2.0, 4.0, 10.0], (0.0, 0.8, 2.0), n=512) + random_family(40, seed=9)
    p, q = 3.0, 2.0
    cases = [
        # integrable single weight gives L^p
        (SpaceSpec.ggamma(2.0, 3.0, LogPowerWeight(-0.5, 1.0)), SpaceSpec.lebesgue(2.0)),
        # w2 = t**(q/p - 1) with integrable w1 gives L^{p,q}
        (SpaceSpec.ggamma(q, 4.0, LogPowerWeight(0.0, 0.0), LogPowerWeight(q / p - 1, 0)), SpaceSpec.lorentz(p, q)),
        # Zygmund-type Gamma space
        (SpaceSpec.ggamma(2.0, 2.0, LogPowerWeight(-1.0, 2 * 1.5 - 1)), SpaceSpec.lorentz_zygmund(2.0, 2.0, 1.5)),
        # Gamma form of the small Lebesgue space, two parametrizations
        (SpaceSpec.ggamma(2.0, 1.0, LogPowerWeight(-1.0, 1.0 / 2 - 1)), SpaceSpec.small(2.0, 1.0)),
        (SpaceSpec.ggamma(2.0, 1.0, LogPowerWeight(-1.0, -0.5), LogPowerWeight(0.0, 0.4)),
         SpaceSpec.small(2.0, 2.0 * (-0.5 + 0.2 + 1))),
    ]
    for a, b in cases:
        rep = equivalence_report(a, b, fam)
        assert rep.passed, (a, b, rep.min, rep.max)
