import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fmellin.errors import DivergenceError, DomainError, NonConvergenceError, PoleError
from fmellin.gammakit import gamma, lower_inc_gamma, upper_inc_gamma
from fmellin.mellin_engine import (
    DirichletSpec,
    MellinQuery,
    band_mellin,
    classical_mellin,
    dirichlet_finite_mellin,
    dirichlet_integrand,
    evaluate,
    finite_mellin_thm1,
    geometric_classical,
    geometric_interval,
    geometric_substitution,
    quadrature_mellin,
    tail_mellin_thm2,
    termwise_mellin,
)
from fmellin.quadrature import QuadratureConfig, integrate_finite
from fmellin.series_kernel import Binomial, Catalan, Exponential, Geometric, SeriesEvalConfig

# frozen oracles: mpmath at 30 digits
GEO5_INTEGRAL = 2.03328147670388169412982191441
GEO_BASE_S05_T09 = 1.51814041853332682670144221516
DIRICHLET_111_S2_T30 = 1.36111111110821024799077052345
BINOMIAL_RESIDUAL = 0.0601360069540332430628671316755
CATALAN2_PHI = 1.50450555612735009852821187083  # phi(-0.5) for mu=2

EXP, GEO, BIN2, CAT3 = Exponential(), Geometric(), Binomial(k=2.0), Catalan(mu=3)
QCFG = QuadratureConfig()


# -- operation examples ---------------------------------------------------------

def test_thm1_examples():
    assert finite_mellin_thm1(EXP, 1, 1).value == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert finite_mellin_thm1(EXP, 0.5, 200).value == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert finite_mellin_thm1(BIN2, 1, 0.5).value == pytest.approx(1 - math.exp(-0.5), rel=1e-14)
    r = finite_mellin_thm1(EXP, 1, 1)
    assert r.method == "theorem1" and r.flags == frozenset() and r.est_error >= 0


def test_thm1_infinite_routes_to_classical():
    r = finite_mellin_thm1(EXP, 0.5, math.inf)
    assert r.method == "classical" and r.value == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_band_examples():
    assert band_mellin(EXP, 1, 1, 2).value == pytest.approx(math.exp(-1) - math.exp(-2), rel=1e-13)
    assert band_mellin(EXP, 1, 2, 2).value == 0.0
    with pytest.raises(DomainError):
        band_mellin(EXP, 1, 3, 2)
    full = geometric_interval(0.5, 5, 0.0, 100.0)
    near = geometric_interval(0.5, 5, 1e-300, 100.0)
    assert near.value == pytest.approx(full.value, rel=1e-14)


def test_tail_examples():
    assert tail_mellin_thm2(EXP, 1, 1).value == pytest.approx(math.exp(-1), rel=1e-14)
    for spec, s in ((EXP, 0.7), (BIN2, 1.3), (CAT3, 0.5), (GEO, 0.4)):
        assert tail_mellin_thm2(spec, s, 0).value == pytest.approx(
            classical_mellin(spec, s).value, rel=1e-14)
    assert tail_mellin_thm2(BIN2, 1, 2).value == pytest.approx(math.exp(-2), rel=1e-14)
    with pytest.raises(DivergenceError, match="strip"):
        tail_mellin_thm2(BIN2, 2.5, 1)


def test_classical_examples():
    assert classical_mellin(EXP, 0.5).value == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert classical_mellin(BIN2, 1).value == pytest.approx(1.0, rel=1e-14)
    expected = math.gamma(0.5) * 3 * math.gamma(2) / math.gamma(3.5)
    assert classical_mellin(CAT3, 0.5).value == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.6, rel=1e-14)
    q = quadrature_mellin(CAT3, 0.5, 0, math.inf)
    assert q.value == pytest.approx(expected, rel=1e-9)
    for spec, s in ((BIN2, 2.0), (CAT3, 1.5), (GEO, 1.2)):
        with pytest.raises(DivergenceError):
            classical_mellin(spec, s)


def test_geometric_examples():
    sub = geometric_substitution(0.5, 5, 100, "substitution_consistent")
    assert sub.value == pytest.approx(GEO5_INTEGRAL, rel=1e-7)
    assert round(sub.value, 5) == 2.03328
    lit = geometric_substitution(0.5, 5, 100, "paper_literal")
    assert lit.value == pytest.approx(10.1664073, rel=1e-7)
    assert lit.value == pytest.approx(math.pi / math.sin(0.1 * math.pi), rel=1e-12)
    lim = geometric_interval(0.5, 1, 0, math.inf)
    assert lim.value == pytest.approx(math.pi, rel=1e-14)
    assert geometric_classical(0.5, 1).value == pytest.approx(math.pi, rel=1e-14)


def test_geometric_overflow_routes_to_limit():
    r = geometric_substitution(0.5, 5, 1e100)
    assert "limit_routed" in r.flags
    assert r.value == pytest.approx(geometric_classical(0.5, 5).value, rel=1e-14)


def test_geometric_pole():
    with pytest.raises(PoleError, match=r"Gamma\(1 - s/k\) at s/k=1"):
        geometric_substitution(2, 2, 1)
    with pytest.raises(PoleError):
        geometric_substitution(4, 2, 1, "paper_literal")
    with pytest.raises(DomainError):
        geometric_substitution(0.5, 5, 1, "bogus")


def test_geometric_base_vs_quadrature():
    tw = termwise_mellin(GEO, 0.5, 0.9)
    q = quadrature_mellin(GEO, 0.5, 0, 0.9)
    assert tw.value == pytest.approx(q.value, rel=1e-8)
    assert tw.value == pytest.approx(GEO_BASE_S05_T09, rel=1e-13)


def test_dirichlet_examples():
    for spec, s, t in ((EXP, 2, 3), (BIN2, 1.2, 5), (CAT3, 0.5, 0.2)):
        d = dirichlet_finite_mellin(spec, DirichletSpec((1.0,)), s, t).value
        assert d == finite_mellin_thm1(spec, s, t).value
    v = dirichlet_finite_mellin(EXP, [1, 1], 1, 50).value
    assert v == pytest.approx(1.5, abs=1e-12)
    d3 = DirichletSpec((1, 1, 1))
    v = dirichlet_finite_mellin(EXP, d3, 2, 30).value
    q = integrate_finite(lambda x: x * (np.exp(-x) + np.exp(-2 * x) + np.exp(-3 * x)), 0, 30)
    assert v == pytest.approx(q.value, rel=1e-10)
    assert v == pytest.approx(DIRICHLET_111_S2_T30, rel=1e-13)
    with pytest.raises(DomainError):
        DirichletSpec(())
    assert d3.M == 3 and d3.g(2) == pytest.approx(1 + 1 / 4 + 1 / 9)


def test_dirichlet_variants_meet_at_infinity():
    d = DirichletSpec((1.0, 0.5, 2.0))
    a = dirichlet_finite_mellin(EXP, d, 1.5, 60, "paper_literal").value
    b = dirichlet_finite_mellin(EXP, d, 1.5, 60, "scale_consistent").value
    assert a == pytest.approx(b, rel=1e-14)
    small_a = dirichlet_finite_mellin(EXP, d, 1.5, 1, "paper_literal").value
    small_b = dirichlet_finite_mellin(EXP, d, 1.5, 1, "scale_consistent").value
    assert abs(small_a - small_b) > 0.1


def test_dirichlet_quadrature_other_family():
    d = DirichletSpec((1.0, -0.5, 0.25))
    f = dirichlet_integrand(EXP, d, 0.7)
    q = integrate_finite(f, 0, 4)
    v = dirichlet_finite_mellin(EXP, d, 0.7, 4)
    assert v.value == pytest.approx(q.value, rel=1e-10)


def test_termwise_examples():
    assert termwise_mellin(BIN2, 1, 0.5).value == pytest.approx(1 / 3, rel=1e-14)
    assert termwise_mellin(EXP, 1, 1).value == pytest.approx(1 - math.exp(-1), rel=1e-14)
    with pytest.raises(DivergenceError):
        termwise_mellin(BIN2, 1, 1.0)
    assert termwise_mellin(EXP, 1, 0).value == 0.0


def test_termwise_large_t_exponential():
    # the alternating terms reach e^50 / 50 while the sum is about 1
    r = termwise_mellin(EXP, 1.0, 50.0)
    assert r.value == pytest.approx(1 - math.exp(-50), rel=1e-15)


def test_termwise_truncation():
    r = termwise_mellin(GEO, 0.5, 0.9, SeriesEvalConfig(max_terms=20))
    assert "truncated" in r.flags
    assert abs(r.value - GEO_BASE_S05_T09) <= r.est_error


def test_termwise_growing_terms():
    with pytest.raises(NonConvergenceError):
        termwise_mellin(EXP, 1.0, 30.0, SeriesEvalConfig(max_terms=10))


def test_binomial_residual_frozen():
    thm = finite_mellin_thm1(BIN2, 1, 0.5).value
    tw = termwise_mellin(BIN2, 1, 0.5).value
    assert abs(thm - tw) == pytest.approx(BINOMIAL_RESIDUAL, abs=1e-12)


def test_catalan_continuation_frozen():
    assert Catalan(mu=2).continuation(0.5) == pytest.approx(CATALAN2_PHI, rel=1e-13)


def test_pole_propagates():
    with pytest.raises(PoleError):
        finite_mellin_thm1(GEO, 1.0, 0.5)
    with pytest.raises(PoleError):
        finite_mellin_thm1(BIN2, 2.0, 0.5)


def test_near_pole_flag():
    r = finite_mellin_thm1(BIN2, 2.0 - 1e-6, 0.5)
    assert "near_pole" in r.flags


# -- evaluate() dispatch -------------------------------------------------------

def test_query_validation():
    with pytest.raises(DomainError):
        MellinQuery(EXP, -1, 1)
    with pytest.raises(DomainError):
        MellinQuery(EXP, 1, 1, lower=2)
    with pytest.raises(DomainError):
        MellinQuery(EXP, 1, 1, method="bogus")


def test_evaluate_dispatch():
    geo5 = Geometric(k=5.0)
    cases = {
        "theorem1": MellinQuery(EXP, 1, 1),
        "theorem2": MellinQuery(EXP, 1, math.inf, lower=1, method="theorem2"),
        "corollary_band": MellinQuery(EXP, 1, 2, lower=1, method="corollary_band"),
        "classical": MellinQuery(EXP, 1, math.inf, method="classical"),
        "termwise": MellinQuery(EXP, 1, 1, method="termwise"),
        "quadrature": MellinQuery(EXP, 1, 1, method="quadrature"),
    }
    expect = {"theorem1": 1 - math.exp(-1), "theorem2": math.exp(-1),
              "corollary_band": math.exp(-1) - math.exp(-2), "classical": 1.0,
              "termwise": 1 - math.exp(-1), "quadrature": 1 - math.exp(-1)}
    for m, q in cases.items():
        r = evaluate(q)
        assert r.method == m
        assert r.value == pytest.approx(expect[m], rel=1e-12)
    r = evaluate(MellinQuery(geo5, 0.5, 100, method="substitution_geo"))
    assert r.value == pytest.approx(GEO5_INTEGRAL, rel=1e-7)
    r = evaluate(MellinQuery(geo5, 0.5, 100, method="quadrature"))
    assert r.value == pytest.approx(GEO5_INTEGRAL, rel=1e-10)
    r = evaluate(MellinQuery(geo5, 0.5, 0.9, method="termwise"))
    assert r.value == pytest.approx(quadrature_mellin(GEO, 0.5, 0, 0.9, k=5.0).value, rel=1e-10)
    r = evaluate(MellinQuery(geo5, 0.5, math.inf, method="theorem1"))
    assert r.value == pytest.approx(math.pi / (5 * math.sin(0.1 * math.pi)), rel=1e-13)


def test_evaluate_rejects_mismatched_intervals():
    with pytest.raises(DomainError):
        evaluate(MellinQuery(EXP, 1, 2, lower=1, method="theorem1"))
    with pytest.raises(DomainError):
        evaluate(MellinQuery(EXP, 1, 2, method="theorem2"))
    with pytest.raises(DomainError):
        evaluate(MellinQuery(EXP, 1, 2, method="classical"))
    with pytest.raises(DomainError):
        evaluate(MellinQuery(EXP, 1, 2, method="substitution_geo"))
    with pytest.raises(DivergenceError):
        evaluate(MellinQuery(EXP, 1, math.inf, method="termwise"))


# -- invariants ----------------------------------------------------------------

SPECS = [EXP, GEO, BIN2, Binomial(k=0.8), CAT3, Catalan(mu=1)]


def _s_in_strip(spec, frac):
    lo, hi = spec.strip()
    hi = min(hi, 6.0)
    return lo + (hi - lo) * frac


@settings(max_examples=80, deadline=None)
@given(i=st.integers(0, len(SPECS) - 1), frac=st.floats(0.05, 0.95), t=st.floats(0.01, 40.0))
def test_algebraic_complement(i, frac, t):
    spec = SPECS[i]
    s = _s_in_strip(spec, frac)
    assume(not spec.near_pole(s))
    lhs = finite_mellin_thm1(spec, s, t).value + tail_mellin_thm2(spec, s, t).value
    rhs = classical_mellin(spec, s).value
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(i=st.integers(0, len(SPECS) - 1), s=st.floats(0.1, 5.0),
       u=st.floats(0.0, 10.0), w1=st.floats(0.01, 10.0), w2=st.floats(0.01, 10.0))
def test_band_additivity(i, s, u, w1, w2):
    spec = SPECS[i]
    assume(not spec.near_pole(s))
    t, w = u + w1, u + w1 + w2
    lhs = band_mellin(spec, s, u, t).value + band_mellin(spec, s, t, w).value
    rhs = band_mellin(spec, s, u, w).value
    scale = max(abs(band_mellin(spec, s, u, t).value), abs(band_mellin(spec, s, t, w).value),
                abs(rhs))
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(SPECS) - 1), s=st.floats(0.15, 3.0), frac=st.floats(0.01, 0.9))
def test_oracle_agreement(i, s, frac):
    spec = SPECS[i]
    t = frac * min(spec.radius, 30.0)
    tw = termwise_mellin(spec, s, t)
    q = quadrature_mellin(spec, s, 0.0, t)
    assert abs(tw.value - q.value) <= 10 * (tw.est_error + q.est_error)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.1, 10.0), t=st.floats(1e-3, 50.0))
def test_exponential_exactness(s, t):
    thm = finite_mellin_thm1(EXP, s, t).value
    tw = termwise_mellin(EXP, s, t).value
    q = quadrature_mellin(EXP, s, 0.0, t).value
    assert thm == pytest.approx(tw, rel=1e-11)
    assert thm == pytest.approx(q, rel=1e-11)


@pytest.mark.parametrize("spec,s", [(BIN2, 1.0), (CAT3, 0.5), (Binomial(k=3.0), 0.7)])
def test_limit_consistency(spec, s):
    # residual shrinks with t, and is tiny once gamma(s, t) and the tail are
    devs = []
    for t in (1.0, 10.0, 100.0, 1e4, 1e6):
        thm = finite_mellin_thm1(spec, s, t).value
        q = quadrature_mellin(spec, s, 0.0, t).value
        devs.append(abs(thm - q) / abs(q))
        tail = quadrature_mellin(spec, s, t, math.inf).value
        if upper_inc_gamma(s, t) / gamma(s) <= 1e-8 and tail <= 1e-8 * q:
            assert devs[-1] <= 1e-6
    assert devs[-1] < devs[0]


@pytest.mark.parametrize("spec,s,t", [(EXP, 0.5, 1.0), (BIN2, 1.0, 0.5), (CAT3, 0.5, 0.2),
                                      (Binomial(k=0.8), 0.3, 2.0)])
def test_residual_antisymmetry(spec, s, t):
    thm1 = finite_mellin_thm1(spec, s, t).value
    thm2 = tail_mellin_thm2(spec, s, t).value
    q_lo = quadrature_mellin(spec, s, 0.0, t)
    q_hi = quadrature_mellin(spec, s, t, math.inf)
    q_all = quadrature_mellin(spec, s, 0.0, math.inf)
    lhs = (thm1 - q_lo.value) + (thm2 - q_hi.value)
    rhs = classical_mellin(spec, s).value - q_all.value
    tol = 3 * (QCFG.target(q_lo.value) + QCFG.target(q_hi.value) + QCFG.target(q_all.value))
    assert abs(lhs - rhs) <= tol
    assert abs(lhs) <= tol


@pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
def test_geometric_antisymmetry(t):
    lo = geometric_interval(0.5, 5, 0, t).value - quadrature_mellin(GEO, 0.5, 0, t, k=5.0).value
    hi = geometric_interval(0.5, 5, t, math.inf).value - quadrature_mellin(
        GEO, 0.5, t, math.inf, k=5.0).value
    assert abs(lo + hi) <= 3 * QCFG.target(GEO5_INTEGRAL)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(0.05, 1.5), gap=st.floats(1.5, 5.0), mult=st.floats(1.1, 10.0))
def test_substitution_limit_consistency(s, gap, mult):
    # like theorem1, the substituted form is exact only once the tail
    # beyond t is negligible: t^(s-k)/(k-s) <= 1e-8 puts t past t_min
    k = s + gap
    t = mult * (1e-8 * gap) ** (-1.0 / gap)
    v = geometric_substitution(s, k, t).value
    q = quadrature_mellin(GEO, s, 0.0, t, k=k).value
    assert t ** (s - k) / (k - s) <= 1e-8
    assert v == pytest.approx(q, rel=1e-6)


def test_substitution_is_not_exact_at_small_t():
    # int_0^1 dx/(1+x^2) = pi/4, the closed form gives gamma(1/2, 1) sqrt(pi) / 2
    v = geometric_substitution(1.0, 2.0, 1.0).value
    assert v == pytest.approx(0.5 * lower_inc_gamma(0.5, 1.0) * math.sqrt(math.pi), rel=1e-14)
    assert abs(v - math.pi / 4) > 0.5


def test_paper_literal_runs_k_times_large():
    for k in (2.0, 5.0):
        s = 0.5
        lit = geometric_substitution(s, k, 1e4, "paper_literal").value
        q = quadrature_mellin(GEO, s, 0.0, 1e4, k=k).value
        assert lit / q == pytest.approx(k, rel=1e-3)


def test_lower_gamma_consistency_for_exp():
    assert finite_mellin_thm1(EXP, 2.5, 3.0).value == lower_inc_gamma(2.5, 3.0)


def test_deterministic():
    q = MellinQuery(Geometric(k=5.0), 0.5, 100, method="quadrature")
    assert evaluate(q) == evaluate(q)
