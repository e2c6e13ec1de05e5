"""Distribution module: pmf recursion, mgf estimators, tails, exact
polynomials, and real-rootedness certificates."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from treeldp import (
    ExactPoly,
    LinearSlope,
    ModelSpec,
    certify_real_rooted,
    exact_poly,
    log_mgf,
    model_from_name,
    pmf,
    pmf_advance,
    pmf_start,
    pressure,
    pressure_estimators,
    tail_log_prob,
    PressureEval,
)

PRESETS = ["uniform", "plane_oriented", "yule", "pa:beta=0", "linear:alpha=3,k0=1"]


def test_pmf_start_is_point_mass():
    p = pmf_start(model_from_name("plane_oriented"))
    assert p.n == 1 and p.k0 == 1
    assert p.probs().tolist() == [1.0]
    assert log_mgf(p, 0.7) == pytest.approx(0.7 * 1, abs=1e-15)


def test_pmf_advance_hand_values():
    uni = model_from_name("uniform")
    p3 = pmf(uni, 3)
    assert np.allclose(p3.probs(), [0.5, 0.5, 0.0], atol=1e-15)
    plane = model_from_name("plane_oriented")
    q3 = pmf(plane, 3)
    assert np.allclose(q3.probs(), [1 / 3, 2 / 3, 0.0], atol=1e-15)


def test_pmf_forced_stay_keeps_point_mass():
    # 1 - k0/s_1 = 0 for the uniform preset, so one step only moves the index
    uni = model_from_name("uniform")
    p2 = pmf_advance(pmf_start(uni), uni)
    assert p2.n == 2
    assert np.allclose(p2.probs(), [1.0, 0.0], atol=0)


def test_pmf_yule_small():
    p4 = pmf(model_from_name("yule"), 4)
    assert np.allclose(p4.probs(), [0.0, 2 / 3, 1 / 3, 0.0], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(preset=st.sampled_from(PRESETS), n=st.integers(min_value=1, max_value=30))
def test_pmf_normalized_contiguous(preset, n):
    p = pmf(model_from_name(preset), n)
    assert abs(logsumexp(p.logp)) <= 1e-12
    assert np.all(p.logp <= 1e-12)
    pos = np.flatnonzero(p.probs() > 0)
    assert np.array_equal(pos, np.arange(pos[0], pos[-1] + 1))


def test_log_mgf_two_atom_oracle():
    p = pmf(model_from_name("uniform"), 3)
    assert log_mgf(p, 1.0) == pytest.approx(math.log((math.e + math.e**2) / 2), abs=1e-12)
    assert log_mgf(p, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_estimators_at_lambda_zero():
    m = model_from_name("plane_oriented")
    est = pressure_estimators(m, 50, 0.0)
    assert est.per_n == pytest.approx(0.0, abs=1e-14)
    assert est.ratio == pytest.approx(0.0, abs=1e-14)
    mean = 1.0
    for j in range(1, 50):
        mean = 1.0 + mean * (1.0 - 1.0 / (2 * j - 1))
    assert est.logderiv == pytest.approx(mean / 50, abs=1e-12)


def test_estimators_converge_to_constants():
    m = model_from_name("plane_oriented")
    est = pressure_estimators(m, 4000, 0.0)
    assert abs(est.logderiv - 2 / 3) <= 5e-3
    est1 = pressure_estimators(m, 4000, 1.0)
    lam1 = pressure(PressureEval(2.0), 1.0)
    assert abs(est1.ratio - lam1) <= 1e-3


def test_logderiv_monotone_in_lambda():
    m = model_from_name("plane_oriented")
    vals = [pressure_estimators(m, 200, lam).logderiv for lam in (-1.0, 0.0, 1.0)]
    assert vals[0] < vals[1] < vals[2]


def test_tail_top_atom():
    m = model_from_name("linear:alpha=3,k0=1")
    n = 5
    p = pmf(m, n)
    x_top = (m.k0 + n - 1) / n
    assert tail_log_prob(p, x_top) == pytest.approx(-float(p.logp[-1]) / n, abs=1e-12)


def test_tail_matches_rate_near_one():
    p = pmf(model_from_name("plane_oriented"), 500)
    q = tail_log_prob(p, 499 / 500)
    assert abs(q - math.log(2)) <= 0.02


def test_tail_lower_branch():
    p = pmf(model_from_name("uniform"), 100)
    q = tail_log_prob(p, 0.2)
    sel = p.support <= 20
    assert q == pytest.approx(-float(logsumexp(p.logp[sel])) / 100, abs=1e-12)


def test_tail_domain_checks():
    p = pmf(model_from_name("uniform"), 10)
    with pytest.raises(ValueError):
        tail_log_prob(p, 0.0)
    with pytest.raises(ValueError):
        tail_log_prob(p, 1.2)
    assert tail_log_prob(p, 1.0) == math.inf  # the top atom has probability 0


def test_exact_poly_oracles():
    lin = exact_poly(model_from_name("linear:alpha=3,k0=1"), 2)
    assert lin.coeffs == (Fraction(0), Fraction(1, 3), Fraction(2, 3))
    # trailing zeros are kept: the vector always has length n + k0
    plane = exact_poly(model_from_name("plane_oriented"), 2)
    assert plane.coeffs == (Fraction(0), Fraction(1), Fraction(0))
    assert plane.degree() == 1
    uni = exact_poly(model_from_name("uniform"), 3)
    assert uni.coeffs == (Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(0))


@settings(max_examples=25, deadline=None)
@given(preset=st.sampled_from(PRESETS), n=st.integers(min_value=1, max_value=15))
def test_exact_poly_is_probability_vector(preset, n):
    poly = exact_poly(model_from_name(preset), n)
    assert all(c >= 0 for c in poly.coeffs)
    assert sum(poly.coeffs) == 1
    assert poly.degree() <= n + poly.k0 - 1


def test_exact_poly_full_degree_when_strict():
    m = model_from_name("linear:alpha=3,k0=1")
    for n in range(2, 11):
        assert exact_poly(m, n).degree() == n + m.k0 - 1


def test_exact_poly_matches_float_pmf():
    m = model_from_name("yule")
    n = 12
    poly = exact_poly(m, n)
    p = pmf(m, n)
    dense = np.array([float(c) for c in poly.coeffs[m.k0 : m.k0 + n]])
    assert np.allclose(dense, p.probs(), atol=1e-13)


def test_exact_poly_guards():
    with pytest.raises(ValueError):
        exact_poly(model_from_name("uniform"), 41)
    irr = ModelSpec(LinearSlope(0.7), 0)
    with pytest.raises(ValueError):
        exact_poly(irr, 3)


def test_certificate_simple_factorization():
    rep = certify_real_rooted(exact_poly(model_from_name("linear:alpha=3,k0=1"), 2))
    assert rep.certified
    assert rep.zero_root_multiplicity == 1
    assert rep.cofactor_degree == 1
    assert rep.distinct_negative_roots == 1
    assert rep.all_negative_simple


def test_certificate_rejects_complex_roots():
    bad = ExactPoly(3, 0, (Fraction(1), Fraction(0), Fraction(1)))  # u^2 + 1
    rep = certify_real_rooted(bad)
    assert not rep.certified


def test_certificate_monomial_case():
    rep = certify_real_rooted(exact_poly(model_from_name("plane_oriented"), 2))
    assert rep.certified and rep.monomial


def test_certificate_plane_n10():
    rep = certify_real_rooted(exact_poly(model_from_name("plane_oriented"), 10))
    assert rep.certified
    assert rep.distinct_negative_roots == rep.cofactor_degree
