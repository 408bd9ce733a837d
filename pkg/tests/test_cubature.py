"""Tensor-product cubature, error estimation, bracketing diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squarequad import (
    EvaluationError,
    JacobiWeight,
    antigauss_cubature,
    averaged_cubature,
    bracketing_diagnostic,
    chebyshev_bracketing_terms,
    error_estimate,
    gauss_cubature,
)

from oracles import integral_poly, jacobi_b0, random_poly_pair

LEG = JacobiWeight(0.0, 0.0)
CH1 = JacobiWeight(-0.5, -0.5)


def test_product_weights_and_positivity():
    r = antigauss_cubature(JacobiWeight(0.5, 0.5), LEG, 3, 4)
    w1 = r.rule1.weights
    w2 = r.rule2.weights
    assert r.weights == pytest.approx(np.outer(w1, w2).ravel(order="F"), rel=1e-15)
    assert np.all(r.weights > 0)


def test_gauss_constant_mass():
    r = gauss_cubature(JacobiWeight(0.25, 0.75), CH1, 5, 6)
    mass = jacobi_b0(0.25, 0.75) * jacobi_b0(-0.5, -0.5)
    assert r.apply(lambda a, b: np.ones_like(a)) == pytest.approx(mass, rel=1e-13)


def test_gauss_odd_symmetry():
    r = gauss_cubature(LEG, LEG, 4, 5)
    assert r.apply(lambda a, b: a * b) == pytest.approx(0.0, abs=1e-14)


def test_apply_simple_polynomial():
    r = gauss_cubature(LEG, LEG, 2, 2)
    assert r.apply(lambda a, b: a * a + b * b) == pytest.approx(8.0 / 3.0, rel=1e-14)


def test_apply_rejects_nonfinite():
    r = gauss_cubature(LEG, LEG, 3, 3)
    with pytest.raises(EvaluationError):
        r.apply(lambda a, b: np.where(a > 0, np.nan, 1.0))


def test_zero_function():
    r = averaged_cubature(LEG, LEG, 3, 3)
    assert r.apply(lambda a, b: np.zeros_like(a)) == 0.0


def test_averaged_node_count():
    r = averaged_cubature(LEG, CH1, 4, 6)
    assert len(r.weights) == 4 * 6 + 5 * 7


def test_uncontained_rejected_without_flag():
    with pytest.raises(ValueError):
        antigauss_cubature(JacobiWeight(-0.5, 0.0), LEG, 4, 4)
    r = antigauss_cubature(JacobiWeight(-0.5, 0.0), LEG, 4, 4, allow_uncontained=True)
    assert len(r.rule1.nodes) == 5


@given(n1=st.integers(1, 6), n2=st.integers(1, 6), seed=st.integers(0, 2**31))
@settings(max_examples=60)
def test_gauss_exactness_class(n1, n2, seed):
    rng = np.random.default_rng(seed)
    c, p = random_poly_pair(rng, 2 * n1 - 1, 2 * n2 - 1)
    w1, w2 = JacobiWeight(0.5, 0.5), LEG
    exact = integral_poly(c, w1.alpha, w1.beta, w2.alpha, w2.beta)
    got = gauss_cubature(w1, w2, n1, n2).apply(p)
    assert abs(got - exact) < 1e-12 * max(1.0, np.sum(np.abs(c)))


@given(n1=st.integers(1, 5), n2=st.integers(1, 5), seed=st.integers(0, 2**31))
@settings(max_examples=60)
def test_antigauss_reflection(n1, n2, seed):
    # on the extended class the anti-rule mirrors the Gauss error
    rng = np.random.default_rng(seed)
    axis = rng.integers(2)
    degs = (2 * n1 + 1, 2 * n2 - 1) if axis == 0 else (2 * n1 - 1, 2 * n2 + 1)
    c, p = random_poly_pair(rng, *degs)
    w1, w2 = LEG, JacobiWeight(0.5, 0.5)
    exact = integral_poly(c, w1.alpha, w1.beta, w2.alpha, w2.beta)
    g = gauss_cubature(w1, w2, n1, n2).apply(p)
    a = antigauss_cubature(w1, w2, n1, n2).apply(p)
    scale = max(1.0, np.sum(np.abs(c)))
    assert abs((exact - a) + (exact - g)) < 1e-10 * scale
    assert min(g, a) <= exact + 1e-10 * scale
    assert exact - 1e-10 * scale <= max(g, a)
    # averaged rule is exact on the union class
    avg = averaged_cubature(w1, w2, n1, n2).apply(p)
    assert abs(avg - exact) < 1e-10 * scale


def test_error_estimate_identity_on_extended_class(rng):
    n1, n2 = 4, 3
    c, p = random_poly_pair(rng, 2 * n1 + 1, 2 * n2 - 1)
    exact = integral_poly(c, 0.0, 0.0, 0.0, 0.0)
    g = gauss_cubature(LEG, LEG, n1, n2).apply(p)
    est = error_estimate(p, LEG, LEG, n1, n2)
    assert est == pytest.approx(exact - g, abs=1e-11 * max(1.0, np.sum(np.abs(c))))


def test_bracketing_diagnostic_vanishes_on_core_class(rng):
    n1 = n2 = 3
    _, p = random_poly_pair(rng, 2 * n1 - 1, 2 * n2 - 1)
    rep = bracketing_diagnostic(p, LEG, LEG, n1, n2)
    assert abs(rep.S) < 1e-10
    assert abs(rep.E1) < 1e-10
    assert abs(rep.E2) < 1e-10


def test_bracketing_diagnostic_reconstructs_rule_errors():
    # -S + E1 and S + E2 must equal the two cubature errors
    f = lambda a, b: np.cos(a + b) * np.exp(0.3 * a)
    n1 = n2 = 6
    rep = bracketing_diagnostic(f, LEG, LEG, n1, n2)
    ref = gauss_cubature(LEG, LEG, 64, 64).apply(f)
    rg = ref - gauss_cubature(LEG, LEG, n1, n2).apply(f)
    ra = ref - antigauss_cubature(LEG, LEG, n1, n2).apply(f)
    assert -rep.S + rep.E1 == pytest.approx(rg, rel=1e-8, abs=1e-13)
    assert rep.S + rep.E2 == pytest.approx(ra, rel=1e-8, abs=1e-13)


def test_chebyshev_terms_match_general_diagnostic():
    f = lambda a, b: np.cos(2.0 * a + b) + 0.5 * a * b
    gen = bracketing_diagnostic(f, CH1, CH1, 5, 5)
    cheb = chebyshev_bracketing_terms(f, 5, 5)
    assert cheb.S == pytest.approx(gen.S, rel=1e-10, abs=1e-14)
    # simplified terms bound the general ones the corollary way
    assert cheb.theta >= 0.0
    assert cheb.holds == gen.holds


def test_chebyshev_terms_zero_for_core_poly(rng):
    _, p = random_poly_pair(rng, 5, 5)
    rep = chebyshev_bracketing_terms(p, 3, 3)
    assert abs(rep.theta) < 1e-10
