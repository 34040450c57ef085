"""Exact rational identities of the constant fiber algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tkhodge import frame_algebra as fa

coeff = st.fractions(min_value=-8, max_value=8, max_denominator=12)
form2 = st.tuples(*([coeff] * 6)).map(fa.FrameForm2)


def test_identity_suite_all_pass():
    results = fa.verify_span_identities()
    failed = [r.name for r in results if not r.passed]
    assert not failed, failed


def test_identity_suite_names_cover_span_facts():
    names = {r.name for r in fa.verify_span_identities()}
    for required in (
        "Λ_Φ^+ = ℝω ⊕ Λ_g^-",
        "Λ_g^+ = ℝω ⊕ Λ_Φ^-",
        "Λ_Φ^+ ∩ Λ_g^+ = ℝω",
        "Λ_Φ^- ∩ Λ_g^- = 0",
        "*̄ω = ω",
    ):
        assert required in names


def test_bidegree_suite_all_pass():
    results = fa.bidegree_bases()
    failed = [r.name for r in results if not r.passed]
    assert not failed, failed


def test_tampered_star_is_detected():
    bad = [[-x for x in row] for row in fa.STAR2]
    results = fa.verify_span_identities(star_matrix=bad)
    failed = {r.name for r in results if not r.passed}
    assert "*̄ω = ω" in failed


@settings(max_examples=40, deadline=None)
@given(form2)
def test_star_and_phi_are_commuting_involutions(a):
    assert fa.star2(fa.star2(a)).coeffs == a.coeffs
    assert fa.phi_act2(fa.phi_act2(a)).coeffs == a.coeffs
    lhs = fa.star2(fa.phi_act2(a))
    rhs = fa.phi_act2(fa.star2(a))
    assert lhs.coeffs == rhs.coeffs


@settings(max_examples=40, deadline=None)
@given(form2)
def test_projectors_split_both_ways(a):
    for pair in (("phi+", "phi-"), ("g+", "g-")):
        parts = [fa.project(a, which) for which in pair]
        total = tuple(x + y for x, y in zip(parts[0].coeffs, parts[1].coeffs))
        assert total == a.coeffs
        for part, sign in zip(parts, (1, -1)):
            assert fa.project(part, pair[0]).coeffs == (
                part.coeffs if sign == 1 else (fa.F0,) * 6
            )


@settings(max_examples=40, deadline=None)
@given(form2, form2)
def test_wedge_pairing_symmetric_and_star_adjoint(a, b):
    assert fa.wedge_top(a, b) == fa.wedge_top(b, a)
    # <a, b> = a wedge *b defines the inner product
    assert fa.inner(a, b) == fa.wedge_top(a, fa.star2(b))


@settings(max_examples=40, deadline=None)
@given(form2)
def test_inner_product_positive_definite(a):
    q = fa.inner(a, a)
    assert q >= 0
    if any(c != 0 for c in a.coeffs):
        assert q > 0


def test_omega_is_invariant_and_self_dual():
    w = fa.FrameForm2(tuple(fa.OMEGA))
    assert fa.star2(w).coeffs == w.coeffs
    assert fa.phi_act2(w).coeffs == w.coeffs
    assert fa.project(w, "phi+").coeffs == w.coeffs
    assert fa.project(w, "g+").coeffs == w.coeffs


def test_anti_invariant_forms_are_self_dual():
    # a defining containment: Lambda_Phi^- sits inside Lambda_g^+
    for row in fa.LAMBDA_PHI_MINUS:
        a = fa.FrameForm2(tuple(Fraction(x) for x in row))
        assert fa.star2(a).coeffs == a.coeffs
        assert fa.inner(a, fa.OMEGA_FORM) == 0


def test_project_rejects_unknown_label():
    with pytest.raises(ValueError):
        fa.project(fa.OMEGA_FORM, "nope")
