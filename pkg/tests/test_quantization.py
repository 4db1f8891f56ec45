"""Symmetrization transport, the associative star product, and the
determinant-series operator."""

import random
from fractions import Fraction

import pytest

from lieq.poly import EpsPolynomial, Polynomial, poisson_bracket
from lieq.quantization import (ConstantCoefficientOperator, CorrectionSeries,
                               _log_sinh_ratio_coeffs, beta_inverse,
                               duflo_element, duflo_series, gutt_star,
                               iso_candidate, symmetrize)
from lieq.enveloping import quotient_reduce
from lieq.library import builtin_setup, heisenberg3_center_setup

from oracles import sinh_ratio_log_series


def _sparse_poly(rng, dim, max_degree=2, terms=2):
    p = Polynomial.zero()
    for _ in range(terms):
        mono = {}
        for _ in range(rng.randint(0, max_degree)):
            i = rng.randrange(dim)
            mono[i] = mono.get(i, 0) + 1
        c = Fraction(rng.randint(-3, 3))
        p = p + Polynomial({tuple(sorted(mono.items())): Fraction(1)}).scale(c)
    return p


def test_symmetrize_linear_and_quadratic(h3):
    x, y = Polynomial.variable(0), Polynomial.variable(1)
    bx = symmetrize(x, h3)
    assert bx.term_map() == {(0,): {0: Fraction(1)}}
    bxy = symmetrize(x * y, h3)
    # (XY + YX)/2 = XY - eps Z / 2 in normal order
    assert bxy.term_map() == {(0, 1): {0: Fraction(1)},
                              (2,): {1: Fraction(-1, 2)}}


def test_beta_inverse_roundtrip(corpus_algebra):
    rng = random.Random(23)
    for _ in range(30):
        f = EpsPolynomial([_sparse_poly(rng, corpus_algebra.dim),
                           _sparse_poly(rng, corpus_algebra.dim)])
        assert beta_inverse(symmetrize(f, corpus_algebra)) == f


def test_gutt_star_heisenberg_values(h3):
    x, y = Polynomial.variable(0), Polynomial.variable(1)
    z = Polynomial.variable(2)
    s = gutt_star(x, y, h3)
    assert s.coefficient(0) == x * y
    assert s.coefficient(1) == z.scale(Fraction(1, 2))
    assert gutt_star(y, x, h3).coefficient(1) == z.scale(Fraction(-1, 2))


def test_gutt_star_unit_and_linearity(h3):
    rng = random.Random(29)
    one = Polynomial.constant(1)
    f = _sparse_poly(rng, 3)
    g = _sparse_poly(rng, 3)
    h = _sparse_poly(rng, 3)
    assert gutt_star(one, f, h3) == EpsPolynomial.from_polynomial(f)
    assert gutt_star(f, one, h3) == EpsPolynomial.from_polynomial(f)
    assert gutt_star(f, g + h, h3) == gutt_star(f, g, h3) + gutt_star(f, h, h3)


def test_gutt_star_associativity_random(corpus_algebra):
    rng = random.Random(31)
    for _ in range(100):
        f = _sparse_poly(rng, corpus_algebra.dim)
        g = _sparse_poly(rng, corpus_algebra.dim)
        h = _sparse_poly(rng, corpus_algebra.dim)
        lhs = gutt_star(gutt_star(f, g, corpus_algebra), h, corpus_algebra)
        rhs = gutt_star(f, gutt_star(g, h, corpus_algebra), corpus_algebra)
        assert lhs == rhs


def test_gutt_star_commutator_is_poisson_bracket(corpus_algebra):
    rng = random.Random(37)
    for _ in range(30):
        f = _sparse_poly(rng, corpus_algebra.dim)
        g = _sparse_poly(rng, corpus_algebra.dim)
        comm = gutt_star(f, g, corpus_algebra) - gutt_star(g, f, corpus_algebra)
        assert comm.coefficient(0).is_zero()
        assert comm.coefficient(1) == poisson_bracket(f, g, corpus_algebra)


def test_log_sinh_ratio_series_matches_reference():
    order = 8
    assert _log_sinh_ratio_coeffs(order) == sinh_ratio_log_series(order)
    # spot values: u^2/24 - u^4/2880 + u^6/181440
    c = _log_sinh_ratio_coeffs(6)
    assert c[2] == Fraction(1, 24)
    assert c[4] == Fraction(-1, 2880)
    assert c[6] == Fraction(1, 181440)


def test_determinant_element_identity_iff_nilpotent(corpus_algebra):
    from lieq.core import is_nilpotent
    q = duflo_element(corpus_algebra, 4)
    if is_nilpotent(corpus_algebra):
        assert q == Polynomial.constant(1)
    else:
        assert q != Polynomial.constant(1)


def test_determinant_element_values_axb():
    alg = builtin_setup("axb").algebra  # basis reordered: (H, X) with h=<X>
    h = Polynomial.variable(0)
    q = duflo_element(alg, 4)
    assert q == (Polynomial.constant(1) + (h ** 2).scale(Fraction(1, 24))
                 + (h ** 4).scale(Fraction(1, 1920)))


def test_operator_series_axb():
    alg = builtin_setup("axb").algebra
    op = duflo_series(alg, 4)
    h = Polynomial.variable(0)
    assert op.to_polynomial() == (
        Polynomial.constant(1) + (h ** 2).scale(Fraction(1, 48))
        + (h ** 4).scale(Fraction(1, 23040)))
    # apply: the h^2/48 term differentiates twice in slot 0
    assert op.apply(h ** 2) == h ** 2 + Fraction(2, 48)


def test_operator_graded_application_shifts_eps():
    alg = builtin_setup("axb").algebra
    op = duflo_series(alg, 2)
    h = Polynomial.variable(0)
    out = op.apply_graded(h ** 2)
    # the two-derivative term lands at eps^2, not eps^0
    assert out.coefficient(0) == h ** 2
    assert out.coefficient(1).is_zero()
    assert out.coefficient(2) == Polynomial.constant(Fraction(2, 48))


def test_operator_series_identity_for_nilpotent(h3):
    op = duflo_series(h3, 6)
    assert op.is_identity()
    p = Polynomial.variable(0) * Polynomial.variable(2)
    assert op.apply(p) == p


def test_correction_series_validation_and_apply():
    with pytest.raises(ValueError):
        CorrectionSeries(entries=((0, ConstantCoefficientOperator.identity()),))
    x = Polynomial.variable(0)
    series = CorrectionSeries(
        entries=((2, ConstantCoefficientOperator.identity()),))
    out = series.apply(x)
    assert out.coefficient(0) == x and out.coefficient(2) == x


def test_iso_candidate_matches_plain_transport_for_nilpotent():
    setup = heisenberg3_center_setup()
    rng = random.Random(41)
    for _ in range(20):
        f = _sparse_poly(rng, 2)  # q-variables only
        assert iso_candidate(f, setup) == \
            quotient_reduce(symmetrize(f, setup.algebra), setup)


def test_iso_candidate_is_unital_and_respects_scalars():
    setup = builtin_setup("axb")
    one = iso_candidate(Polynomial.constant(1), setup)
    assert one.term_map() == {(): {0: Fraction(1)}}
    five = iso_candidate(Polynomial.constant(5), setup)
    assert five.term_map() == {(): {0: Fraction(5)}}
