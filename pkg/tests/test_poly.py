"""Polynomial and parameter-series arithmetic."""

from fractions import Fraction

import pytest

from lieq.poly import (DegreeOverflowError, EpsPolynomial, Polynomial,
                       TPolynomial, parse_polynomial, poisson_bracket)
from lieq.library import builtin_algebra


def v(i):
    return Polynomial.variable(i)


def test_basic_ring_identities():
    x, y = v(0), v(1)
    assert (x + y) * (x - y) == x * x - y * y
    assert (x + 1) ** 3 == x ** 3 + 3 * x ** 2 + 3 * x + 1
    assert x - x == Polynomial.zero()
    assert Polynomial.constant(Fraction(2, 3)).scale(Fraction(3, 2)) == 1


def test_degree_and_special_variables():
    x = v(0)
    t = Polynomial.t()
    p = x ** 2 * t ** 5
    assert p.degree() == 2
    assert p.degree(include_special=True) == 7
    assert Polynomial.zero().degree() == -1


def test_diff_and_substitute():
    x, y = v(0), v(1)
    p = x ** 3 * y + 2 * y ** 2
    assert p.diff(0) == 3 * x ** 2 * y
    assert p.diff(1) == x ** 3 + 4 * y
    assert p.substitute({0: Fraction(2)}) == 8 * y + 2 * y ** 2
    assert p.substitute({0: y}) == y ** 4 + 2 * y ** 2


def test_homogeneous_components_sum_back():
    x, y = v(0), v(1)
    p = x ** 2 + 3 * x * y + y + 5
    comps = p.homogeneous_components()
    assert [d for d, _ in comps] == [0, 1, 2]
    total = Polynomial.zero()
    for _, c in comps:
        total = total + c
    assert total == p


def test_degree_cap_env_override(monkeypatch):
    x = v(0)
    with pytest.raises(DegreeOverflowError):
        x ** 13
    monkeypatch.setenv("LIEQ_MAX_DEGREE", "20")
    assert (x ** 13).degree() == 13


def test_parse_polynomial():
    names = ["x", "y", "z"]
    p = parse_polynomial("3/2*x^2*y - z + 1", names)
    x, y, z = v(0), v(1), v(2)
    assert p == x ** 2 * y * Fraction(3, 2) - z + 1
    assert parse_polynomial("t^2*x", names) == Polynomial.t() ** 2 * x
    assert parse_polynomial("", names) == Polynomial.zero()
    with pytest.raises(ValueError):
        parse_polynomial("w + 1", names)


def test_to_string_roundtrip():
    names = ["x", "y"]
    p = parse_polynomial("2*x^2 - 1/3*y + 4", names)
    assert parse_polynomial(p.to_string(names), names) == p


def test_eps_polynomial_arithmetic():
    x, y = v(0), v(1)
    f = EpsPolynomial([x, y])          # x + eps y
    g = EpsPolynomial([y])
    assert (f * g).coefficient(0) == x * y
    assert (f * g).coefficient(1) == y * y
    assert f.shift(2).coefficient(3) == y
    assert f.specialize() == x + y
    assert f.specialize(Fraction(2)) == x + y.scale(2)
    assert EpsPolynomial([x, Polynomial.zero()]).param_degree() == 0


def test_t_polynomial_embed_extract_roundtrip():
    x, y = v(0), v(1)
    fam = TPolynomial([x, y, x * y])
    assert TPolynomial.extract_t(fam.embed_t()) == fam
    assert fam.embed_t().substitute({-1: Fraction(1)}) == fam.specialize()


def test_poisson_bracket_heisenberg():
    alg = builtin_algebra("heisenberg3")
    x, y, z = v(0), v(1), v(2)
    assert poisson_bracket(x, y, alg) == z
    assert poisson_bracket(y, x, alg) == -z
    assert poisson_bracket(z, x * y, alg) == Polynomial.zero()
    # Leibniz in the second slot
    f, g, h = x + z, x * y, y ** 2
    assert poisson_bracket(f, g * h, alg) == \
        poisson_bracket(f, g, alg) * h + g * poisson_bracket(f, h, alg)


def test_poisson_bracket_jacobi_random():
    import random
    alg = builtin_algebra("filiform4")
    rng = random.Random(4)
    monos = [(), ((0, 1),), ((1, 1),), ((2, 1),), ((3, 1),),
             ((0, 1), (1, 1)), ((1, 2),)]

    def rand_poly():
        return Polynomial({m: Fraction(rng.randint(-3, 3)) for m in monos})

    for _ in range(20):
        f, g, h = rand_poly(), rand_poly(), rand_poly()
        jac = (poisson_bracket(f, poisson_bracket(g, h, alg), alg)
               + poisson_bracket(g, poisson_bracket(h, f, alg), alg)
               + poisson_bracket(h, poisson_bracket(f, g, alg), alg))
        assert jac == Polynomial.zero()
