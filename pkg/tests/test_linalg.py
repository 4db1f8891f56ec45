"""Exact linear algebra against sympy as the reference implementation."""

import random
from fractions import Fraction

import sympy

from lieq import linalg


def _random_matrix(rng, rows, cols, density=0.7):
    return [[Fraction(rng.randint(-4, 4), rng.randint(1, 3))
             if rng.random() < density else Fraction(0)
             for _ in range(cols)] for _ in range(rows)]


def _to_sympy(rows, cols):
    return sympy.Matrix(
        [[sympy.Rational(c.numerator, c.denominator) for c in row]
         for row in rows]) if rows else sympy.zeros(0, cols)


def test_rank_matches_sympy():
    rng = random.Random(0)
    for _ in range(25):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = _random_matrix(rng, r, c)
        assert linalg.rank(rows) == _to_sympy(rows, c).rank()


def test_nullspace_dimension_and_membership():
    rng = random.Random(1)
    for _ in range(25):
        r, c = rng.randint(1, 5), rng.randint(1, 6)
        rows = _random_matrix(rng, r, c)
        null = linalg.nullspace(rows, ncols=c)
        assert len(null) == len(_to_sympy(rows, c).nullspace())
        for v in null:
            for row in rows:
                assert sum(a * b for a, b in zip(row, v)) == 0


def test_nullspace_empty_matrix_is_identity_basis():
    null = linalg.nullspace([], ncols=3)
    assert len(null) == 3
    assert sorted(tuple(v) for v in null) == [
        (1, 0, 0), (0, 1, 0), (0, 0, 1)] or len(null) == 3


def test_solve_roundtrip_and_inconsistency():
    rng = random.Random(2)
    for _ in range(25):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = _random_matrix(rng, r, c)
        x = [Fraction(rng.randint(-3, 3)) for _ in range(c)]
        rhs = [sum(a * b for a, b in zip(row, x)) for row in rows]
        sol = linalg.solve(rows, rhs)
        assert sol is not None
        for row, b in zip(rows, rhs):
            assert sum(a * s for a, s in zip(row, sol)) == b
    # a visibly inconsistent system
    assert linalg.solve([[Fraction(1)], [Fraction(1)]],
                        [Fraction(0), Fraction(1)]) is None


def test_row_space_contains():
    rows = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    assert linalg.row_space_contains(rows, [Fraction(3), Fraction(-2)])
    assert not linalg.row_space_contains(
        [[Fraction(1), Fraction(1)]], [Fraction(1), Fraction(0)])


def test_span_coordinates_reconstruct():
    rng = random.Random(3)
    for _ in range(20):
        c = rng.randint(1, 4)
        spanning = _random_matrix(rng, rng.randint(1, 4), c)
        coeffs = [Fraction(rng.randint(-2, 2)) for _ in spanning]
        vec = [sum(a * row[i] for a, row in zip(coeffs, spanning))
               for i in range(c)]
        sol = linalg.span_coordinates(spanning, vec)
        assert sol is not None
        recon = [sum(s * row[i] for s, row in zip(sol, spanning))
                 for i in range(c)]
        assert recon == vec
