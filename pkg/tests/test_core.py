"""Lie algebra data, setups, and the central extension."""

from fractions import Fraction

import pytest

from lieq.core import (CentralExtension, LieAlgebraData, StructuralError,
                       SubalgebraSetup, ValidationError, adjoint_matrix,
                       is_nilpotent, lower_central_series, validate_raw)
from lieq.library import builtin_algebra, builtin_setup
from lieq.poly import Polynomial


def test_validate_collects_all_violations():
    # antisymmetry broken at (0,0); [A,B]=A with [A,C]=B breaks Jacobi
    report = validate_raw(("A", "B", "C"), {
        (0, 0): {1: Fraction(1)},
        (0, 1): {0: Fraction(1)},
        (0, 2): {1: Fraction(1)},
    })
    assert not report.valid
    kinds = " ".join(report.violations)
    assert "antisymmetry" in kinds
    assert "Jacobi" in kinds
    assert len(report.violations) >= 2


def test_from_brackets_rejects_invalid():
    with pytest.raises(ValidationError):
        LieAlgebraData.from_brackets(("A", "B", "C"), {
            (0, 1): {0: Fraction(1)},
            (0, 2): {1: Fraction(1)},
        })
    with pytest.raises(StructuralError):
        LieAlgebraData.from_brackets(("A", "A"), {})
    with pytest.raises(StructuralError):
        LieAlgebraData.from_brackets(("A", "B"), {(0, 5): {1: Fraction(1)}})


def test_bracket_antisymmetry_access():
    alg = builtin_algebra("heisenberg3")
    assert alg.bracket(0, 1) == {2: Fraction(1)}
    assert alg.bracket(1, 0) == {2: Fraction(-1)}
    assert alg.bracket(1, 1) == {}
    assert alg.bracket(2, 0) == {}


@pytest.mark.parametrize("name,series", [
    ("abelian2", [2, 0]),
    ("heisenberg3", [3, 1, 0]),
    ("heisenberg5", [5, 1, 0]),
    ("filiform4", [4, 2, 1, 0]),
    ("axb", [2, 1, 1]),
])
def test_lower_central_series(name, series):
    assert lower_central_series(builtin_algebra(name)) == series
    assert is_nilpotent(builtin_algebra(name)) == (series[-1] == 0)


def test_adjoint_matrix_symbolic_vs_numeric():
    alg = builtin_algebra("axb")
    sym = adjoint_matrix(alg)
    num = adjoint_matrix(alg, y=[Fraction(2), Fraction(3)])
    for k in range(2):
        for j in range(2):
            assert sym[k][j].substitute(
                {0: Fraction(2), 1: Fraction(3)}) == num[k][j]


def test_setup_reorders_q_first():
    setup = builtin_setup("heisenberg3")  # h = <Y, Z>
    assert setup.algebra.basis_names == ("X", "Y", "Z")
    assert setup.nq == 1
    setup2 = builtin_setup("heisenberg3", h_names=("X",), lam={})
    assert setup2.algebra.basis_names == ("Y", "Z", "X")
    # the reordered table is still the same algebra
    assert setup2.algebra.bracket(2, 0) == {1: Fraction(1)}  # [X, Y] = Z


def test_setup_rejects_bad_subalgebra_and_character():
    alg = builtin_algebra("heisenberg3")
    with pytest.raises(ValidationError):
        # <X, Y> is not closed without Z
        SubalgebraSetup.build(alg, h_names=("X", "Y"))
    with pytest.raises(ValidationError):
        # lambda must kill [h, h]: [X,Y]=Z forces lambda(Z)=0 on h=g
        SubalgebraSetup.build(alg, h_names=("X", "Y", "Z"),
                              lam={"Z": Fraction(1)})
    with pytest.raises(StructuralError):
        SubalgebraSetup.build(alg, h_names=("W",))


def test_reduce_h_variables():
    setup = builtin_setup("heisenberg3")
    p = Polynomial.variable(2) * Polynomial.variable(0)  # z * x
    assert setup.reduce_h_variables(p) == -Polynomial.variable(0)


def test_central_extension_structure():
    setup = builtin_setup("heisenberg3")  # h=<Y,Z>, lambda(Z)=1
    ext = CentralExtension.build(setup)
    ealg = ext.extended.algebra
    assert ealg.basis_names == ("X", "T", "Y", "Z")
    assert ext.t_index == 1
    # T is central
    for j in range(ealg.dim):
        assert ealg.bracket(ext.t_index, j) == {}
    # [X, Y] = Z = h'_Z - lambda_Z T in the primed basis
    assert ealg.bracket(0, 2) == {3: Fraction(1), 1: Fraction(-1)}
    # extended character is zero
    assert all(v.is_zero() for _, v in ext.extended.lam)


def test_central_extension_evaluate_t():
    setup = builtin_setup("heisenberg3")
    ext = CentralExtension.build(setup)
    t_var, hz = Polynomial.variable(1), Polynomial.variable(3)
    # e_{T=t}(T) = t and e_{T=t}(h'_Z) = z + t
    assert ext.evaluate_t_polynomial(t_var, Fraction(5)) == 5
    assert ext.evaluate_t_polynomial(hz, Fraction(1)) == \
        Polynomial.variable(2) + 1
    sym = ext.evaluate_t_polynomial(hz, Polynomial.t())
    assert sym == Polynomial.variable(2) + Polynomial.t()


def test_central_extension_needs_rational_character():
    setup = builtin_setup("heisenberg3").with_lambda({2: Polynomial.t()})
    with pytest.raises(StructuralError):
        CentralExtension.build(setup)
