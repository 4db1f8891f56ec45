"""Built-in example algebras with their default subalgebra/character data.

Five stock examples cover the test corpus: two abelian/Heisenberg pairs
with known invariant spaces, the dimension-4 filiform algebra, and the
non-nilpotent ax+b algebra (the smallest case with a nontrivial Duflo
element).
"""

from __future__ import annotations

from fractions import Fraction

from .core import LieAlgebraData, SubalgebraSetup, lower_central_series

# name -> basis, brackets (by name), default subalgebra and character
BUILTINS = {
    "abelian2": {
        "basis": ("X", "Y"),
        "brackets": {},
        "subalgebra": ("Y",),
        "lambda": {},
    },
    "heisenberg3": {
        "basis": ("X", "Y", "Z"),
        "brackets": {("X", "Y"): {"Z": Fraction(1)}},
        "subalgebra": ("Y", "Z"),
        "lambda": {"Z": Fraction(1)},
    },
    "heisenberg5": {
        "basis": ("X1", "X2", "Y1", "Y2", "Z"),
        "brackets": {
            ("X1", "Y1"): {"Z": Fraction(1)},
            ("X2", "Y2"): {"Z": Fraction(1)},
        },
        "subalgebra": ("Y1", "Y2", "Z"),
        "lambda": {"Z": Fraction(1)},
    },
    "filiform4": {
        "basis": ("X1", "X2", "X3", "X4"),
        "brackets": {
            ("X1", "X2"): {"X3": Fraction(1)},
            ("X1", "X3"): {"X4": Fraction(1)},
        },
        "subalgebra": ("X2", "X3", "X4"),
        "lambda": {"X4": Fraction(1)},
    },
    "axb": {
        # [H, X] = X: the non-abelian two-dimensional algebra
        "basis": ("H", "X"),
        "brackets": {("H", "X"): {"X": Fraction(1)}},
        "subalgebra": ("X",),
        "lambda": {},
    },
}


def builtin_names():
    return sorted(BUILTINS)


def is_builtin(name):
    return name in BUILTINS


def builtin_algebra(name):
    """The named example as a validated LieAlgebraData."""
    try:
        data = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin algebra {name!r}; "
                       f"available: {', '.join(builtin_names())}") from None
    names = data["basis"]
    idx = {n: i for i, n in enumerate(names)}
    brackets = {
        (idx[a], idx[b]): {idx[k]: c for k, c in comps.items()}
        for (a, b), comps in data["brackets"].items()
    }
    return LieAlgebraData.from_brackets(names, brackets)


def builtin_setup(name, h_names=None, lam=None):
    """Default (or overridden) SubalgebraSetup for a builtin algebra."""
    data = BUILTINS[name]
    algebra = builtin_algebra(name)
    if h_names is None:
        h_names = data["subalgebra"]
        if lam is None:
            lam = data["lambda"]
    return SubalgebraSetup.build(algebra, h_names=h_names, lam=lam or {})


def heisenberg3_center_setup():
    """The h = <Z>, lambda(Z) = 1 variant: the full-quotient example."""
    return builtin_setup("heisenberg3", h_names=("Z",), lam={"Z": Fraction(1)})


def validation_summary(name):
    """Golden-report payload: validity, dimension, lower central series."""
    algebra = builtin_algebra(name)
    series = lower_central_series(algebra)
    return {
        "name": name,
        "valid": True,
        "dim": algebra.dim,
        "basis": list(algebra.basis_names),
        "lower_central_series": series,
        "nilpotent": series[-1] == 0,
    }
