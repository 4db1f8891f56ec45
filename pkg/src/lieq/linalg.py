"""Exact linear algebra over the rationals.

Everything here works on dense lists of Fractions.  Matrices are small
(desk-scale solves over monomial bases), so plain Gaussian elimination
with exact Fraction arithmetic is both fast enough and free of rounding.
Pivoting is positional (first nonzero column), which keeps the reduced
row echelon form deterministic for a fixed column order.
"""

from __future__ import annotations

from fractions import Fraction


def rref(rows):
    """Reduced row echelon form.

    Returns (reduced_rows, pivot_columns).  Input rows are not modified.
    Zero rows are dropped from the output.
    """
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = Fraction(1, 1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows):
    return len(rref(rows)[0])


def nullspace(rows, ncols=None):
    """Basis of the right nullspace of the matrix given by `rows`.

    `ncols` must be given when `rows` is empty.  Basis vectors use the
    standard free-variable parametrization of the RREF, so the output is
    deterministic.
    """
    if rows:
        ncols = len(rows[0])
    if ncols is None:
        raise ValueError("ncols required for an empty matrix")
    red, pivots = rref(rows)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """Solve A x = b exactly; returns one solution or None if inconsistent."""
    if not rows:
        return None if any(b != 0 for b in rhs) else []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = red[i][ncols]
    return x


def row_space_contains(rows, vec):
    """True iff `vec` lies in the span of `rows`."""
    base, _ = rref(rows)
    extended, _ = rref(base + [list(vec)])
    return len(extended) == len(base)


def span_coordinates(rows, vec):
    """Coordinates of `vec` in the spanning set `rows`, or None.

    Solves rows^T x = vec; the spanning set need not be independent, in
    which case the returned coordinates are one valid choice.
    """
    if not rows:
        return None if any(v != 0 for v in vec) else []
    transposed = [[rows[j][i] for j in range(len(rows))] for i in range(len(rows[0]))]
    return solve(transposed, list(vec))
