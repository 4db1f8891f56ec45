"""Independent reference implementations used only by the tests.

Nothing here imports the solver internals under test: products are
computed by naive tensor-word rewriting, and linear algebra goes through
sympy.  Agreement between these oracles and the package is the point of
the test suite, so keep this module dumb and obviously correct.
"""

from fractions import Fraction
from itertools import combinations_with_replacement

import sympy


def naive_word_product(algebra, w1, w2):
    """Product of two basis words in the deformed enveloping algebra.

    Words are arbitrary index tuples; the result maps (sorted_word,
    eps_power) -> Fraction, computed by repeatedly swapping adjacent
    out-of-order letters via x_i x_j = x_j x_i + eps [x_i, x_j].
    """
    pending = {(tuple(w1) + tuple(w2), 0): Fraction(1)}
    done = {}
    while pending:
        (word, p), c = pending.popitem()
        for pos in range(len(word) - 1):
            if word[pos] > word[pos + 1]:
                swapped = word[:pos] + (word[pos + 1], word[pos]) + word[pos + 2:]
                key = (swapped, p)
                pending[key] = pending.get(key, Fraction(0)) + c
                for k, ck in algebra.bracket(word[pos], word[pos + 1]).items():
                    rest = word[:pos] + (k,) + word[pos + 2:]
                    key = (rest, p + 1)
                    pending[key] = pending.get(key, Fraction(0)) + c * ck
                break
        else:
            done[(word, p)] = done.get((word, p), Fraction(0)) + c
        pending = {k: v for k, v in pending.items() if v != 0}
    return {k: v for k, v in done.items() if v != 0}


def naive_quotient_reduce(setup, terms):
    """Suffix substitution h -> -lambda on normal (word, eps) terms."""
    lam = {i: v.constant_term() for i, v in setup.lam}
    out = {}
    for (word, p), c in terms.items():
        qpart = tuple(l for l in word if l < setup.nq)
        factor = Fraction(1)
        for l in word:
            if l >= setup.nq:
                factor *= -lam[l]
        if factor != 0:
            key = (qpart, p)
            out[key] = out.get(key, Fraction(0)) + c * factor
    return {k: v for k, v in out.items() if v != 0}


def _q_words(setup, n):
    out = []
    for length in range(n + 1):
        out.extend(combinations_with_replacement(range(setup.nq), length))
    return out


def dense_invariant_dims(setup, n):
    """Per-degree dimensions of the invariant quotient module.

    Builds the full linear system over unknowns (q-word, eps-power) with
    the naive product oracle, takes the sympy nullspace, and counts
    module generators per degree through the eps-shift quotient.
    """
    words = _q_words(setup, n)
    unknowns = [(w, k) for w in words for k in range(n + 1)]
    col_index = {u: i for i, u in enumerate(unknowns)}
    lam = {i: v.constant_term() for i, v in setup.lam}
    rows = {}
    for j in setup.h_indices:
        for w in words:
            image = dict(naive_word_product(setup.algebra, (j,), w))
            image[(tuple(w), 0)] = image.get((tuple(w), 0), Fraction(0)) + lam[j]
            reduced = naive_quotient_reduce(setup, image)
            for (word, p), c in reduced.items():
                for k in range(n + 1):
                    rows.setdefault((j, word, p + k), {})[col_index[(w, k)]] = c
    mat = sympy.zeros(len(rows), len(unknowns))
    for r, key in enumerate(sorted(rows)):
        for cidx, c in rows[key].items():
            mat[r, cidx] = sympy.Rational(c.numerator, c.denominator)
    null = mat.nullspace()
    # quotient by the eps-shift: a solution is a fresh generator iff it is
    # independent of the shifted copies of all solutions
    shift = {}
    for (w, k), i in col_index.items():
        if k + 1 <= n:
            shift[i] = col_index[(w, k + 1)]
    shifted = []
    for v in null:
        if any(v[i] != 0 for (w, k), i in col_index.items() if k == n):
            continue
        sv = sympy.zeros(len(unknowns), 1)
        for i in range(len(unknowns)):
            if v[i] != 0:
                sv[shift[i]] = v[i]
        shifted.append(sv)
    dims = {}
    span = sympy.Matrix.hstack(*shifted) if shifted else sympy.zeros(len(unknowns), 0)
    rank = span.rank()
    for v in null:
        candidate = sympy.Matrix.hstack(span, v)
        if candidate.rank() > rank:
            span, rank = candidate, rank + 1
            deg = max((len(w) for (w, k), i in col_index.items() if v[i] != 0),
                      default=0)
            dims[deg] = dims.get(deg, 0) + 1
    return {d: dims[d] for d in sorted(dims)}


def sinh_ratio_log_series(order):
    """Taylor coefficients of log(sinh(u/2)/(u/2)) via sympy."""
    u = sympy.Symbol("u")
    expr = sympy.log(sympy.sinh(u / 2) / (u / 2))
    series = sympy.series(expr, u, 0, order + 1).removeO()
    poly = sympy.Poly(series, u)
    out = [Fraction(0)] * (order + 1)
    for (e,), c in poly.terms():
        out[e] = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
    return out


def brute_force_graph_count(n, m):
    """Nested-loop admissible graph count, written independently."""
    total = n + m
    count = 0

    def rec(v, chosen):
        nonlocal count
        if v == n:
            count += 1
            return
        for a in range(total):
            if a == v:
                continue
            for b in range(total):
                if b == v or b == a:
                    continue
                rec(v + 1, chosen + [(a, b)])

    rec(0, [])
    return count
