"""Quantization maps: symmetrization, the Duflo operator, and the
PBW-transport star product on S(g)[eps].

The star product here is obtained by transporting the product of
U_(eps)(g) through the symmetrization map (beta-inverse of
beta(F) * beta(G)).  It is exactly computable, associative by
construction, and serves as the associativity oracle for the
graph-expansion star product (see the graphs module).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .core import is_nilpotent, adjoint_matrix
from .enveloping import (PBWElement, pbw_multiply, quotient_reduce, _eadd,
                         _escale, _eshift)
from .poly import EpsPolynomial, Polynomial


def _multiset_permutations(word):
    """Distinct permutations of a sorted tuple, lexicographic order."""
    if not word:
        yield ()
        return
    seen = set()
    for i, letter in enumerate(word):
        if letter in seen:
            continue
        seen.add(letter)
        rest = word[:i] + word[i + 1:]
        for tail in _multiset_permutations(rest):
            yield (letter,) + tail


@lru_cache(maxsize=None)
def _symmetrize_word(algebra, word):
    """beta on one monomial: (1/k!) sum over orderings of the PBW product."""
    k = len(word)
    count = 0
    acc = {}
    for perm in _multiset_permutations(word):
        count += 1
        elt = PBWElement.one(algebra)
        for letter in perm:
            elt = pbw_multiply(elt, PBWElement.generator(algebra, letter))
        for w, co in elt.terms:
            acc[w] = _eadd(acc.get(w, {}), dict(co))
    # distinct permutations each stand for (k! / count) identical orderings
    scale = Fraction(factorial(k) // count, factorial(k))
    return PBWElement.from_terms(
        algebra, {w: _escale(co, scale) for w, co in acc.items()})


def symmetrize(f, algebra):
    """The symmetrization map beta: S(g) -> U_(eps)(g), extended to
    EpsPolynomial inputs Q[eps]-linearly."""
    if isinstance(f, EpsPolynomial):
        out = PBWElement.zero(algebra)
        for k, coeff in enumerate(f.coeffs):
            out = out + symmetrize(coeff, algebra).scale(1, eps_shift=k)
        return out
    out = {}
    for m, c in f.terms.items():
        if any(i < 0 for i, _ in m):
            raise ValueError("special variables have no PBW image")
        word = tuple(i for i, e in sorted(m) for _ in range(e))
        for w, co in _symmetrize_word(algebra, word).terms:
            out[w] = _eadd(out.get(w, {}), _escale(dict(co), c))
    return PBWElement.from_terms(algebra, out)


def beta_inverse(u):
    """Invert beta by triangular back-substitution per filtration degree.

    beta(monomial) = the corresponding normal word plus lower-length
    eps-terms, so peeling top-length words terminates.
    """
    algebra = u.algebra
    residual = u
    out = EpsPolynomial()
    while not residual.is_zero():
        top = residual.filtration_degree()
        peeled = EpsPolynomial()
        for word, co in residual.terms:
            if len(word) != top:
                continue
            mono = {}
            for letter in word:
                mono[letter] = mono.get(letter, 0) + 1
            p = Polynomial({tuple(sorted(mono.items())): Fraction(1)})
            for k, c in co:
                peeled = peeled + EpsPolynomial.term(k, p.scale(c))
        out = out + peeled
        residual = residual - symmetrize(peeled, algebra)
        if residual.filtration_degree() >= top and not residual.is_zero():
            raise RuntimeError("beta inversion failed to reduce degree")
    return out


def gutt_star(f, g, algebra):
    """Associative star product on S(g)[eps]: beta^{-1}(beta(F) beta(G)).

    eps^0 term is F*G and the eps^1 commutator equals eps {F,G}.
    """
    return beta_inverse(pbw_multiply(symmetrize(f, algebra),
                                     symmetrize(g, algebra)))


# -- Duflo operator ------------------------------------------------------

def _log_sinh_ratio_coeffs(order):
    """Series coefficients of log(sinh(u/2)/(u/2)) through u^order, exact.

    sinh(u/2)/(u/2) = sum_m u^{2m} / (4^m (2m+1)!), then formal log.
    """
    s = [Fraction(0)] * (order + 1)
    s[0] = Fraction(1)
    for m in range(1, order // 2 + 1):
        s[2 * m] = Fraction(1, 4 ** m * factorial(2 * m + 1))
    # log(1 + x) = x - x^2/2 + x^3/3 - ...
    x = s[:]
    x[0] = Fraction(0)
    out = [Fraction(0)] * (order + 1)
    power = [Fraction(1)] + [Fraction(0)] * order
    for j in range(1, order + 1):
        nxt = [Fraction(0)] * (order + 1)
        for a in range(order + 1):
            if power[a] == 0:
                continue
            for b in range(order + 1 - a):
                if x[b]:
                    nxt[a + b] += power[a] * x[b]
        power = nxt
        if all(c == 0 for c in power):
            break
        sign = Fraction((-1) ** (j + 1), j)
        for a in range(order + 1):
            out[a] += sign * power[a]
    return out


def _mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Polynomial.zero())
             for j in range(n)] for i in range(n)]


def _trace(a):
    return sum((a[i][i] for i in range(len(a))), Polynomial.zero())


@dataclass(frozen=True)
class ConstantCoefficientOperator:
    """Finite sum of constant-coefficient partial derivatives."""
    terms: tuple  # ((monomial-in-d-symbols, Fraction), ...)
    truncation_degree: int

    @classmethod
    def from_polynomial(cls, p, truncation_degree):
        return cls(terms=tuple(sorted(p.terms.items())),
                   truncation_degree=truncation_degree)

    @classmethod
    def identity(cls, truncation_degree=0):
        return cls(terms=((((), Fraction(1))),),
                   truncation_degree=truncation_degree)

    def is_identity(self):
        return self.terms == ((((), Fraction(1))),)

    def apply(self, f):
        """Act on a Polynomial (or EpsPolynomial, coefficientwise)."""
        if isinstance(f, EpsPolynomial):
            return EpsPolynomial([self.apply(c) for c in f.coeffs])
        out = Polynomial.zero()
        for mono, c in self.terms:
            g = f
            for i, e in mono:
                for _ in range(e):
                    g = g.diff(i)
                    if g.is_zero():
                        break
            out = out + g.scale(c)
        return out

    def apply_graded(self, f):
        """Act with the deformation grading: a d-fold derivative term
        contributes at eps^d, matching the eps powers the adjoint action
        carries in the deformed product."""
        if isinstance(f, Polynomial):
            f = EpsPolynomial.from_polynomial(f)
        out = EpsPolynomial()
        for mono, c in self.terms:
            d = sum(e for _, e in mono)
            for k, coeff in enumerate(f.coeffs):
                g = coeff
                for i, e in mono:
                    for _ in range(e):
                        g = g.diff(i)
                        if g.is_zero():
                            break
                if not g.is_zero():
                    out = out + EpsPolynomial.term(k + d, g.scale(c))
        return out

    def to_polynomial(self):
        return Polynomial(dict(self.terms))


def duflo_element(algebra, truncation):
    """q(Y) = det(sinh(adY/2)/(adY/2)) as a polynomial in the coordinates
    of Y, truncated at total degree `truncation`.

    Computed as exp(trace log(sinh(adY/2)/(adY/2))) through power sums
    trace((adY)^{2k}); identically 1 for nilpotent algebras.
    """
    return _exp_truncated(_log_duflo(algebra, truncation), truncation)


def _log_duflo(algebra, truncation):
    coeffs = _log_sinh_ratio_coeffs(truncation)
    m = adjoint_matrix(algebra)
    power = m
    logq = Polynomial.zero()
    for k in range(2, truncation + 1):
        power = _mat_mul(power, m) if k > 1 else power
        if k % 2 == 0 and coeffs[k] != 0:
            logq = logq + _trace(power).scale(coeffs[k])
    return logq


def _exp_truncated(p, truncation):
    out = Polynomial.constant(1)
    term = Polynomial.constant(1)
    for j in range(1, truncation + 1):
        term = term * p
        term = Polynomial({m: c for m, c in term.terms.items()
                           if sum(e for _, e in m) <= truncation})
        if term.is_zero():
            break
        out = out + term.scale(Fraction(1, factorial(j)))
    return Polynomial({m: c for m, c in out.terms.items()
                       if sum(e for _, e in m) <= truncation})


def duflo_series(algebra, truncation):
    """The operator of q^{1/2} truncated at `truncation`: expand
    exp(log(q)/2) and swap coordinates for partial derivatives."""
    if truncation <= 0 or is_nilpotent(algebra):
        return ConstantCoefficientOperator.identity(truncation)
    half_log = _log_duflo(algebra, truncation).scale(Fraction(1, 2))
    q_half = _exp_truncated(half_log, truncation)
    return ConstantCoefficientOperator.from_polynomial(q_half, truncation)


def apply_operator(op, f):
    return op.apply(f)


@dataclass(frozen=True)
class CorrectionSeries:
    """Pluggable higher-order corrections (the two-brane T-operator series).

    Empty means the identity; entries are (eps_order >= 1, operator).
    """
    entries: tuple = ()

    def __post_init__(self):
        for order, _ in self.entries:
            if order < 1:
                raise ValueError("correction orders start at 1")

    def apply(self, f):
        if isinstance(f, Polynomial):
            f = EpsPolynomial.from_polynomial(f)
        out = f
        for order, op in self.entries:
            out = out + op.apply(f).shift(order)
        return out


def iso_candidate(f, setup, corrections=None, duflo_truncation=None):
    """The candidate isomorphism into (U_(eps)(g)/U_(eps)(g)h_lambda)^h:
    quotient-reduced symmetrization after the Duflo operator and the
    correction series (identity by default)."""
    if isinstance(f, Polynomial):
        f = EpsPolynomial.from_polynomial(f)
    if corrections is None:
        corrections = CorrectionSeries()
    if duflo_truncation is None:
        duflo_truncation = max(max((c.degree() for c in f.coeffs), default=0), 0)
    op = duflo_series(setup.algebra, duflo_truncation)
    g = corrections.apply(f)
    g = op.apply_graded(g)
    return quotient_reduce(symmetrize(g, setup.algebra), setup)
