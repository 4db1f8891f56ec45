"""Exact multivariate polynomial arithmetic over Q.

Variables are integer indices into a fixed basis (the Lie algebra basis,
reordered q-first).  The reserved index T_INDEX = -1 stands for the formal
deformation parameter `t` of character deformations; the star-product
parameter `eps` is never a polynomial variable, it lives in the grading of
EpsPolynomial.

All coefficients are fractions.Fraction; there is no floating point
anywhere in this module.  Total degree (special variables excluded) is
capped; exceeding the cap raises DegreeOverflowError rather than silently
truncating.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction

T_INDEX = -1
T_NAME = "t"
EPS_NAME = "eps"

DEFAULT_MAX_DEGREE = 12


def max_total_degree():
    """Global degree cap; env var LIEQ_MAX_DEGREE overrides the default."""
    raw = os.environ.get("LIEQ_MAX_DEGREE")
    if raw:
        return int(raw)
    return DEFAULT_MAX_DEGREE


class DegreeOverflowError(Exception):
    """A product or power exceeded the configured total-degree cap."""


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


# A monomial is a sorted tuple of (variable index, positive exponent).
EMPTY_MONOMIAL = ()


def monomial(*pairs):
    d = {}
    for i, e in pairs:
        if e:
            d[i] = d.get(i, 0) + e
    return tuple(sorted((i, e) for i, e in d.items() if e))


def monomial_degree(m, include_special=False):
    return sum(e for i, e in m if include_special or i >= 0)


def monomial_mul(a, b):
    d = dict(a)
    for i, e in b:
        d[i] = d.get(i, 0) + e
    return tuple(sorted(d.items()))


def _sort_key(m):
    # graded lexicographic on the fixed basis order; special vars sort last
    return (monomial_degree(m, include_special=True),
            tuple((i if i >= 0 else 10**6 - i, e) for i, e in m))


class Polynomial:
    """Immutable polynomial with Fraction coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    clean[m] = clean.get(m, Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c != 0}
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        c = _as_fraction(c)
        return cls({EMPTY_MONOMIAL: c}) if c else cls()

    @classmethod
    def variable(cls, i):
        return cls({((i, 1),): Fraction(1)})

    @classmethod
    def t(cls):
        return cls.variable(T_INDEX)

    # -- predicates ---------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(m == EMPTY_MONOMIAL for m in self.terms)

    def constant_term(self):
        return self.terms.get(EMPTY_MONOMIAL, Fraction(0))

    def degree(self, include_special=False):
        """Total degree in the basis variables; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(monomial_degree(m, include_special) for m in self.terms)

    def variables(self):
        return sorted({i for m in self.terms for i, _ in m})

    def canonical(self):
        return tuple(sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0])))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.constant(other) - self

    def scale(self, c):
        c = _as_fraction(c)
        if c == 0:
            return Polynomial()
        return Polynomial({m: c * co for m, co in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        cap = max_total_degree()
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = monomial_mul(m1, m2)
                if monomial_degree(m) > cap:
                    raise DegreeOverflowError(
                        f"product degree {monomial_degree(m)} exceeds cap {cap}")
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.canonical())
        return self._hash

    # -- calculus and evaluation -------------------------------------
    def diff(self, i):
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(i, 0)
            if not e:
                continue
            if e == 1:
                del d[i]
            else:
                d[i] = e - 1
            mm = tuple(sorted(d.items()))
            out[mm] = out.get(mm, Fraction(0)) + c * e
        return Polynomial(out)

    def substitute(self, assignment):
        """Evaluation homomorphism; values may be Fractions or Polynomials."""
        result = Polynomial()
        for m, c in self.terms.items():
            factor = Polynomial.constant(c)
            for i, e in m:
                if i in assignment:
                    val = assignment[i]
                    if not isinstance(val, Polynomial):
                        val = Polynomial.constant(val)
                    factor = factor * (val ** e)
                else:
                    factor = factor * (Polynomial.variable(i) ** e)
            result = result + factor
        return result

    def homogeneous_components(self, include_special=False):
        """List of (degree, component), ascending; sums back to self."""
        buckets = {}
        for m, c in self.terms.items():
            d = monomial_degree(m, include_special)
            buckets.setdefault(d, {})[m] = c
        return [(d, Polynomial(buckets[d])) for d in sorted(buckets)]

    # -- printing -----------------------------------------------------
    def to_string(self, names=None):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0])):
            factors = []
            for i, e in m:
                name = _var_name(i, names)
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                body = str(c)
            elif abs(c) == 1:
                body = "*".join(factors)
                if c < 0:
                    body = "-" + body
            else:
                body = str(c) + "*" + "*".join(factors)
            pieces.append(body)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"Polynomial({self.to_string()})"


def _var_name(i, names):
    if i == T_INDEX:
        return T_NAME
    if names is not None and 0 <= i < len(names):
        return names[i]
    return f"x{i}"


_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|[A-Za-z_][A-Za-z_0-9']*|\^|\*|\+|-|\(|\))")


def parse_polynomial(text, names):
    """Parse `3/2*x^2*y - z` style input; variables must be known names.

    The reserved name `t` parses to the deformation-parameter variable.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"parse error at position {pos}: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    index = {n: i for i, n in enumerate(names)}
    index[T_NAME] = T_INDEX

    def term(toks):
        # product of factors: coefficient and powers of variables
        poly = Polynomial.constant(1)
        expect_factor = True
        while toks:
            tok = toks[0]
            if tok in ("+", "-") and not expect_factor:
                break
            toks.pop(0)
            if tok == "*":
                expect_factor = True
                continue
            if re.fullmatch(r"\d+/\d+|\d+", tok):
                factor = Polynomial.constant(Fraction(tok))
            elif tok in index:
                factor = Polynomial.variable(index[tok])
            else:
                raise ValueError(f"unknown variable {tok!r}")
            if toks and toks[0] == "^":
                toks.pop(0)
                if not toks or not re.fullmatch(r"\d+", toks[0]):
                    raise ValueError("exponent must be an integer")
                factor = factor ** int(toks.pop(0))
            poly = poly * factor
            expect_factor = False
        return poly

    toks = list(tokens)
    if not toks:
        return Polynomial.zero()
    result = Polynomial.zero()
    sign = 1
    if toks[0] in ("+", "-"):
        sign = -1 if toks.pop(0) == "-" else 1
    while True:
        result = result + term(toks).scale(sign)
        if not toks:
            return result
        op = toks.pop(0)
        if op == "+":
            sign = 1
        elif op == "-":
            sign = -1
        else:
            raise ValueError(f"unexpected token {op!r}")


class ParamSeries:
    """Polynomial in one formal parameter with Polynomial coefficients."""

    PARAM = "?"
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        coeffs = list(coeffs or [])
        coeffs = [c if isinstance(c, Polynomial) else Polynomial.constant(c)
                  for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def from_polynomial(cls, p):
        return cls([p])

    @classmethod
    def term(cls, power, p):
        return cls([Polynomial.zero()] * power + [p])

    def coefficient(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else Polynomial.zero()

    def param_degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return type(self)([self.coefficient(k) + other.coefficient(k)
                           for k in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return type(self)([self.coefficient(k) - other.coefficient(k)
                           for k in range(n)])

    def __neg__(self):
        return type(self)([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            if not isinstance(other, Polynomial):
                other = Polynomial.constant(other)
            return type(self)([c * other for c in self.coeffs])
        out = [Polynomial.zero()] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return type(self)(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = type(self).from_polynomial(
                other if isinstance(other, Polynomial) else Polynomial.constant(other))
        if not isinstance(other, ParamSeries):
            return NotImplemented
        return self.PARAM == other.PARAM and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.PARAM, tuple(self.coeffs)))

    def shift(self, k):
        """Multiply by the parameter to the k-th power."""
        return type(self)([Polynomial.zero()] * k + self.coeffs)

    def specialize(self, value=None):
        """Sum of coefficients (parameter = 1), or evaluation at `value`."""
        out = Polynomial.zero()
        for k, c in enumerate(self.coeffs):
            out = out + (c if value is None else c.scale(_as_fraction(value) ** k))
        return out

    def to_string(self, names=None):
        if not self.coeffs:
            return "0"
        pieces = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = c.to_string(names)
            if k == 0:
                pieces.append(body)
            else:
                pref = self.PARAM if k == 1 else f"{self.PARAM}^{k}"
                if body == "1":
                    pieces.append(pref)
                elif re.fullmatch(r"-?[0-9/]+", body) or "+" not in body and " - " not in body:
                    pieces.append(f"{body}*{pref}" if body != "-1" else f"-{pref}")
                else:
                    pieces.append(f"({body})*{pref}")
        return " + ".join(pieces)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_string()})"


class EpsPolynomial(ParamSeries):
    """Element of S(q)[eps] (or S(g)[eps]); the star-product grading."""
    PARAM = EPS_NAME
    __slots__ = ()


class TPolynomial(ParamSeries):
    """Polynomial family in the character-deformation parameter t."""
    PARAM = T_NAME
    __slots__ = ()

    def embed_t(self):
        """Fold the grading into the reserved t variable of Polynomial."""
        out = Polynomial.zero()
        for k, c in enumerate(self.coeffs):
            out = out + c * (Polynomial.t() ** k)
        return out

    @classmethod
    def extract_t(cls, p):
        """Inverse of embed_t for polynomials using the reserved t variable."""
        coeffs = {}
        for m, c in p.terms.items():
            k = dict(m).get(T_INDEX, 0)
            rest = tuple((i, e) for i, e in m if i != T_INDEX)
            coeffs.setdefault(k, {})[rest] = c
        n = max(coeffs, default=-1) + 1
        return cls([Polynomial(coeffs.get(k, {})) for k in range(n)])


def poisson_bracket(f, g, algebra):
    """Kirillov-Kostant bracket on S(g): {x_i,x_j} = sum_k c_ij^k x_k,
    extended to polynomials by the Leibniz rule."""
    out = Polynomial.zero()
    dim = algebra.dim
    for i in f.variables():
        if i < 0:
            continue
        if i >= dim:
            raise IndexError(f"variable {i} out of range for dim {dim}")
        df = f.diff(i)
        if df.is_zero():
            continue
        for j in g.variables():
            if j < 0:
                continue
            if j >= dim:
                raise IndexError(f"variable {j} out of range for dim {dim}")
            bracket = algebra.bracket(i, j)
            if not bracket:
                continue
            dg = g.diff(j)
            if dg.is_zero():
                continue
            lin = Polynomial({((k, 1),): c for k, c in bracket.items()})
            out = out + df * dg * lin
    return out
