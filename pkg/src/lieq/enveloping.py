"""The deformed enveloping algebra U_(eps)(g).

Elements are stored in the PBW normal form: words are nondecreasing
tuples of basis indices (q-indices first, h-indices last, matching the
SubalgebraSetup basis order), and coefficients are polynomials in eps
represented as {eps_power: Fraction} maps.  The defining relation
X*Y - Y*X = eps[X,Y] is applied by a memoized straightening recursion.

Because h-letters sit at the end of every normal word, the quotient by
the left ideal generated by {H + lambda(H)} is a suffix substitution
h |-> -lambda(h).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import linalg
from .poly import (DegreeOverflowError, Polynomial, _as_fraction,
                   max_total_degree)


# -- eps-coefficient helpers (maps eps_power -> Fraction) ----------------

def _eadd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in out.items() if v != 0}


def _escale(a, c):
    c = _as_fraction(c)
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def _emul(a, b):
    out = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def _eshift(a, k):
    return {p + k: v for p, v in a.items()}


def _eps_to_string(coeff):
    pieces = []
    for k in sorted(coeff):
        v = coeff[k]
        if k == 0:
            pieces.append(str(v))
        else:
            e = "eps" if k == 1 else f"eps^{k}"
            if v == 1:
                pieces.append(e)
            elif v == -1:
                pieces.append(f"-{e}")
            else:
                pieces.append(f"{v}*{e}")
    return " + ".join(pieces).replace("+ -", "- ") or "0"


@lru_cache(maxsize=None)
def _mul_word_letter(algebra, word, j):
    """Normal word times a single generator on the right.

    Returns a tuple of (word, eps_power, coeff) triples.  Straightening:
    for a trailing letter i > j, x_i x_j = x_j x_i + eps [x_i, x_j].
    """
    if not word or word[-1] <= j:
        return ((word + (j,), 0, Fraction(1)),)
    i = word[-1]
    head = word[:-1]
    acc = {}
    for w2, p2, c2 in _mul_word_letter(algebra, head, j):
        for w3, p3, c3 in _mul_word_letter(algebra, w2, i):
            key = (w3, p2 + p3)
            acc[key] = acc.get(key, Fraction(0)) + c2 * c3
    for k, c in algebra.bracket(i, j).items():
        for w2, p2, c2 in _mul_word_letter(algebra, head, k):
            key = (w2, p2 + 1)
            acc[key] = acc.get(key, Fraction(0)) + c * c2
    return tuple((w, p, c) for (w, p), c in acc.items() if c != 0)


def _mul_words(algebra, w1, w2):
    """Product of two normal words as {word: eps-coefficient}."""
    current = {w1: {0: Fraction(1)}}
    for letter in w2:
        nxt = {}
        for w, co in current.items():
            for w3, p3, c3 in _mul_word_letter(algebra, w, letter):
                add = _eshift(_escale(co, c3), p3)
                nxt[w3] = _eadd(nxt.get(w3, {}), add)
        current = {w: co for w, co in nxt.items() if co}
    return current


@dataclass(frozen=True)
class PBWElement:
    """Normal-ordered element of U_(eps)(g)."""
    algebra: object
    terms: tuple  # ((word, ((eps_power, coeff), ...)), ...)

    @classmethod
    def from_terms(cls, algebra, terms):
        clean = []
        for word, co in terms.items():
            co = {k: v for k, v in co.items() if v != 0}
            if co:
                clean.append((word, tuple(sorted(co.items()))))
        return cls(algebra=algebra, terms=tuple(sorted(clean)))

    @classmethod
    def zero(cls, algebra):
        return cls.from_terms(algebra, {})

    @classmethod
    def one(cls, algebra):
        return cls.from_terms(algebra, {(): {0: Fraction(1)}})

    @classmethod
    def generator(cls, algebra, i):
        return cls.from_terms(algebra, {(i,): {0: Fraction(1)}})

    @classmethod
    def from_word(cls, algebra, word, eps_power=0, coeff=1):
        return cls.from_terms(algebra, {tuple(word): {eps_power: _as_fraction(coeff)}})

    @classmethod
    def from_polynomial(cls, algebra, poly, eps_power=0):
        """Monomials become normal words verbatim (no symmetrization)."""
        terms = {}
        for m, c in poly.terms.items():
            word = tuple(i for i, e in sorted(m) for _ in range(e))
            if any(i < 0 for i in word):
                raise ValueError("special variables have no PBW image")
            terms[word] = _eadd(terms.get(word, {}), {eps_power: c})
        return cls.from_terms(algebra, terms)

    def term_map(self):
        return {word: dict(co) for word, co in self.terms}

    def is_zero(self):
        return not self.terms

    def filtration_degree(self):
        return max((len(w) for w, _ in self.terms), default=-1)

    def eps_degree(self):
        return max((k for _, co in self.terms for k, _ in co), default=-1)

    def __add__(self, other):
        out = self.term_map()
        for word, co in other.terms:
            out[word] = _eadd(out.get(word, {}), dict(co))
        return PBWElement.from_terms(self.algebra, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c, eps_shift=0):
        out = {}
        for word, co in self.terms:
            out[word] = _eshift(_escale(dict(co), c), eps_shift)
        return PBWElement.from_terms(self.algebra, out)

    def __mul__(self, other):
        return pbw_multiply(self, other)

    def to_string(self):
        if not self.terms:
            return "0"
        names = self.algebra.basis_names
        pieces = []
        for word, co in self.terms:
            factors = []
            for i, grp in itertools.groupby(word):
                n = len(list(grp))
                factors.append(names[i] if n == 1 else f"{names[i]}^{n}")
            coeff = _eps_to_string(dict(co))
            body = "*".join(factors) if factors else "1"
            if coeff == "1" and factors:
                pieces.append(body)
            elif factors:
                pieces.append(f"({coeff})*{body}")
            else:
                pieces.append(coeff)
        return " + ".join(pieces)

    def __repr__(self):
        return f"PBWElement({self.to_string()})"


def pbw_multiply(u, v):
    """Associative product in U_(eps)(g); eps=0 recovers S(g)."""
    if u.algebra != v.algebra:
        raise ValueError("operands live over different algebras")
    cap = max_total_degree()
    out = {}
    for w1, co1 in u.terms:
        for w2, co2 in v.terms:
            if len(w1) + len(w2) > cap:
                raise DegreeOverflowError(
                    f"word length {len(w1) + len(w2)} exceeds cap {cap}")
            co = _emul(dict(co1), dict(co2))
            for w, wco in _mul_words(u.algebra, w1, w2).items():
                out[w] = _eadd(out.get(w, {}), _emul(wco, co))
    return PBWElement.from_terms(u.algebra, out)


@dataclass(frozen=True)
class QuotientElement:
    """Class in U_(eps)(g)/U_(eps)(g)h_lambda, as q-words with eps coefficients."""
    setup: object
    terms: tuple  # ((q_word, ((eps_power, coeff), ...)), ...)

    @classmethod
    def from_terms(cls, setup, terms):
        clean = []
        for word, co in terms.items():
            co = {k: v for k, v in co.items() if v != 0}
            if co:
                clean.append((word, tuple(sorted(co.items()))))
        return cls(setup=setup, terms=tuple(sorted(clean)))

    @classmethod
    def zero(cls, setup):
        return cls.from_terms(setup, {})

    def term_map(self):
        return {word: dict(co) for word, co in self.terms}

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((len(w) for w, _ in self.terms), default=-1)

    def eps_degree(self):
        return max((k for _, co in self.terms for k, _ in co), default=-1)

    def __add__(self, other):
        out = self.term_map()
        for word, co in other.terms:
            out[word] = _eadd(out.get(word, {}), dict(co))
        return QuotientElement.from_terms(self.setup, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c, eps_shift=0):
        out = {}
        for word, co in self.terms:
            out[word] = _eshift(_escale(dict(co), c), eps_shift)
        return QuotientElement.from_terms(self.setup, out)

    def lift(self):
        """Canonical PBW representative (q-words verbatim)."""
        return PBWElement.from_terms(self.setup.algebra, self.term_map())

    def __mul__(self, other):
        """Product via canonical representatives, reduced back."""
        return quotient_reduce(pbw_multiply(self.lift(), other.lift()), self.setup)

    def to_polynomial_pair(self):
        """As a list of (eps_power, Polynomial) in the q-variables."""
        buckets = {}
        for word, co in self.terms:
            m = tuple((i, len(list(g))) for i, g in itertools.groupby(word))
            for k, c in co:
                buckets.setdefault(k, {})[m] = c
        return [(k, Polynomial(buckets[k])) for k in sorted(buckets)]

    def to_string(self):
        if not self.terms:
            return "0"
        names = self.setup.algebra.basis_names
        pieces = []
        for word, co in self.terms:
            factors = []
            for i, grp in itertools.groupby(word):
                n = len(list(grp))
                factors.append(names[i] if n == 1 else f"{names[i]}^{n}")
            coeff = _eps_to_string(dict(co))
            body = "*".join(factors) if factors else "1"
            if coeff == "1" and factors:
                pieces.append(body)
            elif factors:
                pieces.append(f"({coeff})*{body}")
            else:
                pieces.append(coeff)
        return " + ".join(pieces)

    def __repr__(self):
        return f"QuotientElement({self.to_string()})"


def quotient_reduce(u, setup, eps_scaled_lambda=False):
    """Project a normal-ordered element to the quotient by U_(eps)(g)h_lambda.

    Each word q^a h^b maps to q^a times prod_j (-lambda(h_j))^{b_j}.  With
    `eps_scaled_lambda` the substituted value picks up one power of eps per
    h-letter (the experimental scaling variant).
    """
    if not setup.lam_is_rational():
        raise ValueError("U-side quotient needs a rational character")
    nq = setup.nq
    lam = {i: v.constant_term() for i, v in setup.lam}
    out = {}
    for word, co in u.terms:
        co = dict(co)
        qpart = tuple(l for l in word if l < nq)
        hpart = [l for l in word if l >= nq]
        factor = Fraction(1)
        for l in hpart:
            factor *= -lam[l]
        if factor == 0 and hpart:
            continue
        shift = len(hpart) if eps_scaled_lambda else 0
        out[qpart] = _eadd(out.get(qpart, {}),
                           _eshift(_escale(co, factor), shift))
    return QuotientElement.from_terms(setup, out)


def ideal_generator(setup, j, eps_scaled_lambda=False):
    """H_j + lambda(H_j) as a PBW element (the h_lambda generator)."""
    lam = setup.lam_value(j).constant_term()
    gen = PBWElement.generator(setup.algebra, j)
    if lam:
        gen = gen + PBWElement.from_word(
            setup.algebra, (), eps_power=1 if eps_scaled_lambda else 0, coeff=lam)
    return gen


def q_words_up_to(setup, n):
    """All normal q-words of length <= n, deterministic graded order."""
    out = []
    for length in range(n + 1):
        out.extend(itertools.combinations_with_replacement(range(setup.nq), length))
    return out


def pbw_word_count(dim, n):
    """Number of normal words of length <= n: C(dim + n, n)."""
    return comb(dim + n, n)


# -- invariance solving --------------------------------------------------

def _solution_vectors_to_elements(setup, unknowns, vectors):
    out = []
    for vec in vectors:
        terms = {}
        for coeff, (word, k) in zip(vec, unknowns):
            if coeff:
                terms[word] = _eadd(terms.get(word, {}), {k: coeff})
        out.append(QuotientElement.from_terms(setup, terms))
    return out


def _module_generators(vectors, unknowns):
    """Q[eps]-module generators of a Q-solution space.

    `vectors` span a space closed under multiplication by eps (the shift
    (word, k) -> (word, k+1) where it stays inside the coordinate range);
    generators are a basis of V / eps*V.
    """
    index = {u: i for i, u in enumerate(unknowns)}
    kmax = max((k for _, k in unknowns), default=0)
    shifted = []
    for v in vectors:
        if any(c != 0 and k == kmax for c, (_, k) in zip(v, unknowns)):
            continue
        s = [Fraction(0)] * len(unknowns)
        ok = True
        for c, (word, k) in zip(v, unknowns):
            if c == 0:
                continue
            tgt = index.get((word, k + 1))
            if tgt is None:
                ok = False
                break
            s[tgt] = c
        if ok:
            shifted.append(s)
    base, _ = linalg.rref(shifted)
    gens = []
    current = list(base)
    for v in vectors:
        extended, _ = linalg.rref(current + [list(v)])
        if len(extended) > len(current):
            gens.append(v)
            current = extended
    return gens


@dataclass
class InvariantAlgebraPresentation:
    """Degree-truncated presentation of (U_(eps)(g)/U_(eps)(g)h_lambda)^h."""
    setup: object
    max_degree: int
    basis: list  # QuotientElement module generators over Q[eps]
    products: dict  # (i, j) -> list of {eps_power: coeff} coords, or "overflow"

    def per_degree_dimensions(self):
        dims = {}
        for b in self.basis:
            d = max(b.degree(), 0)
            dims[d] = dims.get(d, 0) + 1
        return {d: dims[d] for d in sorted(dims)}

    def overflow_pairs(self):
        return sorted(k for k, v in self.products.items() if v == "overflow")

    def product_coordinates(self, i, j):
        """Coordinates of basis_i * basis_j, computed on demand."""
        if (i, j) not in self.products:
            bi, bj = self.basis[i], self.basis[j]
            if max(bi.degree(), 0) + max(bj.degree(), 0) > self.max_degree:
                self.products[(i, j)] = "overflow"
            else:
                coords = _coordinates_in_basis(self, bi * bj)
                self.products[(i, j)] = coords if coords is not None else "overflow"
        return self.products[(i, j)]


def invariants_up_to_degree(setup, n, eps_scaled_lambda=False):
    """Solve the invariance condition quotient_reduce((H_j + lambda(H_j)) u) = 0
    for every h-generator H_j, over q-words of degree <= n with eps-degree <= n.

    Returns a presentation whose basis generates the solution space as a
    Q[eps]-module, with the induced product table where degrees permit.
    """
    words = q_words_up_to(setup, n)
    unknowns = [(w, k) for w in words for k in range(n + 1)]
    gens = [ideal_generator(setup, j, eps_scaled_lambda) for j in setup.h_indices]
    # image of each base word under each condition, reused across eps-shifts
    images = {}
    out_index = {}
    for j, gen in enumerate(gens):
        for w in words:
            img = quotient_reduce(
                pbw_multiply(gen, PBWElement.from_word(setup.algebra, w)),
                setup, eps_scaled_lambda)
            images[(j, w)] = img
    rows_by_condition = {}
    for col, (w, k) in enumerate(unknowns):
        for j in range(len(gens)):
            img = images[(j, w)]
            for word, co in img.terms:
                for p, c in co:
                    key = (j, word, p + k)
                    rows_by_condition.setdefault(key, {})[col] = c
    matrix = []
    for key in sorted(rows_by_condition):
        row = [Fraction(0)] * len(unknowns)
        for col, c in rows_by_condition[key].items():
            row[col] = c
        matrix.append(row)
    vectors = linalg.nullspace(matrix, ncols=len(unknowns))
    gens_vec = _module_generators(vectors, unknowns)
    basis = _solution_vectors_to_elements(setup, unknowns, gens_vec)
    basis.sort(key=lambda b: (b.degree(), b.terms))
    pres = InvariantAlgebraPresentation(
        setup=setup, max_degree=n, basis=basis, products={})
    # eager table only at small basis sizes; larger ones fill on demand
    if len(basis) <= 16:
        _fill_product_table(pres)
    return pres


def _coordinates_in_basis(pres, element, eps_cap=None):
    """Express a QuotientElement as sum_l (eps-polynomial)_l * basis_l.

    Returns a list of {eps_power: coeff} per basis element, or None.
    """
    if eps_cap is None:
        base_eps = max((b.eps_degree() for b in pres.basis), default=0)
        eps_cap = max(element.eps_degree(), 0) + max(base_eps, 0) + 1
    span = []
    labels = []
    coords_space = set()
    expanded = [element] + [b for b in pres.basis]
    for e in expanded:
        for word, co in e.terms:
            for k, _ in co:
                coords_space.add((word, k))
                for extra in range(eps_cap + 1):
                    coords_space.add((word, k + extra))
    coords = sorted(coords_space)
    cindex = {c: i for i, c in enumerate(coords)}

    def vec(e, shift=0):
        v = [Fraction(0)] * len(coords)
        for word, co in e.terms:
            for k, c in co:
                idx = cindex.get((word, k + shift))
                if idx is None:
                    return None
                v[idx] = c
        return v

    for l, b in enumerate(pres.basis):
        for k in range(eps_cap + 1):
            v = vec(b, shift=k)
            if v is None:
                continue
            span.append(v)
            labels.append((l, k))
    target = vec(element)
    if target is None:
        return None
    sol = linalg.span_coordinates(span, target)
    if sol is None:
        return None
    out = [{} for _ in pres.basis]
    for c, (l, k) in zip(sol, labels):
        if c:
            out[l][k] = out[l].get(k, Fraction(0)) + c
    return out


def _fill_product_table(pres):
    n = pres.max_degree
    for i, bi in enumerate(pres.basis):
        for j, bj in enumerate(pres.basis):
            if max(bi.degree(), 0) + max(bj.degree(), 0) > n:
                pres.products[(i, j)] = "overflow"
                continue
            prod = bi * bj
            coords = _coordinates_in_basis(pres, prod)
            pres.products[(i, j)] = coords if coords is not None else "overflow"


def is_commutative(pres):
    """(verdict, witness) within the degree-safe range.

    witness is None, a ((i, j), commutator) pair, or the string
    "inconclusive" when every pair overflows the degree bound.
    """
    n = pres.max_degree
    tested = False
    skipped = False
    for i, bi in enumerate(pres.basis):
        for j in range(i + 1, len(pres.basis)):
            bj = pres.basis[j]
            if max(bi.degree(), 0) + max(bj.degree(), 0) > n:
                skipped = True
                continue
            tested = True
            comm = bi * bj - bj * bi
            if not comm.is_zero():
                return False, ((i, j), comm)
    if skipped and not tested:
        return True, "inconclusive"
    return True, None


def center_of(pres):
    """Degree-truncated center of the associative presentation.

    Returns (generators, per_degree_dims, inconclusive_degrees): module
    generators of the centrality solution space among spans of the basis,
    restricted to degrees where every commutator test stays inside the
    degree bound.
    """
    n = pres.max_degree
    max_gen_deg = max((max(b.degree(), 0) for b in pres.basis), default=0)
    safe = n - max_gen_deg
    unknown_basis = [(l, k) for l, b in enumerate(pres.basis)
                     if max(b.degree(), 0) <= max(safe, 0)
                     for k in range(n + 1)]
    inconclusive = [d for d in range(n + 1) if d > safe]
    if not unknown_basis:
        return [], {}, inconclusive
    # commutator of each candidate basis element with each generator
    images = {}
    coords_space = set()
    for (l, k) in unknown_basis:
        for m, bm in enumerate(pres.basis):
            comm = pres.basis[l] * bm - bm * pres.basis[l]
            comm = comm.scale(1, eps_shift=k)
            images[(l, k, m)] = comm
            for word, co in comm.terms:
                for p, _ in co:
                    coords_space.add((m, word, p))
    coords = sorted(coords_space)
    cindex = {c: i for i, c in enumerate(coords)}
    matrix_cols = []
    for (l, k) in unknown_basis:
        col = [Fraction(0)] * len(coords)
        for m in range(len(pres.basis)):
            for word, co in images[(l, k, m)].terms:
                for p, c in co:
                    col[cindex[(m, word, p)]] += c
        matrix_cols.append(col)
    matrix = [[matrix_cols[c][r] for c in range(len(unknown_basis))]
              for r in range(len(coords))]
    vectors = linalg.nullspace(matrix, ncols=len(unknown_basis))
    gens_vec = _module_generators(vectors, unknown_basis)
    generators = []
    for v in gens_vec:
        elt = QuotientElement.zero(pres.setup)
        for c, (l, k) in zip(v, unknown_basis):
            if c:
                elt = elt + pres.basis[l].scale(c, eps_shift=k)
        generators.append(elt)
    generators.sort(key=lambda b: (b.degree(), b.terms))
    dims = {}
    for g in generators:
        d = max(g.degree(), 0)
        dims[d] = dims.get(d, 0) + 1
    return generators, {d: dims[d] for d in sorted(dims)}, inconclusive


# -- Poisson (S(g)) side -------------------------------------------------

@dataclass
class SPresentation:
    """Degree-truncated basis of (S(g)/S(g)h_lambda)^h with the reduced
    commutative product and Poisson bracket."""
    setup: object
    max_degree: int
    basis: list  # Polynomials in the q-variables

    def per_degree_dimensions(self):
        dims = {}
        for b in self.basis:
            d = max(b.degree(), 0)
            dims[d] = dims.get(d, 0) + 1
        return {d: dims[d] for d in sorted(dims)}


def _q_monomials_up_to(setup, n):
    return [tuple((i, len(list(g))) for i, g in itertools.groupby(w))
            for w in q_words_up_to(setup, n)]


def s_invariants_up_to_degree(setup, n):
    """Solve {H_j, F} in S(g)h_lambda for all j over q-monomials of degree <= n."""
    from .poly import poisson_bracket
    monos = _q_monomials_up_to(setup, n)
    conditions = {}
    for j in setup.h_indices:
        hj = Polynomial.variable(j)
        for col, m in enumerate(monos):
            f = Polynomial({m: Fraction(1)})
            reduced = setup.reduce_h_variables(
                poisson_bracket(hj, f, setup.algebra))
            for mm, c in reduced.terms.items():
                conditions.setdefault((j, mm), {})[col] = c
    matrix = []
    for key in sorted(conditions):
        row = [Fraction(0)] * len(monos)
        for col, c in conditions[key].items():
            row[col] = c
        matrix.append(row)
    vectors = linalg.nullspace(matrix, ncols=len(monos))
    basis = []
    for v in vectors:
        basis.append(Polynomial({m: c for m, c in zip(monos, v) if c != 0}))
    basis.sort(key=lambda p: (p.degree(), p.canonical()))
    return SPresentation(setup=setup, max_degree=n, basis=basis)


def poisson_center_of(spres):
    """Degree-truncated Poisson center of the S-side presentation."""
    from .poly import poisson_bracket
    setup = spres.setup
    n = spres.max_degree
    max_gen_deg = max((max(b.degree(), 0) for b in spres.basis), default=0)
    safe = n - max_gen_deg + 1  # bracket lowers degree by one
    candidates = [b for b in spres.basis if max(b.degree(), 0) <= max(safe, 0)]
    inconclusive = [d for d in range(n + 1) if d > safe]
    conditions = {}
    for col, f in enumerate(candidates):
        for m, g in enumerate(spres.basis):
            reduced = setup.reduce_h_variables(
                poisson_bracket(f, g, setup.algebra))
            for mm, c in reduced.terms.items():
                conditions.setdefault((m, mm), {})[col] = c
    matrix = []
    for key in sorted(conditions):
        row = [Fraction(0)] * len(candidates)
        for col, c in conditions[key].items():
            row[col] = c
        matrix.append(row)
    vectors = linalg.nullspace(matrix, ncols=len(candidates))
    center = []
    for v in vectors:
        p = Polynomial.zero()
        for c, f in zip(v, candidates):
            p = p + f.scale(c)
        center.append(p)
    center.sort(key=lambda p: (p.degree(), p.canonical()))
    dims = {}
    for g in center:
        d = max(g.degree(), 0)
        dims[d] = dims.get(d, 0) + 1
    return center, {d: dims[d] for d in sorted(dims)}, inconclusive
