"""The reduction differential, its solution spaces, the Cattaneo-Felder
product hook, and the specialization / character-deformation transforms.

The built-in first-order piece d1 is the lambda-twisted h-action
(d1 F)(H_j) = reduce({H_j, F}), where reduce substitutes every
h-variable by -lambda(h).  Higher odd-order pieces are assembled from
Bernoulli-family graphs with a pluggable weight table; they default to
absent, and every solver names the missing weights rather than guessing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .core import CentralExtension, SubalgebraSetup
from .graphs import bernoulli_graph, bernoulli_wheel_graph, graph_operator
from .poly import EpsPolynomial, Polynomial, TPolynomial, poisson_bracket


class MembershipError(Exception):
    """An element claimed for a reduction space fails its equations."""


class MissingDifferentialError(Exception):
    """A cascade order was requested whose graph weights are unpopulated."""

    def __init__(self, orders):
        self.orders = sorted(orders)
        super().__init__(f"unpopulated differential orders: {self.orders}")


def d1(f, setup):
    """First-order differential: h-index -> reduce({H_j, F})."""
    out = {}
    for j in setup.h_indices:
        hj = Polynomial.variable(j)
        out[j] = setup.reduce_h_variables(
            poisson_bracket(hj, f, setup.algebra))
    return out


@dataclass
class ReductionDifferential:
    """Odd-order pieces of the differential.

    Order 1 is always the built-in lambda-twisted action.  Orders i >= 3
    are (graph, weight) lists over the Bernoulli families; an order that
    appears with weights is "populated".
    """
    graph_terms: dict = field(default_factory=dict)  # order -> [(KGraph, Fraction)]

    @classmethod
    def d1_only(cls):
        return cls()

    def populated_orders(self):
        # a key present with an empty term list means "configured as zero"
        return [1] + sorted(self.graph_terms)

    def apply(self, order, f, setup):
        """Apply d^(order) to an S(q) polynomial; h-index -> Polynomial."""
        if order == 1:
            return d1(f, setup)
        if order not in self.graph_terms:
            raise MissingDifferentialError([order])
        terms = self.graph_terms[order]
        out = {}
        for j in setup.h_indices:
            acc = Polynomial.zero()
            for graph, weight in terms:
                val = graph_operator(graph, setup.algebra,
                                     [Polynomial.variable(j), f])
                acc = acc + val.scale(weight)
            out[j] = setup.reduce_h_variables(acc)
        return out


def differential_from_weight_table(table, eps_order):
    """Assemble the odd-order graph terms from a weight table.

    Order i draws on the i-vertex Bernoulli chain and every chain+wheel
    split of i; graphs whose canonical class is absent from the table are
    reported together via MissingWeightError.
    """
    from .graphs import MissingWeightError

    graph_terms = {}
    missing = []
    for i in range(3, eps_order + 1, 2):
        graphs = [bernoulli_graph(i)]
        graphs += [bernoulli_wheel_graph(c, i - c) for c in range(1, i - 1)]
        terms = []
        for g in graphs:
            w = table.value(g.canonical_id)
            if w is None:
                missing.append(g.canonical_id)
            elif w != 0:
                terms.append((g, w))
        graph_terms[i] = terms
    if missing:
        raise MissingWeightError(sorted(set(missing)))
    return ReductionDifferential(graph_terms=graph_terms)


@dataclass
class ReductionSolution:
    """Element of the reduction space with its certification metadata."""
    setup: SubalgebraSetup
    element: EpsPolynomial
    eps_order: int
    max_degree: int
    imposed_orders: tuple = (1,)

    def specialized(self):
        return self.element.specialize()

    def degree(self):
        return max((c.degree() for c in self.element.coeffs), default=-1)

    def __repr__(self):
        names = self.setup.algebra.basis_names
        return f"ReductionSolution({self.element.to_string(names)})"


def _cascade_equations(element, setup, diff, eps_order):
    """All cascade components: (output eps-order, h-index) -> Polynomial.

    Coefficient of eps^m in d^(eps)(F): sum over populated odd i and k
    with i + k = m of d^(i)(F_k).
    """
    orders = diff.populated_orders()
    missing = [i for i in range(3, eps_order + 1, 2) if i not in orders]
    if missing:
        raise MissingDifferentialError(missing)
    out = {}
    for k, fk in enumerate(element.coeffs):
        if fk.is_zero():
            continue
        for i in orders:
            if i > eps_order:
                continue
            comp = diff.apply(i, fk, setup)
            for j, p in comp.items():
                key = (i + k, j)
                out[key] = out.get(key, Polynomial.zero()) + p
    return out


def membership_check(solution, setup=None, diff=None, eps_order=None):
    """Re-evaluate every cascade equation; True iff all vanish identically."""
    if isinstance(solution, ReductionSolution):
        setup = setup or solution.setup
        eps_order = eps_order if eps_order is not None else solution.eps_order
        element = solution.element
    else:
        element = solution
        if isinstance(element, Polynomial):
            element = EpsPolynomial.from_polynomial(element)
    diff = diff or ReductionDifferential.d1_only()
    eqs = _cascade_equations(element, setup, diff,
                             eps_order if eps_order is not None else 1)
    return all(p.is_zero() for p in eqs.values())


def membership_witness(element, setup, diff=None, eps_order=1):
    """First nonvanishing cascade component, or None."""
    if isinstance(element, Polynomial):
        element = EpsPolynomial.from_polynomial(element)
    diff = diff or ReductionDifferential.d1_only()
    eqs = _cascade_equations(element, setup, diff, eps_order)
    for key in sorted(eqs):
        if not eqs[key].is_zero():
            return key, eqs[key]
    return None


def _q_monomials_up_to(setup, n):
    out = []
    for length in range(n + 1):
        for w in itertools.combinations_with_replacement(range(setup.nq), length):
            m = {}
            for i in w:
                m[i] = m.get(i, 0) + 1
            out.append(tuple(sorted(m.items())))
    return out


def solve_reduction(setup, diff=None, eps_order=1, n=4):
    """Basis of polynomial solutions of the cascade equations.

    Unknowns are (q-monomial of degree <= n, eps-power <= eps_order); the
    returned solutions generate the solution space as a Q[eps]-module.
    With the default d1-only differential this is the lambda-twisted
    invariant space of S(q), eps-graded.
    """
    diff = diff or ReductionDifferential.d1_only()
    monos = _q_monomials_up_to(setup, n)
    kmax = max(eps_order, 0)
    unknowns = [(m, k) for m in monos for k in range(kmax + 1)]
    orders = diff.populated_orders()
    missing = [i for i in range(3, eps_order + 1, 2) if i not in orders]
    if missing:
        raise MissingDifferentialError(missing)
    # image of each base monomial under each populated order
    images = {}
    for i in orders:
        if i > max(eps_order, 1):
            continue
        for m in monos:
            images[(i, m)] = diff.apply(i, Polynomial({m: Fraction(1)}), setup)
    rows = {}
    for col, (m, k) in enumerate(unknowns):
        for (i, mm), comp in images.items():
            if mm != m:
                continue
            for j, p in comp.items():
                for out_m, c in p.terms.items():
                    key = (i + k, j, out_m)
                    rows.setdefault(key, {})[col] = c
    matrix = []
    for key in sorted(rows):
        row = [Fraction(0)] * len(unknowns)
        for col, c in rows[key].items():
            row[col] = c
        matrix.append(row)
    vectors = linalg.nullspace(matrix, ncols=len(unknowns))
    generators = _module_generators_poly(vectors, unknowns, kmax)
    solutions = []
    for vec in generators:
        coeffs = {}
        for c, (m, k) in zip(vec, unknowns):
            if c:
                coeffs.setdefault(k, {})[m] = c
        nmax = max(coeffs, default=-1) + 1
        element = EpsPolynomial([Polynomial(coeffs.get(k, {})) for k in range(nmax)])
        solutions.append(ReductionSolution(
            setup=setup, element=element, eps_order=eps_order, max_degree=n,
            imposed_orders=tuple(i for i in orders if i <= max(eps_order, 1))))
    solutions.sort(key=lambda s: (s.degree(), [c.canonical() for c in s.element.coeffs]))
    return solutions


def _module_generators_poly(vectors, unknowns, kmax):
    index = {u: i for i, u in enumerate(unknowns)}
    shifted = []
    for v in vectors:
        s = [Fraction(0)] * len(unknowns)
        ok = True
        for c, (m, k) in zip(v, unknowns):
            if c == 0:
                continue
            if k + 1 > kmax:
                ok = False
                break
            s[index[(m, k + 1)]] = c
        if ok:
            shifted.append(s)
    base, _ = linalg.rref(shifted)
    current = list(base)
    gens = []
    for v in vectors:
        extended, _ = linalg.rref(current + [list(v)])
        if len(extended) > len(current):
            gens.append(v)
            current = extended
    return gens


def per_degree_dimensions(solutions):
    dims = {}
    for s in solutions:
        d = max(s.degree(), 0)
        dims[d] = dims.get(d, 0) + 1
    return {d: dims[d] for d in sorted(dims)}


# -- the Cattaneo-Felder product hook ------------------------------------

def cf_product(f, g, setup, weights=None, order=1, diff=None, eps_order=None):
    """Truncated product on the reduction space.

    Order 0 is the plain product; the eps^1 term is half the reduced
    Poisson bracket, so the eps^1 commutator is the reduced bracket.
    Orders >= 2 need two-brane weight data, which this artifact treats as
    pluggable and absent by default.
    """
    if order >= 2 and weights is None:
        raise MissingDifferentialError(list(range(2, order + 1)))
    fe = f.element if isinstance(f, ReductionSolution) else f
    ge = g.element if isinstance(g, ReductionSolution) else g
    if isinstance(fe, Polynomial):
        fe = EpsPolynomial.from_polynomial(fe)
    if isinstance(ge, Polynomial):
        ge = EpsPolynomial.from_polynomial(ge)
    out = fe * ge
    if order >= 1:
        half = Fraction(1, 2)
        for a, fa in enumerate(fe.coeffs):
            for b, gb in enumerate(ge.coeffs):
                if fa.is_zero() or gb.is_zero():
                    continue
                bracket = setup.reduce_h_variables(
                    poisson_bracket(fa, gb, setup.algebra))
                out = out + EpsPolynomial.term(a + b + 1, bracket.scale(half))
    n = max((c.degree() for c in out.coeffs), default=0)
    result = ReductionSolution(
        setup=setup, element=out,
        eps_order=eps_order if eps_order is not None else order,
        max_degree=max(n, 0))
    if not membership_check(result, setup, diff or ReductionDifferential.d1_only()):
        raise MembershipError("cf_product left the reduction space")
    return result


# -- specialization and the map J ----------------------------------------

def specialize_eps1(f):
    """Quotient by <eps - 1>: sum the eps-coefficients."""
    element = f.element if isinstance(f, ReductionSolution) else f
    if isinstance(element, Polynomial):
        return element
    return element.specialize()


def map_J(f, setup=None, diff=None):
    """J(F') = sum_k F'_k, typed into the eps-free reduction space.

    Target membership is verified, not assumed.
    """
    if isinstance(f, ReductionSolution):
        setup = setup or f.setup
    result = specialize_eps1(f)
    diff = diff or ReductionDifferential.d1_only()
    eqs = _cascade_equations(EpsPolynomial.from_polynomial(result), setup, diff, 1)
    bad = {k: p for k, p in eqs.items() if not p.is_zero()}
    if bad:
        raise MembershipError(
            f"J image leaves the eps-free reduction space: {sorted(bad)}")
    return result


# -- character deformation (t-side) --------------------------------------

def t_scaled_setup(setup, t=None):
    """Replace lambda by t*lambda; symbolic t when `t` is None."""
    scale = Polynomial.t() if t is None else Polynomial.constant(t)
    return setup.with_lambda({i: v * scale for i, v in setup.lam})


def t_membership_check(f_t, setup, diff=None):
    """Membership of a t-family in H0(h_{t lambda}) as a Q[t]-identity."""
    if isinstance(f_t, TPolynomial):
        f_t = f_t.embed_t()
    scaled = t_scaled_setup(setup)
    diff = diff or ReductionDifferential.d1_only()
    eqs = _cascade_equations(EpsPolynomial.from_polynomial(f_t), scaled, diff, 1)
    return all(p.is_zero() for p in eqs.values())


def _bihomogeneous_split(family):
    """(p, i) -> homogeneous piece of degree i inside the t^p coefficient."""
    out = {}
    for p, coeff in enumerate(family.coeffs):
        for i, piece in coeff.homogeneous_components():
            if not piece.is_zero():
                out[(p, i)] = piece
    return out


def eps_from_t_family(f_t, setup, diff=None):
    """Regrade a character-parameter family into an eps-solution.

    F_(eps) = eps^N sum F_p^(i) eps^{-(i+p)} with N = 1 + max(i+p); the
    roundtrip J(F_(eps)) = F_(t=1) holds by construction and is asserted.
    """
    if not isinstance(f_t, TPolynomial):
        f_t = TPolynomial.from_polynomial(f_t)
    if not t_membership_check(f_t, setup, diff):
        raise MembershipError("family fails symbolic-t membership")
    imposed = (diff or ReductionDifferential.d1_only()).populated_orders()
    pieces = _bihomogeneous_split(f_t)
    if not pieces:
        element = EpsPolynomial()
        return ReductionSolution(setup=setup, element=element,
                                 eps_order=max(imposed), max_degree=0,
                                 imposed_orders=tuple(imposed))
    big_n = 1 + max(p + i for p, i in pieces)
    element = EpsPolynomial()
    for (p, i), piece in pieces.items():
        element = element + EpsPolynomial.term(big_n - (i + p), piece)
    result = ReductionSolution(setup=setup, element=element,
                               eps_order=max(imposed),
                               max_degree=max(i for _, i in pieces),
                               imposed_orders=tuple(imposed))
    if not membership_check(result, setup, diff):
        raise MembershipError("transformed element fails eps-membership")
    assert specialize_eps1(result) == f_t.specialize()
    return result


def t_family_from_eps(f_eps, setup, diff=None):
    """Regrade an eps-solution into a character-parameter family,
    membership asserted as a Q[t]-identity."""
    element = f_eps.element if isinstance(f_eps, ReductionSolution) else f_eps
    if isinstance(element, Polynomial):
        element = EpsPolynomial.from_polynomial(element)
    imposed = (diff or ReductionDifferential.d1_only()).populated_orders()
    if not membership_check(ReductionSolution(
            setup=setup, element=element, eps_order=max(imposed),
            max_degree=0, imposed_orders=tuple(imposed)), setup, diff):
        raise MembershipError("input fails eps-membership")
    pieces = {}
    for k, coeff in enumerate(element.coeffs):
        for i, piece in coeff.homogeneous_components():
            if not piece.is_zero():
                pieces[(k, i)] = piece
    if not pieces:
        return TPolynomial()
    big_n = 1 + max(k + i for k, i in pieces)
    family = TPolynomial()
    for (k, i), piece in pieces.items():
        family = family + TPolynomial.term(big_n - (i + k), piece)
    if not t_membership_check(family, setup, diff):
        raise MembershipError("transformed family fails symbolic-t membership")
    return family


def lift_polynomial_family(f_t, ext: CentralExtension, diff=None):
    """Lift a polynomial t-family to the reduction space over g_T.

    Each t-power becomes the corresponding power of the central generator
    T; e_{T=t} of the result recovers the family (verified symbolically).
    """
    if not isinstance(f_t, TPolynomial):
        f_t = TPolynomial.from_polynomial(f_t)
    if not t_membership_check(f_t, ext.base, diff):
        raise MembershipError("family fails symbolic-t membership")
    t_var = Polynomial.variable(ext.t_index)
    lifted = Polynomial.zero()
    for p, coeff in enumerate(f_t.coeffs):
        # base q-indices coincide with extended q-indices below t_index
        lifted = lifted + coeff * (t_var ** p)
    eqs = _cascade_equations(EpsPolynomial.from_polynomial(lifted),
                             ext.extended, diff or ReductionDifferential.d1_only(), 1)
    bad = {k: p for k, p in eqs.items() if not p.is_zero()}
    if bad:
        raise MembershipError(
            f"lift leaves the extended reduction space: {sorted(bad)}")
    recovered = ext.evaluate_t_polynomial(lifted, Polynomial.t())
    if recovered != f_t.embed_t():
        raise MembershipError("e_{T=t} does not recover the family")
    return lifted


# -- two-sided filtration comparison --------------------------------------

@dataclass
class Theorem6Report:
    consistent: bool
    reduction_filtration_dims: list
    operator_filtration_dims: list
    pairs_checked: int
    pairs_skipped: int
    witnesses: list

    def verdict(self):
        return "consistent" if self.consistent else "inconsistent"


def _filtration_dims(polys, n):
    """Cumulative rank of the span of `polys` filtered by degree <= d."""
    monos = sorted({m for p in polys for m in p.terms})
    idx = {m: i for i, m in enumerate(monos)}
    dims = []
    for d in range(n + 1):
        rows = []
        for p in polys:
            if p.degree() <= d:
                row = [Fraction(0)] * len(monos)
                for m, c in p.terms.items():
                    row[idx[m]] = c
                rows.append(row)
        dims.append(linalg.rank(rows))
    return dims


def theorem6_check(setup, n, eps_order=1, diff=None):
    """Compare D_(T=1)(g, h, lambda) with the eps=1 reduction algebra.

    Both sides are computed through degree n: per-degree filtration
    dimensions must agree, and the candidate map must be multiplicative on
    every basis pair whose expansion is complete at the populated orders.
    """
    from .enveloping import invariants_up_to_degree
    from .quantization import iso_candidate

    diff = diff or ReductionDifferential.d1_only()
    witnesses = []

    solutions = solve_reduction(setup, diff, eps_order=eps_order, n=n)
    reduction_polys = [specialize_eps1(s) for s in solutions]
    red_dims = _filtration_dims(reduction_polys, n)

    ext = CentralExtension.build(setup)
    pres = invariants_up_to_degree(ext.extended, n)
    t_idx = ext.t_index
    images = []
    for b in pres.basis:
        total = Polynomial.zero()
        for k, p in b.to_polynomial_pair():
            total = total + p  # eps = 1
        images.append(total.substitute({t_idx: Fraction(1)}))  # T = 1
    op_dims = _filtration_dims(images, n)

    consistent = red_dims == op_dims
    if not consistent:
        witnesses.append(("filtration-dims", red_dims, op_dims))

    # multiplicativity of the candidate map through the populated CF order:
    # the order-1 truncated star determines the product's eps-coefficients
    # only up to eps^1, so that is exactly what gets compared
    cf_order = 1
    pairs_checked = 0
    pairs_skipped = 0
    image_rows = _poly_rows(images)
    for a, sa in enumerate(solutions):
        for b, sb in enumerate(solutions):
            if max(sa.degree(), 0) + max(sb.degree(), 0) > n:
                pairs_skipped += 1
                continue
            ua = iso_candidate(sa.element, setup)
            ub = iso_candidate(sb.element, setup)
            product = _truncate_eps(ua * ub, cf_order)
            star = cf_product(sa, sb, setup, diff=diff)
            mapped = iso_candidate(star.element, setup)
            if _truncate_eps(mapped, cf_order) != product:
                consistent = False
                witnesses.append(("multiplicativity", a, b))
            else:
                pairs_checked += 1
            # the eps=1 image must land in the computed operator algebra
            spec = sum((p for _, p in
                        _truncate_eps(mapped, cf_order).to_polynomial_pair()),
                       Polynomial.zero())
            if not _poly_in_span(image_rows, spec):
                consistent = False
                witnesses.append(("containment", a, b))
    return Theorem6Report(
        consistent=consistent,
        reduction_filtration_dims=red_dims,
        operator_filtration_dims=op_dims,
        pairs_checked=pairs_checked,
        pairs_skipped=pairs_skipped,
        witnesses=witnesses)


def _truncate_eps(qelt, order):
    """Drop eps-powers above `order` from a quotient element."""
    from .enveloping import QuotientElement
    out = {}
    for word, co in qelt.terms:
        kept = {k: c for k, c in co if k <= order}
        if kept:
            out[word] = kept
    return QuotientElement.from_terms(qelt.setup, out)


def _poly_rows(polys):
    monos = sorted({m for p in polys for m in p.terms})
    idx = {m: i for i, m in enumerate(monos)}
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(monos)
        for m, c in p.terms.items():
            row[idx[m]] = c
        rows.append(row)
    return monos, rows


def _poly_in_span(image_rows, p):
    monos, rows = image_rows
    idx = {m: i for i, m in enumerate(monos)}
    vec = [Fraction(0)] * len(monos)
    for m, c in p.terms.items():
        if m not in idx:
            return False
        vec[idx[m]] = c
    return linalg.row_space_contains(rows, vec)
