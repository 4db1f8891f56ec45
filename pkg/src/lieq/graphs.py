"""Kontsevich admissible graphs, their multidifferential operators for
linear Poisson structures, and Monte-Carlo weight estimation.

Conventions (recorded once, used everywhere):

* Aerial vertices are 0..n-1, ground vertices n..n+m-1.  Each aerial
  vertex emits an ordered pair of distinct targets, no self-loops.
* The vertex factor is one copy of pi^{ij} = 1/2 sum_k c_ij^k x_k per
  aerial vertex, summed over ordered index pairs; with the wedge weights
  +1/2 and -1/2 this normalizes the eps^1 star commutator to eps {F,G}.
* The edge form is the hyperbolic angle of the upper half-plane,
  phi(z, w) = arg((w - z)/(w - conj(z))), normalized by 1/(2*pi) per
  edge; weights are oriented integrals in the vertex edge order.
* Bernoulli chains: chain vertex k points first at vertex k+1 (the last
  at the output slot, ground 0) and second at the function slot
  (ground 1).  Wheel cycles run first edges around the cycle; the chain
  enters the wheel at its first vertex.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import EpsPolynomial, Polynomial, _as_fraction


class GraphError(Exception):
    pass


class MissingWeightError(Exception):
    def __init__(self, graph_ids):
        self.graph_ids = list(graph_ids)
        super().__init__(f"missing weights for graphs: {self.graph_ids}")


@dataclass(frozen=True)
class KGraph:
    """Admissible graph: each aerial vertex emits an ordered edge pair."""
    n_aerial: int
    n_ground: int
    edges: tuple  # ((target1, target2), ...) per aerial vertex

    def __post_init__(self):
        total = self.n_aerial + self.n_ground
        if len(self.edges) != self.n_aerial:
            raise GraphError("one ordered edge pair per aerial vertex required")
        for v, (a, b) in enumerate(self.edges):
            if a == v or b == v:
                raise GraphError(f"self-loop at aerial vertex {v}")
            if a == b:
                raise GraphError(f"coinciding ordered targets at vertex {v}")
            if not (0 <= a < total and 0 <= b < total):
                raise GraphError(f"edge target out of range at vertex {v}")

    def _encode(self, perm):
        """Encoding under an aerial relabeling old->new given by perm."""
        def label(target):
            if target < self.n_aerial:
                return f"v{perm[target] + 1}"
            return f"g{target - self.n_aerial + 1}"
        rows = [None] * self.n_aerial
        for v, (a, b) in enumerate(self.edges):
            rows[perm[v]] = f"v{perm[v] + 1}->({label(a)},{label(b)})"
        return f"K({self.n_aerial},{self.n_ground}):" + ";".join(rows)

    @property
    def canonical_id(self):
        """Minimum lexicographic encoding over aerial relabelings."""
        if self.n_aerial == 0:
            return f"K(0,{self.n_ground}):"
        best = None
        for p in itertools.permutations(range(self.n_aerial)):
            enc = self._encode(p)
            if best is None or enc < best:
                best = enc
        return best

    def edge_list(self):
        """Flat (source, target) list in the orientation-defining order."""
        out = []
        for v, (a, b) in enumerate(self.edges):
            out.append((v, a))
            out.append((v, b))
        return out


def parse_graph_id(text):
    """Inverse of canonical_id: `K(n,m):v1->(a,b);...` back to a KGraph."""
    import re

    head = re.match(r"K\((\d+),(\d+)\):", text)
    if not head:
        raise GraphError(f"malformed graph id {text!r}")
    n, m = int(head.group(1)), int(head.group(2))
    body = text[head.end():]
    edges = [None] * n
    if body:
        for piece in body.split(";"):
            row = re.fullmatch(r"v(\d+)->\((v\d+|g\d+),(v\d+|g\d+)\)", piece)
            if not row:
                raise GraphError(f"malformed edge spec {piece!r} in {text!r}")

            def target(label):
                k = int(label[1:]) - 1
                return k if label[0] == "v" else n + k

            v = int(row.group(1)) - 1
            if not 0 <= v < n or edges[v] is not None:
                raise GraphError(f"bad or duplicate vertex v{v + 1} in {text!r}")
            edges[v] = (target(row.group(2)), target(row.group(3)))
    if any(e is None for e in edges):
        raise GraphError(f"missing edge pairs in {text!r}")
    return KGraph(n_aerial=n, n_ground=m, edges=tuple(edges))


def enumerate_admissible(n, m, up_to_iso=False):
    """All admissible graphs with n aerial and m ground vertices.

    Deterministic order; with `up_to_iso` only the first representative of
    each canonical class is kept.
    """
    if n > 4 or m not in (1, 2):
        raise GraphError("enumeration capped at n <= 4, m in {1, 2}")
    targets = list(range(n + m))
    per_vertex = []
    for v in range(n):
        pairs = [(a, b) for a in targets for b in targets
                 if a != b and a != v and b != v]
        per_vertex.append(pairs)
    out = []
    seen = set()
    for combo in itertools.product(*per_vertex):
        g = KGraph(n_aerial=n, n_ground=m, edges=tuple(combo))
        if up_to_iso:
            cid = g.canonical_id
            if cid in seen:
                continue
            seen.add(cid)
        out.append(g)
    return out


def bernoulli_graph(i):
    """The i-vertex Bernoulli chain feeding the reduction differential.

    Ground 0 is the h*-output slot, ground 1 the function slot.
    """
    if i < 1:
        raise GraphError("Bernoulli chains need at least one vertex")
    out_slot, fn_slot = i, i + 1
    edges = []
    for k in range(i):
        first = k + 1 if k < i - 1 else out_slot
        edges.append((first, fn_slot))
    return KGraph(n_aerial=i, n_ground=2, edges=tuple(edges))


def bernoulli_wheel_graph(chain, wheel):
    """A Bernoulli chain attached to a wheel cycle (chain + wheel vertices).

    Chain vertices come first, then the wheel; the chain enters the wheel
    at its first vertex, wheel spokes point at the function slot.
    """
    if chain < 1:
        raise GraphError("chain length must be >= 1")
    if wheel < 2:
        raise GraphError("wheel needs at least two vertices (no self-loops)")
    n = chain + wheel
    out_slot, fn_slot = n, n + 1
    edges = []
    for k in range(chain):
        first = k + 1 if k < chain - 1 else chain  # into the wheel
        edges.append((first, fn_slot))
    for k in range(wheel):
        nxt = chain + (k + 1) % wheel
        edges.append((nxt, fn_slot))
    g = KGraph(n_aerial=n, n_ground=2, edges=tuple(edges))
    # the chain must still reach the output slot: reroute the last chain
    # vertex's second edge there so the operator lands in S(q) x h*
    edges = list(g.edges)
    edges[chain - 1] = (edges[chain - 1][0], out_slot)
    return KGraph(n_aerial=n, n_ground=2, edges=tuple(edges))


def graph_operator(graph, algebra, args):
    """The multidifferential operator B_Gamma for the linear Kirillov
    bivector of `algebra`, applied to ground arguments `args`."""
    if len(args) != graph.n_ground:
        raise GraphError(
            f"graph has {graph.n_ground} ground slots, got {len(args)} args")
    n = graph.n_aerial
    if n == 0:
        out = Polynomial.constant(1)
        for a in args:
            out = out * a
        return out
    dim = algebra.dim
    edges = graph.edge_list()
    incoming = {}  # vertex -> list of edge positions
    for pos, (_, t) in enumerate(edges):
        incoming.setdefault(t, []).append(pos)
    half = Fraction(1, 2)
    total = Polynomial.zero()
    for assignment in itertools.product(range(dim), repeat=len(edges)):
        factor = Polynomial.constant(1)
        dead = False
        for v in range(n):
            i, j = assignment[2 * v], assignment[2 * v + 1]
            coeff = Polynomial(
                {((k, 1),): half * c for k, c in algebra.bracket(i, j).items()})
            for pos in incoming.get(v, []):
                coeff = coeff.diff(assignment[pos])
            if coeff.is_zero():
                dead = True
                break
            factor = factor * coeff
        if dead:
            continue
        for g_idx in range(graph.n_ground):
            arg = args[g_idx]
            for pos in incoming.get(n + g_idx, []):
                arg = arg.diff(assignment[pos])
            if arg.is_zero():
                dead = True
                break
            factor = factor * arg
        if not dead:
            total = total + factor
    return total


# -- weight tables -------------------------------------------------------

VALID_PROVENANCE = ("exact", "config", "mc-estimate")


@dataclass
class WeightTable:
    """Map canonical graph id -> (value, provenance, stderr)."""
    entries: dict

    def __init__(self, entries=None):
        self.entries = {}
        for cid, (value, provenance, *rest) in (entries or {}).items():
            self.set(cid, value, provenance, rest[0] if rest else None)

    def set(self, cid, value, provenance, stderr=None):
        if provenance not in VALID_PROVENANCE:
            raise ValueError(f"unknown provenance {provenance!r}")
        if provenance != "mc-estimate":
            value = _as_fraction(value)
        self.entries[cid] = (value, provenance, stderr)

    def get(self, cid):
        return self.entries.get(cid)

    def value(self, cid):
        entry = self.entries.get(cid)
        if entry is None:
            return None
        value = entry[0]
        return value if isinstance(value, Fraction) else Fraction(value)

    def to_json(self):
        out = {}
        for cid, (value, provenance, stderr) in sorted(self.entries.items()):
            rec = {"value": str(value) if isinstance(value, Fraction) else value,
                   "provenance": provenance}
            if stderr is not None:
                rec["stderr"] = stderr
            out[cid] = rec
        return out

    @classmethod
    def from_json(cls, data):
        table = cls()
        for cid, rec in data.items():
            value = rec["value"]
            provenance = rec["provenance"]
            if provenance != "mc-estimate":
                value = Fraction(value)
            table.set(cid, value, provenance, rec.get("stderr"))
        return table

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def wedge_graphs():
    """The two n=1 graphs, in (g1,g2) then (g2,g1) edge order."""
    return (KGraph(1, 2, ((1, 2),)), KGraph(1, 2, ((2, 1),)))


def default_weight_table():
    """Exact weights through order 1: the oriented wedge pair +-1/2."""
    fwd, rev = wedge_graphs()
    table = WeightTable()
    table.set(fwd.canonical_id, Fraction(1, 2), "exact")
    table.set(rev.canonical_id, Fraction(-1, 2), "exact")
    return table


def fit_weights_to_order(algebra, n, reference, max_arg_degree=2):
    """Exact class weights at graph order n matching a reference product.

    Solves, over Q, for weights making (1/n!) sum_Gamma w B_Gamma equal
    the eps^n bidifferential coefficient of `reference` (a callable
    (Polynomial, Polynomial) -> EpsPolynomial) on all monomial pairs of
    degree <= max_arg_degree each.  Returns {canonical_id: Fraction} or
    None when the constraint system is infeasible.  This is the
    configuration route for low orders where closed-form weight values
    are unavailable: the result is pinned down by the associativity /
    reference-product constraints rather than asserted.
    """
    from . import linalg

    classes = {}
    for graph in enumerate_admissible(n, 2):
        cid = graph.canonical_id
        if cid in classes:
            classes[cid] = (classes[cid][0], classes[cid][1] + 1)
        else:
            classes[cid] = (graph, 1)
    cids = sorted(classes)
    dim = algebra.dim
    monos = []
    for d in range(max_arg_degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), d):
            m = {}
            for i in combo:
                m[i] = m.get(i, 0) + 1
            monos.append(tuple(sorted(m.items())))
    inv_fact = Fraction(1, math.factorial(n))
    rows, rhs = [], []
    for mf in monos:
        f = Polynomial({mf: Fraction(1)})
        for mg in monos:
            g = Polynomial({mg: Fraction(1)})
            target = reference(f, g).coefficient(n)
            columns = [graph_operator(classes[cid][0], algebra, [f, g])
                       .scale(classes[cid][1] * inv_fact) for cid in cids]
            out_monos = set(target.terms)
            for col in columns:
                out_monos.update(col.terms)
            for m in sorted(out_monos):
                rows.append([col.terms.get(m, Fraction(0)) for col in columns])
                rhs.append(target.terms.get(m, Fraction(0)))
    sol = linalg.solve(rows, rhs)
    if sol is None:
        return None
    return {cid: w for cid, w in zip(cids, sol)}


def kontsevich_star_truncated(f, g, algebra, weights, order):
    """Truncated graph-expansion star product with the given weight table.

    Raises MissingWeightError naming absent canonical classes.
    """
    if isinstance(f, Polynomial):
        f = EpsPolynomial.from_polynomial(f)
    if isinstance(g, Polynomial):
        g = EpsPolynomial.from_polynomial(g)
    classes_by_n = {}
    missing = []
    for n in range(1, order + 1):
        classes = {}
        for graph in enumerate_admissible(n, 2):
            cid = graph.canonical_id
            if cid in classes:
                classes[cid] = (classes[cid][0], classes[cid][1] + 1)
            else:
                classes[cid] = (graph, 1)
        for cid in classes:
            if weights.value(cid) is None:
                missing.append(cid)
        classes_by_n[n] = classes
    if missing:
        raise MissingWeightError(sorted(set(missing)))
    out = EpsPolynomial()
    for a, fa in enumerate(f.coeffs):
        for b, gb in enumerate(g.coeffs):
            if fa.is_zero() or gb.is_zero():
                continue
            out = out + EpsPolynomial.term(a + b, fa * gb)
            for n in range(1, order + 1):
                acc = Polynomial.zero()
                for cid, (graph, mult) in classes_by_n[n].items():
                    w = weights.value(cid)
                    if w == 0:
                        continue
                    term = graph_operator(graph, algebra, [fa, gb])
                    acc = acc + term.scale(w * mult)
                acc = acc.scale(Fraction(1, math.factorial(n)))
                out = out + EpsPolynomial.term(a + b + n, acc)
    return out


# -- Monte-Carlo weight estimation ---------------------------------------

def _angle_gradients(z_source, target_value, target_is_aerial):
    """Rows of the angle-form Jacobian for one edge.

    phi = arg(w - z) - arg(w - conj(z)); returns (d/dxs, d/dys) and, when
    the target is aerial, also (d/dxt, d/dyt).
    """
    f1 = target_value - z_source
    f2 = target_value - np.conj(z_source)
    if f1 == 0 or f2 == 0:
        return None
    inv1, inv2 = 1.0 / f1, 1.0 / f2
    d_source = ((-inv1 + inv2).imag, (-1j * inv1 - 1j * inv2).imag)
    if not target_is_aerial:
        return d_source, None
    d_target = ((inv1 - inv2).imag, (1j * inv1 - 1j * inv2).imag)
    return d_source, d_target


def estimate_weight_mc(graph, samples, seed):
    """Monte-Carlo estimate of the oriented weight integral.

    Ground points are gauge-fixed to 0 and 1; aerial points are sampled
    through the Cayley transform of the uniform unit disk.  Returns
    (estimate, stderr); deterministic for a fixed seed.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    n = graph.n_aerial
    if n == 0:
        return 1.0, 0.0
    config_dim = 2 * n + graph.n_ground - 2
    edges = graph.edge_list()
    if len(edges) != config_dim:
        # form degree does not match the configuration dimension
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    ground = [0.0, 1.0][: graph.n_ground]
    norm = (2.0 * math.pi) ** (-len(edges))
    values = np.zeros(samples)
    for s in range(samples):
        # z = i (1 + w) / (1 - w), w uniform on the unit disk
        r = np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        w = r * np.exp(1j * theta)
        z = 1j * (1.0 + w) / (1.0 - w)
        density = np.prod(np.abs(1.0 - w) ** 4 / (4.0 * math.pi))
        jac = np.zeros((len(edges), 2 * n))
        degenerate = False
        for row, (src, tgt) in enumerate(edges):
            if tgt < n:
                grads = _angle_gradients(z[src], z[tgt], True)
            else:
                grads = _angle_gradients(z[src], ground[tgt - n], False)
            if grads is None:
                degenerate = True
                break
            d_source, d_target = grads
            jac[row, 2 * src] += d_source[0]
            jac[row, 2 * src + 1] += d_source[1]
            if d_target is not None:
                jac[row, 2 * tgt] += d_target[0]
                jac[row, 2 * tgt + 1] += d_target[1]
        if degenerate:
            continue
        values[s] = norm * np.linalg.det(jac) / density
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return estimate, stderr


def associativity_defect(weights, algebra, order, trials, seed=0, max_degree=2):
    """Max coefficient of (F*G)*H - F*(G*H) per eps-order over random trials.

    Used as the executable constraint that validates a weight table; the
    eps^1 defect vanishes identically for any linear Poisson structure.
    """
    rng = np.random.default_rng(seed)
    dim = algebra.dim
    monos = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), d):
            m = {}
            for i in combo:
                m[i] = m.get(i, 0) + 1
            monos.append(tuple(sorted(m.items())))

    def random_poly():
        return Polynomial({m: Fraction(int(rng.integers(-3, 4))) for m in monos})

    defect = {k: Fraction(0) for k in range(order + 1)}
    for _ in range(trials):
        f, g, h = random_poly(), random_poly(), random_poly()
        left = kontsevich_star_truncated(
            kontsevich_star_truncated(f, g, algebra, weights, order),
            h, algebra, weights, order)
        right = kontsevich_star_truncated(
            f, kontsevich_star_truncated(g, h, algebra, weights, order),
            algebra, weights, order)
        diff = left - right
        for k in range(order + 1):
            coeff = diff.coefficient(k)
            worst = max((abs(c) for c in coeff.terms.values()), default=Fraction(0))
            if worst > defect[k]:
                defect[k] = worst
    return defect
