"""Lie algebras over Q: structure constants, subalgebra/character data,
and the central extension g_T = g + R*T.

Structure constants are stored sparsely as {(i, j): {k: c_ij^k}} for
i < j; the full tensor is recovered by antisymmetry.  Constructors
validate antisymmetry and the Jacobi identity, so every stored algebra
is valid by construction.  A basis reordering (q-variables first, then
h-variables) is applied when a SubalgebraSetup is built, which makes the
PBW quotient reduction a pure suffix substitution downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .poly import Polynomial, _as_fraction


class StructuralError(Exception):
    """Dimension mismatch or malformed structure-constant data."""


class ValidationError(Exception):
    """The data violates antisymmetry, Jacobi, or setup invariants."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple = ()

    def __str__(self):
        if self.valid:
            return "valid"
        return "; ".join(self.violations)


def _normalize_brackets(dim, brackets):
    """Canonical sparse form keyed i < j; checks antisymmetry on the way."""
    violations = []
    table = {}
    for (i, j), comps in brackets.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise StructuralError(f"bracket index ({i},{j}) out of range for dim {dim}")
        comps = {k: _as_fraction(c) for k, c in comps.items() if _as_fraction(c) != 0}
        for k in comps:
            if not 0 <= k < dim:
                raise StructuralError(f"bracket target {k} out of range for dim {dim}")
        if not comps:
            continue
        if i == j:
            violations.append(f"antisymmetry violated at ({i},{i}): [e,e] != 0")
            continue
        key, sign = ((i, j), 1) if i < j else ((j, i), -1)
        comps = {k: sign * c for k, c in comps.items()}
        if key in table:
            # both orientations supplied: they must agree up to sign
            if table[key] != comps:
                violations.append(
                    f"antisymmetry violated at ({i},{j}): c_ij^k != -c_ji^k")
                continue
        table[key] = comps
    return table, violations


def _jacobi_violations(dim, table):
    def c(i, j):
        if i < j:
            return table.get((i, j), {})
        if i > j:
            return {k: -v for k, v in table.get((j, i), {}).items()}
        return {}

    out = []
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                acc = {}
                for a, b, cc in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, cm in c(a, b).items():
                        for l, cl in c(m, cc).items():
                            acc[l] = acc.get(l, Fraction(0)) + cm * cl
                for l, v in acc.items():
                    if v != 0:
                        out.append(f"Jacobi violated at ({i},{j},{k})->{l}: {v}")
    return out


@dataclass(frozen=True)
class LieAlgebraData:
    dim: int
    basis_names: tuple
    table: tuple  # canonical sparse form: ((i, j, ((k, c), ...)), ...) with i < j

    @classmethod
    def from_brackets(cls, basis_names, brackets):
        """Build and validate.  `brackets` maps (i, j) to {k: coeff}."""
        names = tuple(basis_names)
        dim = len(names)
        if len(set(names)) != dim:
            raise StructuralError("basis names must be distinct")
        report = validate_raw(names, brackets)
        if not report.valid:
            raise ValidationError(report)
        table, _ = _normalize_brackets(dim, brackets)
        frozen = tuple(sorted(
            (i, j, tuple(sorted(comps.items()))) for (i, j), comps in table.items()))
        return cls(dim=dim, basis_names=names, table=frozen)

    def _lookup(self):
        cached = getattr(self, "_lookup_cache", None)
        if cached is None:
            cached = {(i, j): dict(comps) for i, j, comps in self.table}
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def bracket(self, i, j):
        """[e_i, e_j] as {k: coeff}; empty dict when zero."""
        if i == j:
            return {}
        lookup = self._lookup()
        if i < j:
            return dict(lookup.get((i, j), {}))
        return {k: -c for k, c in lookup.get((j, i), {}).items()}

    def index(self, name):
        return self.basis_names.index(name)

    def validate(self):
        brackets = {(i, j): dict(comps) for i, j, comps in self.table}
        return validate_raw(self.basis_names, brackets)

    def bracket_vectors(self, u, v):
        """[u, v] for coefficient vectors u, v; returns a coefficient vector."""
        out = [Fraction(0)] * self.dim
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                for k, c in self.bracket(i, j).items():
                    out[k] += ui * vj * c
        return out


def validate_raw(basis_names, brackets):
    """Full validation report: every antisymmetry and Jacobi violation."""
    dim = len(basis_names)
    table, violations = _normalize_brackets(dim, brackets)
    violations = list(violations)
    violations += _jacobi_violations(dim, table)
    return ValidationReport(valid=not violations, violations=tuple(violations))


def lower_central_series(algebra):
    """Dims of g >= [g,g] >= [g,[g,g]] >= ... until stabilization.

    The algebra is nilpotent iff the terminal dimension is 0.
    """
    dim = algebra.dim
    basis = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    current = basis
    dims = [dim]
    while True:
        rows = []
        for u in basis:
            for v in current:
                w = algebra.bracket_vectors(u, v)
                if any(x != 0 for x in w):
                    rows.append(w)
        reduced, _ = linalg.rref(rows)
        d = len(reduced)
        dims.append(d)
        if d == dims[-2]:
            break
        current = reduced
        if d == 0:
            break
    return dims


def is_nilpotent(algebra):
    return lower_central_series(algebra)[-1] == 0


def adjoint_matrix(algebra, y=None):
    """Matrix of ad(Y): M[k][j] = sum_i y_i c_ij^k.

    With y=None the coordinates of Y stay symbolic (entries are linear
    polynomials in the basis variables); otherwise y is a coefficient
    vector and the entries are constants.
    """
    dim = algebra.dim
    mat = [[Polynomial.zero() for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        yi = Polynomial.variable(i) if y is None else Polynomial.constant(y[i])
        if yi.is_zero():
            continue
        for j in range(dim):
            for k, c in algebra.bracket(i, j).items():
                mat[k][j] = mat[k][j] + yi.scale(c)
    return mat


@dataclass(frozen=True)
class SubalgebraSetup:
    """Subalgebra h, complement q, and a character lambda of h.

    The stored algebra is the input algebra with its basis permuted so
    that q-indices come first (0..nq-1) and h-indices last (nq..dim-1).
    `lam` maps h-indices (in the permuted order) to the character values;
    values are Fractions, or Polynomials in t for t-scaled setups.
    """
    algebra: LieAlgebraData
    nq: int
    lam: tuple  # ((h_index, value), ...) over nq..dim-1

    @classmethod
    def build(cls, algebra, h_names, lam=None):
        lam = dict(lam or {})
        h_set = set(h_names)
        unknown = h_set - set(algebra.basis_names)
        if unknown:
            raise StructuralError(f"unknown subalgebra generators: {sorted(unknown)}")
        q_names = [n for n in algebra.basis_names if n not in h_set]
        order = q_names + [n for n in algebra.basis_names if n in h_set]
        perm = [algebra.index(n) for n in order]  # new index -> old index
        inv = {old: new for new, old in enumerate(perm)}
        brackets = {}
        for i, j, comps in algebra.table:
            brackets[(inv[i], inv[j])] = {inv[k]: c for k, c in dict(comps).items()}
        reordered = LieAlgebraData.from_brackets(order, brackets)
        nq = len(q_names)
        violations = []
        lam_map = {}
        for name, value in lam.items():
            if name not in h_set:
                violations.append(f"lambda assigned on non-h generator {name}")
                continue
            v = value if isinstance(value, Polynomial) else Polynomial.constant(value)
            lam_map[reordered.index(name)] = v
        for i in range(nq, reordered.dim):
            lam_map.setdefault(i, Polynomial.zero())
        # h closed under bracket, and lambda([h,h]) = 0
        for i in range(nq, reordered.dim):
            for j in range(i + 1, reordered.dim):
                comps = reordered.bracket(i, j)
                bad = [k for k in comps if k < nq]
                if bad:
                    violations.append(
                        f"h not closed: [{order[i]},{order[j]}] has q-component "
                        f"{[order[k] for k in bad]}")
                    continue
                acc = Polynomial.zero()
                for k, c in comps.items():
                    acc = acc + lam_map[k].scale(c)
                if not acc.is_zero():
                    violations.append(
                        f"lambda not a character: lambda([{order[i]},{order[j]}]) != 0")
        if violations:
            raise ValidationError(ValidationReport(False, tuple(violations)))
        return cls(algebra=reordered, nq=nq,
                   lam=tuple(sorted(lam_map.items())))

    @property
    def q_indices(self):
        return tuple(range(self.nq))

    @property
    def h_indices(self):
        return tuple(range(self.nq, self.algebra.dim))

    def lam_value(self, i):
        return dict(self.lam)[i]

    def lam_is_rational(self):
        return all(v.is_constant() for _, v in self.lam)

    def with_lambda(self, lam_map):
        """Same h/q split, different character values (by h-index)."""
        full = {i: (v if isinstance(v, Polynomial) else Polynomial.constant(v))
                for i, v in lam_map.items()}
        for i in self.h_indices:
            full.setdefault(i, Polynomial.zero())
        return SubalgebraSetup(algebra=self.algebra, nq=self.nq,
                               lam=tuple(sorted(full.items())))

    def reduce_h_variables(self, f):
        """Substitute every h-variable by -lambda (the h_lambda quotient)."""
        assignment = {i: -v for i, v in self.lam}
        return f.substitute(assignment)


@dataclass(frozen=True)
class CentralExtension:
    """g_T = g + R*T with [g, T] = 0, in the 'primed' basis.

    The extended basis is (q..., T, h'...) where h'_j = H_j + lambda(H_j) T,
    so the extended character is zero and the original setup is recovered
    by evaluating T at t (h'_j -> H_j + t*lambda(H_j)).
    """
    base: SubalgebraSetup
    extended: SubalgebraSetup
    t_index: int

    @classmethod
    def build(cls, setup):
        if not setup.lam_is_rational():
            raise StructuralError("central extension needs a rational character")
        alg = setup.algebra
        nq = setup.nq
        names = list(alg.basis_names)
        t_name = "T"
        while t_name in names:
            t_name += "_"
        ext_names = names[:nq] + [t_name] + names[nq:]
        t_idx = nq

        def reindex(i):
            return i if i < nq else i + 1

        lam_const = {i: v.constant_term() for i, v in setup.lam}
        brackets = {}
        for i, j, comps in alg.table:
            out = {}
            t_coeff = Fraction(0)
            for k, c in dict(comps).items():
                out[reindex(k)] = c
                if k >= nq:
                    # e_k(old) = h'_k - lambda_k T in the primed basis
                    t_coeff -= c * lam_const[k]
            if t_coeff != 0:
                out[t_idx] = out.get(t_idx, Fraction(0)) + t_coeff
            brackets[(reindex(i), reindex(j))] = out
        ext_alg = LieAlgebraData.from_brackets(ext_names, brackets)
        ext_setup = SubalgebraSetup.build(
            ext_alg, h_names=[names[i] for i in setup.h_indices], lam={})
        return cls(base=setup, extended=ext_setup, t_index=t_idx)

    def evaluate_t_polynomial(self, f, t):
        """e_{T=t} on a polynomial over the extended basis.

        Maps T -> t and h'_j -> h_j + t*lambda_j (back in base coordinates);
        `t` may be a Fraction or a Polynomial (e.g. the symbolic t variable).
        """
        if not isinstance(t, Polynomial):
            t = Polynomial.constant(t)
        assignment = {self.t_index: t}
        lam = dict(self.base.lam)
        for i in self.base.h_indices:
            # extended index of h'_i is i + 1
            assignment[i + 1] = Polynomial.variable(i) + t * lam[i]
        return f.substitute(assignment)


def build_central_extension(setup):
    return CentralExtension.build(setup)
