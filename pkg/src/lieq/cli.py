"""Command-line drivers.

Every command prints a human-readable summary to stdout; with --out DIR
it also writes a JSON report, a CSV table, and matplotlib figures where
the payload has something worth drawing.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 computation
overflow (degree cap or missing weight data).
"""

from __future__ import annotations

import functools
import sys
from fractions import Fraction
from pathlib import Path

import click

from .core import (CentralExtension, StructuralError, SubalgebraSetup,
                   ValidationError, lower_central_series)
from .enveloping import (center_of, invariants_up_to_degree, is_commutative,
                         poisson_center_of, s_invariants_up_to_degree)
from .graphs import (GraphError, MissingWeightError, WeightTable,
                     default_weight_table, enumerate_admissible,
                     estimate_weight_mc, kontsevich_star_truncated,
                     parse_graph_id)
from .io import IngestError, RunReport, encode_fraction, ingest, write_csv
from .library import builtin_names
from .poly import DegreeOverflowError, Polynomial, parse_polynomial
from .quantization import duflo_element, duflo_series, gutt_star
from .reduction import (MembershipError, MissingDifferentialError,
                        ReductionDifferential, differential_from_weight_table,
                        eps_from_t_family, map_J, per_degree_dimensions,
                        solve_reduction, t_family_from_eps, theorem6_check)

# exit code 2 is reserved for validation failures; usage errors exit 1
click.UsageError.exit_code = 1


def _catching(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except IngestError as exc:
            for msg in exc.errors:
                click.echo(f"error: {msg}", err=True)
            sys.exit(2)
        except ValidationError as exc:
            for msg in exc.report.violations:
                click.echo(f"error: {msg}", err=True)
            sys.exit(2)
        except (StructuralError, MembershipError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (DegreeOverflowError, MissingWeightError,
                MissingDifferentialError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except (GraphError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _parse_lambda(text):
    out = {}
    if not text:
        return out
    for piece in text.split(","):
        if "=" not in piece:
            raise click.UsageError(f"bad --lambda entry {piece!r}; use NAME=p/q")
        name, value = piece.split("=", 1)
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise click.UsageError(f"bad rational {value!r} in --lambda")
    return out


def _load(source, subalgebra=None, lam=None, need_setup=False):
    algebra, setup = ingest(source)
    if subalgebra:
        h_names = [s.strip() for s in subalgebra.split(",") if s.strip()]
        setup = SubalgebraSetup.build(algebra, h_names=h_names,
                                      lam=_parse_lambda(lam))
    elif lam:
        if setup is None:
            raise click.UsageError("--lambda without --subalgebra or a "
                                   "file-level subalgebra")
        h_names = {setup.algebra.basis_names[i] for i in setup.h_indices}
        parsed = _parse_lambda(lam)
        bad = sorted(set(parsed) - h_names)
        if bad:
            raise click.UsageError(f"--lambda on non-subalgebra names: {bad}")
        setup = setup.with_lambda({
            setup.algebra.index(n): v for n, v in parsed.items()})
    if need_setup and setup is None:
        raise click.UsageError(
            f"{source} has no subalgebra data; pass --subalgebra")
    return algebra, setup


def _emit(report, out, csv_name, csv_header, csv_rows, figures=()):
    """Persist the report bundle when --out is given; figures is a list
    of (filename, render_callable)."""
    if not out:
        return
    out = Path(out)
    report.save(out / "report.json")
    write_csv(out / csv_name, csv_header, csv_rows)
    for filename, render in figures:
        render(out / filename)
    click.echo(f"report written to {out}")


def _source_arg(fn):
    return click.argument("source", metavar="FILE|BUILTIN")(fn)


def _setup_options(fn):
    fn = click.option("--subalgebra", default=None,
                      help="Comma-separated generator names for h.")(fn)
    fn = click.option("--lambda", "lam", default=None,
                      help="Character values, e.g. Z=1,Y=1/2.")(fn)
    return fn


def _out_option(fn):
    return click.option("--out", default=None, type=click.Path(),
                        help="Directory for the JSON/CSV/figure bundle.")(fn)


@click.group()
@click.version_option(package_name="lieq")
def main():
    """Exact-arithmetic workbench for invariant operators on Lie algebras."""


@main.command()
@_source_arg
@_out_option
@_catching
def validate(source, out):
    """Validate an algebra file or builtin; report structural facts."""
    algebra, setup = _load(source)
    series = lower_central_series(algebra)
    results = {
        "valid": True,
        "dim": algebra.dim,
        "basis": list(algebra.basis_names),
        "lower_central_series": series,
        "nilpotent": series[-1] == 0,
        "has_setup": setup is not None,
    }
    if setup is not None:
        names = setup.algebra.basis_names
        results["subalgebra"] = [names[i] for i in setup.h_indices]
        results["lambda"] = {names[i]: encode_fraction(v.constant_term())
                             for i, v in setup.lam if not v.is_zero()}
    click.echo(f"{source}: valid, dim {algebra.dim}, "
               f"lower central series {series}")
    report = RunReport("validate", {"source": str(source)}, results)
    _emit(report, out, "validate.csv", ["property", "value"],
          [[k, v] for k, v in results.items()])


@main.command()
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@click.option("--side", type=click.Choice(["u", "s"]), default="u",
              show_default=True, help="Enveloping (u) or symmetric (s) side.")
@click.option("--eps", "eps_mode", type=click.Choice(["symbolic", "1"]),
              default="symbolic", show_default=True)
@_out_option
@_catching
def invariants(source, subalgebra, lam, n, side, eps_mode, out):
    """Invariant basis of the quotient algebra through degree N."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    names = setup.algebra.basis_names
    if side == "s":
        pres = s_invariants_up_to_degree(setup, n)
        basis_strings = [b.to_string(names) for b in pres.basis]
        commutative, witness = True, None
    else:
        pres = invariants_up_to_degree(setup, n)
        if eps_mode == "1":
            basis_strings = []
            for b in pres.basis:
                total = sum((p for _, p in b.to_polynomial_pair()),
                            start=Polynomial.zero())
                basis_strings.append(total.to_string(names))
        else:
            basis_strings = [b.to_string() for b in pres.basis]
        commutative, witness = is_commutative(pres)
    dims = pres.per_degree_dimensions()
    click.echo(f"{len(pres.basis)} generators through degree {n}; "
               f"per-degree dimensions {dims}")
    for s in basis_strings:
        click.echo(f"  {s}")
    if side == "u":
        click.echo(f"commutative: {commutative}"
                   + (f" (witness: {witness})" if witness else ""))
    results = {
        "side": side,
        "basis": basis_strings,
        "per_degree_dimensions": {str(d): v for d, v in dims.items()},
        "commutative": commutative,
        "witness": repr(witness) if witness else None,
    }
    report = RunReport("invariants", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n, "side": side, "eps": eps_mode}, results)

    def fig(path):
        from .plotting import plot_degree_dimensions
        plot_degree_dimensions({"invariants": dims}, path,
                               title=f"Invariant dimensions ({source})")

    _emit(report, out, "invariants.csv", ["degree", "dimension"],
          sorted(dims.items()), [("dimensions.png", fig)])


@main.command()
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@_out_option
@_catching
def commutativity(source, subalgebra, lam, n, out):
    """Commutativity verdict for the invariant algebra through degree N."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    pres = invariants_up_to_degree(setup, n)
    verdict, witness = is_commutative(pres)
    if witness == "inconclusive":
        click.echo("inconclusive: every pair exceeds the degree bound")
    elif verdict:
        click.echo("commutative: true")
    else:
        (i, j), comm = witness
        click.echo(f"commutative: false; [basis_{i}, basis_{j}] = "
                   f"{comm.to_string()}")
    results = {
        "commutative": verdict,
        "inconclusive": witness == "inconclusive",
        "witness": None if witness in (None, "inconclusive")
        else {"pair": list(witness[0]), "commutator": witness[1].to_string()},
        "basis_size": len(pres.basis),
    }
    report = RunReport("commutativity", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n}, results)
    _emit(report, out, "commutativity.csv", ["property", "value"],
          [[k, v] for k, v in results.items() if k != "witness"])


@main.command("centers-compare")
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@_out_option
@_catching
def centers_compare(source, subalgebra, lam, n, out):
    """Compare the associative and Poisson centers (degree-truncated)."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    names = setup.algebra.basis_names
    upres = invariants_up_to_degree(setup, n)
    ugens, udims, uinc = center_of(upres)
    spres = s_invariants_up_to_degree(setup, n)
    sgens, sdims, sinc = poisson_center_of(spres)
    agree = udims == sdims
    verdict = "consistent" if agree else "inconsistent"
    if uinc or sinc:
        verdict += f" (inconclusive degrees: u={uinc}, s={sinc})"
    click.echo(f"associative center dims: {udims}")
    click.echo(f"Poisson center dims:     {sdims}")
    click.echo(f"verdict: {verdict}")
    results = {
        "associative_center_dims": {str(d): v for d, v in udims.items()},
        "poisson_center_dims": {str(d): v for d, v in sdims.items()},
        "associative_center": [g.to_string() for g in ugens],
        "poisson_center": [g.to_string(names) for g in sgens],
        "inconclusive_degrees": {"u": uinc, "s": sinc},
        "dimensions_agree": agree,
    }
    report = RunReport("centers-compare", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n}, results)
    degrees = sorted(set(udims) | set(sdims))

    def fig(path):
        from .plotting import plot_degree_dimensions
        plot_degree_dimensions(
            {"associative": udims, "poisson": sdims}, path,
            title=f"Center dimensions ({source})")

    _emit(report, out, "centers.csv",
          ["degree", "associative_dim", "poisson_dim"],
          [[d, udims.get(d, 0), sdims.get(d, 0)] for d in degrees],
          [("centers.png", fig)])


@main.command()
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@click.option("--eps-order", type=int, default=1, show_default=True)
@click.option("--weights", "weights_path", default=None, type=click.Path(),
              help="Weight table JSON for differential orders >= 3.")
@_out_option
@_catching
def reduce(source, subalgebra, lam, n, eps_order, weights_path, out):
    """Solve the reduction cascade through the given eps order."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    names = setup.algebra.basis_names
    if weights_path:
        diff = differential_from_weight_table(
            WeightTable.load(weights_path), eps_order)
    else:
        diff = ReductionDifferential.d1_only()
    solutions = solve_reduction(setup, diff, eps_order=eps_order, n=n)
    dims = per_degree_dimensions(solutions)
    click.echo(f"{len(solutions)} generators through degree {n}; "
               f"per-degree dimensions {dims}")
    for s in solutions:
        click.echo(f"  {s.element.to_string(names)}")
    results = {
        "basis": [s.element.to_string(names) for s in solutions],
        "per_degree_dimensions": {str(d): v for d, v in dims.items()},
        "cascade_orders": list(diff.populated_orders()),
        "eps_order": eps_order,
    }
    report = RunReport("reduce", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n, "eps_order": eps_order, "weights": weights_path}, results)

    def fig(path):
        from .plotting import plot_degree_dimensions
        plot_degree_dimensions({"reduction": dims}, path,
                               title=f"Reduction-space dimensions ({source})")

    _emit(report, out, "reduce.csv", ["degree", "dimension"],
          sorted(dims.items()), [("dimensions.png", fig)])


@main.command()
@_source_arg
@_setup_options
@click.option("--method", type=click.Choice(["gutt", "kontsevich"]),
              required=True)
@click.option("--order", type=int, default=1, show_default=True)
@click.option("--f", "f_text", required=True, help="First factor.")
@click.option("--g", "g_text", required=True, help="Second factor.")
@click.option("--weights", "weights_path", default=None, type=click.Path())
@_out_option
@_catching
def star(source, subalgebra, lam, method, order, f_text, g_text,
         weights_path, out):
    """Star product of two polynomials (exact transport or graph expansion)."""
    algebra, setup = _load(source, subalgebra, lam)
    alg = setup.algebra if setup is not None else algebra
    names = alg.basis_names
    f = parse_polynomial(f_text, names)
    g = parse_polynomial(g_text, names)
    if method == "gutt":
        result = gutt_star(f, g, alg)
    else:
        table = (WeightTable.load(weights_path) if weights_path
                 else default_weight_table())
        result = kontsevich_star_truncated(f, g, alg, table, order)
    click.echo(f"({f_text}) * ({g_text}) = {result.to_string(names)}")
    results = {
        "method": method,
        "product": result.to_string(names),
        "eps_coefficients": {
            str(k): result.coefficient(k).to_string(names)
            for k in range(result.param_degree() + 1)},
    }
    report = RunReport("star", {
        "source": str(source), "method": method, "order": order,
        "f": f_text, "g": g_text, "weights": weights_path}, results)
    _emit(report, out, "star.csv", ["eps_power", "coefficient"],
          sorted(results["eps_coefficients"].items(), key=lambda kv: int(kv[0])))


@main.command()
@_source_arg
@click.option("--truncation", type=int, default=4, show_default=True)
@_out_option
@_catching
def duflo(source, truncation, out):
    """Duflo element and the q^(1/2) operator at the given truncation."""
    algebra, _ = _load(source)
    names = algebra.basis_names
    element = duflo_element(algebra, truncation)
    op = duflo_series(algebra, truncation)
    click.echo(f"q(Y) = {element.to_string(names)} (degree <= {truncation})")
    click.echo("q^(1/2) operator is the identity" if op.is_identity()
               else f"q^(1/2) operator symbol: {op.to_polynomial().to_string(names)}")
    results = {
        "duflo_element": element.to_string(names),
        "operator_symbol": op.to_polynomial().to_string(names),
        "is_identity": op.is_identity(),
        "truncation": truncation,
    }
    report = RunReport("duflo", {"source": str(source),
                                 "truncation": truncation}, results)
    _emit(report, out, "duflo.csv", ["property", "value"],
          [[k, v] for k, v in results.items()])


@main.group()
def graphs():
    """Admissible-graph utilities."""


@graphs.command("enum")
@click.option("-n", "n", type=int, required=True, help="Aerial vertices.")
@click.option("-m", "m", type=int, required=True, help="Ground vertices.")
@click.option("--up-to-iso", is_flag=True, default=False)
@_out_option
@_catching
def graphs_enum(n, m, up_to_iso, out):
    """Enumerate admissible graphs."""
    found = enumerate_admissible(n, m, up_to_iso=up_to_iso)
    click.echo(f"{len(found)} graphs (n={n}, m={m}"
               + (", up to iso)" if up_to_iso else ")"))
    for g in found:
        click.echo(f"  {g.canonical_id}")
    results = {"count": len(found),
               "graphs": [g.canonical_id for g in found]}
    report = RunReport("graphs enum", {
        "n": n, "m": m, "up_to_iso": up_to_iso}, results)
    figures = []
    for idx, g in enumerate(found[:8]):
        def fig(path, graph=g):
            from .plotting import draw_graph
            draw_graph(graph, path)
        figures.append((f"graph_{idx}.png", fig))
    _emit(report, out, "graphs.csv", ["index", "canonical_id"],
          list(enumerate(results["graphs"])), figures)


@main.group()
def weights():
    """Weight-table utilities."""


@weights.command("mc")
@click.option("--graph", "graph_id", required=True,
              help="Canonical graph id, e.g. 'K(1,2):v1->(g1,g2)'.")
@click.option("--samples", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_out_option
@_catching
def weights_mc(graph_id, samples, seed, out):
    """Monte-Carlo estimate of a graph weight."""
    graph = parse_graph_id(graph_id)
    checkpoints = sorted({max(samples // 100, 1), max(samples // 10, 1),
                          samples})
    trace = [(s,) + estimate_weight_mc(graph, s, seed) for s in checkpoints]
    estimate, stderr = trace[-1][1], trace[-1][2]
    click.echo(f"{graph_id}: weight ~= {estimate:.6f} "
               f"(stderr {stderr:.6f}, {samples} samples, seed {seed})")
    results = {
        "graph": graph.canonical_id,
        "estimate": estimate,
        "stderr": stderr,
        "provenance": "mc-estimate",
        "trace": [{"samples": s, "estimate": e, "stderr": se}
                  for s, e, se in trace],
    }
    report = RunReport("weights mc", {"graph": graph_id, "samples": samples},
                       results, seeds={"mc": seed})

    def fig(path):
        from .plotting import plot_mc_convergence
        plot_mc_convergence([s for s, _, _ in trace],
                            [e for _, e, _ in trace],
                            [se for _, _, se in trace], path)

    _emit(report, out, "weights.csv", ["samples", "estimate", "stderr"],
          [list(row) for row in trace], [("convergence.png", fig)])


@main.group()
def theorem5():
    """Character-deformation transform checks."""


@theorem5.command("roundtrip")
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@_out_option
@_catching
def theorem5_roundtrip(source, subalgebra, lam, n, out):
    """eps<->t transform roundtrips on the computed reduction basis."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    names = setup.algebra.basis_names
    solutions = solve_reduction(setup, eps_order=1, n=n)
    rows = []
    all_ok = True
    for idx, sol in enumerate(solutions):
        family = t_family_from_eps(sol, setup)
        back = eps_from_t_family(family, setup)
        j_ok = map_J(back, setup) == map_J(sol, setup)
        rows.append([idx, sol.element.to_string(names),
                     family.to_string(names), j_ok])
        all_ok = all_ok and j_ok
    click.echo(f"{len(rows)} basis elements; roundtrip "
               + ("passed" if all_ok else "FAILED"))
    results = {
        "elements": [{"index": r[0], "eps_element": r[1],
                      "t_family": r[2], "j_roundtrip": r[3]} for r in rows],
        "all_roundtrips_pass": all_ok,
    }
    report = RunReport("theorem5 roundtrip", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n}, results)
    _emit(report, out, "theorem5.csv",
          ["index", "eps_element", "t_family", "j_roundtrip"], rows)
    if not all_ok:
        sys.exit(2)


@main.group()
def theorem6():
    """Specialization-comparison checks."""


@theorem6.command("check")
@_source_arg
@_setup_options
@click.option("-N", "--max-degree", "n", type=int, default=4, show_default=True)
@click.option("--eps-order", type=int, default=1, show_default=True)
@_out_option
@_catching
def theorem6_check_cmd(source, subalgebra, lam, n, eps_order, out):
    """Compare the T=1 operator algebra with the eps=1 reduction algebra."""
    _, setup = _load(source, subalgebra, lam, need_setup=True)
    rep = theorem6_check(setup, n, eps_order=eps_order)
    click.echo(f"verdict: {rep.verdict()}")
    click.echo(f"reduction filtration dims: {rep.reduction_filtration_dims}")
    click.echo(f"operator filtration dims:  {rep.operator_filtration_dims}")
    click.echo(f"pairs checked: {rep.pairs_checked}, "
               f"skipped (degree/order bound): {rep.pairs_skipped}")
    results = {
        "verdict": rep.verdict(),
        "reduction_filtration_dims": rep.reduction_filtration_dims,
        "operator_filtration_dims": rep.operator_filtration_dims,
        "pairs_checked": rep.pairs_checked,
        "pairs_skipped": rep.pairs_skipped,
        "witnesses": [repr(w) for w in rep.witnesses],
    }
    report = RunReport("theorem6 check", {
        "source": str(source), "subalgebra": subalgebra, "lambda": lam,
        "N": n, "eps_order": eps_order}, results)
    red = dict(enumerate(rep.reduction_filtration_dims))
    op = dict(enumerate(rep.operator_filtration_dims))

    def fig(path):
        from .plotting import plot_degree_dimensions
        plot_degree_dimensions(
            {"reduction (eps=1)": red, "operators (T=1)": op}, path,
            title=f"Filtration dimensions ({source})")

    _emit(report, out, "theorem6.csv",
          ["degree", "reduction_dim", "operator_dim"],
          [[d, red.get(d, 0), op.get(d, 0)] for d in sorted(set(red) | set(op))],
          [("filtration.png", fig)])
    if not rep.consistent:
        sys.exit(2)


@main.command("list")
@_catching
def list_builtins():
    """List the built-in example algebras."""
    for name in builtin_names():
        click.echo(name)


if __name__ == "__main__":
    main()
