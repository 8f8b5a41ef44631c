from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Tuple

from .config import OUTPUT_FORMATS, RunConfig, load_config
from .ehrhart_engine import (
    check_delta_identities,
    check_functional_equation,
    check_reciprocity,
    check_root_symmetry,
    delta_from_ehrhart,
    ehrhart_by_interpolation,
    ehrhart_series_numerator,
    is_gorenstein,
    validate_delta,
)
from .exact_arith import format_polynomial
from .family_construction import (
    FamilyParams,
    build_P,
    build_Qc,
    closed_form_P,
    closed_form_Qc,
    valid_params,
)
from .graph_polytopes import analyze_graph, read_edge_file, scan_graphs, symmetric_edge_polytope
from .polytope_geometry import (
    CLOSED,
    GeometryLimits,
    count_lattice_points,
    is_fano,
    read_vertex_file,
)
from .reporting import (
    dumps_line,
    dumps_report,
    render_text,
    rootlocus_rows,
    scan_summary,
    scan_table,
    write_rootlocus_csv,
    write_text,
)
from .root_analysis import (
    classify_roots,
    critical_line_roots_for_family,
    find_roots_numeric,
    theorem_property_check,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# brute-force cross-checks above these dimensions are skipped
VERIFY_MAX_D = 4


class UsageError(ValueError):
    pass


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Path to config.yaml (default: ./config.yaml when present)")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default=None, help="Report format")
    common.add_argument("--seed", type=int, default=None, help="Seed for the root finder's start points")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes (0 = auto)")
    common.add_argument("--max-n", type=int, default=2, help="Largest dilation for reciprocity spot-checks")
    common.add_argument("--tol-classify", type=float, default=None, help="Tolerance for root classification")
    common.add_argument("--tol-residual", type=float, default=None, help="Accepted scaled residual of numeric roots")
    common.add_argument("--out", default=None, help="Write the report to this file instead of stdout")
    common.add_argument("--verify", action="store_true", default=None, help="Run brute-force cross-checks where feasible")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="ehrhart-roots",
        description="Ehrhart polynomials, delta-vectors and root certification for lattice polytopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("family", parents=[common], help="Check the Gorenstein Fano family P(d, k)")
    p.add_argument("--d", type=int, required=True, help="Dimension d >= 1")
    p.add_argument("--k", type=int, required=True, help="Number of imaginary root pairs, 0 <= 2k <= d")

    p = sub.add_parser("ehrhart", parents=[common], help="Ehrhart data of a polytope given by a vertex file")
    p.add_argument("vertices", help="Vertex file: one integer vertex per line")

    p = sub.add_parser("graph", parents=[common], help="Symmetric edge polytope of a graph given by an edge file")
    p.add_argument("edges", help="Edge file: one 'i j' pair per line, 1-based")

    p = sub.add_parser("scan", parents=[common], help="Scan all connected graphs up to a vertex count")
    p.add_argument("--max-vertices", type=int, required=True, help="Largest vertex count (<= 7)")
    p.add_argument("--min-vertices", type=int, default=2, help="Smallest vertex count")

    p = sub.add_parser("rootlocus", parents=[common], help="Root locus CSV for families and graphs")
    p.add_argument("--d", type=int, default=None, help="Single family dimension (with --k)")
    p.add_argument("--k", type=int, default=None, help="Single family k (with --d)")
    p.add_argument("--d-min", type=int, default=None, help="Smallest family dimension of a range")
    p.add_argument("--d-max", type=int, default=None, help="Largest family dimension of a range")
    p.add_argument("--graphs", nargs="*", default=[], help="Edge files to include")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < config.yaml < EHRHART_ROOTS_JOBS < command-line flags."""
    cfg = load_config(args.config)
    tol = cfg.tolerances
    if args.tol_classify is not None:
        if args.tol_classify <= 0:
            raise UsageError(f"--tol-classify must be > 0, got {args.tol_classify}")
        tol = replace(tol, classify=args.tol_classify)
    if args.tol_residual is not None:
        if args.tol_residual <= 0:
            raise UsageError(f"--tol-residual must be > 0, got {args.tol_residual}")
        tol = replace(tol, residual=args.tol_residual)
    if args.jobs is not None and args.jobs < 0:
        raise UsageError(f"--jobs must be >= 0, got {args.jobs}")
    return replace(
        cfg,
        tolerances=tol,
        output_format=args.output_format or cfg.output_format,
        jobs=cfg.jobs if args.jobs is None else args.jobs,
        seed=cfg.seed if args.seed is None else args.seed,
        verify=cfg.verify if args.verify is None else args.verify,
    )


def _geometry_limits(cfg: RunConfig) -> GeometryLimits:
    return GeometryLimits(cfg.limits.max_vertices, cfg.limits.max_ambient_dim)


def _emit(report: Dict[str, Any], text_title: str, text_summary: Dict[str, Any], roots, cfg: RunConfig, out: Optional[str]):
    if cfg.output_format == "text":
        write_text(render_text(text_title, text_summary, roots), out)
    else:
        if cfg.output_format == "csv":
            logger.warning("csv output is only defined for rootlocus; writing json")
        write_text(dumps_report(report), out)


# -- family --------------------------------------------------------------------

def _verify_family(params: FamilyParams, cfg: RunConfig, max_n: int) -> Tuple[Dict[str, bool], List[str]]:
    checks: Dict[str, bool] = {}
    skipped: List[str] = []
    if params.d > VERIFY_MAX_D:
        skipped.append(f"brute-force counts, reciprocity and Fano check (d={params.d} > {VERIFY_MAX_D})")
        logger.warning("verification skipped for d=%d: too large for brute force", params.d)
        return checks, skipped
    limits = _geometry_limits(cfg)
    qc = build_Qc(params)
    qc_form = closed_form_Qc(params)
    checks["counts_Qc"] = all(
        count_lattice_points(qc, n, CLOSED, cfg.jobs, limits) == qc_form(n) for n in range(1, 5)
    )
    p = build_P(params, cfg.limits.max_interior_d)
    p_form = closed_form_P(params)
    checks["counts_P"] = all(
        count_lattice_points(p, n, CLOSED, cfg.jobs, limits) == p_form(n) for n in range(1, params.d + 1)
    )
    checks["fano"] = is_fano(p, limits)
    checks["reciprocity"] = check_reciprocity(p, p_form, max_n, cfg.jobs, limits).ok
    delta = delta_from_ehrhart(p_form, params.d)
    checks["delta_identities"] = check_delta_identities(p, delta, p_form, cfg.jobs, limits).ok
    return checks, skipped


def cmd_family(args: argparse.Namespace, cfg: RunConfig) -> int:
    try:
        params = FamilyParams(args.k, args.d)
    except ValueError as e:
        raise UsageError(str(e))
    if params.d > cfg.limits.max_d_numeric and params.d > cfg.limits.max_d_exact:
        raise UsageError(f"d={params.d} exceeds both max_d_numeric and max_d_exact")

    thm = theorem_property_check(params, cfg.tolerances, cfg.limits, cfg.seed)
    i_poly = thm.i_poly
    delta = delta_from_ehrhart(i_poly, params.d)
    report: Dict[str, Any] = {
        "command": "family",
        "theorem": thm.as_dict(),
        "ehrhart_coefficients": list(i_poly.coeffs),
        "delta": delta.as_list(),
        "gorenstein": is_gorenstein(delta),
        "functional_equation": check_functional_equation(i_poly, params.d),
        "violations": [v.as_dict() for v in validate_delta(delta)],
        "critical_line_bisection": [
            {"re": z.real, "im": z.imag} for z in critical_line_roots_for_family(params, cfg.tolerances.bisection)
        ],
    }
    skipped = list(thm.skipped)
    if params.d <= cfg.limits.max_interior_d:
        report["vertices"] = [list(v) for v in build_P(params, cfg.limits.max_interior_d).vertices]
    else:
        skipped.append(f"vertices of P (interior-point search limited to d <= {cfg.limits.max_interior_d})")

    ok = thm.all_pass and report["gorenstein"] and report["functional_equation"] and not report["violations"]
    if cfg.verify:
        checks, verify_skipped = _verify_family(params, cfg, args.max_n)
        report["verify"] = checks
        skipped += verify_skipped
        ok = ok and all(checks.values())
    report["skipped"] = skipped
    report["status"] = "PASS" if ok else "FAIL"

    summary = {
        "k": params.k,
        "d": params.d,
        "i(P, n)": format_polynomial(i_poly),
        "delta": delta.as_list(),
        "gorenstein": report["gorenstein"],
        "certificate": thm.certificate.verdict if thm.certificate else "skipped",
    }
    summary.update({f"item ({name})": "PASS" if v else "FAIL" for name, v in thm.items.items()})
    summary.update({f"verify {name}": "PASS" if v else "FAIL" for name, v in report.get("verify", {}).items()})
    summary["status"] = report["status"]
    roots = thm.report.roots if thm.report else None
    _emit(report, f"family k={params.k} d={params.d}", summary, roots, cfg, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- ehrhart -------------------------------------------------------------------

def cmd_ehrhart(args: argparse.Namespace, cfg: RunConfig) -> int:
    p = read_vertex_file(args.vertices)
    d = p.ambient_dim
    limits = _geometry_limits(cfg)
    i_poly = ehrhart_by_interpolation(p, cfg.jobs, limits)
    delta = delta_from_ehrhart(i_poly, d)
    violations = validate_delta(delta)
    gorenstein = is_gorenstein(delta)
    functional = check_functional_equation(i_poly, d)
    reciprocity = check_reciprocity(p, i_poly, args.max_n, cfg.jobs, limits)
    roots = find_roots_numeric(i_poly, cfg.tolerances, cfg.limits.max_iterations, cfg.seed)
    classification = classify_roots(roots, d, cfg.tolerances)
    symmetric_roots = check_root_symmetry([r.value for r in roots], cfg.tolerances.distinct)
    if gorenstein and not symmetric_roots:
        logger.warning("roots of a Gorenstein polytope are not mirrored about Re = -1/2")

    report: Dict[str, Any] = {
        "command": "ehrhart",
        "source": args.vertices,
        "dim": d,
        "vertices": [list(v) for v in p.vertices],
        "ehrhart_polynomial": format_polynomial(i_poly),
        "ehrhart_coefficients": list(i_poly.coeffs),
        "delta": delta.as_list(),
        "gorenstein": gorenstein,
        "functional_equation": functional,
        "violations": [v.as_dict() for v in violations],
        "reciprocity": {"ok": reciprocity.ok, "n_max": args.max_n, "first_failure": reciprocity.first_failure},
        "roots": classification.as_dict(),
        "root_symmetry": symmetric_roots,
        "series_numerator": format_polynomial(ehrhart_series_numerator(delta)),
    }
    ok = not violations and reciprocity.ok and gorenstein == functional
    if gorenstein != functional:
        logger.error("palindromic delta (%s) and functional equation (%s) disagree", gorenstein, functional)
    skipped: List[str] = []
    if cfg.verify:
        ident = check_delta_identities(p, delta, i_poly, cfg.jobs, limits)
        report["verify"] = {"delta_identities": ident.ok, "details": ident.details}
        ok = ok and ident.ok
    report["skipped"] = skipped
    report["status"] = "PASS" if ok else "FAIL"

    summary = {
        "dim": d,
        "i(P, n)": format_polynomial(i_poly),
        "delta": delta.as_list(),
        "gorenstein": gorenstein,
        "reciprocity": "PASS" if reciprocity.ok else f"FAIL at n={reciprocity.first_failure}",
        "violations": [str(v) for v in violations] or "none",
        "status": report["status"],
    }
    _emit(report, f"ehrhart {args.vertices}", summary, roots, cfg, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- graph / scan ----------------------------------------------------------------

def cmd_graph(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = read_edge_file(args.edges)
    rec = analyze_graph(g, cfg.tolerances, cfg.limits, cfg.seed, cfg.jobs)
    report = {"command": "graph", "source": args.edges, **rec.as_dict()}
    ok = bool(rec.critical_line) and not rec.violations and bool(rec.gorenstein)

    if cfg.verify:
        p_dim = rec.dim
        if p_dim <= VERIFY_MAX_D + 1:
            p = symmetric_edge_polytope(rec.graph)
            limits = _geometry_limits(cfg)
            ident = check_delta_identities(p, rec.delta, rec.ehrhart, cfg.jobs, limits)
            recip = check_reciprocity(p, rec.ehrhart, args.max_n, cfg.jobs, limits)
            report["verify"] = {"delta_identities": ident.ok, "reciprocity": recip.ok}
            report["skipped"] = []
            ok = ok and ident.ok and recip.ok
        else:
            report["skipped"] = [f"brute-force identities (dim {p_dim} > {VERIFY_MAX_D + 1})"]
    report["status"] = "PASS" if ok else "FAIL"

    summary = {
        "edges": " ".join(f"{i}-{j}" for i, j in rec.graph.sorted_edges),
        "dim": rec.dim,
        "i(P, n)": format_polynomial(rec.ehrhart),
        "delta": rec.delta.as_list(),
        "gorenstein": rec.gorenstein,
        "critical_line": rec.critical_line,
        "certificate": rec.certificate.verdict,
        "status": report["status"],
    }
    if not rec.critical_line and rec.worst_root is not None:
        summary["offending root re"] = repr(rec.worst_root.real)
        summary["offending root im"] = repr(rec.worst_root.imag)
    _emit(report, f"graph {args.edges}", summary, rec.report.roots if rec.report else None, cfg, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_scan(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.max_vertices > cfg.limits.max_graph_vertices:
        raise UsageError(f"--max-vertices {args.max_vertices} exceeds the limit {cfg.limits.max_graph_vertices}")
    if args.min_vertices < 2 or args.min_vertices > args.max_vertices:
        raise UsageError(f"need 2 <= --min-vertices <= --max-vertices, got {args.min_vertices}")

    records: List[Dict[str, Any]] = []
    stream = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for rec in scan_graphs(args.max_vertices, cfg.tolerances, cfg.limits, cfg.seed, cfg.jobs, args.min_vertices):
            d = rec.as_dict()
            records.append(d)
            if cfg.output_format != "text":
                print(dumps_line(d), file=stream, flush=True)
        summary = scan_summary(records)
        if cfg.output_format == "text":
            print(scan_table(records).to_string(index=False), file=stream)
            print("", file=stream)
            print(f"records: {summary['records']}  on critical line: {summary['critical_line']}  "
                  f"off: {summary['off_critical_line']}  errors: {summary['errors']}", file=stream)
        else:
            print(dumps_line({"summary": summary}), file=stream)
    finally:
        if stream is not sys.stdout:
            stream.close()

    failed = summary["errors"] or any(r.get("violations") or r.get("gorenstein") is False for r in records)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# -- root locus -------------------------------------------------------------------

def cmd_rootlocus(args: argparse.Namespace, cfg: RunConfig) -> int:
    cases: List[FamilyParams] = []
    if args.d is not None or args.k is not None:
        if args.d is None or args.k is None:
            raise UsageError("--d and --k must be given together")
        try:
            cases.append(FamilyParams(args.k, args.d))
        except ValueError as e:
            raise UsageError(str(e))
    if args.d_min is not None or args.d_max is not None:
        d_min = args.d_min if args.d_min is not None else 1
        d_max = args.d_max if args.d_max is not None else d_min
        if d_max > cfg.limits.max_d_numeric:
            raise UsageError(f"--d-max {d_max} exceeds max_d_numeric {cfg.limits.max_d_numeric}")
        cases.extend(valid_params(d_min, d_max))

    tol = cfg.tolerances.classify
    rows: List[Dict[str, Any]] = []
    for params in cases:
        roots = find_roots_numeric(closed_form_P(params), cfg.tolerances, cfg.limits.max_iterations, cfg.seed)
        rows += rootlocus_rows("family", params.d, params.k, roots, tol)
    for path in args.graphs:
        rec = analyze_graph(read_edge_file(path), cfg.tolerances, cfg.limits, cfg.seed, cfg.jobs)
        rows += rootlocus_rows(f"graph:{path}", rec.dim, None, rec.report.roots, tol)
    write_rootlocus_csv(rows, args.out)
    return EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "ehrhart": cmd_ehrhart,
    "graph": cmd_graph,
    "scan": cmd_scan,
    "rootlocus": cmd_rootlocus,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    # Allow running as: PYTHONPATH=src python -m ehrhartroots.cli
    run()
