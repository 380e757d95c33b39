"""Command-line entry point.

Exit codes: 0 success, 1 precondition or verdict failure, 2 usage error.
Main output goes to stdout; ``--out DIR`` also writes JSON, CSV and, on
request, SVG and PNG figures into ``DIR``. Angles are radians unless
suffixed with ``deg``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import figures
from .construction import MAX_DEPTH, MODES, ConstructionConfig, build, node_path
from .disk import Arc, ArcSet
from .experiments import (
    cross_norm_run,
    existence_run,
    g_scan,
    l1_quadrant_run,
    level_datum,
    nonexistence_run,
    parent_arc,
    perturbation_run,
    square_example,
)
from .norms import NormError, format_norm, lp, parse_norm
from .reporting import (
    dump_construction,
    dumps,
    report_summary_csv,
    report_to_json,
    rows_to_csv,
    solve_reports_to_csv,
)
from .solver import region_labels, solve_dp, transition_points
from .svg import render_svg


class CliError(ValueError):
    """Precondition failure detected before any computation."""


# --- argument types ---------------------------------------------------------


def angle_arg(text):
    s = text.strip().lower()
    try:
        if s.endswith("deg"):
            return math.radians(float(s[:-3]))
        if s.endswith("rad"):
            return float(s[:-3])
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def norm_arg(text):
    try:
        return parse_norm(text)
    except NormError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def arcs_arg(text):
    """``start:width,start:width,...`` with angles as in :func:`angle_arg`."""
    arcs = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"arc must be start:width, got {item!r}")
        arcs.append((angle_arg(parts[0]), angle_arg(parts[1])))
    return arcs


# --- parser -----------------------------------------------------------------


def _output_args(p):
    p.add_argument("--out", type=Path, help="directory for JSON/CSV/SVG/figure files")
    p.add_argument("--json", action="store_true", help="print JSON instead of CSV")
    p.add_argument("--csv", action="store_true", help="print CSV (default for tables)")
    p.add_argument("--svg", action="store_true", help="also write an SVG diagram into --out")
    p.add_argument("--figures", action="store_true", help="also write PNG figures into --out")


def _construction_args(p, norm_flag="--norm", default_depth=8, modes=True):
    p.add_argument(norm_flag, dest="norm", type=norm_arg, default=lp(2), help="norm spec, e.g. lp:2 or lp:2+0.1*lp:1")
    p.add_argument("--alpha0", type=float, default=0.1)
    p.add_argument("--theta-center", type=angle_arg, default=0.0)
    p.add_argument("--depth", type=int, default=default_depth)
    if modes:
        p.add_argument("--mode", choices=MODES, default="equality")
        p.add_argument("--rho", type=float)
    p.add_argument("--tol", type=float, default=1e-12)


def build_parser():
    parser = argparse.ArgumentParser(prog="aniso-trace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a Cantor-type arc construction and dump it as JSON")
    _construction_args(p)
    _output_args(p)

    p = sub.add_parser("solve", help="exact non-crossing chord matching for arc data")
    _construction_args(p)
    p.add_argument("--solve-norm", type=norm_arg, help="norm for the objective (default: --norm)")
    p.add_argument("--arcs", type=arcs_arg, help="explicit arcs start:width,...; overrides the construction")
    p.add_argument("--levels", type=int, default=6, help="highest construction level to solve")
    p.add_argument("--tie-tol", type=float, default=1e-9)
    p.add_argument("--indicator", choices=("none", "existence", "nonexistence"), default="none")
    _output_args(p)

    p = sub.add_parser("check-h", help="trapezoid functional of a construction under another norm")
    _construction_args(p)
    p.add_argument("--other", type=norm_arg, help="norm to evaluate under (default: --norm)")
    p.add_argument("--expect", choices=("any", "positive", "zero"), default="any")
    p.add_argument("--zero-tol", type=float, default=1e-10)
    _output_args(p)

    p = sub.add_parser("square-example", help="two competitors on the unit square")
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--p", type=float, action="append", dest="exponents")
    _output_args(p)

    p = sub.add_parser("cross-norm", help="equality construction for phi1, sign of h under phi2")
    _construction_args(p, "--phi1", default_depth=12, modes=False)
    p.add_argument("--phi2", type=norm_arg, default=lp(2))
    p.add_argument("--tie-tol", type=float, default=1e-9)
    p.add_argument("--g-scan", action="store_true", help="also scan g on the root trapezoid")
    p.add_argument("--grid", type=int, default=64)
    _output_args(p)

    p = sub.add_parser("perturbation", help="phi1 against phi1 + (1/k) l1 on a first-quadrant construction")
    _construction_args(p, "--phi1", default_depth=12, modes=False)
    p.add_argument("--k", type=int, default=10)
    _output_args(p)

    p = sub.add_parser("l1-quadrant", help="l1 signs and area decay on a first-quadrant construction")
    _construction_args(p)
    _output_args(p)

    p = sub.add_parser("verify", help="run every acceptance criterion")
    p.add_argument("--only", action="append", help="criterion key, repeatable (e.g. 4a)")

    p = sub.add_parser("render", help="SVG of a construction level with a chord matching")
    _construction_args(p, default_depth=3)
    p.add_argument("--level", type=int, help="level to draw (default: depth)")
    p.add_argument("--matching", choices=("en", "eprime", "optimal", "none"), default="en")
    p.add_argument("--size", type=int, default=480)
    p.add_argument("--out", type=Path, help="file or directory for the SVG (default: stdout)")
    return parser


# --- helpers ----------------------------------------------------------------


def _config(args):
    mode = getattr(args, "mode", "equality")
    if not (0 <= args.depth <= MAX_DEPTH):
        raise CliError(f"depth must lie in [0, {MAX_DEPTH}], got {args.depth}")
    return ConstructionConfig(
        norm=args.norm,
        alpha0=args.alpha0,
        theta_center=args.theta_center,
        depth=args.depth,
        mode=mode,
        rho=getattr(args, "rho", None),
        tol=args.tol,
    )


def _write(out, name, text):
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _emit_report(args, report, main_rows=None, main_columns=None):
    """Print the report and write its files; returns the report CSV text."""
    table_csv = rows_to_csv(main_rows, main_columns) if main_rows is not None else None
    summary = report_summary_csv(report)
    text = report_to_json(report)
    if args.json:
        sys.stdout.write(text)
    else:
        sys.stdout.write(table_csv if table_csv is not None else summary)
    if args.out is not None:
        _write(args.out, f"{report.name}.json", text)
        _write(args.out, f"{report.name}-summary.csv", summary)
        for key, rows in report.tables.items():
            if rows:
                _write(args.out, f"{report.name}-{key}.csv", rows_to_csv(rows))
    return summary


def _verdict_status(report):
    for key, v in report.verdicts.items():
        if v is not True:
            state = "inconclusive" if v is None else "false"
            print(f"verdict {key}: {state}", file=sys.stderr)
    return 0 if report.passed else 1


def _svg_for_level(c, n, matching="en", norm=None, size=480):
    datum = level_datum(c, n)
    if matching == "en":
        pairs = c.en_pairs(n)
    elif matching == "eprime":
        pairs = c.eprime_pairs(n)
    elif matching == "optimal":
        pairs = solve_dp(norm or c.config.norm, datum).optimal.pairs
    else:
        pairs = ()
    title = f"{format_norm(c.config.norm)} {c.config.mode} level {n} ({matching})"
    return render_svg(datum, pairs, title=title, size=size)


# --- subcommands ------------------------------------------------------------


def cmd_construct(args):
    c = build(_config(args))
    text = dump_construction(c)
    sys.stdout.write(text)
    _write(args.out, "construction.json", text)
    if args.out is not None:
        rows = [
            {
                "node": i,
                "path": node_path(i),
                "arc_start": c.start[i],
                "arc_width": c.width[i],
                "child_alpha": None if math.isnan(c.alpha[i]) else c.alpha[i],
                "h_self": None if math.isnan(c.h[i]) else c.h[i],
            }
            for i in range(c.n_nodes)
        ]
        _write(args.out, "construction.csv", rows_to_csv(rows))
        if args.svg:
            _write(args.out, "construction.svg", _svg_for_level(c, c.depth))
        if args.figures and c.depth > 0:
            rows = [{"level": n, "measure": c.measure(n)} for n in range(c.depth + 1)]
            figures.levels_figure(rows, ["measure"], args.out / "construction-measure.png")
    return 0


def _explicit_datum(arcs):
    return transition_points(ArcSet(tuple(Arc(a, w) for a, w in arcs)))


def cmd_solve(args):
    norm = args.solve_norm or args.norm
    if args.arcs is not None:
        datum = _explicit_datum(args.arcs)
        rep = solve_dp(norm, datum, tie_tol=args.tie_tol)
        row = {
            "level": 0,
            "m": datum.m,
            "optimal_value": rep.optimal_value,
            "uniqueness_gap": rep.uniqueness_gap,
            "n_ties": rep.n_ties,
            "area_in": region_labels(rep.optimal.pairs, datum).area_in,
        }
        text = solve_reports_to_csv([row])
        if args.json:
            payload = {
                "norm": format_norm(norm),
                "angles": list(datum.angles),
                "optimal_pairs": [list(p) for p in rep.optimal.pairs],
                "ties": [[list(p) for p in t.pairs] for t in rep.ties],
                "ties_truncated": rep.ties_truncated,
                **{k: v for k, v in row.items() if k != "level"},
            }
            sys.stdout.write(dumps(payload))
        else:
            sys.stdout.write(text)
        _write(args.out, "solve.csv", text)
        if args.out is not None and args.svg:
            _write(args.out, "solve.svg", render_svg(datum, rep.optimal.pairs))
        return 0

    if args.levels < 0:
        raise CliError(f"levels must be nonnegative, got {args.levels}")
    c = build(_config(args))
    if args.indicator == "none":
        levels = min(args.levels, c.depth)
        rows = []
        for n in range(levels + 1):
            datum = level_datum(c, n)
            rep = solve_dp(norm, datum, tie_tol=args.tie_tol)
            rows.append(
                {
                    "level": n,
                    "m": datum.m,
                    "optimal_value": rep.optimal_value,
                    "uniqueness_gap": rep.uniqueness_gap,
                    "n_ties": rep.n_ties,
                    "area_in": region_labels(rep.optimal.pairs, datum).area_in,
                }
            )
        text = solve_reports_to_csv(rows)
        sys.stdout.write(dumps({"rows": rows}) if args.json else text)
        _write(args.out, "solve.csv", text)
        if args.out is not None and args.svg:
            _write(args.out, "solve.svg", _svg_for_level(c, levels, "optimal", norm))
        return 0

    run = existence_run if args.indicator == "existence" else nonexistence_run
    report = run(c, norm, tie_tol=args.tie_tol, max_level=args.levels)
    _emit_report(args, report, report.tables["solve"])
    if args.out is not None and args.figures:
        key = "measure" if args.indicator == "existence" else "area_en"
        figures.levels_figure(report.tables["levels"], [key], args.out / f"{report.name}-levels.png")
    return _verdict_status(report)


def cmd_check_h(args):
    c = build(_config(args))
    other = args.other or args.norm
    rep = c.check_h_signs(other)
    rows = [{"node": i, "path": node_path(i), "h": float(v)} for i, v in enumerate(rep.values)]
    text = rows_to_csv(rows, ("node", "path", "h"))
    summary = {
        "construction": format_norm(c.config.norm),
        "other": format_norm(other),
        "min_h": rep.min_h,
        "max_abs_h": rep.max_abs_h,
        "n_nonpositive": rep.n_nonpositive,
        "internal_nodes": len(rep.values),
    }
    sys.stdout.write(dumps(summary) if args.json else text)
    _write(args.out, "check-h.csv", text)
    _write(args.out, "check-h.json", dumps({**summary, "nodes": rows}))
    if args.out is not None and args.figures and rows:
        figures.h_by_level_figure(rows, ["h"], args.out / "check-h.png")
    if args.expect == "positive" and rep.n_nonpositive:
        print(f"{rep.n_nonpositive} node(s) with h <= 0, min h = {rep.min_h:.3e}", file=sys.stderr)
        return 1
    if args.expect == "zero" and rep.max_abs_h > args.zero_tol:
        print(f"max |h| = {rep.max_abs_h:.3e} exceeds {args.zero_tol:g}", file=sys.stderr)
        return 1
    return 0


def cmd_square_example(args):
    report = square_example(args.a, args.b, tuple(args.exponents or (2.0, 3.0)))
    _emit_report(args, report, report.tables["square"])
    if args.out is not None and args.figures:
        figures.square_figure(report.tables["square"], args.out / "square-example.png")
    return 0


def cmd_cross_norm(args):
    report, c = cross_norm_run(args.norm, args.phi2, args.theta_center, args.alpha0, args.depth, args.tol, args.tie_tol)
    if args.g_scan:
        scan = g_scan(args.norm, args.phi2, parent_arc(c), grid=args.grid)
        report.tables["g"] = scan.tables["g"]
        report.verdicts.update(scan.verdicts)
        report.margins.update({f"g_{k}": v for k, v in scan.margins.items()})
    _emit_report(args, report)
    if args.out is not None:
        if args.svg:
            _write(args.out, "cross-norm.svg", _svg_for_level(c, min(c.depth, 4)))
        if args.figures:
            figures.h_by_level_figure(report.tables["nodes"], ["h_phi1", "h_phi2"], args.out / "cross-norm-h.png")
            if args.g_scan:
                figures.g_scan_figure(report.tables["g"], args.out / "cross-norm-g.png")
    return _verdict_status(report)


def cmd_perturbation(args):
    report, c = perturbation_run(args.norm, args.k, args.theta_center, args.alpha0, args.depth, args.tol)
    _emit_report(args, report)
    if args.out is not None and args.figures:
        figures.h_by_level_figure(report.tables["nodes"], ["h_phi1", "h_phi2"], args.out / "perturbation-h.png")
    if args.out is not None and args.svg:
        _write(args.out, "perturbation.svg", _svg_for_level(c, min(c.depth, 4)))
    return _verdict_status(report)


def cmd_l1_quadrant(args):
    c = build(_config(args))
    report = l1_quadrant_run(c)
    _emit_report(args, report, report.tables["levels"])
    if args.out is not None and args.figures:
        figures.levels_figure(report.tables["levels"], ["area_en"], args.out / "l1-quadrant-areas.png")
    return _verdict_status(report)


def cmd_verify(args):
    from .acceptance import CRITERIA, run_all

    chosen = None
    if args.only:
        keys = {fn.__name__.removeprefix("criterion_") for fn in CRITERIA}
        bad = [k for k in args.only if k not in keys]
        if bad:
            raise CliError(f"unknown criterion {', '.join(bad)}; known: {', '.join(sorted(keys))}")
        chosen = [fn for fn in CRITERIA if fn.__name__.removeprefix("criterion_") in args.only]
    results = run_all(criteria=chosen)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_render(args):
    c = build(_config(args))
    n = c.depth if args.level is None else args.level
    if not (0 <= n <= c.depth):
        raise CliError(f"level must lie in [0, {c.depth}], got {n}")
    text = _svg_for_level(c, n, args.matching, size=args.size)
    if args.out is None:
        sys.stdout.write(text)
    else:
        path = args.out / f"level-{n}.svg" if args.out.is_dir() or args.out.suffix != ".svg" else args.out
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return 0


COMMANDS = {
    "construct": cmd_construct,
    "solve": cmd_solve,
    "check-h": cmd_check_h,
    "square-example": cmd_square_example,
    "cross-norm": cmd_cross_norm,
    "perturbation": cmd_perturbation,
    "l1-quadrant": cmd_l1_quadrant,
    "verify": cmd_verify,
    "render": cmd_render,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"aniso-trace {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
