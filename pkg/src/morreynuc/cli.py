"""Command line: ``morreynuc classify | region | verify | table``.

Exit codes: 0 ok, 1 verification violation, 2 parse or input error,
3 a not-characterized verdict under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction

from . import __version__
from .classifier import Status, classify, same_tau_threshold
from .grammar import SpecParseError, parse_spec, parse_template, print_spec, sweep_of
from .params import INF, Family, ParameterError, SpaceSpec, fmt, gamma_bar, inv, pos
from .verify import DEFAULT_BUDGET, PLANS, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_STRICT = 0, 1, 2, 3


def _fmt_opt(x) -> str:
    return "" if x is None else fmt(x)


def _status_line(name, status, thr, boundary) -> str:
    line = f"{name}: {status.value}"
    if thr is not None:
        line += f" (threshold {fmt(thr)}"
        line += ", boundary)" if boundary else ")"
    return line


def cmd_classify(args) -> int:
    src, dst = parse_spec(args.source), parse_spec(args.target)
    v = classify(src, dst)
    if args.json:
        out = {"source": print_spec(src), "target": print_spec(dst), **v.to_dict()}
        print(json.dumps(out, indent=2))
    else:
        print(f"source: {print_spec(src)}")
        print(f"target: {print_spec(dst)}")
        print(f"lhs: {fmt(v.lhs)}")
        print(_status_line("compact", v.compact, v.threshold_compact, v.on_boundary_compact))
        print(_status_line("nuclear", v.nuclear, v.threshold_nuclear, v.on_boundary_nuclear))
        print(f"citation: {v.citation}")
        for note in v.notes:
            print(f"note: {note}")
    if args.strict and Status.NOT_CHARACTERIZED in (v.compact, v.nuclear):
        return EXIT_STRICT
    return EXIT_OK


def region_rows(source: str, target: str):
    """Grid rows ``(x, y, compact, nuclear, thr_c, thr_n)``, ``y`` outer and ``x`` inner."""
    ts, td = parse_template(source), parse_template(target)
    swept = [(ts, k) for k in ts.sweeps] + [(td, k) for k in td.sweeps]
    if len(swept) != 2:
        raise ParameterError(f"region needs exactly two swept parameters, found {len(swept)}")
    (tx, kx), (ty, ky) = swept
    xs = sweep_of(tx.fields[kx]).values()
    ys = sweep_of(ty.fields[ky]).values()
    rows = []
    for y, x in itertools.product(ys, xs):
        assign = {id(ts): {}, id(td): {}}
        assign[id(tx)][kx] = x
        assign[id(ty)][ky] = y
        try:
            v = classify(ts.instantiate(assign[id(ts)]), td.instantiate(assign[id(td)]))
        except ParameterError:
            rows.append((fmt(x), fmt(y), "invalid", "invalid", "", ""))
            continue
        rows.append((fmt(x), fmt(y), v.compact.value, v.nuclear.value,
                     _fmt_opt(v.threshold_compact), _fmt_opt(v.threshold_nuclear)))
    return rows


def cmd_region(args) -> int:
    rows = region_rows(args.source, args.target)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "compact", "nuclear", "threshold_compact", "threshold_nuclear"])
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.plan, seed=args.seed, budget=args.budget)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif args.json:
        sys.stdout.write(text)
    print(report.summary(), file=sys.stderr if args.json and not args.out else sys.stdout)
    if report.cases and report.skipped == len(report.cases):
        print("warning: every case was skipped by the budget", file=sys.stderr)
    return EXIT_VIOLATION if report.violated else EXIT_OK


# ---------------------------------------------------------------- tables

TABLE_P = (Fraction(1), Fraction(2), Fraction(4), INF)
TABLE_TAU = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))


def _table(title, header, rows, citation) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    line = lambda r: "  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
    out = [title, f"({citation})", line(header), line(["-" * w for w in widths])]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def table_bmo() -> str:
    rows = []
    for p, u in [(Fraction(1), Fraction(1)), (Fraction(1), Fraction(2)), (Fraction(2), Fraction(4)),
                 (Fraction(2), Fraction(8)), (INF, INF)]:
        rows.append([f"N/E u={fmt(u)} p={fmt(p)}", fmt(inv(u)), "1"])
    for p, tau in itertools.product(TABLE_P, TABLE_TAU):
        rows.append([f"B/F tau={fmt(tau)} p={fmt(p)}", fmt(inv(p) - tau), fmt(1 - pos(tau - inv(p)))])
    return _table("Embeddings into bmo and L_inf: s/d must exceed", ["source", "compact", "nuclear"], rows,
                  "embeddings into bmo and L_inf")


def table_lr() -> str:
    rows = []
    for r in (Fraction(1), Fraction(2), Fraction(4)):
        for p, u in [(Fraction(1), Fraction(2)), (Fraction(2), Fraction(4)), (Fraction(2), Fraction(2))]:
            rows.append([fmt(r), f"N/E u={fmt(u)} p={fmt(p)}", fmt(1 - pos(inv(r) - inv(u)))])
        for p, tau in itertools.product((Fraction(1), Fraction(2)), TABLE_TAU):
            rows.append([fmt(r), f"B/F tau={fmt(tau)} p={fmt(p)}", fmt(gamma_bar(tau, 0, p, r))])
    return _table("Nuclear embeddings into L_r: s/d must exceed", ["r", "source", "nuclear"], rows,
                  "nuclearity into L_r")


def table_same_tau() -> str:
    rows = []
    for tau, p1, p2 in itertools.product(TABLE_TAU, TABLE_P, TABLE_P):
        rows.append([fmt(tau), fmt(p1), fmt(p2), fmt(same_tau_threshold(tau, p1, p2))])
    return _table("Equal tau: (s1 - s2)/d must exceed", ["tau", "p1", "p2", "nuclear"], rows,
                  "equal-tau nuclearity criterion")


TABLES = {"bmo": table_bmo, "Lr": table_lr, "same-tau": table_same_tau}


def cmd_table(args) -> int:
    names = list(TABLES) if args.name == "all" else [args.name]
    _emit("\n".join(TABLES[n]() for n in names), args.out)
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="largest vector length 2^(jd) to run (default %(default)s)")
    common.add_argument("--out", help="write the result to this file")

    parser = argparse.ArgumentParser(prog="morreynuc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="decide compactness and nuclearity")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--strict", action="store_true", help="exit 3 if a verdict is not characterized")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("region", parents=[common], help="CSV verdict grid over two swept parameters")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify", parents=[common], help="run formula-versus-oracle checks")
    p.add_argument("plan", choices=PLANS + ("all",))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="threshold tables for special cases")
    p.add_argument("name", nargs="?", default="all", choices=list(TABLES) + ["all"])
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecParseError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
