"""Command-line driver: run verification suites or compute single quantities.

Examples::

    weightedtrace --suite lambda
    weightedtrace --suite all --format csv --jobs 4 --no-timing
    weightedtrace compute first_chern "z e1" "z^-1 e1"
    weightedtrace compute res "|D+P|^-1"
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

from . import cocycles as cc
from . import loop_geometry as lg
from .expr import ParseError, parse_loop, parse_operator
from .lie_core import AlgebraError, LieAlgebraData, su2, symplectic_form
from .mode_ops import (Convention, ModeError, abs_dirac_weight, laplacian_plus_one_weight, laplacian_weight,
                       mode_settings, quartic_weight, shifted_square_weight)
from .reg_traces import canonical_trace_TR, residue, weighted_trace
from .suites import CSV_HEADER, SUITES, CheckReport, ConfigError, RunConfig, report_row, run_suite

WEIGHTS = {
    "laplacian": laplacian_weight,
    "laplacian+1": laplacian_plus_one_weight,
    "shifted-square": shifted_square_weight,
    "abs-dirac": abs_dirac_weight,
    "quartic": quartic_weight,
}

OPERATOR_QUANTITIES = {"trace": 1, "res": 1, "canonical": 1, "radul": 2, "schwinger": 2, "c_TR": 2,
                       "obstruction": 2}
LOOP_QUANTITIES = {"symplectic": 2, "lambda": 2, "first_chern": 2, "ricci": 2, "radul_phi": 2}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algebra", help="structure-constant JSON file (default: su(2))")
    parser.add_argument("--truncation", type=int, default=256, help="mode cutoff M (default 256)")
    parser.add_argument("--depth", type=int, default=None, help="asymptotic expansion depth")
    parser.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    parser.add_argument("--convention", choices=[c.value for c in Convention], default=Convention.KERNEL_PLUS.value)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads")
    parser.add_argument("--no-timing", action="store_true", help="report runtime_ms = 0 for reproducible output")
    parser.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightedtrace", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run verification suites")
    _common(run)
    run.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES + ('all',))}")
    comp = sub.add_parser("compute", help="evaluate one quantity on explicit operands")
    _common(comp)
    comp.add_argument("quantity", choices=sorted({**OPERATOR_QUANTITIES, **LOOP_QUANTITIES}))
    comp.add_argument("operands", nargs="+", help="operator or loop expressions")
    comp.add_argument("--weight", choices=sorted(WEIGHTS), default="laplacian")
    comp.add_argument("--s", type=float, default=0.5, help="Sobolev index for ricci")
    comp.add_argument("--expect", type=complex, default=None, help="expected value; sets pass/fail")
    return parser


def load_algebra(path: str | None) -> LieAlgebraData:
    return su2() if path is None else LieAlgebraData.from_file(path)


def make_config(args) -> RunConfig:
    return RunConfig(algebra=load_algebra(args.algebra), truncation=args.truncation, depth=args.depth,
                     tol=args.tol, convention=Convention(args.convention), jobs=args.jobs,
                     timing=not args.no_timing)


def compute_quantity(quantity: str, operands: list[str], cfg: RunConfig, weight_name: str = "laplacian",
                     s: float = 0.5) -> complex:
    table = {**OPERATOR_QUANTITIES, **LOOP_QUANTITIES}
    if quantity not in table:
        raise ConfigError(f"unknown quantity {quantity!r}")
    if len(operands) != table[quantity]:
        raise ConfigError(f"{quantity} takes {table[quantity]} operand(s), got {len(operands)}")
    weight = WEIGHTS[weight_name]()
    alg = cfg.algebra
    if quantity in OPERATOR_QUANTITIES:
        ops = [parse_operator(o, alg) for o in operands]
        if len({op.d for op in ops}) > 1:
            raise ConfigError("operands have different block sizes")
        fn = {"trace": lambda a: weighted_trace(a, weight), "res": residue, "canonical": canonical_trace_TR,
              "radul": lambda a, b: cc.radul(a, b, weight), "schwinger": cc.schwinger, "c_TR": cc.c_TR,
              "obstruction": cc.obstruction_residue}[quantity]
        return complex(fn(*ops))
    x, y = (parse_loop(o, alg) for o in operands)
    if quantity == "symplectic":
        return symplectic_form(x, y)
    if quantity == "lambda":
        return lg.loop_lambda(x, y)
    if quantity == "ricci":
        return lg.ricci(x, y, lg.GeometryConfig(alg, s, weight))
    geo = lg.GeometryConfig(alg, 0.5, weight)
    if quantity == "radul_phi":
        return lg.kahler_radul(x, y, geo)
    return lg.first_chern(x, y, geo)


def _finite(x: float):
    return x if math.isfinite(x) else repr(x)


def render(reports: list[CheckReport], fmt: str) -> str:
    if fmt == "json":
        rows = []
        for r in reports:
            row = r.to_json()
            for key in ("lhs", "rhs"):
                row[key] = {k: _finite(v) for k, v in row[key].items()}
            row["abs_err"] = _finite(row["abs_err"])
            rows.append(row)
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow(report_row(r))
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in ("run", "compute", "-h", "--help"):
        argv.insert(0, "run")
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        if args.command == "run":
            reports = run_suite(args.suite, cfg)
        else:
            start = time.perf_counter()
            with mode_settings(**cfg.settings()):
                value = compute_quantity(args.quantity, args.operands, cfg, args.weight, args.s)
            elapsed = int(round((time.perf_counter() - start) * 1000)) if cfg.timing else 0
            expect = value if args.expect is None else args.expect
            tol = cfg.tolerance(1e-9)
            err = abs(value - expect)
            reports = [CheckReport(f"compute/{args.quantity}", " ; ".join(args.operands), value, expect,
                                   err, tol, "pass" if err <= tol else "fail", elapsed)]
    except (ConfigError, AlgebraError, ParseError, ModeError) as exc:
        print(f"weightedtrace: error: {exc}", file=sys.stderr)
        return 2
    text = render(reports, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.status == "pass" for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
