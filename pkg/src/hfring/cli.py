"""Command-line interface.

Commands: eval, op, verify-ring, sample, grid-converge, compare-defs,
validate.  Input is the function-definition JSON documented in `formats`;
outputs are JSON reports and x,lo,hi CSV tables.  All randomness flows
from --seed, so identical invocations produce byte-identical output.

Exit codes: 0 success, 1 check failed, 2 parse error, 3 unbound name,
4 domain error, 5 operand not Hausdorff continuous, 6 order-limit route
requested outside the piecewise-linear subclass.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from . import algebra, baire, formats, order, suite
from . import piecewise as pw
from .errors import (
    DomainError,
    EngineError,
    ExprSyntaxError,
    NotHausdorffContinuous,
    NotPiecewiseLinear,
    UnboundOperandError,
)
from .interval import Interval
from .interval import distance as iv_distance
from .piecewise import Domain, HFunction
from .scalars import (
    format_scalar,
    parse_scalar,
    set_mode,
    set_sample_count,
    set_seed,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_UNBOUND = 3
EXIT_DOMAIN = 4
EXIT_NOT_HCONT = 5
EXIT_NOT_PL = 6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hfring",
        description="Interval-valued function ring: evaluation, ring "
        "operations by three routes, and verification suites.",
    )
    parser.add_argument("--mode", choices=("rational", "float"), default="rational")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="float-mode comparison tolerance")
    parser.add_argument("--seed", type=int, default=8201,
                        help="seed for every deterministic sampling")
    parser.add_argument("--samples", type=int, default=128,
                        help="sample count for sampled checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a function at points")
    p_eval.add_argument("defs")
    p_eval.add_argument("name")
    p_eval.add_argument("points", nargs="+")

    p_op = sub.add_parser("op", help="ring operation over an expression")
    p_op.add_argument("defs")
    p_op.add_argument("expr", help="expression over bound names with + and *")
    p_op.add_argument("--def", dest="definition", type=int, choices=(1, 2, 3), default=1)
    p_op.add_argument("--check-all", action="store_true",
                      help="run every applicable route and compare")
    p_op.add_argument("--depth", type=int, default=4096)
    p_op.add_argument("--declare", nargs=3, action="append", metavar=("X", "LIMINF", "LIMSUP"),
                      default=[], help="declared envelope for the pointwise result at X")
    p_op.add_argument("-o", "--output", default="-")

    p_ring = sub.add_parser("verify-ring", help="check the ring axioms on a random suite")
    p_ring.add_argument("--count", type=int, default=200)
    p_ring.add_argument("--max-jumps", type=int, default=4)
    p_ring.add_argument("--domain", nargs=2, default=("-1", "1"))
    p_ring.add_argument("--mutate", choices=("none", "skip-completion"), default="none",
                        help="test hook: deliberately break the operations")
    p_ring.add_argument("-o", "--output", default="-")

    p_sample = sub.add_parser("sample", help="uniform sampling to CSV")
    p_sample.add_argument("defs")
    p_sample.add_argument("name")
    p_sample.add_argument("x0")
    p_sample.add_argument("h")
    p_sample.add_argument("n", type=int)
    p_sample.add_argument("output")

    p_grid = sub.add_parser("grid-converge",
                            help="grid-engine error against the exact ring result")
    p_grid.add_argument("defs")
    p_grid.add_argument("expr")
    p_grid.add_argument("--h", dest="steps", nargs="+", required=True)
    p_grid.add_argument("--x0", default=None)
    p_grid.add_argument("--width", default=None)
    p_grid.add_argument("-o", "--output", default="-")

    p_cmp = sub.add_parser("compare-defs",
                           help="order-limit route against the completion route")
    p_cmp.add_argument("defs")
    p_cmp.add_argument("f")
    p_cmp.add_argument("g")
    p_cmp.add_argument("--depth", type=int, default=4096)
    p_cmp.add_argument("--tol", dest="cmp_tol", type=float, default=1e-3)
    p_cmp.add_argument("--ops", default="plus,times")
    p_cmp.add_argument("--out-csv", default="compare_defs_points.csv")
    p_cmp.add_argument("-o", "--output", default="-")

    p_val = sub.add_parser("validate",
                           help="Hausdorff continuity and envelope validation")
    p_val.add_argument("defs")
    p_val.add_argument("-o", "--output", default="-")
    return parser


def _emit(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8") as fp:
            fp.write(text)


def _load(path: str) -> Dict[str, HFunction]:
    try:
        return formats.load_defs(path)
    except (OSError, json.JSONDecodeError, ExprSyntaxError, EngineError) as exc:
        raise _CliError(EXIT_PARSE, f"cannot load {path}: {exc}") from exc


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _declared_map(declare_args) -> Optional[dict]:
    if not declare_args:
        return None
    return {
        parse_scalar(x): (parse_scalar(a), parse_scalar(b))
        for x, a, b in declare_args
    }


def _op_result(args, bindings: Dict[str, HFunction]):
    try:
        tree = algebra.parse_operand_expr(args.expr)
    except ExprSyntaxError as exc:
        raise _CliError(EXIT_PARSE, str(exc)) from exc
    declared = _declared_map(args.declare)
    try:
        if isinstance(tree, algebra.OperandRef) and not declared:
            return algebra.eval_expr(tree, bindings, mode="ring"), {}
        if isinstance(tree, (algebra.TreePlus, algebra.TreeTimes)) and all(
            isinstance(child, algebra.OperandRef) for child in (tree.left, tree.right)
        ):
            f = bindings[_name_of(tree.left)]
            g = bindings[_name_of(tree.right)]
            return _binary_op(tree, f, g, declared, args), {"binary": True}
        if declared:
            raise _CliError(
                EXIT_PARSE, "--declare applies to a single binary operation"
            )
        return algebra.eval_expr(tree, bindings, mode="ring"), {}
    except KeyError as exc:
        raise _CliError(EXIT_UNBOUND, f"unbound name {exc.args[0]!r}") from exc
    except UnboundOperandError as exc:
        raise _CliError(EXIT_UNBOUND, str(exc)) from exc
    except NotHausdorffContinuous as exc:
        raise _CliError(EXIT_NOT_HCONT, str(exc)) from exc
    except NotPiecewiseLinear as exc:
        raise _CliError(EXIT_NOT_PL, str(exc)) from exc


def _name_of(node) -> str:
    return node.name


def _binary_op(tree, f, g, declared, args) -> HFunction:
    plus = isinstance(tree, algebra.TreePlus)
    routes: Dict[str, HFunction] = {}
    wanted = {1, 2, 3} if args.check_all else {args.definition}
    if 1 in wanted:
        op = algebra.oplus_def1 if plus else algebra.otimes_def1
        routes["def1"] = op(f, g, declared).result
    if 2 in wanted:
        op = algebra.oplus_def2 if plus else algebra.otimes_def2
        routes["def2"] = op(f, g, declared).result
    if 3 in wanted:
        if not (f.is_piecewise_linear and g.is_piecewise_linear):
            if args.check_all:
                wanted.discard(3)
            else:
                raise NotPiecewiseLinear(
                    "--def 3 needs piecewise-linear operands"
                )
        else:
            if declared:
                raise _CliError(
                    EXIT_PARSE, "--declare is not meaningful for the order-limit route"
                )
            op = order.oplus_def3 if plus else order.otimes_def3
            routes["def3"] = op(f, g, depth=args.depth).result
    names = sorted(routes)
    reference = routes[names[0]]
    for name in names[1:]:
        deviation = float(order.max_deviation(routes[name], reference))
        if deviation > args.tol:
            raise _CliError(
                EXIT_FAILED,
                f"{name} deviates from {names[0]} by {deviation} (tol {args.tol})",
            )
    return routes[f"def{args.definition}"] if f"def{args.definition}" in routes else reference


def cmd_eval(args) -> int:
    bindings = _load(args.defs)
    if args.name not in bindings:
        raise _CliError(EXIT_UNBOUND, f"unbound name {args.name!r}")
    f = bindings[args.name]
    lines = []
    for text in args.points:
        try:
            x = parse_scalar(text)
            value = f.eval_at(x)
        except DomainError as exc:
            raise _CliError(EXIT_DOMAIN, str(exc)) from exc
        except (ValueError, EngineError) as exc:
            raise _CliError(EXIT_PARSE, f"bad point {text!r}: {exc}") from exc
        lines.append(
            f"{format_scalar(x)} {format_scalar(value.lo)} {format_scalar(value.hi)}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_op(args) -> int:
    bindings = _load(args.defs)
    result, _ = _op_result(args, bindings)
    _emit(formats.dumps_json(formats.hfunction_to_json(result)), args.output)
    return EXIT_OK


def cmd_verify_ring(args) -> int:
    domain = Domain.of(parse_scalar(args.domain[0]), parse_scalar(args.domain[1]))
    functions = suite.h_continuous_suite(
        args.seed, args.count, domain, args.max_jumps
    )
    if args.mutate == "skip-completion":
        add_op = lambda a, b: pw.pointwise_add(a, b)
        mul_op = lambda a, b: pw.pointwise_mul(a, b)
        report = algebra.verify_ring(functions, add_op, mul_op)
    else:
        report = algebra.verify_ring(functions)
    _emit(formats.dumps_json(report.to_json()), args.output)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def cmd_sample(args) -> int:
    bindings = _load(args.defs)
    if args.name not in bindings:
        raise _CliError(EXIT_UNBOUND, f"unbound name {args.name!r}")
    try:
        grid = baire.grid_sample(
            bindings[args.name], parse_scalar(args.x0), parse_scalar(args.h), args.n
        )
    except DomainError as exc:
        raise _CliError(EXIT_DOMAIN, str(exc)) from exc
    with open(args.output, "w", encoding="utf-8", newline="") as fp:
        formats.grid_to_csv(grid, fp)
    return EXIT_OK


def _grid_window(args, result: HFunction):
    if args.x0 is not None and args.width is not None:
        return parse_scalar(args.x0), parse_scalar(args.width)
    domain = result.domain
    if domain.lo is None or domain.hi is None:
        raise _CliError(
            EXIT_DOMAIN, "grid-converge needs --x0/--width on unbounded domains"
        )
    width = domain.hi - domain.lo
    return domain.lo + width / 16, width - width / 8


def cmd_grid_converge(args) -> int:
    bindings = _load(args.defs)
    try:
        tree = algebra.parse_operand_expr(args.expr)
        exact = algebra.eval_expr(tree, bindings, mode="ring")
        pointwise = algebra.eval_expr(tree, bindings, mode="pointwise")
    except ExprSyntaxError as exc:
        raise _CliError(EXIT_PARSE, str(exc)) from exc
    except UnboundOperandError as exc:
        raise _CliError(EXIT_UNBOUND, str(exc)) from exc
    except NotHausdorffContinuous as exc:
        raise _CliError(EXIT_NOT_HCONT, str(exc)) from exc
    steps = [parse_scalar(h) for h in args.steps]
    x0, width = _grid_window(args, exact)
    # measurement points stay a fixed margin away from every jump of the
    # sampled data, so the one-cell smear never enters the error
    margin = 2 * max(steps)
    jumps = {p.x for p in exact.points} | {p.x for p in pointwise.points}
    rows = []
    for h in steps:
        n = int(width / h) + 1
        grid = baire.grid_sample(pointwise, x0, h, n)
        smoothed = baire.grid_fis(grid)
        worst = 0.0
        for i in range(1, len(smoothed.values) - 1):
            x = smoothed.x(i)
            if any(abs(x - j) <= margin for j in jumps):
                continue
            worst = max(worst, float(iv_distance(smoothed.values[i], exact.eval_at(x))))
        rows.append({"h": scalar_json(h), "max_error": worst})
    _emit(formats.dumps_json({"expr": args.expr, "errors": rows}), args.output)
    return EXIT_OK


def scalar_json(value):
    return formats.scalar_to_json(value)


def cmd_compare_defs(args) -> int:
    bindings = _load(args.defs)
    for name in (args.f, args.g):
        if name not in bindings:
            raise _CliError(EXIT_UNBOUND, f"unbound name {name!r}")
    f, g = bindings[args.f], bindings[args.g]
    if not (f.is_piecewise_linear and g.is_piecewise_linear):
        raise _CliError(EXIT_NOT_PL, "compare-defs needs piecewise-linear operands")
    try:
        ops = [o.strip() for o in args.ops.split(",") if o.strip()]
        report = {}
        csv_rows: List[List[str]] = [["op", "x", "def3_lo", "def3_hi", "def1_lo", "def1_hi"]]
        for op in ops:
            if op == "plus":
                d3 = order.oplus_def3(f, g, depth=args.depth)
            elif op == "times":
                d3 = order.otimes_def3(f, g, depth=args.depth)
            else:
                raise _CliError(EXIT_PARSE, f"unknown op {op!r} (use plus,times)")
            reference = d3.witnesses["def1"]
            xs = pw.func_sample_points(reference, 256, tag="cmp")
            for x in xs:
                a = d3.result.eval_at(x)
                b = reference.eval_at(x)
                csv_rows.append(
                    [op] + [format_scalar(v) for v in (x, a.lo, a.hi, b.lo, b.hi)]
                )
            report[op] = {
                "max_abs_deviation": float(d3.max_deviation),
                "within_tol": float(d3.max_deviation) <= args.cmp_tol,
            }
    except NotHausdorffContinuous as exc:
        raise _CliError(EXIT_NOT_HCONT, str(exc)) from exc
    except NotPiecewiseLinear as exc:
        raise _CliError(EXIT_NOT_PL, str(exc)) from exc
    with open(args.out_csv, "w", encoding="utf-8", newline="") as fp:
        import csv as _csv

        _csv.writer(fp).writerows(csv_rows)
    payload = {
        "depth": args.depth,
        "tol": args.cmp_tol,
        "ops": report,
        "per_point_table": args.out_csv,
    }
    _emit(formats.dumps_json(payload), args.output)
    ok = all(entry["within_tol"] for entry in report.values())
    return EXIT_OK if ok else EXIT_FAILED


def cmd_validate(args) -> int:
    bindings = _load(args.defs)
    payload = {}
    all_ok = True
    for name, f in sorted(bindings.items()):
        checks = pw.validate_envelopes(f)
        entry = {
            "h_continuous": pw.is_H_continuous(f),
            "s_continuous": pw.is_S_continuous(f),
            "envelopes": [
                {
                    "x": None if c.x is None else formats.scalar_to_json(c.x),
                    "side": c.side,
                    "provenance": c.provenance,
                    "passed": c.passed,
                    "message": c.message,
                }
                for c in checks
            ],
        }
        if not entry["h_continuous"] or not all(c.passed for c in checks):
            all_ok = False
        payload[name] = entry
    _emit(formats.dumps_json(payload), args.output)
    return EXIT_OK if all_ok else EXIT_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_mode(args.mode, args.tol)
    set_seed(args.seed)
    set_sample_count(args.samples)
    handlers = {
        "eval": cmd_eval,
        "op": cmd_op,
        "verify-ring": cmd_verify_ring,
        "sample": cmd_sample,
        "grid-converge": cmd_grid_converge,
        "compare-defs": cmd_compare_defs,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except ExprSyntaxError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except NotHausdorffContinuous as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_HCONT
    except NotPiecewiseLinear as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_PL
    except EngineError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
