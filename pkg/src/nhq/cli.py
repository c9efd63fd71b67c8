"""Batch command-line interface.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 dimension
error.  Randomized suites take explicit seeds and fixed defaults so runs
are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .errors import (
    CompositionError,
    DimensionError,
    ExpressionError,
    MismatchError,
    QuiverFormatError,
)
from .expr import (
    format_hh0,
    format_path,
    format_path_element,
    format_poly,
    format_qpa,
    format_weyl,
    parse_hh0_element,
    parse_path_element,
    parse_qpa_element,
)
from .necklace import double_bracket, moment_map, necklace_bracket
from .quiver import parse_quiver
from .repspace import make_dimension_vector
from .schedler import make_params, qpa_comm, qpa_mul
from .suites import SUITES
from .trace import kernel_constraint, solve_chi, trace_classical, trace_quantum


def _parse_assignments(text: str, what: str) -> dict:
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ExpressionError(f"{what} entries look like name=value, got {piece!r}")
        name, _, value = piece.partition("=")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ExpressionError(f"bad rational {value!r} in {what}") from None
    return out


def _load_quiver(args):
    if not getattr(args, "quiver", None):
        return None
    with open(args.quiver, "r", encoding="utf-8") as fh:
        return parse_quiver(fh.read())


def _require_quiver(args):
    quiver = _load_quiver(args)
    if quiver is None:
        raise ExpressionError("this command needs a quiver file (-q)")
    return quiver


def _get_dim(args, quiver, required=True):
    if not getattr(args, "dim", None):
        if required:
            raise DimensionError("this command needs --dim k=v,...")
        return None
    pairs = _parse_assignments(args.dim, "--dim")
    int_pairs = {}
    for key, value in pairs.items():
        if value.denominator != 1:
            raise DimensionError(f"dimension {value} is not an integer")
        int_pairs[key] = int(value)
    return make_dimension_vector(quiver, int_pairs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhq",
        description="Exact computations in the necklace Lie algebra, the quantum "
        "path algebra, and Weyl operators on quiver representation spaces.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, dim=False, params=False, suite=False):
        p.add_argument("-q", "--quiver", help="quiver file (JSON)")
        p.add_argument("--json", action="store_true", help="machine-readable reports")
        if dim:
            p.add_argument("--dim", help="dimension vector k=v,...")
        if params:
            p.add_argument("--r", help="order-h weights k=v,...")
            p.add_argument("--lambda", dest="lam", help="moment deformation k=v,...")
        if suite:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--cases", type=int, default=50)

    p = sub.add_parser("bracket", help="necklace Lie bracket of two classes")
    common(p)
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("dbracket", help="double bracket of two path elements")
    common(p)
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("qmul", help="product in the quantum path algebra")
    common(p)
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("qcomm", help="commutator in the quantum path algebra")
    common(p)
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("trace", help="classical trace of a necklace class")
    common(p, dim=True)
    p.add_argument("x")

    p = sub.add_parser("qtrace", help="quantum trace of a configuration")
    common(p, dim=True)
    p.add_argument("x")

    p = sub.add_parser("moment", help="the moment element and its components")
    common(p, params=True)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p, dim=True, params=True, suite=True)
    p.add_argument("suite", choices=sorted(SUITES))

    p = sub.add_parser("solve-chi", help="solve the reduction character")
    common(p, dim=True, params=True)

    p = sub.add_parser("kernel", help="constraints on r from the kernel of tau")
    common(p, dim=True, params=True)

    return parser


def _emit_reports(reports, as_json: bool) -> int:
    failed = 0
    for report in reports:
        print(report.to_json() if as_json else report.to_text())
        if not report.ok:
            failed += 1
    verified = len(reports) - failed
    if not as_json:
        print(f"summary: {verified} ok, {failed} failed")
    return 1 if failed else 0


def _dispatch(args) -> int:
    verb = args.verb
    if verb in ("bracket", "dbracket", "qmul", "qcomm"):
        quiver = _require_quiver(args)
        if verb == "bracket":
            x = parse_hh0_element(quiver, args.x)
            y = parse_hh0_element(quiver, args.y)
            print(format_hh0(necklace_bracket(x, y)))
        elif verb == "dbracket":
            x = parse_path_element(quiver, args.x)
            y = parse_path_element(quiver, args.y)
            result = double_bracket(x, y)
            pieces = []
            from .expr import _coeff_body, _join_terms  # canonical term joiner

            for (p1, p2), coeff in sorted(
                result.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
            ):
                body = f"{format_path(quiver, p1)} (x) {format_path(quiver, p2)}"
                pieces.append(_coeff_body(coeff, body))
            print(_join_terms(pieces))
        elif verb == "qmul":
            x = parse_qpa_element(quiver, args.x)
            y = parse_qpa_element(quiver, args.y)
            print(format_qpa(qpa_mul(x, y)))
        else:
            x = parse_qpa_element(quiver, args.x)
            y = parse_qpa_element(quiver, args.y)
            print(format_qpa(qpa_comm(x, y)))
        return 0

    if verb == "trace":
        quiver = _require_quiver(args)
        dim = _get_dim(args, quiver)
        x = parse_hh0_element(quiver, args.x)
        print(format_poly(trace_classical(x, dim)))
        return 0

    if verb == "qtrace":
        quiver = _require_quiver(args)
        dim = _get_dim(args, quiver)
        x = parse_qpa_element(quiver, args.x)
        print(format_weyl(trace_quantum(x, dim)))
        return 0

    if verb == "moment":
        quiver = _require_quiver(args)
        lam = _parse_assignments(args.lam, "--lambda") if args.lam else None
        data = moment_map(quiver, lam)
        print(f"w = {format_path_element(data.element)}")
        for i, name in enumerate(quiver.vertices):
            print(f"w_{name} = {format_path_element(data.components[i])}")
        return 0

    if verb == "verify":
        quiver = _load_quiver(args)
        dim = _get_dim(args, quiver, required=False) if quiver else None
        params = None
        if quiver and (args.r or args.lam):
            params = make_params(
                quiver,
                _parse_assignments(args.r, "--r") if args.r else None,
                _parse_assignments(args.lam, "--lambda") if args.lam else None,
            )
        suite_args = {
            "seed": args.seed,
            "cases": args.cases,
            "quiver": quiver,
            "dim": dim,
            "params": params,
        }
        reports = SUITES[args.suite](suite_args)
        return _emit_reports(reports, args.json)

    if verb == "solve-chi":
        quiver = _require_quiver(args)
        dim = _get_dim(args, quiver)
        params = make_params(
            quiver,
            _parse_assignments(args.r, "--r") if args.r else None,
            _parse_assignments(args.lam, "--lambda") if args.lam else None,
        )
        report, _ = solve_chi(quiver, dim, params)
        return _emit_reports([report], args.json)

    if verb == "kernel":
        quiver = _require_quiver(args)
        dim = _get_dim(args, quiver)
        params = make_params(
            quiver,
            _parse_assignments(args.r, "--r") if args.r else None,
            _parse_assignments(args.lam, "--lambda") if args.lam else None,
        )
        report = kernel_constraint(quiver, dim, params)
        return _emit_reports([report], args.json)

    raise AssertionError(f"unhandled verb {verb}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (QuiverFormatError, ExpressionError, CompositionError, MismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
