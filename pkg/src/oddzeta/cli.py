"""Command-line front end.

Exit codes: 0 success (or every verification passed), 1 a verification
failed, 2 bad usage or a domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import exact, identities, realseries
from .exact import format_rational, parse_rational
from .identities import IdentityParams, IdentityReport, QuasiZetaSequences

__all__ = ["main", "run", "report_grid", "build_parser"]

PREC_MIN, PREC_MAX = 64, 8192
DEFAULT_PREC = 256
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

VERIFY_CHOICES = ("ramanujan", "coth", "lerch", "convolution", "telescope")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with one-line diagnostics."""

    def error(self, message):
        raise UsageError(message)


def _prec(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid precision {text!r}") from None
    if not PREC_MIN <= value <= PREC_MAX:
        raise argparse.ArgumentTypeError(f"prec must be in [{PREC_MIN}, {PREC_MAX}]")
    return value


def _positive_rational(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if q <= 0:
        raise argparse.ArgumentTypeError("t must be positive")
    return q


def _rational_list(text: str) -> List[Fraction]:
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("t-list must not be empty")
    return [_positive_rational(item) for item in items]


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=_prec, default=DEFAULT_PREC, help="working precision in bits")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")

    hooks = _Parser(add_help=False)
    hooks.add_argument("--flip-coeff", type=_non_negative, metavar="K",
                       help="negative control: negate Bernoulli coefficient K")
    hooks.add_argument("--perturb-constraint", type=_non_negative, metavar="BITS",
                       help="negative control: scale beta by 1 + 2^-BITS")

    parser = _Parser(prog="oddzeta", description="Ramanujan's odd zeta identity, evaluated and verified.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bernoulli", parents=[common], help="exact Bernoulli number B_n")
    p.add_argument("n", type=_non_negative)

    p = sub.add_parser("zeta", parents=[common], help="zeta(s) by Euler-Maclaurin")
    p.add_argument("s", type=int)

    p = sub.add_parser("lambert", parents=[common], help="sum n^-s / (e^(2 pi t n) - 1)")
    p.add_argument("s", type=int)
    p.add_argument("--t", type=_positive_rational, required=True)

    p = sub.add_parser("fast-zeta", parents=[common], help="zeta(4M+3) from the Lerch rearrangement")
    p.add_argument("--m", type=_non_negative, required=True)

    p = sub.add_parser("verify", parents=[common, hooks], help="verify one identity instance")
    p.add_argument("identity", choices=VERIFY_CHOICES)
    p.add_argument("--m", type=_non_negative, required=True)
    p.add_argument("--t", type=_positive_rational, default=Fraction(1))
    p.add_argument("--n-trunc", type=int, default=None, help="truncation for the double-sum checks")

    p = sub.add_parser("report", parents=[common, hooks], help="verify a grid of (m, t) cells")
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--t-list", type=_rational_list, required=True)
    return parser


# -- commands ----------------------------------------------------------------

def _beta_shift(args) -> Optional[int]:
    bits = getattr(args, "perturb_constraint", None)
    return None if bits is None else -bits


def _verify(args) -> IdentityReport:
    name = args.identity
    if name == "lerch":
        return identities.verify_lerch(args.m, args.prec)
    if args.m < 1:
        raise ValueError(f"m must be >= 1 for {name}")
    if name in ("ramanujan", "coth"):
        params = IdentityParams(args.m, args.t, args.prec, beta_shift_log2=_beta_shift(args))
        fn = identities.verify_ramanujan if name == "ramanujan" else identities.verify_coth_variant
        return fn(params, flip_coeff=args.flip_coeff)
    if name == "convolution":
        return identities.verify_convolution_recursion(args.m, args.n_trunc or 4000, args.prec)
    seqs = QuasiZetaSequences.for_ramanujan(args.t, args.m, args.prec)
    return identities.telescope_check(seqs, args.n_trunc or 3000, args.prec)


def report_grid(m_max: int, t_list: Sequence[Fraction], prec: int = DEFAULT_PREC,
                flip_coeff: Optional[int] = None, beta_shift_log2: Optional[int] = None) -> dict:
    """Ramanujan and coth reports for every (m, t), plus the Lerch case for odd m.

    Rows are in grid order: for each m, each t, ramanujan then coth_variant;
    then lerch for that m when 2m + 1 = 4k + 3.
    """
    if m_max < 1:
        raise ValueError("m-max must be >= 1")
    if not t_list:
        raise ValueError("t-list must not be empty")
    reports: List[IdentityReport] = []
    for m in range(1, m_max + 1):
        for t in t_list:
            params = IdentityParams(m, t, prec, beta_shift_log2=beta_shift_log2)
            reports.append(identities.verify_ramanujan(params, flip_coeff=flip_coeff))
            reports.append(identities.verify_coth_variant(params, flip_coeff=flip_coeff))
        if m % 2 == 1:
            reports.append(identities.verify_lerch((m - 1) // 2, prec))
    return {
        "all_pass": all(r.passed for r in reports),
        "m_max": m_max,
        "t_list": [format_rational(t) for t in t_list],
        "prec_bits": prec,
        "reports": [r.to_dict() for r in reports],
    }


def _grid_text(grid: dict) -> str:
    lines = []
    for row in grid["reports"]:
        lines.append(
            f"{row['identity']:<13} m={row['m']:<3} t={row['t']:<6} "
            f"log2|diff|={row['abs_diff_log2']:9.2f}  tol={row['tolerance_log2']:8.2f}  "
            f"{'PASS' if row['pass'] else 'FAIL'}"
        )
    lines.append(f"all_pass: {str(grid['all_pass']).lower()}")
    return "\n".join(lines)


def _value_payload(args) -> dict:
    """Payload for the value-producing commands, shared by text and JSON."""
    cmd = args.command
    if cmd == "bernoulli":
        return {"n": args.n, "value": format_rational(exact.bernoulli(args.n))}
    if cmd == "zeta":
        if args.s < 2:
            raise ValueError(f"zeta needs s >= 2, got {args.s}")
        out = {"s": args.s, "prec_bits": args.prec, "value": realseries.zeta_integer(args.s, args.prec).to_decimal()}
        if args.s % 2 == 0:
            out["pi_power_coefficient"] = format_rational(exact.euler_zeta_coefficient(args.s // 2))
        return out
    if cmd == "lambert":
        bits = args.prec + realseries.GUARD_BITS
        with realseries.working(bits):
            a = realseries.to_mpfr(args.t, bits) * realseries.pi(bits).value
        val, trunc = realseries.lambert_sum(args.s, a, args.prec)
        return {"s": args.s, "t": format_rational(args.t), "prec_bits": args.prec,
                "value": val.to_decimal(), "truncation": trunc.to_dict()}
    if cmd == "fast-zeta":
        val, trunc = identities.fast_odd_zeta_series(args.m, args.prec)
        return {"m": args.m, "s": 4 * args.m + 3, "prec_bits": args.prec,
                "value": val.to_decimal(), "truncation": trunc.to_dict()}
    raise AssertionError(cmd)


def _value_text(cmd: str, payload: dict) -> str:
    if cmd == "bernoulli":
        return payload["value"]
    lines = [payload["value"]]
    if "pi_power_coefficient" in payload:
        lines.append(f"= {payload['pi_power_coefficient']} * pi^{payload['s']}")
    if "truncation" in payload:
        tr = payload["truncation"]
        lines.append(f"terms: {tr['terms']}  tail <= 2^{tr['tail_log2']:.2f}")
    return "\n".join(lines)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            report = _verify(args)
            text = report.to_json(indent=2) if args.format == "json" else report.to_text()
            code = EXIT_OK if report.passed else EXIT_FAIL
        elif args.command == "report":
            grid = report_grid(args.m_max, args.t_list, args.prec,
                               flip_coeff=args.flip_coeff, beta_shift_log2=_beta_shift(args))
            text = json.dumps(grid, indent=2) if args.format == "json" else _grid_text(grid)
            code = EXIT_OK if grid["all_pass"] else EXIT_FAIL
        else:
            payload = _value_payload(args)
            text = json.dumps(payload, indent=2) if args.format == "json" else _value_text(args.command, payload)
            code = EXIT_OK
    except (UsageError, ValueError) as exc:
        print(f"oddzeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, args.out)
    return code


def main() -> None:
    sys.exit(run())
