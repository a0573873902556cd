"""
Command-line entry point: ``python -m stabkit <subcommand> ...``.

Exit codes: 0 success, 2 usage or input error, 3 a post-check or an
oracle/brute-force mismatch failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import Sequence

import pandas as pd

from stabkit import __version__, config
from stabkit.batch import run_fixtures
from stabkit.decoder import (
    compare_decoders,
    coset_enumerator,
    degeneracy_threshold,
    dqmld,
    dqmld_from_enumerators,
    p_from_p_tilde,
    qmld,
    qmld_class_from_enumerators,
    two_class_enumerators,
)
from stabkit.errors import (
    Exhausted,
    NoCrossing,
    OracleError,
    PostCheckFailed,
    RoundingAmbiguous,
    StabkitError,
)
from stabkit.exact import parse_rational
from stabkit.loader import load_channel, load_classical_code, load_stabilizer_code, load_syndrome
from stabkit.reduction import brute_force_we, rounding_robustness_check, run_reduction
from stabkit.report import dumps, render_frame, write_json
from stabkit.shor_sim import CLASS_ORDER, brute_force_class_probs, build_shor, class_probs_formula, leakage_bound_check
from stabkit.stabilizer import LogicalLabel, decompose

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CHECK = 3


class UsageError(Exception):
    pass


def _csv_row(values: Sequence[int]) -> str:
    return ",".join(str(v) for v in values)


def _parse_grid(text: str) -> list[Fraction]:
    try:
        grid = [parse_rational(tok) for tok in text.split(",") if tok.strip()]
    except StabkitError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if not grid or any(not 0 < p < 1 for p in grid):
        raise UsageError(f"grid must be a comma-separated list of rationals in (0, 1), got {text!r}")
    return grid


# ==========================================
# Subcommands
# ==========================================
def cmd_we_brute(args: argparse.Namespace) -> int:
    code = load_classical_code(args.code)
    we = brute_force_we(code)
    if args.format == "json":
        print(dumps({"code": args.code, "we": list(we)}))
    else:
        print(_csv_row(we))
    return EXIT_OK


def cmd_we_extract(args: argparse.Namespace) -> int:
    code = load_classical_code(args.code)

    try:
        result = run_reduction(code)
    except (RoundingAmbiguous, PostCheckFailed, Exhausted, NoCrossing, OracleError) as exc:
        logger.error("reduction failed: %s", exc)
        return EXIT_CHECK

    if args.trace:
        write_json(args.trace, result.transcript)
        logger.info("transcript written to %s", args.trace)

    payload = {"code": args.code, "we": list(result.we), "b": list(result.b),
               "queries": result.transcript.total_queries}

    status = EXIT_OK
    if not args.no_verify:
        expected = brute_force_we(code)
        payload["verified"] = tuple(result.we) == expected
        if not payload["verified"]:
            logger.error("oracle gave %s, brute force gives %s", result.we, expected)
            status = EXIT_CHECK

    if args.robustness_trials:
        report = rounding_robustness_check(
            result.instances, result.crossings, trials=args.robustness_trials, seed=args.seed
        )
        payload["robustness"] = report
        if not report.ok:
            status = EXIT_CHECK

    if args.format == "json":
        print(dumps(payload))
    else:
        print(_csv_row(result.we))
    return status


def cmd_decode(args: argparse.Namespace) -> int:
    code = load_stabilizer_code(args.code)
    ch = load_channel(args.channel, code.n)
    s = load_syndrome(args.syndrome, code)

    payload: dict = {"syndrome": str(s)}
    if args.decoder in ("dqmld", "both"):
        payload["dqmld"] = dqmld(code, ch, s).to_json()
    if args.decoder in ("qmld", "both"):
        best = qmld(code, ch, s)
        payload["qmld"] = {"error": str(best), "class": decompose(code, best).label.name}

    print(dumps(payload))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    code = load_stabilizer_code(args.code)
    s = load_syndrome(args.syndrome, code)
    try:
        label = LogicalLabel.from_name(args.label) if code.k else LogicalLabel.trivial(0)
    except StabkitError as exc:
        raise UsageError(str(exc)) from None
    if label.k != code.k:
        raise UsageError(f"label {args.label!r} must have {code.k} letters")

    enumerator = coset_enumerator(code, s, label)
    df = pd.DataFrame({"weight": range(len(enumerator.counts)), "count": enumerator.counts})
    if not args.all_weights:
        df = df[df["count"] > 0]
    sys.stdout.write(render_frame(df, args.format))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    if args.two_class:
        m, a, b, c = args.two_class
        enumerators = two_class_enumerators(m, a, b, c)
        threshold = degeneracy_threshold(m, a, c)
        rows = []
        for pt in _parse_grid(args.pt_grid):
            p = p_from_p_tilde(pt)
            d_label = dqmld_from_enumerators(enumerators, p)
            q_label = qmld_class_from_enumerators(enumerators)
            rows.append({
                "p_tilde": pt,
                "above_threshold": pt > threshold,
                "qmld_class": q_label.name,
                "dqmld_class": d_label.name,
                "agree": q_label == d_label,
            })
        df = pd.DataFrame(rows)
    else:
        if not args.code:
            raise UsageError("compare needs --code or --two-class")
        code = load_stabilizer_code(args.code)
        df = compare_decoders(code, _parse_grid(args.p_grid))

    logger.info("%d disagreements in %d rows", int((~df["agree"]).sum()), len(df))
    sys.stdout.write(render_frame(df, args.format))
    return EXIT_OK


def cmd_shor_validate(args: argparse.Namespace) -> int:
    p = parse_rational(args.p)
    lattice = build_shor(args.n1, args.n2)
    formula = class_probs_formula(args.n1, args.n2, p, args.ell)
    brute = brute_force_class_probs(lattice, p, args.ell)

    df = pd.DataFrame({"class": CLASS_ORDER, "formula": formula, "brute_force": brute})
    df["match"] = df["formula"] == df["brute_force"]
    sys.stdout.write(render_frame(df, args.format))

    status = EXIT_OK if bool(df["match"].all()) else EXIT_CHECK
    if p < Fraction(1, 2):
        leak = leakage_bound_check(args.n1, args.n2, p)
        print(dumps({"leakage": leak.leakage, "bound": leak.bound, "holds": leak.ok}), file=sys.stderr)
        if leak.ok is False:
            status = EXIT_CHECK
    return status


def cmd_fixtures(args: argparse.Namespace) -> int:
    results = run_fixtures(args.list, args.output, verify=not args.no_verify)
    return EXIT_OK if all(r["match"] for r in results) else EXIT_CHECK


# ==========================================
# Parser
# ==========================================
def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, dest="verbosity",
                        help="more log output on stderr (repeatable)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    parser = argparse.ArgumentParser(
        prog="stabkit",
        description="Exact stabilizer-code decoding and weight-enumerator extraction",
    )
    parser.add_argument("--version", action="version", version=f"stabkit {__version__}")
    sub = parser.add_subparsers(title="subcommands", metavar="", dest="cmd")

    p = sub.add_parser("we-extract", parents=[common], help="weight enumerator through the decoder oracle")
    p.add_argument("--code", required=True, help="classical generator matrix file")
    p.add_argument("--trace", help="write the query transcript as JSON")
    p.add_argument("--no-verify", action="store_true", help="skip the brute-force comparison")
    p.add_argument("--robustness-trials", type=int, default=0,
                   help="perturbed re-solves of the final constraint system")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_we_extract)

    p = sub.add_parser("we-brute", parents=[common], help="weight enumerator by enumerating codewords")
    p.add_argument("--code", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_we_brute)

    p = sub.add_parser("decode", parents=[common], help="QMLD / DQMLD on one syndrome")
    p.add_argument("--code", required=True, help="stabilizer code file")
    p.add_argument("--channel", required=True, help='e.g. "xz:p=1/8", "depol:p=1/10" or a JSON file')
    p.add_argument("--syndrome", required=True, help="0/1 string, one bit per generator")
    p.add_argument("--decoder", choices=("dqmld", "qmld", "both"), default="both")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("enumerate", parents=[common], help="coset weight enumerator")
    p.add_argument("--code", required=True)
    p.add_argument("--syndrome", required=True)
    p.add_argument("--label", default="I", help="one I/X/Y/Z letter per logical qubit")
    p.add_argument("--all-weights", action="store_true", help="keep zero buckets")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("compare", parents=[common], help="QMLD vs DQMLD disagreement scan")
    p.add_argument("--code")
    p.add_argument("--p-grid", default="1/64,1/32,1/16,1/8")
    p.add_argument("--two-class", type=_int_list, metavar="M,A,B,C",
                   help="engineered two-class model instead of a code file")
    p.add_argument("--pt-grid", default="1/8,1/4,3/8,1/2,5/8,3/4")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("shor-validate", parents=[common], help="closed-form lattice probabilities vs brute force")
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_shor_validate)

    p = sub.add_parser("fixtures", parents=[common], help="batch we-extract over the fixture list")
    p.add_argument("--list", default=str(config.FIXTURE_LIST))
    p.add_argument("--output", default=str(config.REPORT_FILE))
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * getattr(args, "verbosity", 0)),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if getattr(args, "func", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, ValueError) as exc:
        print(f"stabkit {args.cmd}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StabkitError as exc:
        print(f"stabkit {args.cmd}: {exc}", file=sys.stderr)
        return EXIT_CHECK
