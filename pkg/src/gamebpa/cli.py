"""Command-line front end: ``gamebpa normalize|bisim|lts|play|strategies|selftest``.

Exit codes: 0 success, 1 not bisimilar, 2 parse or usage error, 3 step or
state cap exceeded, 4 play result disagrees with the brute-force oracle,
5 ownership or game-tree validation failure, 6 self-test counterexample.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import properties
from .games import (
    GameError,
    GameWarning,
    enumerate_strategies,
    export_tree_dot,
    game_tree_from_term,
    play_term,
    strategy_to_term,
    verify_play_terms,
)
from .rewrite import (
    DEFAULT_STEP_CAP,
    FULL,
    MODES,
    RuleId,
    StepLimitExceeded,
    normalize,
    trace_to_json,
)
from .sos import DEFAULT_STATE_CAP, StateLimitExceeded, bisimilar, build_lts, export_dot
from .syntax import ParseError, parse_game_decl, parse_term, print_term
from .terms import Deadlock, validate_ownership

EXIT_OK = 0
EXIT_NOT_BISIMILAR = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_ORACLE = 4
EXIT_OWNERSHIP = 5
EXIT_SELFTEST = 6

DEFAULT_COUNTEREXAMPLE_FILE = "selftest-counterexample.json"


class UsageError(Exception):
    """Unreadable or malformed input; reported with exit code 2."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_term(path: str):
    try:
        return parse_term(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _load_decl(path: str):
    try:
        return parse_game_decl(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must not be negative")
    return value


def _show(t, args) -> str:
    return print_term(t, glyphs=args.glyphs)


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _format_trace(trace, args) -> list[str]:
    lines = [f"      {_show(trace.steps[0].before if trace.steps else trace.final, args)}"]
    for step in trace.steps:
        lines.append(f"{step.rule.value:<5} {_show(step.after, args)}")
    return lines


# --- commands ----------------------------------------------------------------

def cmd_normalize(args, out) -> int:
    term = _load_term(args.term_file)
    trace = normalize(term, args.mode, step_cap=args.step_cap, disabled=frozenset(args.disable_rule))
    if args.output == "json":
        _emit_json({"mode": args.mode, "normal_form": print_term(trace.final),
                    "steps": json.loads(trace_to_json(trace))}, out)
    elif args.output == "dot":
        out.write(export_dot(build_lts(trace.final, args.state_cap), "normal_form"))
    else:
        if args.trace:
            out.write("\n".join(_format_trace(trace, args)) + "\n")
        else:
            out.write(_show(trace.final, args) + "\n")
    return EXIT_OK


def cmd_bisim(args, out) -> int:
    left, right = _load_term(args.term_file_a), _load_term(args.term_file_b)
    result = bisimilar(left, right, args.state_cap)
    if args.output == "json":
        _emit_json({"bisimilar": result.equivalent,
                    "witness": None if result.witness is None else list(result.witness)}, out)
    elif args.output == "dot":
        out.write(export_dot(result.left, "left"))
        out.write(export_dot(result.right, "right"))
    elif result.equivalent:
        out.write("bisimilar\n")
    else:
        out.write("not bisimilar\n")
        out.write("distinguishing trace: " + (" ".join(result.witness) or "(empty)") + "\n")
    return EXIT_OK if result.equivalent else EXIT_NOT_BISIMILAR


def cmd_lts(args, out) -> int:
    lts = build_lts(_load_term(args.term_file), args.state_cap)
    if args.output == "json":
        out.write(lts.to_json() + "\n")
    else:
        out.write(export_dot(lts))
    return EXIT_OK


def cmd_play(args, out) -> int:
    if len(args.strategy_files) < 2:
        raise UsageError("play needs at least two strategy term files")
    g = _load_decl(args.game_decl_file)
    terms = [_load_term(p) for p in args.strategy_files]
    disabled = frozenset(args.disable_rule)
    report = None
    if args.oracle:
        report = verify_play_terms(terms, g, step_cap=args.step_cap, disabled=disabled)
        trace, played = report.trace, report.play_term
    else:
        played = play_term(terms)
        trace = normalize(played, FULL, step_cap=args.step_cap, disabled=disabled)
    result = trace.final

    if args.output == "json":
        payload = {
            "play_term": print_term(played),
            "result": print_term(result),
            "pass": None if report is None else report.passed,
            "maximal_trace": None if report is None or report.maximal_trace is None
            else list(report.maximal_trace),
            "steps": json.loads(trace_to_json(trace)),
        }
        _emit_json(payload, out)
    else:
        if args.trace:
            out.write("\n".join(_format_trace(trace, args)) + "\n")
        if isinstance(result, Deadlock):
            out.write("deadlock: no common execution\n")
        else:
            out.write(_show(result, args) + "\n")
        if report is not None:
            expected = "(empty)" if not report.maximal_trace else " ".join(report.maximal_trace or ())
            out.write(f"oracle: {'PASS' if report.passed else 'FAIL'} (maximal common trace: {expected})\n")
    if report is not None and not report.passed:
        return EXIT_ORACLE
    return EXIT_OK


def cmd_strategies(args, out, err) -> int:
    g = _load_decl(args.game_decl_file)
    term = _load_term(args.term_file)
    if args.role not in g.players:
        raise UsageError(f"unknown role {args.role!r}; declared roles are {', '.join(g.players)}")
    problems = validate_ownership(term, g, args.role)
    for w in problems:
        err.write(f"warning: {w.message}\n")
    if args.strict and problems:
        err.write(f"error: {len(problems)} ownership problem(s) in strict mode\n")
        return EXIT_OWNERSHIP
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GameWarning)
        tree = game_tree_from_term(term, g, args.role, strict=args.strict)
    for w in caught:
        err.write(f"warning: {w.message}\n")
    if args.strict and caught:
        return EXIT_OWNERSHIP
    strategies = enumerate_strategies(tree, args.role)
    if args.output == "json":
        _emit_json([json.loads(s.to_json()) for s in strategies], out)
    elif args.output == "dot":
        out.write(export_tree_dot(tree))
    else:
        for s in strategies:
            out.write(_show(strategy_to_term(s, g), args) + "\n")
    return EXIT_OK


def cmd_selftest(args, out, err) -> int:
    if args.count == 0:
        err.write("warning: --count 0 checks nothing; passing vacuously\n")
    disabled = frozenset(args.disable_rule)
    results = properties.run_all(args.seed, args.count, disabled, tree_count=args.tree_count)
    width = max(len(r.name) for r in results)
    out.write(f"{'suite':<{width}}  {'checked':>8}  {'failures':>8}  result\n")
    for r in results:
        out.write(f"{r.name:<{width}}  {r.checked:>8}  {r.failures:>8}  {'PASS' if r.passed else 'FAIL'}\n")
    failed = [r for r in results if not r.passed]
    if not failed:
        return EXIT_OK
    path = args.counterexample_file
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"seed": args.seed, "count": args.count, **failed[0].counterexample}, fh,
                  indent=2, ensure_ascii=False)
        fh.write("\n")
    err.write(f"first counterexample written to {path}\n")
    return EXIT_SELFTEST


# --- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=FULL,
                        help="rewrite mode; p-view keeps opponent choices (default: full)")
    common.add_argument("--step-cap", type=_positive, default=DEFAULT_STEP_CAP, metavar="N")
    common.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP, metavar="N")
    common.add_argument("--glyphs", action="store_true", help="print terms with · ‡ ⊓ δ")
    # switches a rule off to check that the suites and the oracle notice
    common.add_argument("--disable-rule", action="append", choices=[r.value for r in RuleId],
                        default=[], help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="gamebpa", description="Process algebra with player and "
                                     "opponent choice and a playing operator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common], help="rewrite a term to normal form")
    p.add_argument("term_file")
    p.add_argument("--trace", action="store_true", help="print every step with its rule")
    p.add_argument("--output", choices=("text", "json", "dot"), default="text")

    p = sub.add_parser("bisim", parents=[common], help="decide strong bisimilarity of two terms")
    p.add_argument("term_file_a")
    p.add_argument("term_file_b")
    p.add_argument("--output", choices=("text", "json", "dot"), default="text")

    p = sub.add_parser("lts", parents=[common], help="export the transition system of a term")
    p.add_argument("term_file")
    p.add_argument("--output", choices=("json", "dot"), default="dot")

    p = sub.add_parser("play", parents=[common], help="play strategy terms against each other")
    p.add_argument("game_decl_file")
    p.add_argument("strategy_files", nargs="+", help="one per role, in declaration order")
    p.add_argument("--oracle", action="store_true", help="check against brute-force trace intersection")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("strategies", parents=[common], help="list a role's strategies")
    p.add_argument("game_decl_file")
    p.add_argument("term_file")
    p.add_argument("--role", required=True)
    p.add_argument("--strict", action="store_true", help="fail on any ownership problem")
    p.add_argument("--output", choices=("text", "json", "dot"), default="text")

    p = sub.add_parser("selftest", parents=[common], help="run the randomised property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_non_negative, default=1000, help="samples per suite")
    p.add_argument("--tree-count", type=_non_negative, default=None,
                   help="game trees for the play suite (default: same as --count)")
    p.add_argument("--counterexample-file", default=DEFAULT_COUNTEREXAMPLE_FILE, metavar="PATH")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "normalize":
            return cmd_normalize(args, out)
        if args.command == "bisim":
            return cmd_bisim(args, out)
        if args.command == "lts":
            return cmd_lts(args, out)
        if args.command == "play":
            return cmd_play(args, out)
        if args.command == "strategies":
            return cmd_strategies(args, out, err)
        return cmd_selftest(args, out, err)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (StepLimitExceeded, StateLimitExceeded) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAP
    except GameError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_OWNERSHIP


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
