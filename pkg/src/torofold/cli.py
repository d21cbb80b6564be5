"""Command line entry point.

``torofold run SCENARIO [--trunc N] [--format json|text] [--out PATH]
[--max-depth N] [--seed N]``

Exit codes: 0 all pass, 1 any fail or error, 2 any inconclusive,
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys

from .scenario import ERROR, FAIL, INCONCLUSIVE, ScenarioError, emit_report, load_scenario, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="torofold", description="Chart-by-chart verification of local toroidalization steps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="path to a TOML scenario")
    run.add_argument("--trunc", type=int, help="truncation order (overrides the file and TOROFOLD_TRUNC)")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--max-depth", type=int, help="cap on quadratic transforms in plane resolution")
    run.add_argument("--seed", type=int, help="seed for random suites")
    run.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return p


def exit_code(verdict: str) -> int:
    if verdict in (FAIL, ERROR):
        return EXIT_FAIL
    if verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario, args.trunc, args.seed, args.max_depth)
    except ScenarioError as exc:
        print(f"torofold: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_scenario(sc)
    data = emit_report(report, args.format, args.timing)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return exit_code(report.verdict)


if __name__ == "__main__":
    sys.exit(main())
