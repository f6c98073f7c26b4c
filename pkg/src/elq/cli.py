"""Command line entry point: ``elq run|bench|validate``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ElqError
from .harness import (
    BENCH_STRATEGIES,
    WORKLOADS,
    Config,
    bench,
    exit_code,
    rows_to_csv,
    run,
    validate,
)

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elq", description="Headless element-query engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a resize scenario to quiescence and write a JSON report")
    p.add_argument("--doc", required=True)
    p.add_argument("--css", required=True)
    p.add_argument("--scenario")
    p.add_argument("--strategy", choices=("scroll", "object"), default="scroll")
    p.add_argument("--max-settle", type=int, default=10)
    p.add_argument("--out", help="report path (default: stdout)")

    p = sub.add_parser("bench", help="layout-cost counters for a workload, as CSV")
    p.add_argument("--n", type=int, required=True, nargs="+")
    p.add_argument("--workload", choices=WORKLOADS, required=True)
    p.add_argument("--strategy", choices=BENCH_STRATEGIES, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("validate", help="static checks for ELQ annotations and stylesheets")
    p.add_argument("--doc", required=True)
    p.add_argument("--css")
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = Config(strategy=args.strategy, max_settle_rounds=args.max_settle)
            report = run(args.doc, args.css, args.scenario, config)
            _write(report.to_json(), args.out)
            return EXIT_OK
        if args.command == "bench":
            if any(n < 1 for n in args.n):
                raise ValueError("--n must be >= 1")
            rows = [bench(n, args.workload, args.strategy) for n in args.n]
            _write(rows_to_csv(rows), args.out)
            return EXIT_OK
        diagnostics = validate(args.doc, args.css)
        for d in diagnostics:
            print(d)
        return exit_code(diagnostics)
    except (ElqError, OSError, ValueError) as exc:
        print(f"elq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
