"""Command-line harness: ``cpkernel run --bench order --size 8``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .bench import BENCHMARKS, CSV_HEADER, execute


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpkernel", description="Run the solver micro-benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one benchmark and print CSV rows")
    run.add_argument("--bench", required=True, choices=sorted(BENCHMARKS))
    run.add_argument("--size", required=True, type=int)
    run.add_argument("--repeat", type=int, default=1)
    run.add_argument("--format", choices=["csv"], default="csv")
    run.add_argument("--no-header", action="store_true", help="omit the CSV header line")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.repeat < 1:
        print("cpkernel: --repeat must be at least 1", file=sys.stderr)
        return 2
    build = BENCHMARKS[args.bench]
    try:
        build(args.size)
    except ValueError as exc:
        print(f"cpkernel: invalid size {args.size} for {args.bench}: {exc}", file=sys.stderr)
        return 2
    out = sys.stdout
    if not args.no_header:
        out.write(CSV_HEADER + "\n")
    for _ in range(args.repeat):
        out.write(execute(build(args.size)).result.csv_row() + "\n")
        out.flush()
    return 0


def entry() -> None:
    sys.exit(main())
