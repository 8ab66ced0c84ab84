"""Command line entry point: ``treestars {analytic,simulate,tables}``."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .distributions import ParameterError
from .experiment import ConfigError, load_config, reproduce_tables, run_experiment, write_csv
from .montecarlo import WORKERS_ENV, default_workers


def _count(minimum: int):
    def parse(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treestars",
        description="Loss moments of percolation contagion on random tree-stars graphs.",
        epilog=f"The {WORKERS_ENV} environment variable overrides the worker count when --workers is not given.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analytic = sub.add_parser("analytic", help="closed-form moments only")
    analytic.add_argument("--config", required=True, help="JSON experiment config")
    analytic.add_argument("--out", help="CSV output path (default: config 'out' or stdout)")

    simulate = sub.add_parser("simulate", help="Monte Carlo estimates next to the closed forms")
    simulate.add_argument("--config", required=True, help="JSON experiment config")
    simulate.add_argument("--reps", type=_count(1), help="override replications")
    simulate.add_argument("--seed", type=_count(0), help="override seed")
    simulate.add_argument("--workers", type=_count(1), help="override worker threads")
    simulate.add_argument("--out", help="CSV output path (default: config 'out' or stdout)")

    tables = sub.add_parser("tables", help="reproduce a preset table grid")
    tables.add_argument("--table", type=int, choices=(2, 3), required=True)
    tables.add_argument("--reps", type=_count(0), default=0, help="replications per row; 0 for analytic only")
    tables.add_argument("--seed", type=_count(0), default=0)
    tables.add_argument("--workers", type=_count(1))
    tables.add_argument("--out", help="CSV output path (default: stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "tables":
            workers = args.workers or default_workers()
            rows = reproduce_tables(args.table, args.reps, args.seed, workers)
            out = args.out
        else:
            cfg = load_config(args.config)
            if args.command == "analytic":
                cfg = replace(cfg, run_analytic=True, run_simulation=False)
            else:
                run = cfg.run
                workers = args.workers or (default_workers() if WORKERS_ENV in os.environ else run.workers)
                run = replace(
                    run,
                    replications=args.reps if args.reps is not None else run.replications,
                    seed=args.seed if args.seed is not None else run.seed,
                    workers=workers,
                )
                cfg = replace(cfg, run=run, run_simulation=True)
            out = args.out or cfg.out
            rows = run_experiment(replace(cfg, out=None))
        text = write_csv(rows, out)
    except (ConfigError, ParameterError) as exc:
        print(f"treestars: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"treestars: {exc}", file=sys.stderr)
        return 1
    if out is None:
        sys.stdout.write(text)
    return 0
