"""Command line: ``ringmarket run|suite|validate``.

Exit codes: 0 ok, 1 usage or configuration error, 2 solver error,
3 validation failure, 4 output could not be written.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ringmarket.config import ConfigError, parse_config
from ringmarket.equilibrium import SolverError, StrategyGrid, solve_two_stage
from ringmarket.experiments import run_suite
from ringmarket.market import MarketConfig
from ringmarket.reports import run_csv, run_json, suite_csv, suite_json, validate_csv, validate_json
from ringmarket.taxation import TaxScheme
from ringmarket.validation import run_checks

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3
EXIT_OUTPUT = 4

log = logging.getLogger("ringmarket")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected min:max:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return lo, hi, step


def _costs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(c) for c in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected c1,c2, got {text!r}") from exc


def _threads(text: str) -> int | str:
    if text == "auto":
        return text
    try:
        n = int(text)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringmarket", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=["run", "suite", "validate"])
    parser.add_argument("--config", type=Path, help="JSON configuration (defaults apply when omitted)")
    parser.add_argument("--output", type=Path, help="report path (stdout when omitted)")
    parser.add_argument("--format", choices=["json", "csv"], help="report format (default: from extension, else json)")
    parser.add_argument("--threads", type=_threads, default=1, help="worker threads or 'auto' (default: 1)")
    parser.add_argument("--tax", choices=["none", "cardinal", "ordinal"])
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--costs", type=_costs, help="c1,c2")
    parser.add_argument("--q-grid", type=_triple, help="min:max:step")
    parser.add_argument("--p-grid", type=_triple, help="min:max:step")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _resolve_format(args: argparse.Namespace) -> str:
    ext = args.output.suffix.lower().lstrip(".") if args.output else ""
    if ext in ("json", "csv"):
        if args.format and args.format != ext:
            raise UsageError(f"--format {args.format} conflicts with output extension .{ext}")
        return ext
    return args.format or "json"


def apply_overrides(config: MarketConfig, grid: StrategyGrid, args: argparse.Namespace) -> tuple[MarketConfig, StrategyGrid]:
    tax = config.tax
    if args.tax is not None or args.lam is not None or args.gamma is not None:
        tax = TaxScheme(
            args.tax if args.tax is not None else tax.kind,
            args.lam if args.lam is not None else tax.lam,
            args.gamma if args.gamma is not None else tax.gamma,
        )
    config = replace(config, tax=tax, costs=args.costs if args.costs is not None else config.costs)
    if args.q_grid:
        grid = replace(grid, q_min=args.q_grid[0], q_max=args.q_grid[1], q_step=args.q_grid[2])
    if args.p_grid:
        grid = replace(grid, p_min=args.p_grid[0], p_max=args.p_grid[1], p_step=args.p_grid[2])
    return config, grid


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        fmt = _resolve_format(args)
    except UsageError as exc:
        print(f"ringmarket: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"ringmarket: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config, grid = parse_config(text)
        config, grid = apply_overrides(config, grid, args)
        if config.n_firms != 2:
            raise ConfigError("firms", f"the solver needs exactly two firms, got {config.n_firms}")
    except ValueError as exc:
        print(f"ringmarket: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    status = EXIT_OK
    try:
        if args.command == "run":
            result = solve_two_stage(config, grid, threads=args.threads)
            report = run_json(config, grid, result) if fmt == "json" else run_csv(config, result)
        elif args.command == "suite":
            suite = run_suite(config, grid, threads=args.threads)
            report = suite_json(suite, config) if fmt == "json" else suite_csv(suite)
        else:
            checks = run_checks(config, grid, threads=args.threads)
            report = validate_json(checks) if fmt == "json" else validate_csv(checks)
            for check in checks:
                print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}", file=sys.stderr)
            if not all(c.passed for c in checks):
                status = EXIT_VALIDATION
    except SolverError as exc:
        print(f"ringmarket: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    if args.output is None:
        sys.stdout.write(report)
        return status
    try:
        args.output.write_text(report)
    except OSError as exc:
        print(f"ringmarket: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return status


if __name__ == "__main__":
    sys.exit(main())
