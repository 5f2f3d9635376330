"""Command-line entry point: ``picosync <experiment> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from ..errors import ConfigValidationError, ParameterDomainError
from .config import ExperimentConfig, ExperimentKind, default_config, load_config
from .experiments import crlb_violations, run_experiment
from .report import emit_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CRLB = 4


def _fail(code: int, kind: str, message: str, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="picosync",
                                description="Two-way time-transfer simulation experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="experiment", required=True)
    for kind in ExperimentKind:
        s = sub.add_parser(kind.value)
        s.add_argument("--config", help="YAML config file")
        s.add_argument("--preset", choices=("cabled", "wireless"), default="cabled")
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        s.add_argument("--out", help="report path (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--lut-cache", dest="lut_cache_dir",
                       help="directory for cached bias tables")
        s.add_argument("--allow-crlb-violation", action="store_true",
                       help="do not fail when a point beats the bound")
    return p


def resolve_config(args) -> ExperimentConfig:
    base = default_config(args.experiment, preset=args.preset)
    cfg = load_config(args.config, base) if args.config else base
    over = {"experiment": ExperimentKind(args.experiment)}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.trials is not None:
        over["trials_per_point"] = args.trials
    if args.out:
        over["output_path"] = args.out
    if args.lut_cache_dir:
        over["lut_cache_dir"] = args.lut_cache_dir
    return dataclasses.replace(cfg, **over).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigValidationError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc), fields=exc.fields)
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    try:
        rows = run_experiment(cfg)
    except ParameterDomainError as exc:
        return _fail(EXIT_CONFIG, "domain", str(exc))
    try:
        emit_report(rows, cfg.output_path or "/dev/stdout", args.format)
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    bad = crlb_violations(rows)
    if bad and not args.allow_crlb_violation:
        return _fail(EXIT_CRLB, "crlb-violation",
                     "measured std below 0.8x the bound",
                     points=[r.independent_var for r in bad])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
