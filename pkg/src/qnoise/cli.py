"""Command line: ``qnoise <scenario> [--param value]... [--config path] --out path``."""

from __future__ import annotations

import argparse
import logging
import sys

from .codes import BoundViolation, CodeConditionError, UncorrectableError
from .config import SCENARIO_PARAMS, SCENARIOS, ConfigError, ExperimentConfig
from .environment import IntegrationError
from .lab import run, write_table
from .symmetrize import ProjectionFailed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

NUMERIC_ERRORS = (IntegrationError, BoundViolation, ProjectionFailed, UncorrectableError, CodeConditionError)

log = logging.getLogger("qnoise")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnoise", description="Quantum noise and error-correction experiments.")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name)
        for key in SCENARIO_PARAMS[name]:
            # parsed as strings; ExperimentConfig does the typing and validation
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--out", dest="output_path", help="output file")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--seed", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base = {"scenario": args.scenario, "parameters": {}}
    if args.config:
        base = ExperimentConfig.load(args.config).to_dict()
        if base["scenario"] != args.scenario:
            raise ConfigError(f"config file is for scenario {base['scenario']!r}, not {args.scenario!r}")
    params = dict(base.get("parameters") or {})
    for key in SCENARIO_PARAMS[args.scenario]:
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    base["parameters"] = params
    for key in ("output_path", "format", "seed"):
        value = getattr(args, key)
        if value is not None:
            base[key] = value
    cfg = ExperimentConfig.from_dict(base)
    if not cfg.output_path:
        raise ConfigError("an output path is required (--out)")
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="qnoise: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        table = run(cfg)
    except NUMERIC_ERRORS as exc:
        log.error("numeric diagnostic: %s", exc)
        return EXIT_NUMERIC
    except (ConfigError, KeyError, ValueError) as exc:
        # domain checks in the library (probabilities, copy counts, ...) are config problems here
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    try:
        write_table(table, cfg, cfg.output_path)
    except OSError as exc:
        log.error("cannot write %s: %s", cfg.output_path, exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
