"""Command-line front end.

    ridgeless SUBCOMMAND [--config PATH] [--out DIR] [--seed INT] [--KEY VALUE ...]
                         [--set KEY=VALUE ...] [--no-json]

Exit codes: 0 ok, 1 usage or configuration error, 2 numerical failure,
3 selftest failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments
from .config import KEYS, ConfigError, load_config
from .interpolants import StepSizeError
from .loo import UpdatePreconditionError
from .pinv import NotPSD, NumericalFailure, UndefinedCondition

log = logging.getLogger("ridgeless")

SUBCOMMANDS = ("mse-vs-norm", "cond-descent", "pinv-descent", "stability-audit", "loo-bench", "selftest")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser():
    p = _Parser(prog="ridgeless", description="Ridgeless regression experiments and stability audits.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", metavar="PATH", help="key = value config file")
    p.add_argument("--out", metavar="DIR", default=".", help="output directory (created if missing)")
    p.add_argument("--no-json", action="store_true", help="skip the JSON mirror of each table")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    p.add_argument("-v", "--verbose", action="store_true")
    for key in KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest="ov_" + key, metavar=key.upper())
    return p


def collect_overrides(args):
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in KEYS:
            raise UsageError(f"unknown key {key!r}; valid keys: {', '.join(KEYS)}")
        overrides[key] = value
    for key in KEYS:
        value = getattr(args, "ov_" + key)
        if value is not None:
            overrides[key] = value
    return overrides


def write_table(table, out_dir, name, seed, json_mirror=True):
    stem = Path(out_dir) / f"{name}_{seed}"
    table.to_csv(stem.with_suffix(".csv"))
    if json_mirror:
        table.to_json(stem.with_suffix(".json"))
    return stem.with_suffix(".csv")


def run(args):
    if args.subcommand == "selftest":
        from .selftest import run_selftest

        seed = int(args.ov_seed) if args.ov_seed is not None else 0
        results = run_selftest(seed)
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_SELFTEST

    cfg = load_config(args.config, args.subcommand, collect_overrides(args))
    log.info("effective config: %s", json.dumps(cfg.to_dict()))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.subcommand == "mse-vs-norm":
        table = experiments.run_mse_vs_norm(cfg)
    elif args.subcommand == "cond-descent":
        table = experiments.run_cond_double_descent(cfg)
    elif args.subcommand == "pinv-descent":
        table = experiments.run_pinv_double_descent(cfg)
    elif args.subcommand == "loo-bench":
        table = experiments.run_loo_benchmark(cfg)
    else:
        table, reports = experiments.run_stability_audit(cfg)
        with open(out / f"{args.subcommand}_{cfg.seed}.reports.json", "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2)
    path = write_table(table, out, args.subcommand, cfg.seed, not args.no_json)
    print(path)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return run(args)
    except (UsageError, ConfigError, OSError) as exc:
        print(f"{parser.format_usage()}ridgeless: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        NumericalFailure,
        NotPSD,
        UndefinedCondition,
        UpdatePreconditionError,
        StepSizeError,
        experiments.ExperimentError,
        ArithmeticError,
    ) as exc:
        print(f"ridgeless: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
