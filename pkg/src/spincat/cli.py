"""Command-line entry point.

    spincat run --config experiments.ini [--out DIR]
    spincat scenario fig3_qfunctions [--set key=value ...] [--out DIR]
    spincat verify

Exit codes: 0 success, 1 failed verify checks, 2 config errors,
3 numerical failure, 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .scenarios import SCENARIOS, ConfigError, run_scenario, validate_config, validate_config_text
from .verify import run_all_checks

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincat",
        description="Collective-spin dynamics scenarios: cat states, squeezing, fractional revivals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run every scenario section in a config file")
    run_p.add_argument("--config", required=True, help="path to an INI config file")
    run_p.add_argument("--out", default=".", help="output directory (default: current)")

    scen_p = sub.add_parser("scenario", help="run one named scenario with optional overrides")
    scen_p.add_argument("name", choices=SCENARIOS)
    scen_p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    scen_p.add_argument("--out", default=".", help="output directory (default: current)")

    sub.add_parser("verify", help="run the invariant/oracle suite and print a pass/fail table")
    return parser


def _run_configs(configs, out_dir: str) -> int:
    for cfg in configs:
        print(f"[{cfg.name}] scenario {cfg.scenario}")
        record = run_scenario(cfg, out_dir)
        for line in record.summary:
            print(f"  {line}")
        out_name = cfg.out_name or f"{cfg.name}.{cfg.out_format}"
        print(f"  wrote {out_dir}/{out_name}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return 0 if run_all_checks() else 1
        if args.command == "run":
            try:
                with open(args.config) as handle:
                    text = handle.read()
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            configs = validate_config_text(text)
            return _run_configs(configs, args.out)
        if args.command == "scenario":
            overrides = {}
            for item in args.set:
                key, sep, value = item.partition("=")
                if not sep:
                    print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
                    return EXIT_CONFIG
                overrides[key.strip()] = value.strip()
            overrides["scenario"] = args.name
            configs = validate_config({args.name: overrides})
            return _run_configs(configs, args.out)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
