"""Command-line front end.

Verbs: run, convergence, tv-history, validate.  Exit codes: 0 all checks
passed, 1 at least one invariant or assumption check failed, 2 usage or
config error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .config import load_config
from .errors import ConfigError, InvalidInputError
from .runner import (execute_convergence, execute_run, execute_tv_history,
                     execute_validate)

_COMMANDS = {
    "run": execute_run,
    "convergence": execute_convergence,
    "tv-history": execute_tv_history,
    "validate": execute_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvflux",
        description="Finite-volume Godunov solver and verification harness "
                    "for conservation laws with BV discontinuous flux.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("run", "march one configuration and emit snapshots, "
                    "diagnostics, and a manifest"),
            ("convergence", "sweep m_cells against the exact reference and "
                            "emit an error table"),
            ("tv-history", "record TV(u) and TV(beta) at snapshot times"),
            ("validate", "check structural assumptions and scheme "
                         "properties for the configured flux")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True,
                         help="path to the YAML run configuration")
        cmd.add_argument("--out", default=None,
                         help="output directory (overrides outputs.directory)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="seed for randomized property checks "
                              "(overrides config seed)")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker threads for sweeps "
                              "(overrides config threads)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.out is not None:
            config = replace(config, out_dir=args.out)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"threads must be >= 1, got {args.threads}")
            config = replace(config, threads=args.threads)
        return _COMMANDS[args.command](config)
    except (ConfigError, InvalidInputError) as exc:
        print(f"bvflux: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
