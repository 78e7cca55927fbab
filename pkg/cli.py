from __future__ import annotations

import argparse
import json
import sys
import os
import logging
logger = logging.getLogger(__name__)

from engine.errors import ConfigValidationError
from engine.frontend import run
from engine.run_config import COMMANDS, FORMATS, load_run_config

LOG_LEVEL = os.environ.get("DYNB_LOG_LEVEL", "WARNING").upper()


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.config, args.command).with_overrides(
            output=args.format, output_path=args.out, seed=args.seed
        )
    except ConfigValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    return run(config, verify=args.verify)


def _cmd_diagnostics(_: argparse.Namespace) -> int:
    from engine.tg_baseline import DEFAULT_CUTOFF_TOL
    from utils.sweep_runner import WORKERS

    diagnostics = {
        "log_level": LOG_LEVEL,
        "workers": WORKERS,
        "cutoff_tol": DEFAULT_CUTOFF_TOL,
        "workers_override": os.environ.get("DYNB_WORKERS", ""),
        "cutoff_tol_override": os.environ.get("DYNB_CUTOFF_TOL", ""),
    }
    print(json.dumps(diagnostics, ensure_ascii=False, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynbarrier", description="Tunnelling through a time-modulated rectangular barrier")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "static": "Static barrier transmission (optionally swept)",
        "spectrum": "Finite channel spectrum and energy circle",
        "transmit": "Per-channel and total transmission",
        "traverse": "Quantized traversal times in every regime",
        "dos": "Density of states of the channel levels",
        "tg-compare": "Finite spectrum against the Bessel sideband baseline",
        "oracle": "Wave-packet propagation check",
    }
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=helps[name])
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", default=None, help="Output path (stdout when omitted)")
        cmd.add_argument("--format", choices=FORMATS, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--verify", action="store_true", help="Re-check invariants on the emitted table")
        cmd.set_defaults(func=_cmd_run)

    diag_cmd = sub.add_parser("diagnostics", help="Show runtime diagnostics")
    diag_cmd.set_defaults(func=_cmd_diagnostics)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    return int(args.func(args))


if __name__ == "__main__":
    sys.exit(main())
