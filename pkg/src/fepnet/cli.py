"""Command line entry point: ``fepnet <mode> --config <path> [--out <dir>] [--seed <u64>]``.

Exit status is 0 on success, 1 for an invalid config and 2 when a run fails.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import MODES, parse_config
from .errors import ConfigError
from .harness import run_experiment


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fepnet", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", help="output directory (overrides out_dir)")
    p.add_argument("--seed", type=_u64, help="master seed (overrides seed)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if cfg.mode != args.mode:
            raise ConfigError(f"config mode {cfg.mode!r} does not match command {args.mode!r}")
    except ConfigError as exc:
        print("invalid config:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    try:
        records = run_experiment(cfg, args.out)
    except Exception as exc:  # noqa: BLE001 - the CLI reports every run failure the same way
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out or cfg.out_dir
    print(f"{cfg.mode}: {len(records)} run(s) written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
