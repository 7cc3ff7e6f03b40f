"""Command-line interface.

Subcommands: quantum | classical | sweep | spectrum | bath-rates, each taking
--config PATH, --out DIR, --seed N, --threads N. Exit codes: 0 success,
2 configuration error, 3 numeric abort.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .classical import TrajectoryDiverged
from .config import ConfigError, parse_config
from .propagator import PropagationAborted
from .runner import run

_MODE_OF_COMMAND = {
    "quantum": "quantum-open",
    "classical": "classical",
    "sweep": "sweep",
    "spectrum": "spectrum",
    "bath-rates": "bath-rates",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stickslip",
        description="Quantum and classical stick-slip friction of a trap-driven particle",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("quantum", "propagate the density matrix (closed or open, via run.mode)"),
        ("classical", "integrate the stochastic classical dynamics"),
        ("sweep", "velocity sweep producing a first-period summary"),
        ("spectrum", "instantaneous eigenvalues over one period"),
        ("bath-rates", "tabulate gamma(E) and sigma(E)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=None, help="key=value configuration file")
        cmd.add_argument("--out", type=Path, default=Path("stickslip-out"), help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override numerics.seed")
        cmd.add_argument("--threads", type=int, default=1, help="sweep worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from None
        config = parse_config(text, mode=_MODE_OF_COMMAND[args.command])
        if args.seed is not None:
            config.numerics = replace(config.numerics, seed=args.seed)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        output = run(config, args.out, threads=max(1, args.threads))
    except (PropagationAborted, TrajectoryDiverged) as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # e.g. a dt_bar that violates the stability/Bohr bounds for this system
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {', '.join(output.files)} and {output.manifest.name} in {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
