"""Command line front end.

Subcommands: identities, sweep, spacing, weyl, duality, report.  Flags
mirror the flat config file keys and override them.  Exit codes:
0 success, 1 identity/bound failure, 2 config error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    EXIT_CONFIG,
    ConfigError,
    ExperimentConfig,
    cmd_duality,
    cmd_identities,
    cmd_report,
    cmd_spacing,
    cmd_sweep,
    cmd_weyl,
    config_from_file,
)

_COMMANDS = {
    "identities": cmd_identities,
    "sweep": cmd_sweep,
    "spacing": cmd_spacing,
    "weyl": cmd_weyl,
    "duality": cmd_duality,
    "report": cmd_report,
}


def _int_list(text: str) -> list[int]:
    return [int(s) for s in text.split(",") if s.strip()]


def _float_list(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gsieve",
        description="large sieve experiments for power moduli over Z[i]",
    )
    p.add_argument("--config", help="flat key = value config file")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--family", choices=["all", "squares", "power"])
        sp.add_argument("--k", type=int)
        sp.add_argument("--Q", type=_int_list, metavar="Q1,Q2,...")
        sp.add_argument("--N", type=_int_list, metavar="N1,N2,...")
        sp.add_argument("--seeds", type=_int_list, metavar="S1,S2,...")
        sp.add_argument("--Q0", type=_float_list, metavar="Q0a,Q0b,...")
        sp.add_argument("--eps", type=float)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--associates", choices=["literal", "units"])
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["csv", "json"])
    return p


def _merge(args: argparse.Namespace) -> ExperimentConfig:
    base = config_from_file(args.config) if args.config else ExperimentConfig()
    d = base.to_dict()
    for key in d:
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
    cfg = ExperimentConfig.from_dict(d)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge(args)
        status, lines = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in lines:
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
