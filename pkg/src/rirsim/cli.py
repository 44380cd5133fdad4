"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 self-check failure.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    format_csv,
    emit_csv,
    load_config,
    parse_overrides,
    run_experiment,
    selfcheck,
    skip_lines,
    skip_log_path,
    write_skip_log,
)
from .model import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_SELFCHECK = 0, 1, 2


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value file; see README for keys")
    p.add_argument("--seed", type=int, help="unsigned 64-bit master seed")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials for signal-level schemes")
    p.add_argument("--out", help="CSV path (default: stdout); skips go to <out>.skips.log")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rirsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [("simulate", "event and signal-level simulation with closed forms"),
                       ("analytic", "closed forms and cost only"),
                       ("selfcheck", "oracle agreement run; exit 2 on any failure")]:
        _common(sub.add_parser(name, help=text))
    fig = sub.add_parser("figure", help="figure data on the fixed sweep grids")
    fig.add_argument("number", type=int, choices=range(4, 9))
    _common(fig)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    mode = f"figure{args.number}" if args.command == "figure" else args.command
    try:
        overrides = parse_overrides(args.set)
        for key in ("seed", "trials", "out"):
            if getattr(args, key) is not None:
                overrides[key] = str(getattr(args, key))
        config = load_config(mode, args.config, overrides)
        rows = run_experiment(config)
    except ConfigError as exc:
        print(f"rirsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config.out:
        emit_csv(rows, config.out)
        write_skip_log(rows, skip_log_path(config.out))
    else:
        sys.stdout.write(format_csv(rows))
    for line in skip_lines(rows):
        print(line, file=sys.stderr)

    if mode != "selfcheck":
        return EXIT_OK
    results = selfcheck(rows)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in results) else EXIT_SELFCHECK
