"""Command line interface.

    drivenosc run CONFIG [--out DIR]
    drivenosc table2 [--verify]
    drivenosc figures [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error,
3 failed verification in ``table2 --verify``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .experiments import builtin_config, builtin_config_names, run_experiment, run_figures, run_table2

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3


def _common(p):
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--chains", type=int, help="number of independent chains")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivenosc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment file")
    p.add_argument("config", help="INI file, or builtin:NAME for a shipped one")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    _common(p)

    p = sub.add_parser("table2", help="mean position for the seven constant-force runs")
    p.add_argument("--out", help="also write per-row outputs here")
    p.add_argument("--verify", action="store_true", help="exit 3 unless every row passes")
    _common(p)

    p = sub.add_parser("figures", help="CSVs and a plotting script for all figures")
    p.add_argument("--out", default="figures", help="output directory (default: figures)")
    _common(p)

    sub.add_parser("list", help="list the shipped experiment files")
    return parser


def _load(source: str):
    if source.startswith("builtin:"):
        return builtin_config(source[len("builtin:"):])
    return load_config(source)


def _format_table(rows) -> str:
    head = f"{'lambda':>7} {'m':>5} {'w':>5} {'alpha':>8} {'<x>':>9} {'stderr':>8} {'|dev|':>7}  ok"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r['lambda']:7.1f} {r['m_tilde']:5.2f} {r['omega_tilde']:5.2f} {r['alpha']:8.3f} "
            f"{r['mean_x']:9.4f} {r['stderr']:8.4f} {r['deviation']:7.4f}  {'yes' if r['passed'] else 'NO'}"
        )
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(message)s",
    )
    chains = getattr(args, "chains", None)
    if chains is not None and chains < 1:
        print("error: --chains must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "list":
            print("\n".join(builtin_config_names()))
            return EXIT_OK
        if args.command == "run":
            cfg = _load(args.config).with_overrides(seed=args.seed, n_chains=args.chains)
            result = run_experiment(cfg, args.out)
            if not args.quiet:
                print(json.dumps({k: result.summary[k] for k in ("mean_x", "mean_x_stderr", "std_x", "acceptance_rate")}))
                for kind, path in result.files.items():
                    print(f"{kind}: {path}")
            return EXIT_OK
        if args.command == "table2":
            rows = run_table2(args.out, seed=args.seed, n_chains=args.chains)
            if not args.quiet:
                print(_format_table(rows))
            if args.verify and not all(r["passed"] for r in rows):
                return EXIT_VERIFY
            return EXIT_OK
        if args.command == "figures":
            script = run_figures(args.out, seed=args.seed, n_chains=args.chains)
            if not args.quiet:
                print(f"wrote {script}; run it with: python {script} --save")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        if args.command == "run" and not Path(args.config).exists():
            print(f"config error: cannot read {args.config}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
