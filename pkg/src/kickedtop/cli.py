"""Command-line entry point.

Subcommands drive the sweep recipes; exit codes are 0 on success, 2 for
configuration problems, 3 for numeric aborts.  The default output directory
comes from $KICKEDTOP_OUT when set.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import fit_power_law, slope_transition
from .config import desk_config, full_config, load_config
from .errors import ConfigError, NumericsError
from .runio import read_rows
from .sweeps import (FIGURE_IDS, fit_rows, reproduce, run_classical,
                     run_q_scaling, run_qfi_sweep, write_fits)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickedtop",
        description="Kicked-top sensor sweeps: QFI under partial access, "
                    "classical chaos diagnostics, scaling fits.")
    parser.add_argument("--config", metavar="PATH", help="INI config file")
    parser.add_argument("--full", action="store_true",
                        help="paper-scale defaults (N=1000, long time grids)")
    parser.add_argument("--seed", type=int, metavar="U64", help="override RNG seed")
    parser.add_argument("--out", metavar="DIR",
                        default=os.environ.get("KICKEDTOP_OUT", "out"),
                        help="output directory (default: $KICKEDTOP_OUT or ./out)")
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker threads for QFI fan-out")
    parser.add_argument("--resume", action="store_true",
                        help="continue an interrupted sweep from its checkpoints")
    parser.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("qfi-sweep", help="QFI versus time over (kappa, state, Q)")
    sub.add_parser("q-scaling", help="QFI versus subsystem size at fixed times")
    sub.add_parser("classical", help="Lyapunov sweep and phase portraits")

    fit = sub.add_parser("fit", help="power-law fits over an existing sweep CSV")
    fit.add_argument("rows_csv", help="CSV produced by qfi-sweep or q-scaling")
    fit.add_argument("--axis", choices=("time", "subsystem"), default="time")
    fit.add_argument("--window", nargs=2, type=float, required=True,
                     metavar=("LO", "HI"))
    fit.add_argument("--split", type=float, default=None,
                     help="also report slope transition at this fractional access")
    fit.add_argument("--out-file", default=None, help="write fits to this CSV")

    rep = sub.add_parser("reproduce", help="one-command figure data recipes")
    rep.add_argument("figure_id", choices=FIGURE_IDS)
    rep.add_argument("--no-render", action="store_true",
                     help="emit data files only, skip PNG rendering")
    return parser


def resolve_config(args):
    if args.config:
        config = load_config(args.config, full_scale=args.full)
    else:
        config = full_config() if args.full else desk_config()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def cmd_fit(args) -> int:
    rows = read_rows(args.rows_csv)
    fits = fit_rows(rows, args.axis, tuple(args.window))
    for item in fits:
        fit = item["fit"]
        print(f"{item['label']} {args.axis}-group={item['group']}: "
              f"s = {fit.exponent:.4f} +/- {fit.stderr:.4f} "
              f"(R^2 = {fit.r_squared:.4f}, n = {fit.n_points})")
    if args.out_file:
        write_fits(fits, Path(args.out_file))
    if args.split is not None:
        groups: dict = {}
        for row in rows:
            if row["qfi_fractional"] is None:
                continue
            key = (row["kappa"], row["label"], row["t"])
            groups.setdefault(key, []).append((row["Q"] / row["N"], row["qfi_fractional"]))
        for (kappa, label, t), samples in sorted(groups.items()):
            try:
                below, above = slope_transition(samples, args.split)
            except ValueError:
                continue
            print(f"{label} kappa={kappa:g} t={t}: slope below = "
                  f"{below.exponent:.3f} +/- {below.stderr:.3f}, above = "
                  f"{above.exponent:.3f} +/- {above.stderr:.3f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fit":
            return cmd_fit(args)
        config = resolve_config(args)
        out_dir = Path(args.out)
        if args.command == "qfi-sweep":
            path = run_qfi_sweep(config, out_dir, threads=args.threads,
                                 resume=args.resume)
            print(f"rows written to {path}")
        elif args.command == "q-scaling":
            path = run_q_scaling(config, out_dir, threads=args.threads,
                                 resume=args.resume)
            print(f"rows written to {path}")
        elif args.command == "classical":
            for path in run_classical(config, out_dir):
                print(f"wrote {path}")
        elif args.command == "reproduce":
            for path in reproduce(args.figure_id, config, out_dir,
                                  threads=args.threads, resume=args.resume,
                                  render=not args.no_render):
                print(f"wrote {path}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
