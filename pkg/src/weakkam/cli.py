"""Command-line entry point.

    weakkam run <config> [--out DIR] [--figures]
    weakkam oracle [--seed N]
    weakkam plot <out-dir>

`run` executes the full pipeline and writes profiles.csv, convergence.csv,
and report.txt; with --figures it additionally renders PNG figures from
those CSVs.  `oracle` runs the brute-force validation suites.  `plot`
renders figures for an existing output directory.  WEAKKAM_THREADS caps the
worker count of the lambda sweep.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, parse_config
from .experiment import EXIT_CONFIG, EXIT_OK, run_experiment


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="weakkam",
        description="semi-discrete weak KAM toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--figures", action="store_true",
                       help="also render PNG figures from the output CSVs")

    p_oracle = sub.add_parser("oracle", help="run the brute-force oracle suites")
    p_oracle.add_argument("--seed", type=int, default=0)

    p_plot = sub.add_parser("plot", help="render figures from an output directory")
    p_plot.add_argument("out_dir", help="directory holding profiles.csv/convergence.csv")

    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            cfg = parse_config(text)
        except ConfigError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        code = run_experiment(cfg, out_dir=args.out)
        if code == EXIT_OK and args.figures:
            from .plots import render_report_figures
            out = args.out if args.out is not None else cfg["output.dir"]
            for path in render_report_figures(out):
                print(f"wrote {path}")
        return code

    if args.command == "oracle":
        from .oracles import run_oracle_suites
        results = run_oracle_suites(seed=args.seed, verbose=True)
        return 0 if all(r["passed"] for r in results) else 1

    if args.command == "plot":
        from .plots import render_report_figures
        try:
            for path in render_report_figures(args.out_dir):
                print(f"wrote {path}")
        except OSError as exc:
            print(f"cannot render figures: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return 0

    parser.error(f"unknown command {args.command}")  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
