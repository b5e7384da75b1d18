"""Command-line driver: sweep, convergence, and region-sweep experiments.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical failures.
"""

import argparse
import dataclasses
import sys

from .errors import ConfigurationError, NumericalError
from .harness import (convergence_to_csv, load_config, records_to_csv,
                      region_to_csv, run_convergence, run_region_sweep,
                      run_sweep)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fas-che",
        description="Monte-Carlo experiments for fluid-antenna channel estimation")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("sweep", "NMSE/BER/capacity over an SNR grid"),
            ("convergence", "per-iteration traces of the iterative estimator"),
            ("region-sweep", "capacity over a list of region sizes")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="flat key = value config file")
        cmd.add_argument("--out", required=True, help="output CSV path")
        cmd.add_argument("--seed", type=int, default=None, help="override base_seed")
        cmd.add_argument("--trials", type=int, default=None, help="override trials")
        cmd.add_argument("--dump-trace", action="store_true",
                         help="write schedules and per-trial iteration traces "
                              "next to the CSV")
    sub.choices["region-sweep"].add_argument(
        "--regions", required=True,
        help="comma-separated region sizes in wavelengths, e.g. 0.5,1,2,3.5,5")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, base_seed=args.seed)
        if args.trials is not None:
            config = dataclasses.replace(config, trials=args.trials)
        dump_dir = args.out + ".traces" if args.dump_trace else None
        if args.command == "sweep":
            csv_text = records_to_csv(run_sweep(config, dump_dir=dump_dir))
        elif args.command == "convergence":
            csv_text = convergence_to_csv(run_convergence(config, dump_dir=dump_dir))
        else:
            regions = [float(tok) for tok in args.regions.split(",") if tok.strip()]
            csv_text = region_to_csv(run_region_sweep(config, regions, dump_dir=dump_dir))
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    with open(args.out, "w") as fh:
        fh.write(csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
