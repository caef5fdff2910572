"""Command-line scenario runner.

Exit codes: 0 success, 2 configuration error, 3 physics or validation error,
4 truncation overflow.  Failures print one diagnostic line to stderr.
"""

import argparse
import sys

from .config import SCENARIOS, default_config, parse_config, serialize
from .errors import ConfigError, PairmaserError, TruncationError
from .scenarios import FIG4_NOTE, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_TRUNCATION = 4

EPILOG = f"""\
scenarios:
  fig2          average photon number and entropy for two reservoirs that differ
                only in the double-excitation coherence (xi=0.5, 30 passes)
  fig3          entropy trajectories across inner-coherence phases
  fig4          entropy difference across phases; {FIG4_NOTE}
  steady_table  closed-form vs iterated steady photon numbers (weak map, xi=0.01)
  sweep         steady observables on a phase x coupling grid

exit codes: 0 ok, 2 config error, 3 physics/validation error, 4 truncation overflow
"""


def build_parser():
    p = argparse.ArgumentParser(
        prog="pairmaser",
        description="Cavity driven by a beam of two-level atom pairs in X-states.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", metavar="PATH", help="JSON scenario configuration")
    p.add_argument("--scenario", choices=SCENARIOS,
                   help="scenario to run; overrides the one in --config")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides output_path)")
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="parallel workers for sweep grid points (default 1)")
    p.add_argument("--plot", action="store_true",
                   help="also render PNG figures next to the CSV files")
    p.add_argument("--print-config", action="store_true",
                   help="print the normalized configuration and exit")
    return p


def load_config(args):
    if args.config is None:
        if args.scenario is None:
            raise ConfigError("give --config, --scenario, or both")
        return default_config(args.scenario)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
    return parse_config(text, scenario=args.scenario)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {args.workers}")
        if args.print_config:
            sys.stdout.write(serialize(cfg))
            return EXIT_OK
        for path in run_scenario(cfg, out_dir=args.out, workers=args.workers, plot=args.plot):
            print(path)
    except ConfigError as exc:
        print(f"pairmaser: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"pairmaser: truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except PairmaserError as exc:
        print(f"pairmaser: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
