"""Command-line front end: ``losarray design <config.yaml>``."""

from __future__ import annotations

import argparse
import logging
import sys

from losarray.config import METHODS, ConfigError, load_config
from losarray.design import run, write_outputs
from losarray.exhaustive import EsBudgetExceeded

EXIT_CONFIG = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="losarray", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("design", help="run array design methods from a YAML config")
    p.add_argument("config", help="path to the run configuration (YAML)")
    p.add_argument("--method", action="append", choices=METHODS,
                   help="method to run (repeatable); overrides the config list")
    p.add_argument("--out-dir", help="output directory (overrides output_dir)")
    p.add_argument("--es-force", action="store_true", help="run exhaustive search beyond the budget")
    p.add_argument("--plot", action="store_true", default=None, help="also render PNG figures")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        config = load_config(args.config, validate=False).with_overrides(
            methods=args.method, output_dir=args.out_dir, es_force=args.es_force, plot=args.plot
        )
        results = run(config, progress=True)
        written = write_outputs(results, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EsBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for method, res in results.items():
        s = res.stats
        print(f"{method}: mean={s.mean:.4f} std={s.std:.4f} min={s.min:.4f} bpcu at {s.argmin_distance:g} m")
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
