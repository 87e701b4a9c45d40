"""``simulate`` command line entry point.

    simulate <stage> --config <file|bundled name> [--seed N] [--out DIR] [--workers N]
    simulate validate --config <file>

Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import scenario
from .eigensolver import GridLeakageError
from .propagator import PropagationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("photocoherence")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simulate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in scenario.WHICH + ("validate",):
        p = sub.add_parser(stage)
        p.add_argument("--config", required=True,
                       help="scenario file (.toml, .json, run manifest) or bundled name: "
                            + ", ".join(scenario.BUNDLED))
        if stage != "validate":
            p.add_argument("--seed", type=_u64, default=None, help="master seed, overrides the file")
            p.add_argument("--out", default=None, help="output directory, overrides the file")
            p.add_argument("--workers", type=int, default=1, help="worker processes for propagation")
            p.add_argument("--realizations", type=int, default=None,
                           help="number of incoherent realizations, overrides the file")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        raw = scenario.load_raw(args.config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read configuration {args.config!r}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    overrides = {}
    if args.stage != "validate":
        if args.seed is not None:
            overrides["scenario.master_seed"] = args.seed
        if args.realizations is not None:
            overrides["scenario.realizations"] = args.realizations
        if args.workers < 1:
            print("error: --workers must be >= 1", file=sys.stderr)
            return EXIT_VALIDATION

    if args.stage == "validate":
        diags = scenario.validate(raw)
        for d in diags:
            print(d)
        if not diags:
            print("ok")
        return EXIT_VALIDATION if diags else EXIT_OK

    try:
        cfg = scenario.build(raw, overrides)
    except scenario.ConfigError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        result = scenario.run_scenario(cfg, args.stage, args.out, args.workers)
    except (PropagationError, GridLeakageError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    log.info("wrote %d files", len(result.files))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
