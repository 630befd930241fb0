"""``qpac <command> --config <path> [--seed N] [--out <path>] [--check]``.

Exit status: 0 on success, 2 on a configuration error, 3 when ``--check``
is given and an acceptance threshold is missed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from qpac.harness import (EXPERIMENTS, ConfigError, ExperimentConfig, records_to_csv,
                          run_experiment, summary_to_json)
from qpac.kernels import BACKEND

log = logging.getLogger("qpac")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpac", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path,
                        help="JSON experiment config (defaults are used when omitted)")
    parser.add_argument("--seed", type=int, help="master seed, overrides the config")
    parser.add_argument("--out", type=Path,
                        help="output stem: writes <stem>.json and, if there are trial records, <stem>.csv")
    parser.add_argument("--check", action="store_true",
                        help="exit with status 3 if the experiment's acceptance threshold fails")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument("--timing", action="store_true", help="record wall-clock ms per trial")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config is not None:
            cfg = ExperimentConfig.load(args.config, args.command)
        else:
            cfg = ExperimentConfig(experiment=args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.workers is not None:
            cfg.workers = args.workers
        if args.timing:
            cfg.timing = True
        log.info("running %s with %s kernels", cfg.experiment, BACKEND)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"qpac: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = summary_to_json(result.summary)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.with_suffix(".json").write_text(text)
        if result.records:
            args.out.with_suffix(".csv").write_text(records_to_csv(result.records))
    else:
        sys.stdout.write(text)
    if args.check and not result.passed:
        print(f"qpac: {cfg.experiment} failed its acceptance threshold", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
