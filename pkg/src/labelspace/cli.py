"""Command line entry point.

    labelspace run CONFIG [--out scores.csv]
    labelspace analyze SCORES [--out-dir DIR]
    labelspace report LIKELIHOODS [--out-dir DIR] [--alpha 0.05]
    labelspace synth DIR [--instances 200 --labels 6 --seed 0]

Exit codes: 0 success, 1 config error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import experiment
from .dataset_io import DatasetError, write_pair
from .experiment import ConfigError
from .synthetic import make_synthetic

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
log = logging.getLogger("labelspace")


def _cmd_run(args) -> int:
    config = experiment.load_config(args.config)
    if args.jobs is not None:
        config = dataclasses.replace(config, jobs=args.jobs)
    result = experiment.run(config, args.out)
    print(f"wrote {result.records} records to {result.scores_path}")
    for name, err in sorted(result.failures.items()):
        print(f"dataset {name} failed: {err}", file=sys.stderr)
    return EXIT_DATA if result.failures else EXIT_OK


def _cmd_analyze(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.scores).parent
    like, agg = experiment.analyze(args.scores, out_dir)
    print(f"wrote {like} and {agg}")
    return EXIT_OK


def _cmd_report(args) -> int:
    if not 0 < args.alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.likelihoods).parent
    path = experiment.report(args.likelihoods, out_dir, args.alpha)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    pair = make_synthetic(args.instances, args.labels, args.groups, seed=args.seed)
    train, test, xml = write_pair(pair, args.directory, args.name)
    config = {
        "datasets": [{"name": args.name, "train": train.name, "test": test.name, "xml": xml.name}],
        "seed": args.seed,
        "output_dir": "results",
    }
    cfg_path = Path(args.directory) / "config.json"
    cfg_path.write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {train}, {test}, {xml} and {cfg_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="labelspace", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate the run matrix and write raw scores")
    r.add_argument("config")
    r.add_argument("--out", help="scores CSV (default: OUTPUT_DIR/scores.csv)")
    r.add_argument("--jobs", type=int, help="worker processes (overrides config)")
    r.set_defaults(func=_cmd_run)

    a = sub.add_parser("analyze", help="likelihoods of beating random partitions")
    a.add_argument("scores")
    a.add_argument("--out-dir")
    a.set_defaults(func=_cmd_analyze)

    rep = sub.add_parser("report", help="statistical tests, histograms and summary")
    rep.add_argument("likelihoods")
    rep.add_argument("--out-dir")
    rep.add_argument("--alpha", type=float, default=0.05)
    rep.set_defaults(func=_cmd_report)

    s = sub.add_parser("synth", help="write a synthetic dataset and a matching config")
    s.add_argument("directory")
    s.add_argument("--name", default="synthetic")
    s.add_argument("--instances", type=int, default=200)
    s.add_argument("--labels", type=int, default=6)
    s.add_argument("--groups", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
