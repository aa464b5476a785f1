"""Run the full pipeline on several synthetic datasets and write a report.

    python3 scripts/desk_run.py --out desk --datasets 4 --labels 6

With at least two datasets the report includes Friedman and Rom tests.
"""
import argparse
import logging
from pathlib import Path

from labelspace.dataset_io import write_pair
from labelspace.experiment import analyze, config_from_dict, report, run
from labelspace.synthetic import make_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("desk"))
    ap.add_argument("--datasets", type=int, default=4)
    ap.add_argument("--labels", type=int, default=6)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--samples-per-k", type=int, default=250)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    entries = []
    for i in range(args.datasets):
        name = f"synth{i}"
        groups = 2 + i % 2
        pair = make_synthetic(n_instances=args.instances, n_labels=args.labels,
                              n_groups=min(groups, args.labels), seed=args.seed + i)
        train, test, xml = write_pair(pair, args.out / "data", name)
        entries.append({"name": name, "train": str(train.resolve()),
                        "test": str(test.resolve()), "xml": str(xml.resolve())})
    cfg = config_from_dict({"datasets": entries, "seed": args.seed, "jobs": args.jobs,
                            "samples_per_k": args.samples_per_k,
                            "output_dir": str((args.out / "results").resolve())}, base=args.out)
    result = run(cfg)
    like, _ = analyze(result.scores_path, cfg.output_dir)
    report(like, cfg.output_dir)
    print(f"{result.records} score rows; report at {cfg.output_dir / 'report.md'}")


if __name__ == "__main__":
    main()
