"""Write a synthetic ARFF/XML dataset triple (same as ``labelspace synth`` without the config)."""
import argparse
from pathlib import Path

from labelspace.dataset_io import write_pair
from labelspace.synthetic import make_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", type=Path)
    ap.add_argument("--name", default="synthetic")
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--labels", type=int, default=6)
    ap.add_argument("--groups", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pair = make_synthetic(args.instances, args.labels, args.groups, seed=args.seed)
    for path in write_pair(pair, args.directory, args.name):
        print(path)


if __name__ == "__main__":
    main()
