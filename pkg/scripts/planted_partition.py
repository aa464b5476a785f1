"""Recovery rate of each detector on two cliques joined by a bridge edge."""
import argparse

import numpy as np

from labelspace.community import ALGORITHMS, DetectorConfig, detect
from labelspace.label_graph import LabelGraph


def planted(size, rng):
    n = 2 * size
    edges = [(i, j) for i in range(size) for j in range(i + 1, size)]
    edges += [(size + i, size + j) for i in range(size) for j in range(i + 1, size)]
    edges.append((int(rng.integers(size)), size + int(rng.integers(size))))
    perm = rng.permutation(n)
    edges = [(int(perm[a]), int(perm[b])) for a, b in edges]
    blocks = tuple(sorted(tuple(sorted(int(perm[v]) for v in range(s, s + size))) for s in (0, size)))
    return n, edges, blocks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--size", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    graphs = [planted(args.size, rng) for _ in range(args.runs)]
    for algorithm in ALGORITHMS:
        for weighted in (False, True):
            hits = sum(detect(LabelGraph.from_edges(n, edges), DetectorConfig(algorithm, weighted, rng_seed=s)).blocks == b
                       for s, (n, edges, b) in enumerate(graphs))
            print(f"{algorithm + ('-weighted' if weighted else ''):28s} {hits}/{args.runs}")


if __name__ == "__main__":
    main()
