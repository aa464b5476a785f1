"""Greedy agglomerative modularity maximisation (Clauset-Newman-Moore)."""
from __future__ import annotations

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import DetectorConfig, active_adjacency, lift


def fast_greedy(graph: LabelGraph, config: DetectorConfig | None = None) -> Partition:
    """Merge the pair of adjacent communities with the largest modularity gain
    until no merge has a positive gain.

    Ties go to the lexicographically smallest pair of block minima. Communities
    are indexed by their smallest vertex, so the row-major first maximum of the
    gain matrix is exactly that pair.
    """
    config = config or DetectorConfig("fastgreedy")
    adj, active = active_adjacency(graph, config.use_weights)
    n = len(active)
    members = [[i] for i in range(n)]
    if n:
        two_w = adj.sum()
        strength = adj.sum(axis=1)
        between = adj.copy()
        alive = np.ones(n, dtype=bool)
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        while True:
            # proportional to the modularity gain 2(e_ij - a_i a_j)
            gain = two_w * between - np.outer(strength, strength)
            ok = upper & (between > 0) & alive[:, None] & alive[None, :]
            if not ok.any():
                break
            gain = np.where(ok, gain, -np.inf)
            # equal gains up to rounding go to the smallest (i, j) pair
            flat = int(np.argmax(gain >= gain.max() - 1e-12 * two_w * two_w))
            if not gain.flat[flat] > 0:
                break
            i, j = divmod(flat, n)
            between[i, :] += between[j, :]
            between[:, i] += between[:, j]
            between[i, i] = 0.0
            between[j, :] = 0.0
            between[:, j] = 0.0
            strength[i] += strength[j]
            strength[j] = 0.0
            alive[j] = False
            members[i].extend(members[j])
            members[j] = []
    return lift([m for m in members if m], active, graph.vertex_count)
