"""Asynchronous label propagation (Raghavan, Albert and Kumara)."""
from __future__ import annotations

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import ConvergenceError, DetectorConfig, active_adjacency, groups_from_labels, lift


def label_propagation(graph: LabelGraph, config: DetectorConfig | None = None) -> Partition:
    """Every vertex repeatedly adopts the tag carrying the most (weighted) votes
    among its neighbours, visiting vertices in a fresh random order each sweep.

    A vertex whose current tag is already among the dominant ones keeps it;
    otherwise it picks uniformly among the dominant tags. The run stops after a
    sweep in which nobody changed, i.e. when every tag agrees with its
    neighbourhood.
    """
    config = config or DetectorConfig("label_propagation")
    adj, active = active_adjacency(graph, config.use_weights)
    n = len(active)
    rng = np.random.default_rng(config.rng_seed)
    nbrs = [np.flatnonzero(adj[u]) for u in range(n)]
    wts = [adj[u, nbrs[u]] for u in range(n)]
    tags = np.arange(n)
    for _ in range(config.propagation_max_sweeps):
        changed = False
        for u in rng.permutation(n):
            votes: dict[int, float] = {}
            for v, w in zip(nbrs[u], wts[u]):
                t = int(tags[v])
                votes[t] = votes.get(t, 0.0) + w
            top = max(votes.values())
            dominant = sorted(t for t, c in votes.items() if c >= top - 1e-12 * top)
            if tags[u] in dominant:
                continue
            tags[u] = dominant[int(rng.integers(len(dominant)))]
            changed = True
        if not changed:
            return lift(groups_from_labels(tags), active, graph.vertex_count)
    raise ConvergenceError(
        f"label propagation did not settle within {config.propagation_max_sweeps} sweeps"
    )
