"""Two-level Infomap: Louvain-style search minimising the map equation."""
from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import DetectorConfig, active_adjacency, groups_from_labels, lift
from .quality import map_equation


def _plogp(x: float) -> float:
    return x * np.log2(x) if x > 0 else 0.0


class _Modules:
    """Module flow / exit bookkeeping for one level of the search.

    Exit terms are kept in raw weight units and divided by 2W on use.
    """

    def __init__(self, flow, node_exit, two_w):
        self.two_w = two_w
        self.flow = np.array(flow, dtype=float)
        self.exit = np.array(node_exit, dtype=float)
        self.total_exit = float(self.exit.sum())

    def term(self, m, flow=None, exit_=None):
        f = self.flow[m] if flow is None else flow
        e = (self.exit[m] if exit_ is None else exit_) / self.two_w
        return -2 * _plogp(e) + _plogp(e + f)

    def move_delta(self, old, new, p_u, e_u, w_old, w_new):
        """Codelength change (up to constants) of moving a node between modules."""
        old_exit = self.exit[old] - e_u + 2 * w_old
        new_exit = self.exit[new] + e_u - 2 * w_new
        total = self.total_exit - self.exit[old] - self.exit[new] + old_exit + new_exit
        before = _plogp(self.total_exit / self.two_w) + self.term(old) + self.term(new)
        after = (
            _plogp(total / self.two_w)
            + self.term(old, self.flow[old] - p_u, old_exit)
            + self.term(new, self.flow[new] + p_u, new_exit)
        )
        return after - before, old_exit, new_exit, total


def _one_level(nbrs, flow, node_exit, two_w, rng):
    """Greedy local moves; returns module ids per node."""
    n = len(flow)
    module = np.arange(n)
    mods = _Modules(flow, node_exit, two_w)
    improved = True
    while improved:
        improved = False
        for u in rng.permutation(n):
            old = int(module[u])
            links: dict[int, float] = {}
            for v, w in nbrs[u].items():
                links[int(module[v])] = links.get(int(module[v]), 0.0) + w
            w_old = links.get(old, 0.0)
            best = (-1e-10, None)
            for cand in sorted(links):
                if cand == old:
                    continue
                d, *_ = mods.move_delta(old, cand, flow[u], node_exit[u], w_old, links[cand])
                if d < best[0] - 1e-12:  # later candidates must win by more than rounding
                    best = (d, cand)
            if best[1] is None:
                continue
            new = best[1]
            _, old_exit, new_exit, total = mods.move_delta(
                old, new, flow[u], node_exit[u], w_old, links[new]
            )
            mods.exit[old], mods.exit[new], mods.total_exit = old_exit, new_exit, total
            mods.flow[old] -= flow[u]
            mods.flow[new] += flow[u]
            module[u] = new
            improved = True
    return module


def _search(adj: np.ndarray, rng) -> np.ndarray:
    """Multi-level local-move search; returns a module id per vertex."""
    n = len(adj)
    two_w = adj.sum()
    assign = np.arange(n)
    nbrs = [{int(v): float(adj[u, v]) for v in np.flatnonzero(adj[u])} for u in range(n)]
    flow = adj.sum(axis=1) / two_w
    while True:
        node_exit = np.array([sum(nb.values()) for nb in nbrs])
        module = _one_level(nbrs, flow, node_exit, two_w, rng)
        labels, module = np.unique(module, return_inverse=True)
        if len(labels) == len(nbrs):
            return assign
        assign = module[assign]
        agg: list[dict[int, float]] = [{} for _ in labels]
        for u, nb in enumerate(nbrs):
            mu = int(module[u])
            for v, w in nb.items():
                mv = int(module[v])
                if mv != mu:
                    agg[mu][mv] = agg[mu].get(mv, 0.0) + w
        flow = np.bincount(module, weights=flow)
        nbrs = agg


def infomap(graph: LabelGraph, config: DetectorConfig | None = None) -> Partition:
    """Best of ``infomap_trials`` seeded searches by map-equation codelength.

    The one-module-per-connected-component partition is always a candidate, so
    the result never codes worse than it. Trial ``i`` draws from a stream seeded
    by ``(rng_seed, i)``, making the outcome independent of evaluation order.
    """
    config = config or DetectorConfig("infomap")
    adj, active = active_adjacency(graph, config.use_weights)
    n_total = graph.vertex_count
    if len(active) == 0:
        return lift([], active, n_total)
    # score on the graph as the search saw it (binarised when weights are off)
    scored = graph if config.use_weights else LabelGraph(
        n_total, {e: 1 for e in graph.edges}, False
    )

    candidates = []
    for trial in range(config.infomap_trials):
        rng = np.random.default_rng([config.rng_seed, trial])
        candidates.append(groups_from_labels(_search(adj, rng)))
    _, comp = connected_components(adj, directed=False)
    candidates.append(groups_from_labels(comp))

    best, best_len = None, np.inf
    for groups in candidates:
        part = lift(groups, active, n_total)
        length = map_equation(scored, part)
        if length < best_len - 1e-12:
            best, best_len = part, length
    return best
