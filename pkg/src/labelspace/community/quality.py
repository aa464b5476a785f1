"""Partition quality: Newman modularity and the two-level map equation."""
from __future__ import annotations

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition


def _check_cover(graph: LabelGraph, partition: Partition):
    if partition.n != graph.vertex_count:
        raise ValueError(
            f"partition covers {partition.n} vertices, graph has {graph.vertex_count}"
        )


def modularity(graph: LabelGraph, partition: Partition) -> float:
    """Q = sum_c [W_in(c)/W - (S(c)/2W)^2]; 0 for a graph without edges."""
    _check_cover(graph, partition)
    total = graph.total_weight
    if total == 0:
        return 0.0
    member = np.asarray(partition.membership())
    w_in = np.zeros(len(partition))
    for (i, j), w in graph.edges.items():
        if member[i] == member[j]:
            w_in[member[i]] += w
    s_c = np.bincount(member, weights=graph.strengths(), minlength=len(partition))
    return float(np.sum(w_in / total - (s_c / (2 * total)) ** 2))


def _plogp(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def map_equation(graph: LabelGraph, partition: Partition) -> float:
    """Two-level map equation codelength in bits for an undirected graph.

    Vertex visit rates are ``s_v / 2W``; a module's exit rate is the weight of
    its boundary edges over ``2W``. Isolated vertices have zero flow and so
    never change the codelength.
    """
    _check_cover(graph, partition)
    total = graph.total_weight
    if total == 0:
        raise ValueError("map equation is undefined for a graph without edges")
    member = np.asarray(partition.membership())
    flow = graph.strengths() / (2 * total)
    exit_w = np.zeros(len(partition))
    for (i, j), w in graph.edges.items():
        if member[i] != member[j]:
            exit_w[member[i]] += w
            exit_w[member[j]] += w
    q_m = exit_w / (2 * total)
    p_m = np.bincount(member, weights=flow, minlength=len(partition))
    return float(
        _plogp(q_m.sum())
        - 2 * _plogp(q_m).sum()
        - _plogp(flow).sum()
        + _plogp(q_m + p_m).sum()
    )
