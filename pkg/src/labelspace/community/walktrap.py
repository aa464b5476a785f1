"""Walktrap (Pons and Latapy): Ward-style agglomeration on random-walk distances,
cut where modularity peaks."""
from __future__ import annotations

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import DetectorConfig, active_adjacency, lift


def walk_profiles(adj: np.ndarray, steps: int) -> np.ndarray:
    """Rows ``P^t_i. / sqrt(d)`` so that ``r_ij`` is the Euclidean distance of rows."""
    degree = adj.sum(axis=1)
    transition = adj / degree[:, None]
    return np.linalg.matrix_power(transition, steps) / np.sqrt(degree)[None, :]


def walktrap(graph: LabelGraph, config: DetectorConfig | None = None) -> Partition:
    config = config or DetectorConfig("walktrap")
    adj, active = active_adjacency(graph, config.use_weights)
    n = len(active)
    if n == 0:
        return lift([], active, graph.vertex_count)

    profile = walk_profiles(adj, config.walktrap_steps)
    size = np.ones(n)
    between = adj.copy()
    strength = adj.sum(axis=1)
    two_w = strength.sum()
    alive = np.ones(n, dtype=bool)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    sq = np.einsum("ij,ij->i", profile, profile)
    dist2 = np.maximum(sq[:, None] + sq[None, :] - 2 * profile @ profile.T, 0.0)
    # Ward increase of the mean squared vertex-to-community distance (the 1/n factor is dropped)
    sigma = dist2 * np.outer(size, size) / (size[:, None] + size[None, :])

    q = float(-np.sum((strength / two_w) ** 2))
    best_q, best_step = q, 0
    merges: list[tuple[int, int]] = []
    while True:
        ok = upper & (between > 0) & alive[:, None] & alive[None, :]
        if not ok.any():
            break
        cand = np.where(ok, sigma, np.inf)
        # equal distances (up to rounding) go to the smallest (i, j) pair
        flat = int(np.argmax(cand <= cand.min() * (1 + 1e-9) + 1e-300))
        i, j = divmod(flat, n)
        q += 2 * between[i, j] / two_w - 2 * strength[i] * strength[j] / two_w**2
        merges.append((i, j))
        if q > best_q + 1e-12:
            best_q, best_step = q, len(merges)

        profile[i] = (size[i] * profile[i] + size[j] * profile[j]) / (size[i] + size[j])
        size[i] += size[j]
        strength[i] += strength[j]
        between[i, :] += between[j, :]
        between[:, i] += between[:, j]
        between[i, i] = 0.0
        between[j, :] = 0.0
        between[:, j] = 0.0
        alive[j] = False
        d2 = np.sum((profile - profile[i]) ** 2, axis=1)
        row = d2 * size * size[i] / (size + size[i])
        sigma[i, :] = row
        sigma[:, i] = row

    members = [[v] for v in range(n)]
    for i, j in merges[:best_step]:
        members[i].extend(members[j])
        members[j] = []
    return lift([m for m in members if m], active, graph.vertex_count)
