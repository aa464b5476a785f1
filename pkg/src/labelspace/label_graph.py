"""Label co-occurrence graphs built from a binary label matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabelGraph:
    """Undirected simple graph on ``vertex_count`` labels.

    ``edges`` maps ``(i, j)`` with ``i < j`` to a positive weight. In
    unweighted mode every weight is 1.
    """

    vertex_count: int
    edges: dict
    weighted: bool = True

    def __post_init__(self):
        for (i, j), w in self.edges.items():
            if not (0 <= i < j < self.vertex_count):
                raise ValueError(f"bad edge ({i}, {j})")
            if w <= 0:
                raise ValueError(f"edge ({i}, {j}) has nonpositive weight {w}")

    @classmethod
    def from_edges(cls, n: int, edges, weighted: bool = True) -> "LabelGraph":
        """Build from ``(i, j)`` or ``(i, j, w)`` tuples; repeated pairs add up."""
        acc: dict[tuple[int, int], float] = {}
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = e[2] if len(e) > 2 else 1
            if i == j:
                raise ValueError("self-loops are not allowed")
            key = (min(i, j), max(i, j))
            acc[key] = acc.get(key, 0) + w
        if not weighted:
            acc = {k: 1 for k in acc}
        return cls(n, acc, weighted)

    @property
    def total_weight(self) -> float:
        return float(sum(self.edges.values()))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count))
        for (i, j), w in self.edges.items():
            a[i, j] = a[j, i] = w
        return a

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.vertex_count, dtype=int)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def strengths(self) -> np.ndarray:
        s = np.zeros(self.vertex_count)
        for (i, j), w in self.edges.items():
            s[i] += w
            s[j] += w
        return s

    def neighbors(self) -> list[dict[int, float]]:
        nb: list[dict[int, float]] = [{} for _ in range(self.vertex_count)]
        for (i, j), w in self.edges.items():
            nb[i][j] = w
            nb[j][i] = w
        return nb

    def scaled(self, factor: float) -> "LabelGraph":
        return LabelGraph(self.vertex_count, {e: w * factor for e, w in self.edges.items()}, self.weighted)

    def to_edge_list(self) -> str:
        """``i j weight`` per line, edges in sorted order."""
        return "".join(f"{i} {j} {_fmt(w)}\n" for (i, j), w in sorted(self.edges.items()))


def _fmt(w) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def build_cooccurrence_graph(labels, weighted: bool = True) -> LabelGraph:
    """Edge ``{i, j}`` iff some row carries both labels; weight counts such rows."""
    y = np.asarray(labels)
    if y.ndim != 2:
        raise ValueError("label matrix must be 2-D")
    if y.shape[1] == 0:
        raise ValueError("label matrix has zero label columns")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("label matrix must be binary")
    y = y.astype(np.int64)
    co = y.T @ y
    n = y.shape[1]
    iu, ju = np.triu_indices(n, k=1)
    mask = co[iu, ju] > 0
    edges = {
        (int(i), int(j)): (int(c) if weighted else 1)
        for i, j, c in zip(iu[mask], ju[mask], co[iu, ju][mask])
    }
    return LabelGraph(n, edges, weighted)
