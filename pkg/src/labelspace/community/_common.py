from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition

ALGORITHMS = ("fastgreedy", "leading_eigenvector", "label_propagation", "walktrap", "infomap")


@dataclass(frozen=True)
class DetectorConfig:
    algorithm: str = "fastgreedy"
    use_weights: bool = True
    rng_seed: int = 0
    walktrap_steps: int = 4
    infomap_trials: int = 10
    eigen_solver: str = "lapack"  # or "power": shifted power iteration
    eigen_tolerance: float = 1e-10
    eigen_max_iterations: int = 10000
    propagation_max_sweeps: int = 1000

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.walktrap_steps < 1:
            raise ValueError("walktrap_steps must be >= 1")
        if self.infomap_trials < 1:
            raise ValueError("infomap_trials must be >= 1")
        if self.eigen_solver not in ("lapack", "power"):
            raise ValueError(f"unknown eigen_solver {self.eigen_solver!r}")
        if self.eigen_tolerance <= 0:
            raise ValueError("eigen_tolerance must be positive")
        if self.eigen_max_iterations < 1 or self.propagation_max_sweeps < 1:
            raise ValueError("iteration caps must be positive")


class ConvergenceError(RuntimeError):
    """An iterative detector did not settle within its iteration budget."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


def active_adjacency(graph: LabelGraph, use_weights: bool) -> tuple[np.ndarray, np.ndarray]:
    """Dense adjacency restricted to non-isolated vertices, plus their ids.

    Isolated vertices are left out so every detector can place them in
    singleton blocks afterwards.
    """
    adj = graph.adjacency()
    if not use_weights:
        adj = (adj > 0).astype(float)
    active = np.flatnonzero(adj.sum(axis=1) > 0)
    return adj[np.ix_(active, active)], active


def lift(groups, active: np.ndarray, n: int) -> Partition:
    """Map groups over active-local indices back to a full partition."""
    blocks = [tuple(int(active[i]) for i in g) for g in groups]
    covered = set(int(v) for v in active)
    blocks.extend((v,) for v in range(n) if v not in covered)
    return Partition(tuple(blocks), "community")


def groups_from_labels(labels) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return list(groups.values())
