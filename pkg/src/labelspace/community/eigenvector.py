"""Newman's leading-eigenvector method: recursive spectral bisection of the
(generalised) modularity matrix."""
from __future__ import annotations

from collections import deque

import numpy as np

from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import ConvergenceError, DetectorConfig, active_adjacency, lift


def leading_eigenpair(matrix: np.ndarray, start: np.ndarray, tol: float = 1e-10,
                      max_iter: int = 10000, deflate: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Most positive eigenvalue of a symmetric matrix and a unit eigenvector.

    Power iteration on ``matrix + c I`` where ``c`` is a Gershgorin bound on
    the most negative eigenvalue, so the dominant eigenvalue of the shifted
    matrix is the most positive one of the original. Converged when the
    residual ``||M v - lambda v||`` drops below ``tol * max(1, c)``.

    ``deflate`` is a known eigenvector; iterates are kept orthogonal to it, so
    the result is the leading eigenpair of the orthogonal complement.
    """
    m = np.asarray(matrix, dtype=float)
    diag = np.diag(m)
    radius = np.abs(m).sum(axis=1) - np.abs(diag)
    shift = max(0.0, -float(np.min(diag - radius)))
    scale = max(1.0, shift, float(np.max(np.abs(diag) + radius)))
    if deflate is not None:
        u = deflate / np.linalg.norm(deflate)
        project = lambda x: x - (u @ x) * u  # noqa: E731
    else:
        project = lambda x: x  # noqa: E731
    v = project(np.asarray(start, dtype=float))
    v = v / np.linalg.norm(v)
    residual = np.inf
    for _ in range(max_iter):
        mv = m @ v
        lam = float(v @ mv)
        residual = float(np.linalg.norm(mv - lam * v))
        if residual <= tol * scale:
            return lam, _fix_sign(v, np.sqrt(tol))
        w = project(mv + shift * v)
        norm = np.linalg.norm(w)
        if norm == 0:
            # v lies in the null space of the shifted matrix; every eigenvalue is -shift
            return lam, _fix_sign(v, np.sqrt(tol))
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual,
    )


def _fix_sign(v: np.ndarray, rel: float = 1e-5) -> np.ndarray:
    # eigenvectors are defined up to sign; pin the first clearly non-zero entry
    # positive (a largest-magnitude rule flips on near-ties in magnitude)
    big = np.flatnonzero(np.abs(v) > rel * np.abs(v).max())
    return v if v[big[0]] >= 0 else -v


def _leading(bg: np.ndarray, start: np.ndarray, config: DetectorConfig) -> tuple[float, np.ndarray]:
    if config.eigen_solver == "power":
        # rows of bg sum to zero, so the constant vector is an eigenvector with
        # eigenvalue 0; it never splits the group, so search its complement
        return leading_eigenpair(bg, start, config.eigen_tolerance, config.eigen_max_iterations,
                                 deflate=np.ones(len(bg)))
    try:
        w, v = np.linalg.eigh(bg)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"dense eigensolver failed: {exc}") from None
    return float(w[-1]), _fix_sign(v[:, -1], np.sqrt(config.eigen_tolerance))


def leading_eigenvector(graph: LabelGraph, config: DetectorConfig | None = None) -> Partition:
    config = config or DetectorConfig("leading_eigenvector")
    adj, active = active_adjacency(graph, config.use_weights)
    n = len(active)
    if n == 0:
        return lift([], active, graph.vertex_count)
    two_w = adj.sum()
    strength = adj.sum(axis=1)
    b = adj - np.outer(strength, strength) / two_w
    rng = np.random.default_rng(config.rng_seed)

    done: list[list[int]] = []
    pending = deque([list(range(n))])
    while pending:
        group = pending.popleft()
        if len(group) == 1:
            done.append(group)
            continue
        idx = np.asarray(group)
        bg = b[np.ix_(idx, idx)]
        bg = bg - np.diag(bg.sum(axis=1))
        start = rng.uniform(0.5, 1.5, size=len(group)) * rng.choice((-1.0, 1.0), size=len(group))
        beta, vec = _leading(bg, start, config)
        scale = max(1.0, float(np.abs(bg).max()))
        if beta <= 1e-8 * scale:
            done.append(group)
            continue
        # zero components count as positive; the iterate is only accurate to about
        # the residual tolerance, so anything below sqrt(tol) of the peak is zero
        positive = vec >= -np.sqrt(config.eigen_tolerance) * np.abs(vec).max()
        if positive.all() or not positive.any():
            done.append(group)
            continue
        s = np.where(positive, 1.0, -1.0)
        gain = float(s @ bg @ s) / (2.0 * two_w)
        if gain <= 1e-12:
            done.append(group)
            continue
        pending.append([g for g, p in zip(group, positive) if p])
        pending.append([g for g, p in zip(group, positive) if not p])
    return lift(done, active, graph.vertex_count)
