"""Independent brute-force oracles used by the test-suite.

Nothing here imports the code under test except plain data types.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def set_partitions(n, max_blocks=None):
    """Every partition of range(n) as a list of lists (restricted growth strings)."""
    if n == 0:
        yield []
        return

    def rec(i, blocks):
        if i == n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        if max_blocks is None or len(blocks) < max_blocks:
            blocks.append([i])
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def modularity_bruteforce(adj, blocks):
    """Newman modularity straight from the definition sum_ij [A_ij - k_i k_j / 2m] delta / 2m."""
    adj = np.asarray(adj, dtype=float)
    two_m = adj.sum()
    if two_m == 0:
        return 0.0
    k = adj.sum(axis=1)
    q = 0.0
    for b in blocks:
        for i in b:
            for j in b:
                q += adj[i, j] - k[i] * k[j] / two_m
    return q / two_m


def best_modularity(adj, max_blocks=None):
    n = len(adj)
    best = -np.inf
    for p in set_partitions(n, max_blocks):
        q = modularity_bruteforce(adj, p)
        if q > best:
            best = q
    return best


def map_equation_bruteforce(adj, blocks):
    """Codelength from the module-wise entropy form q H(Q) + sum_m p_m H(P^m)."""
    adj = np.asarray(adj, dtype=float)
    two_m = adj.sum()
    p = adj.sum(axis=1) / two_m

    def entropy(ws):
        tot = sum(ws)
        return -sum(w / tot * math.log2(w / tot) for w in ws if w > 0)

    exits = []
    for b in blocks:
        inside = set(b)
        exits.append(sum(adj[i, j] for i in b for j in range(len(adj)) if j not in inside) / two_m)
    q = sum(exits)
    total = q * entropy(exits) if q > 0 else 0.0
    for b, qm in zip(blocks, exits):
        ws = [qm] + [p[v] for v in b]
        pm = sum(ws)
        if pm > 0:
            total += pm * entropy(ws)
    return total


def canonical(blocks):
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


def count_shaped_partitions_bruteforce(n, k):
    """Distinct partitions of range(n) into floor(n/k) blocks of size k plus a remainder block."""
    r = n % k
    want = sorted([k] * (n // k) + ([r] if r else []))
    return sum(1 for p in set_partitions(n) if sorted(len(b) for b in p) == want)


def two_cliques_with_bridge(size, rng=None):
    """Two ``size``-cliques joined by a single edge, under a random relabelling.

    Returns (edges, planted) with planted the canonical two-block partition.
    """
    n = 2 * size
    perm = np.arange(n) if rng is None else rng.permutation(n)
    left, right = list(range(size)), list(range(size, n))
    edges = list(itertools.combinations(left, 2)) + list(itertools.combinations(right, 2))
    a = left[0] if rng is None else int(rng.choice(left))
    b = right[0] if rng is None else int(rng.choice(right))
    edges.append((a, b))
    edges = [(int(perm[i]), int(perm[j])) for i, j in edges]
    planted = canonical([[int(perm[i]) for i in left], [int(perm[i]) for i in right]])
    return edges, planted
