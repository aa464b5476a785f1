"""Problem transformations: Binary Relevance, Label Powerset, and ensembles of
Label Powerset models over a label-space partition (RAkELd and data-driven)."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from . import cart
from .cart import CartParams, DecisionTree
from .dataset_io import Dataset
from .partition import Partition

DEFAULT_ENUMERATION_CAP = 100_000


# --- Binary Relevance -------------------------------------------------------

def br_train(dataset: Dataset, params: CartParams | None = None) -> list[DecisionTree]:
    if dataset.n_labels < 1:
        raise ValueError("binary relevance needs at least one label")
    x = dataset.features
    return [cart.train(x, dataset.labels[:, j].astype(np.int64), params) for j in range(dataset.n_labels)]


def br_predict_many(models: list[DecisionTree], features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    out = np.zeros((len(x), len(models)), dtype=np.int8)
    for j, tree in enumerate(models):
        out[:, j] = cart.predict_many(tree, x) == 1
    return out


def br_predict(models: list[DecisionTree], x) -> frozenset[int]:
    row = np.asarray(x, dtype=float)
    if row.ndim != 1:
        raise ValueError("expected a single feature vector")
    return frozenset(np.flatnonzero(br_predict_many(models, row[None, :])[0]).tolist())


# --- Label Powerset ---------------------------------------------------------

@dataclass(frozen=True)
class LpMapping:
    """Observed label combinations of a block <-> dense class ids.

    Combinations are sorted tuples of global label indices; ids follow the
    lexicographic order of the combinations' 0/1 patterns over the block, so
    the empty combination (when observed) is always class 0.
    """

    block: tuple[int, ...]
    combinations: tuple[tuple[int, ...], ...]

    def class_of(self, combination) -> int:
        return self._index[tuple(sorted(combination))]

    def combination_of(self, class_id: int) -> tuple[int, ...]:
        return self.combinations[class_id]

    @property
    def _index(self) -> dict:
        # cheap to rebuild; mappings hold at most one entry per training row
        return {c: i for i, c in enumerate(self.combinations)}

    def __len__(self):
        return len(self.combinations)


def lp_fit_mapping(labels, block) -> LpMapping:
    block = tuple(sorted(int(b) for b in block))
    if not block:
        raise ValueError("label block must be nonempty")
    y = np.asarray(labels)[:, list(block)]
    patterns = np.unique(y, axis=0)
    combos = tuple(tuple(b for b, bit in zip(block, row) if bit) for row in patterns)
    return LpMapping(block, combos)


def _encode(labels, mapping: LpMapping) -> np.ndarray:
    y = np.asarray(labels)[:, list(mapping.block)]
    index = mapping._index
    return np.array(
        [index[tuple(b for b, bit in zip(mapping.block, row) if bit)] for row in y], dtype=np.int64
    )


@dataclass(frozen=True)
class LpModel:
    mapping: LpMapping
    tree: DecisionTree


def lp_train(dataset: Dataset, block=None, params: CartParams | None = None) -> LpModel:
    block = range(dataset.n_labels) if block is None else block
    mapping = lp_fit_mapping(dataset.labels, block)
    classes = _encode(dataset.labels, mapping)
    return LpModel(mapping, cart.train(dataset.features, classes, params))


def lp_predict_many(model: LpModel, features, n_labels: int | None = None) -> np.ndarray:
    """Binary matrix over ``n_labels`` columns (default: max label index + 1)."""
    x = np.asarray(features, dtype=float)
    n_labels = max(model.mapping.block) + 1 if n_labels is None else n_labels
    out = np.zeros((len(x), n_labels), dtype=np.int8)
    classes = cart.predict_many(model.tree, x)
    for c in np.unique(classes):
        combo = list(model.mapping.combination_of(int(c)))
        if combo:
            rows = np.flatnonzero(classes == c)
            out[np.ix_(rows, combo)] = 1
    return out


def lp_predict(model: LpModel, x) -> frozenset[int]:
    return frozenset(model.mapping.combination_of(cart.predict(model.tree, x)))


# --- Partition ensembles -----------------------------------------------------

@dataclass(frozen=True)
class EnsembleModel:
    partition: Partition
    models: tuple[LpModel, ...]

    @property
    def n_labels(self) -> int:
        return self.partition.n


def ensemble_train(dataset: Dataset, partition: Partition, params: CartParams | None = None) -> EnsembleModel:
    if partition.n != dataset.n_labels:
        raise ValueError(
            f"partition covers {partition.n} labels, dataset has {dataset.n_labels}"
        )
    return EnsembleModel(partition, tuple(lp_train(dataset, b, params) for b in partition.blocks))


def ensemble_predict_many(model: EnsembleModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    out = np.zeros((len(x), model.n_labels), dtype=np.int8)
    for sub in model.models:
        out |= lp_predict_many(sub, x, model.n_labels)
    return out


def ensemble_predict(model: EnsembleModel, x) -> frozenset[int]:
    result: set[int] = set()
    for sub in model.models:
        result |= lp_predict(sub, x)
    return frozenset(result)


# --- RAkELd partition universe -----------------------------------------------

def _shape(n: int, k: int) -> tuple[int, int]:
    if not 1 <= k <= n:
        raise ValueError(f"block size k={k} must satisfy 1 <= k <= n={n}")
    return n // k, n % k


def count_partitions(n: int, k: int) -> int:
    """Partitions of n labels into floor(n/k) blocks of size k plus one block of n mod k."""
    m, r = _shape(n, k)
    return math.factorial(n) // (math.factorial(k) ** m * math.factorial(m) * math.factorial(r))


def enumerate_partitions(n: int, k: int, cap: int = DEFAULT_ENUMERATION_CAP):
    """Every partition of the RAkELd shape once, in canonical (sorted) order."""
    total = count_partitions(n, k)
    if total > cap:
        raise ValueError(
            f"{total} partitions of {n} labels into blocks of {k} exceed the cap of {cap}; "
            "use sample_partitions instead"
        )
    m, r = _shape(n, k)

    def rec(remaining: tuple[int, ...], full_left: int, rem_left: bool):
        if not remaining:
            yield ()
            return
        head, rest = remaining[0], remaining[1:]
        sizes = ([k] if full_left else []) + ([r] if rem_left else [])
        for size in sizes:
            for others in itertools.combinations(rest, size - 1):
                block = (head,) + others
                left = tuple(v for v in rest if v not in others)
                for tail in rec(left, full_left - (size == k), rem_left and size != r):
                    yield (block,) + tail

    found = sorted(rec(tuple(range(n)), m, r > 0))
    return iter(Partition(p, "random") for p in found)


def draw_partition(n: int, k: int, rng: np.random.Generator) -> Partition:
    """Shuffle labels and cut into consecutive size-k chunks; uniform over the universe."""
    _shape(n, k)
    perm = rng.permutation(n)
    return Partition(tuple(tuple(perm[i:i + k]) for i in range(0, n, k)), "random")


def sample_partitions(n: int, k: int, count: int, rng_seed=0) -> list[Partition]:
    """Up to ``count`` distinct random partitions; the whole universe if it is no larger."""
    total = count_partitions(n, k)
    if total <= count:
        return list(enumerate_partitions(n, k, cap=max(total, DEFAULT_ENUMERATION_CAP)))
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    seen: dict[Partition, None] = {}
    while len(seen) < count:
        seen.setdefault(draw_partition(n, k, rng), None)
    return list(seen)


def k_values(n: int, percentages) -> list[int]:
    """Block sizes round(p% * n), half-up, clamped to [1, n-1], deduplicated ascending."""
    if n < 2:
        raise ValueError("choosing k needs at least two labels")
    ks = set()
    for pct in percentages:
        if not 0 < pct < 100:
            raise ValueError(f"percentage {pct} outside (0, 100)")
        k = math.floor(Fraction(str(pct)) * n / 100 + Fraction(1, 2))
        ks.add(min(max(k, 1), n - 1))
    return sorted(ks)


def k_grid(n: int) -> list[int]:
    """Block sizes for 10%, 20%, ..., 90% of the label count."""
    if n < 2:
        raise ValueError("k_grid needs at least two labels")
    # integer arithmetic: round half-up of tenths * n / 10
    return sorted({min(max((tenths * n + 5) // 10, 1), n - 1) for tenths in range(1, 10)})
