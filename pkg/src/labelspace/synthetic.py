"""Small synthetic multi-label datasets with planted label groups."""
from __future__ import annotations

import numpy as np

from .dataset_io import AttributeMeta, Dataset, DatasetPair


def make_synthetic(n_instances: int = 200, n_labels: int = 6, n_groups: int = 2,
                   n_noise_features: int = 3, test_fraction: float = 0.25,
                   seed: int = 0) -> DatasetPair:
    """Labels come in ``n_groups`` contiguous groups driven by a latent switch.

    Each group contributes one noisy indicator feature; each label adds its own
    noisy feature; a nominal "bucket" feature and pure-noise columns pad the
    input space. Rows are split into train/test deterministically.
    """
    if n_labels < n_groups:
        raise ValueError("need at least one label per group")
    rng = np.random.default_rng(seed)
    group_of = np.arange(n_labels) * n_groups // n_labels
    active = rng.random((n_instances, n_groups)) < 0.5
    on_prob = np.where(active[:, group_of], 0.8, 0.05)
    labels = (rng.random((n_instances, n_labels)) < on_prob).astype(np.int8)

    cols, meta = [], []
    for g in range(n_groups):
        cols.append(active[:, g] + rng.normal(0, 0.4, n_instances))
        meta.append(AttributeMeta(f"group{g}", "numeric"))
    for j in range(n_labels):
        cols.append(labels[:, j] + rng.normal(0, 0.6, n_instances))
        meta.append(AttributeMeta(f"signal{j}", "numeric"))
    bucket = np.clip((active.sum(axis=1) + rng.integers(0, 2, n_instances)), 0, n_groups)
    cols.append(bucket.astype(float))
    meta.append(AttributeMeta("bucket", "nominal", tuple(f"b{i}" for i in range(n_groups + 1))))
    for j in range(n_noise_features):
        cols.append(rng.normal(0, 1, n_instances))
        meta.append(AttributeMeta(f"noise{j}", "numeric"))
    # six decimals keep ARFF round-trips exact
    features = np.round(np.column_stack(cols), 6)

    names = tuple(f"label{j}" for j in range(n_labels))
    n_test = int(round(n_instances * test_fraction))
    split = n_instances - n_test
    train = Dataset(features[:split], labels[:split], names, tuple(meta))
    test = Dataset(features[split:], labels[split:], names, tuple(meta))
    return DatasetPair(train, test)
