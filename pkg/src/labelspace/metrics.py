"""Example-based and label-based multi-label evaluation measures.

Zero-division conventions: a row where both truth and prediction are empty
has Jaccard 1; F1 with no positives (tp + fp + fn == 0) is 0.

Every measure is a ratio of integer counts or a mean of such ratios; means are
accumulated as exact fractions, so results are the correctly rounded value of
the underlying rational.
"""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

METRICS = ("hamming_loss", "subset_accuracy", "jaccard", "f1_micro", "f1_macro")
HIGHER_IS_BETTER = {
    "hamming_loss": False,
    "subset_accuracy": True,
    "jaccard": True,
    "f1_micro": True,
    "f1_macro": True,
}


class ConfusionCounts(NamedTuple):
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray


def _batch(truth, predicted) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(truth)
    p = np.asarray(predicted)
    if t.shape != p.shape or t.ndim != 2:
        raise ValueError(f"truth {t.shape} and prediction {p.shape} must be equal 2-D shapes")
    if t.shape[0] == 0:
        raise ValueError("empty prediction batch")
    if not (np.isin(t, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise ValueError("truth and prediction must be binary")
    return t.astype(bool), p.astype(bool)


def confusion_counts(truth, predicted) -> ConfusionCounts:
    t, p = _batch(truth, predicted)
    return ConfusionCounts(
        (t & p).sum(axis=0), (~t & p).sum(axis=0), (t & ~p).sum(axis=0), (~t & ~p).sum(axis=0)
    )


def hamming_loss(truth, predicted) -> float:
    t, p = _batch(truth, predicted)
    return int((t ^ p).sum()) / t.size


def subset_accuracy(truth, predicted) -> float:
    t, p = _batch(truth, predicted)
    return int((t == p).all(axis=1).sum()) / t.shape[0]


def _exact_mean(numerators, denominators) -> float:
    """Mean of n_i / d_i (d_i > 0) with a single final rounding."""
    total = Fraction(0)
    num = np.asarray(numerators, dtype=np.int64)
    den = np.asarray(denominators, dtype=np.int64)
    # group by denominator: at most one term per distinct value
    for d in np.unique(den):
        total += Fraction(int(num[den == d].sum()), int(d))
    return float(total / len(num))


def jaccard_score(truth, predicted) -> float:
    t, p = _batch(truth, predicted)
    inter = (t & p).sum(axis=1)
    union = (t | p).sum(axis=1)
    empty = union == 0
    return _exact_mean(np.where(empty, 1, inter), np.where(empty, 1, union))


def _f1_terms(tp, fp, fn):
    """Numerator and denominator of 2tp / (2tp + fp + fn), with 0/0 mapped to 0/1."""
    denom = 2 * tp + fp + fn
    return 2 * tp, np.where(denom == 0, 1, denom)


def f1_micro(truth, predicted) -> float:
    c = confusion_counts(truth, predicted)
    num, den = _f1_terms(c.tp.sum(), c.fp.sum(), c.fn.sum())
    return float(num / den)


def f1_macro(truth, predicted) -> float:
    c = confusion_counts(truth, predicted)
    return _exact_mean(*_f1_terms(c.tp, c.fp, c.fn))


METRIC_FUNCTIONS = {
    "hamming_loss": hamming_loss,
    "subset_accuracy": subset_accuracy,
    "jaccard": jaccard_score,
    "f1_micro": f1_micro,
    "f1_macro": f1_macro,
}


def evaluate(truth, predicted, metrics=METRICS) -> dict[str, float]:
    return {m: METRIC_FUNCTIONS[m](truth, predicted) for m in metrics}
