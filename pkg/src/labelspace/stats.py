"""Likelihood of beating random partitions, Friedman / Iman-Davenport omnibus
test and Rom's step-up post-hoc procedure against a control."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import betainc, ndtr
from scipy.stats import rankdata

from .metrics import HIGHER_IS_BETTER


# --- distribution functions ---------------------------------------------------

def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def f_cdf(x: float, df1: float, df2: float) -> float:
    """CDF of the F distribution via the regularized incomplete beta function."""
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(betainc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2)))


def f_sf(x: float, df1: float, df2: float) -> float:
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    # complementary form keeps precision in the upper tail
    return float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df1 * x + df2)))


# --- likelihood of beating random ---------------------------------------------

def likelihood_better(method_score: float, random_scores, higher_is_better: bool = True) -> float:
    """Fraction of random scores strictly worse than ``method_score``."""
    r = np.asarray(random_scores, dtype=float)
    if r.size == 0:
        raise ValueError("need at least one random score")
    worse = r < method_score if higher_is_better else r > method_score
    return float(worse.mean())


@dataclass
class LikelihoodTable:
    """Probabilities indexed by ``(dataset, method, metric)``."""

    entries: dict = field(default_factory=dict)

    def __setitem__(self, key, value):
        v = float(value)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"likelihood {v} outside [0, 1]")
        self.entries[tuple(key)] = v

    def __getitem__(self, key):
        return self.entries[tuple(key)]

    def __len__(self):
        return len(self.entries)

    def datasets(self) -> list[str]:
        return sorted({d for d, _, _ in self.entries})

    def methods(self) -> list[str]:
        return sorted({m for _, m, _ in self.entries})

    def metrics(self) -> list[str]:
        return sorted({x for _, _, x in self.entries})

    def column(self, method: str, metric: str) -> dict[str, float]:
        return {d: v for (d, m, x), v in sorted(self.entries.items()) if m == method and x == metric}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dataset", "method", "metric", "likelihood"])
            for (d, m, x), v in sorted(self.entries.items()):
                w.writerow([d, m, x, f"{v:.6f}"])

    @classmethod
    def from_csv(cls, path) -> "LikelihoodTable":
        table = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row.get("likelihood", "") == "":
                    continue
                table[row["dataset"], row["method"], row["metric"]] = float(row["likelihood"])
        return table


class Aggregate(NamedTuple):
    min: float
    median: float
    mean: float
    std: float


def aggregate_values(values) -> Aggregate:
    v = np.asarray(list(values), dtype=float)
    if v.size < 2:
        raise ValueError("aggregation needs at least two datasets (sample std uses n-1)")
    return Aggregate(float(v.min()), float(np.median(v)), float(v.mean()), float(v.std(ddof=1)))


def aggregate_likelihoods(table: LikelihoodTable, method: str, metric: str) -> Aggregate:
    return aggregate_values(table.column(method, metric).values())


def write_aggregates_csv(rows: dict, path) -> None:
    """``rows`` maps (method, metric) -> Aggregate."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "metric", "min", "median", "mean", "std"])
        for (method, metric), a in sorted(rows.items()):
            w.writerow([method, metric] + [f"{x:.6f}" for x in a])


def read_aggregates_csv(path) -> dict:
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["method"], row["metric"]] = Aggregate(
                *(float(row[c]) for c in ("min", "median", "mean", "std"))
            )
    return out


# --- Friedman / Iman-Davenport ------------------------------------------------

def friedman_ranks(scores, higher_is_better: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Per-dataset ranks (1 = best, ties averaged) and mean rank per method.

    ``scores`` is datasets x methods.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 2:
        raise ValueError("scores must be a datasets x methods matrix with >= 2 methods")
    ranks = rankdata(-s if higher_is_better else s, axis=1, method="average")
    return ranks, ranks.mean(axis=0)


class ImanDavenport(NamedTuple):
    chi2: float
    f: float
    p: float
    df1: int
    df2: int
    degenerate: bool


def iman_davenport(mean_ranks, n_datasets: int) -> ImanDavenport:
    r = np.asarray(mean_ranks, dtype=float)
    k, n = len(r), int(n_datasets)
    if n < 2 or k < 2:
        raise ValueError("Iman-Davenport needs N >= 2 datasets and k >= 2 methods")
    chi2 = 12.0 * n / (k * (k + 1)) * (float(np.sum(r**2)) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)
    df1, df2 = k - 1, (k - 1) * (n - 1)
    denom = n * (k - 1) - chi2
    if denom <= 1e-9 * n * (k - 1):
        return ImanDavenport(chi2, math.inf, 0.0, df1, df2, True)
    f = (n - 1) * chi2 / denom
    return ImanDavenport(chi2, f, f_sf(f, df1, df2), df1, df2, False)


# --- Rom post-hoc --------------------------------------------------------------

def rom_thresholds(m: int, alpha: float = 0.05) -> np.ndarray:
    """Rom's critical values; entry ``i`` (0-based) applies to the (i+1)-th largest p-value.

    c_1 = alpha, c_2 = alpha/2 and for i >= 3
    c_i = (sum_{j<i} alpha^j - sum_{j=1}^{i-2} C(i, j) c_{j+1}^{i-j}) / i.
    """
    if m < 1:
        return np.zeros(0)
    c = [alpha, alpha / 2.0][:m]
    for i in range(3, m + 1):
        s1 = sum(alpha**j for j in range(1, i))
        s2 = sum(math.comb(i, j) * c[j] ** (i - j) for j in range(1, i - 1))
        c.append((s1 - s2) / i)
    return np.array(c)


def rom_reject(pvalues, alpha: float = 0.05) -> np.ndarray:
    """Step-up decisions: reject every hypothesis with p <= p_(j) for the largest
    j whose p_(j) meets its threshold."""
    p = np.asarray(pvalues, dtype=float)
    m = len(p)
    reject = np.zeros(m, dtype=bool)
    if m == 0:
        return reject
    order = np.argsort(p, kind="stable")
    thr = rom_thresholds(m, alpha)
    for pos in range(m - 1, -1, -1):  # largest p first
        if p[order[pos]] <= thr[m - 1 - pos]:
            reject[order[: pos + 1]] = True
            break
    return reject


class PosthocResult(NamedTuple):
    index: int
    z: float
    p: float
    threshold: float
    reject: bool


def rom_posthoc(mean_ranks, n_datasets: int, control_index: int, alpha: float = 0.05) -> list[PosthocResult]:
    """One-sided tests of "method ranks better than control" with Rom's step-up.

    z_i = (R_control - R_i) / sqrt(k(k+1)/(6N)); results are in method order,
    control excluded.
    """
    r = np.asarray(mean_ranks, dtype=float)
    k = len(r)
    if not 0 <= control_index < k:
        raise IndexError(f"control index {control_index} out of range for {k} methods")
    se = math.sqrt(k * (k + 1) / (6.0 * n_datasets))
    others = [i for i in range(k) if i != control_index]
    z = [(r[control_index] - r[i]) / se for i in others]
    p = np.array([normal_sf(v) for v in z])
    reject = rom_reject(p, alpha)
    thr = rom_thresholds(len(others), alpha)
    rank_desc = np.empty(len(others), dtype=int)
    rank_desc[np.argsort(-p, kind="stable")] = np.arange(len(others))
    return [
        PosthocResult(i, float(zv), float(pv), float(thr[rd]), bool(rj))
        for i, zv, pv, rd, rj in zip(others, z, p, rank_desc, reject)
    ]


def rom_familywise_error(n_datasets: int, n_methods: int, trials: int = 100_000,
                         alpha: float = 0.05, seed: int = 0, chunk: int = 20_000) -> float:
    """Monte Carlo FWER of the rank-based Rom procedure under the global null.

    Each trial draws independent uniform rankings per dataset, tests every
    method against method 0 as control and records whether anything was
    rejected.
    """
    rng = np.random.default_rng(seed)
    k, n = n_methods, n_datasets
    m = k - 1
    thr = rom_thresholds(m, alpha)  # thr[i] for the (i+1)-th largest p
    se = math.sqrt(k * (k + 1) / (6.0 * n))
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        ranks = np.argsort(rng.random((b, n, k)), axis=2).argsort(axis=2) + 1.0
        mean = ranks.mean(axis=1)
        z = (mean[:, :1] - mean[:, 1:]) / se
        p = np.sort(ndtr(-z), axis=1)  # ascending
        # ascending position j (0-based) is the (m-j)-th largest -> thr[m-1-j]
        hits += int((p <= thr[::-1][None, :]).any(axis=1).sum())
        done += b
    return hits / trials


def metric_direction(metric: str) -> bool:
    return HIGHER_IS_BETTER[metric]
