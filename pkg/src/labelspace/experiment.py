"""Experiment orchestration: run matrix -> raw scores -> likelihoods -> report.

Config files are JSON. Relative dataset paths resolve against the config
file's directory.
"""
from __future__ import annotations

import csv
import json
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cart import CartParams
from .community import ALGORITHMS, DetectorConfig, detect
from .dataset_io import DatasetPair, load_pair
from .label_graph import build_cooccurrence_graph
from .metrics import HIGHER_IS_BETTER, METRICS, evaluate
from .partition import Partition
from .stats import (
    Aggregate,
    aggregate_values,
    friedman_ranks,
    iman_davenport,
    likelihood_better,
    rom_posthoc,
)
from .transform import (
    br_predict_many,
    br_train,
    count_partitions,
    ensemble_predict_many,
    ensemble_train,
    k_values,
    lp_predict_many,
    lp_train,
    sample_partitions,
)

log = logging.getLogger(__name__)

APRIORI = ("BR", "LP")
RANDOM = "rakeld"
BASELINE = "rakeld-mean"
DETECTOR_METHODS = tuple(a + s for a in ALGORITHMS for s in ("", "-weighted"))
ALL_METHODS = APRIORI + (RANDOM,) + DETECTOR_METHODS
SCORE_HEADER = ["dataset", "method", "variant", "k", "sample_id", "metric", "value"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    train: Path
    test: Path
    xml: Path


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetEntry, ...] = ()
    methods: tuple[str, ...] = ALL_METHODS
    k_percentages: tuple[float, ...] = tuple(range(10, 100, 10))
    samples_per_k: int = 250
    seed: int = 0
    cart: CartParams = field(default_factory=CartParams)
    metrics: tuple[str, ...] = METRICS
    output_dir: Path = Path("results")
    walktrap_steps: int = 4
    infomap_trials: int = 10
    # k = 1 has a single partition, identical to Binary Relevance
    rakeld_skip_k1: bool = True
    jobs: int = 1

    def __post_init__(self):
        if self.samples_per_k < 1:
            raise ConfigError("samples_per_k must be >= 1")
        for p in self.k_percentages:
            if not 0 < p < 100:
                raise ConfigError(f"k percentage {p} outside (0, 100)")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {list(ALL_METHODS)}")
        for m in self.metrics:
            if m not in METRICS:
                raise ConfigError(f"unknown metric {m!r}; choose from {list(METRICS)}")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError("dataset names must be unique")

    def rakeld_ks(self, n_labels: int) -> list[int]:
        if n_labels < 2:
            return []
        ks = k_values(n_labels, self.k_percentages)
        return [k for k in ks if not (self.rakeld_skip_k1 and k == 1)]


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(raw, base=path.parent)


def config_from_dict(raw: dict, base=Path(".")) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "datasets", "methods", "k_percentages", "samples_per_k", "seed", "cart", "metrics",
        "output_dir", "walktrap_steps", "infomap_trials", "rakeld_skip_k1", "jobs",
    }
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    base = Path(base)
    kw = {}
    try:
        kw["datasets"] = tuple(
            DatasetEntry(d["name"], base / d["train"], base / d["test"], base / d["xml"])
            for d in raw.get("datasets", [])
        )
        cart = raw.get("cart", {})
        kw["cart"] = CartParams(cart.get("max_depth"), cart.get("min_samples_to_split", 2))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad dataset or cart entry: {exc}") from None
    for key in ("methods", "k_percentages", "metrics"):
        if key in raw:
            kw[key] = tuple(raw[key])
    for key in ("samples_per_k", "seed", "walktrap_steps", "infomap_trials", "jobs"):
        if key in raw:
            kw[key] = int(raw[key])
    if "rakeld_skip_k1" in raw:
        kw["rakeld_skip_k1"] = bool(raw["rakeld_skip_k1"])
    if "output_dir" in raw:
        kw["output_dir"] = base / raw["output_dir"]
    return ExperimentConfig(**kw)


def _stream_seed(*parts) -> np.random.SeedSequence:
    """Deterministic seed sequence from a mix of ints and strings."""
    words = [p if isinstance(p, int) else zlib.crc32(str(p).encode()) for p in parts]
    return np.random.SeedSequence(words)


def detector_config(method: str, seed: int, dataset: str, config: ExperimentConfig) -> DetectorConfig:
    algorithm, _, variant = method.partition("-")
    state = _stream_seed(seed, dataset, method).generate_state(1)[0]
    return DetectorConfig(
        algorithm,
        use_weights=variant == "weighted",
        rng_seed=int(state),
        walktrap_steps=config.walktrap_steps,
        infomap_trials=config.infomap_trials,
    )


@dataclass(frozen=True)
class Cell:
    method: str
    k: int | None = None
    sample_id: int | None = None
    partition: Partition | None = None


def plan_cells(pair: DatasetPair, name: str, config: ExperimentConfig) -> list[Cell]:
    cells = []
    n = pair.train.n_labels
    for method in config.methods:
        if method != RANDOM:
            cells.append(Cell(method))
            continue
        for k in config.rakeld_ks(n):
            rng = np.random.default_rng(_stream_seed(config.seed, name, RANDOM, k))
            for sid, part in enumerate(sample_partitions(n, k, config.samples_per_k, rng)):
                cells.append(Cell(RANDOM, k, sid, part))
    return cells


def evaluate_cell(pair: DatasetPair, name: str, cell: Cell, config: ExperimentConfig) -> dict[str, float]:
    train, test = pair.train, pair.test
    if cell.method == "BR":
        pred = br_predict_many(br_train(train, config.cart), test.features)
    elif cell.method == "LP":
        pred = lp_predict_many(lp_train(train, None, config.cart), test.features, train.n_labels)
    else:
        if cell.method == RANDOM:
            partition = cell.partition
        else:
            dcfg = detector_config(cell.method, config.seed, name, config)
            graph = build_cooccurrence_graph(train.labels, weighted=dcfg.use_weights)
            partition = detect(graph, dcfg)
        model = ensemble_train(train, partition, config.cart)
        pred = ensemble_predict_many(model, test.features)
    return evaluate(test.labels, pred, config.metrics)


def _evaluate_star(args):
    return evaluate_cell(*args)


def _records(name: str, cell: Cell, scores: dict[str, float], metrics) -> list[list[str]]:
    algorithm, _, variant = cell.method.partition("-")
    if algorithm in ALGORITHMS:
        variant = variant or "unweighted"
    out = []
    for m in metrics:
        out.append([
            name,
            algorithm,
            variant,
            "" if cell.k is None else str(cell.k),
            "" if cell.sample_id is None else str(cell.sample_id),
            m,
            f"{scores[m]:.6f}",
        ])
    return out


def expected_record_count(config: ExperimentConfig, label_counts: dict[str, int]) -> int:
    total = 0
    nonrandom = sum(1 for m in config.methods if m != RANDOM)
    for n in label_counts.values():
        cells = nonrandom
        if RANDOM in config.methods:
            cells += sum(min(config.samples_per_k, count_partitions(n, k)) for k in config.rakeld_ks(n))
        total += cells * len(config.metrics)
    return total


@dataclass
class RunResult:
    scores_path: Path
    records: int
    failures: dict[str, str]


def run(config: ExperimentConfig, out_path=None) -> RunResult:
    """Evaluate every (dataset, method, k, sample) cell and write the scores CSV."""
    out_path = Path(out_path) if out_path else Path(config.output_dir) / "scores.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    rows: list[list[str]] = []
    failures: dict[str, str] = {}
    pool = ProcessPoolExecutor(config.jobs) if config.jobs > 1 else None
    try:
        for entry in config.datasets:
            try:
                pair = load_pair(entry.train, entry.test, entry.xml)
                cells = plan_cells(pair, entry.name, config)
                jobs = [(pair, entry.name, c, config) for c in cells]
                if pool is None:
                    results = list(map(_evaluate_star, jobs))
                else:
                    results = list(pool.map(_evaluate_star, jobs, chunksize=8))
            except Exception as exc:  # recorded per dataset; the run continues
                log.error("dataset %s failed: %s", entry.name, exc)
                failures[entry.name] = f"{type(exc).__name__}: {exc}"
                continue
            for cell, scores in zip(cells, results):
                rows.extend(_records(entry.name, cell, scores, config.metrics))
    finally:
        if pool is not None:
            pool.shutdown()

    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORE_HEADER)
        w.writerows(rows)
    if failures:
        with open(out_path.with_name("failures.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dataset", "error"])
            w.writerows(sorted(failures.items()))
    return RunResult(out_path, len(rows), failures)


# --- analysis -------------------------------------------------------------------

def method_key(method: str, variant: str) -> str:
    return method if variant in ("", "unweighted") else f"{method}-{variant}"


def read_scores(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SCORE_HEADER:
            raise ValueError(f"{path}: expected header {','.join(SCORE_HEADER)}")
        rows = list(reader)
    for r in rows:
        r["value"] = float(r["value"])
    return rows


LIKELIHOOD_HEADER = ["dataset", "method", "metric", "score", "likelihood"]


def analyze(scores_path, out_dir) -> tuple[Path, Path]:
    """Likelihood of beating the pooled RAkELd samples per (dataset, method, metric).

    Writes ``likelihoods.csv`` (including one ``rakeld-mean`` baseline row per
    dataset/metric with an empty likelihood) and ``aggregates.csv``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_scores(scores_path)
    random_scores: dict[tuple[str, str], list[float]] = {}
    method_scores: dict[tuple[str, str, str], float] = {}
    for r in rows:
        if r["method"] == RANDOM:
            random_scores.setdefault((r["dataset"], r["metric"]), []).append(r["value"])
        else:
            method_scores[r["dataset"], method_key(r["method"], r["variant"]), r["metric"]] = r["value"]

    out = []
    skipped = set()
    for (dataset, method, metric), score in sorted(method_scores.items()):
        pool = random_scores.get((dataset, metric))
        if not pool:
            skipped.add(dataset)
            continue
        like = likelihood_better(score, pool, HIGHER_IS_BETTER[metric])
        out.append([dataset, method, metric, f"{score:.6f}", f"{like:.6f}"])
    for dataset in sorted(skipped):
        log.warning("dataset %s has no rakeld samples; excluded from likelihoods", dataset)
    for (dataset, metric), pool in sorted(random_scores.items()):
        out.append([dataset, BASELINE, metric, f"{float(np.mean(pool)):.6f}", ""])
    out.sort()

    like_path = out_dir / "likelihoods.csv"
    with open(like_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LIKELIHOOD_HEADER)
        w.writerows(out)

    agg_path = aggregate_file(like_path, out_dir / "aggregates.csv")
    return like_path, agg_path


def aggregate_file(likelihood_path, out_path) -> Path:
    """Min/median/mean/std per (method, metric) over datasets, from a likelihood CSV."""
    rows = read_likelihoods(likelihood_path)
    aggregates = _aggregates_from_rows(rows)
    columns = {(r["method"], r["metric"]) for r in rows if r["likelihood"] != ""}
    if len(aggregates) < len(columns):
        log.warning("%d method/metric columns have < 2 datasets; their aggregates are skipped",
                    len(columns) - len(aggregates))
    out_path = Path(out_path)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "metric", "min", "median", "mean", "std"])
        for (method, metric), a in aggregates.items():
            w.writerow([method, metric] + [f"{x:.6f}" for x in a])
    return out_path


# --- report ---------------------------------------------------------------------

N_BINS = 20


def read_likelihoods(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != LIKELIHOOD_HEADER:
            raise ValueError(f"{path}: expected header {','.join(LIKELIHOOD_HEADER)}")
        return list(reader)


def histogram(values) -> list[int]:
    """Counts over 20 equal bins of [0, 1]; the last bin is closed."""
    counts = [0] * N_BINS
    for v in values:
        micro = int(round(float(v) * 1_000_000))  # values carry six decimals
        counts[min(micro * N_BINS // 1_000_000, N_BINS - 1)] += 1
    return counts


@dataclass
class MetricTest:
    metric: str
    methods: list[str]
    n_datasets: int
    mean_ranks: list[float] | None = None
    chi2: float | None = None
    f: float | None = None
    p: float | None = None
    degenerate: bool = False
    posthoc: list | None = None
    notice: str = ""


def metric_tests(rows: list[dict], alpha: float) -> dict[str, MetricTest]:
    scores: dict[str, dict[str, dict[str, float]]] = {}
    for r in rows:
        scores.setdefault(r["metric"], {}).setdefault(r["dataset"], {})[r["method"]] = float(r["score"])
    out = {}
    for metric in sorted(scores):
        by_ds = scores[metric]
        methods = sorted({m for d in by_ds.values() for m in d if m != BASELINE})
        complete = sorted(d for d, v in by_ds.items() if BASELINE in v and all(m in v for m in methods))
        test = MetricTest(metric, methods, len(complete))
        out[metric] = test
        if len(complete) < 2 or not methods:
            test.notice = f"tests skipped: {len(complete)} complete dataset(s), need >= 2"
            continue
        cols = methods + [BASELINE]
        matrix = [[by_ds[d][m] for m in cols] for d in complete]
        _, mean_ranks = friedman_ranks(matrix, HIGHER_IS_BETTER.get(metric, True))
        idt = iman_davenport(mean_ranks, len(complete))
        test.mean_ranks = [float(x) for x in mean_ranks]
        test.chi2, test.f, test.p, test.degenerate = idt.chi2, idt.f, idt.p, idt.degenerate
        test.posthoc = rom_posthoc(mean_ranks, len(complete), len(cols) - 1, alpha)
    return out


def _aggregates_from_rows(rows) -> dict[tuple[str, str], Aggregate]:
    cols: dict[tuple[str, str], list[float]] = {}
    for r in rows:
        if r["likelihood"] != "":
            cols.setdefault((r["method"], r["metric"]), []).append(float(r["likelihood"]))
    return {k: aggregate_values(v) for k, v in sorted(cols.items()) if len(v) >= 2}


def recommendations(aggs: dict, tests: dict[str, MetricTest]) -> dict[str, dict[str, str]]:
    """Hypothesis verdicts per metric, in the shape of a final summary table.

    RH1: some data-driven method beats the averaged random baseline (Rom, alpha).
    RH2: best data-driven mean likelihood exceeds the best a-priori one.
    RH3: best data-driven worst case exceeds the best a-priori worst case.
    RH4: best data-driven worst case exceeds 0.5.
    """
    out = {}
    for metric in sorted({m for _, m in aggs}):
        data = {m: a for (m, x), a in aggs.items() if x == metric and m not in APRIORI}
        prior = {m: a for (m, x), a in aggs.items() if x == metric and m in APRIORI}
        if not data:
            continue
        test = tests.get(metric)
        significant = set()
        if test is not None and test.posthoc:
            cols = test.methods
            significant = {cols[r.index] for r in test.posthoc if r.reject}
        best_mean = max(a.mean for a in data.values())
        best_min = max(a.min for a in data.values())
        verdict = {
            "RH1": "Yes" if significant & set(data) else ("No" if test and test.posthoc else "n/a"),
            "RH2": ("Yes" if best_mean > max(a.mean for a in prior.values()) else "No") if prior else "n/a",
            "RH3": ("Yes" if best_min > max(a.min for a in prior.values()) else "No") if prior else "n/a",
            "RH4": "Yes" if best_min > 0.5 else "No",
        }
        pool = [m for m in data if m in significant] or list(data)
        verdict["recommended"] = max(sorted(pool), key=lambda m: (data[m].mean, data[m].min))
        out[metric] = verdict
    return out


def report(likelihood_path, out_dir, alpha: float = 0.05) -> Path:
    """Markdown report, histogram CSV and statistical tests from ``likelihoods.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_likelihoods(likelihood_path)

    hist_path = out_dir / "histograms.csv"
    by_col: dict[tuple[str, str], list[str]] = {}
    for r in rows:
        if r["likelihood"] != "":
            by_col.setdefault((r["method"], r["metric"]), []).append(r["likelihood"])
    with open(hist_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "metric", "bin_low", "bin_high", "count"])
        for (method, metric), vals in sorted(by_col.items()):
            for i, c in enumerate(histogram(vals)):
                w.writerow([method, metric, f"{i / N_BINS:.2f}", f"{(i + 1) / N_BINS:.2f}", c])

    tests = metric_tests(rows, alpha)
    aggs = _aggregates_from_rows(rows)
    recs = recommendations(aggs, tests)

    lines = ["# Label space partitioning report", "", f"Significance level: {alpha:g}", ""]
    lines += ["## Friedman / Iman-Davenport", "", "| metric | datasets | chi2 | F | p-value | note |",
              "|---|---|---|---|---|---|"]
    for metric, t in tests.items():
        if t.p is None:
            lines.append(f"| {metric} | {t.n_datasets} | | | | {t.notice} |")
        else:
            note = "degenerate: perfect separation" if t.degenerate else ""
            f = "inf" if t.degenerate else f"{t.f:.6f}"
            lines.append(f"| {metric} | {t.n_datasets} | {t.chi2:.6f} | {f} | {t.p:.10f} | {note} |")
    lines += ["", f"## Rom post-hoc against {BASELINE} (one-sided)", ""]
    for metric, t in tests.items():
        lines += [f"### {metric}", ""]
        if not t.posthoc:
            lines += [t.notice or "no comparisons", ""]
            continue
        lines += ["| method | mean rank | z | p-value | threshold | better than baseline |",
                  "|---|---|---|---|---|---|"]
        for r in t.posthoc:
            lines.append(
                f"| {t.methods[r.index]} | {t.mean_ranks[r.index]:.4f} | {r.z:.6f} | {r.p:.7f} "
                f"| {r.threshold:.7f} | {'yes' if r.reject else 'no'} |"
            )
        lines.append(f"| {BASELINE} | {t.mean_ranks[-1]:.4f} | | | | control |")
        lines.append("")
    lines += ["## Likelihood of beating RAkELd, aggregated over datasets", ""]
    if not aggs:
        lines += ["Aggregates need at least two datasets; skipped.", ""]
    else:
        lines += ["| method | metric | min | median | mean | std |", "|---|---|---|---|---|---|"]
        for (method, metric), a in aggs.items():
            lines.append(f"| {method} | {metric} | {a.min:.6f} | {a.median:.6f} | {a.mean:.6f} | {a.std:.6f} |")
        lines.append("")
    lines += ["## Hypotheses and recommendations", ""]
    if not recs:
        lines += ["Not enough data for recommendations.", ""]
    else:
        metrics = list(recs)
        lines.append("| | " + " | ".join(metrics) + " |")
        lines.append("|---" * (len(metrics) + 1) + "|")
        for key in ("RH1", "RH2", "RH3", "RH4", "recommended"):
            lines.append(f"| {key} | " + " | ".join(recs[m][key] for m in metrics) + " |")
        lines.append("")
    lines += ["Histogram bin counts: `histograms.csv`.", ""]
    path = out_dir / "report.md"
    path.write_text("\n".join(lines))
    return path
