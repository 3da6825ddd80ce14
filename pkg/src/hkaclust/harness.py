"""Replicated clustering experiments, summaries, significance tests and result files."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clustering import HkakParams, hka_cluster, hkak_cluster
from .data import Dataset, load_csv, load_dataset
from .kmeans import kmeans_full
from .metrics import UndefinedMetricError, adjusted_rand_index, davies_bouldin, intra_distance, wilcoxon_rank_sum
from .optimizer import HkaParams

__all__ = [
    "ALGORITHMS",
    "PRESETS",
    "METRICS",
    "ExperimentConfig",
    "RunRecord",
    "Aggregate",
    "SummaryTable",
    "algorithm_params",
    "resolve_dataset",
    "run_replicate",
    "run_experiment",
    "summarize",
    "compare",
    "emit_results",
    "read_records",
    "format_summary",
]

ALGORITHMS = ("hka", "hkak", "kmeans")

# "reference": the published parameter settings; "equal-budget": HKA given the
# same number of evaluations as HKA-K
PRESETS = {
    "reference": {
        "hkak": dict(n=20, n_xi=10, alpha=0.7, epsilon=0.005, w=0.4, maxiter=250, eval_budget_cap=5250),
        "hka": dict(n=30, n_xi=6, alpha=0.8, maxiter=500),
        "kmeans": dict(maxiter=100, tol=1e-6),
    },
    "equal-budget": {
        "hkak": dict(n=20, n_xi=10, alpha=0.7, epsilon=0.005, w=0.4, maxiter=250, eval_budget_cap=5250),
        "hka": dict(n=20, n_xi=10, alpha=0.8, maxiter=250),
        "kmeans": dict(maxiter=100, tol=1e-6),
    },
}

_ALLOWED = {
    "hkak": {"n", "n_xi", "alpha", "w", "epsilon", "maxiter", "eval_budget_cap"},
    "hka": {"n", "n_xi", "alpha", "maxiter", "stop_radius"},
    "kmeans": {"maxiter", "tol"},
}

CSV_COLUMNS = ("seed", "intra", "j", "ari", "db", "time_s", "evals", "iterations", "restarts")
METRICS = ("intra", "j", "ari", "db", "time_s", "evals", "iterations", "restarts")


@dataclass
class ExperimentConfig:
    """
    One algorithm on one dataset, replicated with seeds ``seed, seed+1, ...``.

    ``dataset`` names a bundled or generated set; ``csv`` overrides it with a
    file. ``k`` defaults to the number of classes when labels exist.
    ``data_seed`` only matters for the synthetic generators.
    """

    algorithm: str = "hkak"
    dataset: Optional[str] = None
    csv: Optional[str] = None
    label_column: Optional[object] = None
    header: bool = False
    k: Optional[int] = None
    preset: str = "reference"
    params: dict = field(default_factory=dict)
    replicates: int = 20
    seed: int = 0
    data_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; choose from {tuple(PRESETS)}")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.dataset is None and self.csv is None:
            raise ValueError("a dataset name or a CSV path is required")
        algorithm_params(self)


@dataclass
class RunRecord:
    seed: int
    intra: float
    j: float
    ari: Optional[float]
    db: Optional[float]
    time_s: float
    evals: int
    iterations: int
    restarts: int


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float
    min: float
    max: float


@dataclass
class SummaryTable:
    n_runs: int
    metrics: dict

    def __getitem__(self, metric) -> Aggregate:
        return self.metrics[metric]


def algorithm_params(config: ExperimentConfig):
    """Preset values overridden by ``config.params``, validated for the algorithm."""
    extra = set(config.params) - _ALLOWED[config.algorithm]
    if extra:
        raise ValueError(f"parameters {sorted(extra)} do not apply to {config.algorithm}")
    merged = {**PRESETS[config.preset][config.algorithm], **config.params}
    if config.algorithm == "hkak":
        return HkakParams(**merged)
    if config.algorithm == "hka":
        return HkaParams(**merged)
    if merged["maxiter"] < 1 or merged["tol"] < 0:
        raise ValueError("kmeans needs maxiter >= 1 and tol >= 0")
    return merged


def resolve_dataset(config: ExperimentConfig) -> Dataset:
    if config.csv is not None:
        return load_csv(config.csv, label_column=config.label_column, header=config.header)
    return load_dataset(config.dataset, seed=config.data_seed)


def _k(config, data):
    if config.k is not None:
        return int(config.k)
    if data.labels is None:
        raise ValueError("K is required for unlabelled data")
    return data.n_classes


def run_replicate(algorithm: str, params, data: Dataset, k: int, seed: int) -> RunRecord:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    if algorithm == "hkak":
        res = hkak_cluster(data.points, k, params, rng)
        z, labels, j = res.centroids, res.labels, res.objective
        evals, iters, restarts = res.evals, res.iterations, res.restarts
    elif algorithm == "hka":
        res = hka_cluster(data.points, k, params, rng)
        z, labels, j = res.centroids, res.labels, res.objective
        evals, iters, restarts = res.evals, res.iterations, 0
    else:
        init = data.points[rng.choice(data.n, size=k, replace=False)]
        res = kmeans_full(data.points, k, init, params["maxiter"], params["tol"], rng)
        z, labels, j = res.centroids, res.labels, res.objective
        evals, iters, restarts = res.iterations, res.iterations, 0
    elapsed = time.perf_counter() - t0

    ari = adjusted_rand_index(labels, data.labels) if data.labels is not None else None
    try:
        db = davies_bouldin(data.points, labels, z)
    except UndefinedMetricError:
        db = None
    return RunRecord(seed, intra_distance(data.points, labels, z), j, ari, db, elapsed, evals, iters, restarts)


def run_experiment(config: ExperimentConfig, data: Optional[Dataset] = None) -> list:
    """
    Run ``config.replicates`` independent replicates.

    Replicate ``i`` is seeded with ``config.seed + i``; the returned list is
    in replicate order whatever ``config.workers`` is.
    """
    params = algorithm_params(config)
    if data is None:
        data = resolve_dataset(config)
    k = _k(config, data)
    if not 1 <= k <= data.n:
        raise ValueError(f"K must be in [1, n], got {k}")
    seeds = [config.seed + i for i in range(config.replicates)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            futures = [pool.submit(run_replicate, config.algorithm, params, data, k, s) for s in seeds]
            return [f.result() for f in futures]
    return [run_replicate(config.algorithm, params, data, k, s) for s in seeds]


def _column(records, metric):
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    return [getattr(r, metric) for r in records]


def summarize(records) -> SummaryTable:
    """Mean, sample standard deviation (n-1), min and max of every metric.

    Metrics missing from some records (ARI without labels, undefined DB) are
    aggregated over the records that have them and omitted when none do.
    """
    if not records:
        raise ValueError("need at least one record")
    out = {}
    for m in METRICS:
        vals = np.array([v for v in _column(records, m) if v is not None], dtype=float)
        if vals.size == 0:
            continue
        std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
        out[m] = Aggregate(float(np.mean(vals)), std, float(vals.min()), float(vals.max()))
    return SummaryTable(len(records), out)


def compare(records_a, records_b, metric: str = "intra", alternative: str = "less") -> float:
    """Rank-sum p-value on one metric column; "less" asks whether ``a`` is lower."""
    a = [v for v in _column(records_a, metric) if v is not None]
    b = [v for v in _column(records_b, metric) if v is not None]
    return wilcoxon_rank_sum(a, b, alternative=alternative)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _markdown(summary: SummaryTable, title: str = "") -> str:
    lines = []
    if title:
        lines += [f"### {title}", ""]
    lines += ["| metric | stat | value |", "|---|---|---|"]
    for m, agg in summary.metrics.items():
        for stat in ("mean", "std", "min", "max"):
            lines.append(f"| {m} | {stat} | {getattr(agg, stat):.4f} |")
    lines.append("")
    lines.append(f"runs: {summary.n_runs}")
    return "\n".join(lines) + "\n"


def emit_results(records, summary: Optional[SummaryTable], fmt: str, path, title: str = "") -> None:
    """
    Write per-run records as CSV, or the summary as a markdown table.

    CSV columns are fixed: seed, intra, j, ari, db, time_s, evals,
    iterations, restarts. Missing metrics are written as empty cells.
    """
    if fmt == "csv":
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(CSV_COLUMNS)
            for r in records:
                w.writerow([_cell(getattr(r, c)) for c in CSV_COLUMNS])
    elif fmt == "markdown":
        if summary is None:
            summary = summarize(records)
        with open(path, "w") as f:
            f.write(_markdown(summary, title))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_records(path) -> list:
    """Parse a CSV written by ``emit_results(..., "csv", ...)``."""
    out = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            vals = {}
            for c in CSV_COLUMNS:
                s = row[c]
                if s == "":
                    vals[c] = None
                elif c in ("seed", "evals", "iterations", "restarts"):
                    vals[c] = int(s)
                else:
                    vals[c] = float(s)
            out.append(RunRecord(**vals))
    return out


def format_summary(summary: SummaryTable, title: str = "") -> str:
    return _markdown(summary, title)

