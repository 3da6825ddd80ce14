"""Cluster validity indices and the Wilcoxon rank-sum test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

__all__ = [
    "PairCounts",
    "UndefinedMetricError",
    "pair_counts",
    "adjusted_rand_index",
    "adjusted_rand_index_contingency",
    "intra_distance",
    "davies_bouldin",
    "wilcoxon_rank_sum",
]


class UndefinedMetricError(ValueError):
    """The metric is undefined for this partition (e.g. coincident centroids)."""


@dataclass(frozen=True)
class PairCounts:
    """
    Point pairs classified by two partitions U and V.

    a: together in both; b: together in U only; c: together in V only;
    d: apart in both.
    """

    a: int
    b: int
    c: int
    d: int

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


def _contingency(u, v):
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("label vectors must be 1-d and of equal length")
    _, ui = np.unique(u, return_inverse=True)
    _, vi = np.unique(v, return_inverse=True)
    table = np.zeros((ui.max() + 1, vi.max() + 1), dtype=np.int64)
    np.add.at(table, (ui, vi), 1)
    return table


def pair_counts(labels_u, labels_v) -> PairCounts:
    table = _contingency(labels_u, labels_v)
    n = int(table.sum())
    a = sum(int(c) * (int(c) - 1) // 2 for c in table.ravel())
    same_u = sum(int(c) * (int(c) - 1) // 2 for c in table.sum(axis=1))
    same_v = sum(int(c) * (int(c) - 1) // 2 for c in table.sum(axis=0))
    total = n * (n - 1) // 2
    return PairCounts(a, same_u - a, same_v - a, total - same_u - same_v + a)


def adjusted_rand_index(labels_u, labels_v) -> float:
    """
    Adjusted Rand index from pair counts.

    ``(N (a + d) - S) / (N**2 - S)`` with ``N = C(n, 2)`` and
    ``S = (a + b)(a + c) + (c + d)(b + d)``. Identical partitions (up to
    relabelling) give 1.0, including the degenerate case where the
    denominator vanishes.
    """
    if len(labels_u) < 2:
        raise ValueError("need at least two points")
    p = pair_counts(labels_u, labels_v)
    big_n = p.total
    s = (p.a + p.b) * (p.a + p.c) + (p.c + p.d) * (p.b + p.d)
    num = big_n * (p.a + p.d) - s
    den = big_n * big_n - s
    if den == 0:
        return 1.0
    return num / den


def adjusted_rand_index_contingency(labels_u, labels_v) -> float:
    """Hubert-Arabie ARI in its usual contingency-table form."""
    table = _contingency(labels_u, labels_v)
    n = int(table.sum())
    if n < 2:
        raise ValueError("need at least two points")
    sum_ij = sum(math.comb(int(c), 2) for c in table.ravel())
    sum_a = sum(math.comb(int(c), 2) for c in table.sum(axis=1))
    sum_b = sum(math.comb(int(c), 2) for c in table.sum(axis=0))
    expected = sum_a * sum_b / math.comb(n, 2)
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


def _points_labels_centroids(data, labels, centroids):
    x = np.asarray(getattr(data, "points", data), dtype=float)
    labels = np.asarray(labels)
    z = np.asarray(centroids, dtype=float)
    if labels.shape != (x.shape[0],):
        raise ValueError("one label per point required")
    if z.ndim != 2 or z.shape[1] != x.shape[1]:
        raise ValueError("centroid dimension does not match data")
    return x, labels, z


def intra_distance(data, labels, centroids) -> float:
    """Sum of (unsquared) Euclidean distances of points to their centroid."""
    x, labels, z = _points_labels_centroids(data, labels, centroids)
    return float(np.linalg.norm(x - z[labels], axis=1).sum())


def davies_bouldin(data, labels, centroids) -> float:
    """
    Davies-Bouldin index; lower is better.

    Scatter of a cluster is the mean distance of its points to its centroid.

    Raises
    ------
    UndefinedMetricError
        Fewer than two clusters, an empty cluster, or coincident centroids.
    """
    x, labels, z = _points_labels_centroids(data, labels, centroids)
    k = z.shape[0]
    if k < 2:
        raise UndefinedMetricError("Davies-Bouldin needs at least two clusters")
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0):
        raise UndefinedMetricError("Davies-Bouldin undefined with an empty cluster")
    dist = np.linalg.norm(x - z[labels], axis=1)
    scatter = np.bincount(labels, weights=dist, minlength=k) / counts
    sep = np.linalg.norm(z[:, None, :] - z[None, :, :], axis=2)
    off = ~np.eye(k, dtype=bool)
    if np.any(sep[off] == 0):
        raise UndefinedMetricError("Davies-Bouldin undefined for coincident centroids")
    r = np.where(off, (scatter[:, None] + scatter[None, :]) / np.where(off, sep, 1.0), -np.inf)
    return float(r.max(axis=1).mean())


def _rank_sum_exact(ranks, n1, w, alternative):
    # distribution of the rank sum of n1 draws without replacement, on
    # doubled ranks so midranks stay integral
    r2 = np.rint(2 * np.asarray(ranks)).astype(int)
    top = int(r2.sum())
    counts = np.zeros((n1 + 1, top + 1))
    counts[0, 0] = 1.0
    for r in r2:
        counts[1:, r:] += counts[:-1, : top + 1 - r].copy()
    dist = counts[n1] / counts[n1].sum()
    w2 = int(round(2 * w))
    lower = dist[: w2 + 1].sum()
    upper = dist[w2:].sum()
    if alternative == "less":
        return float(min(1.0, lower))
    if alternative == "greater":
        return float(min(1.0, upper))
    return float(min(1.0, 2 * min(lower, upper)))


def wilcoxon_rank_sum(x, y, alternative: str = "two-sided", method: str = "asymptotic") -> float:
    """
    Wilcoxon rank-sum test p-value.

    Tied values get midranks. The asymptotic method uses the normal
    approximation with tie-corrected variance and a 0.5 continuity
    correction; ``method="exact"`` enumerates the permutation distribution
    of the rank sum and is meant for small samples.

    Parameters
    ----------
    x, y : array_like
    alternative : {"two-sided", "less", "greater"}
        "less" tests whether ``x`` tends to be smaller than ``y``.
    method : {"asymptotic", "exact"}
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    if alternative not in ("two-sided", "less", "greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    if method not in ("asymptotic", "exact"):
        raise ValueError(f"unknown method {method!r}")
    n1, n2 = x.size, y.size
    n = n1 + n2
    ranks = rankdata(np.concatenate([x, y]))
    w = ranks[:n1].sum()
    _, ties = np.unique(ranks, return_counts=True)
    if ties.size == 1:
        return 1.0
    if method == "exact":
        return _rank_sum_exact(ranks, n1, w, alternative)

    mu = n1 * (n + 1) / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - np.sum(ties**3 - ties) / (n * (n - 1)))
    sd = math.sqrt(var)
    if alternative == "less":
        return float(norm.cdf((w - mu + 0.5) / sd))
    if alternative == "greater":
        return float(norm.sf((w - mu - 0.5) / sd))
    z = (abs(w - mu) - 0.5) / sd
    return float(min(1.0, 2 * norm.sf(max(z, 0.0))))
