"""Hard-assignment K-Means: nearest-centroid assignment and mean updates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KMeansResult",
    "squared_distances",
    "assign_points",
    "update_centroids",
    "kmeans_step",
    "sse",
    "kmeans_full",
]


@dataclass
class KMeansResult:
    centroids: np.ndarray
    labels: np.ndarray
    objective: float
    iterations: int


def _as_points(data):
    x = getattr(data, "points", data)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("data must be a non-empty (n, d) array")
    return x


def squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """``(n, K)`` matrix of squared Euclidean distances."""
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def assign_points(data, centroids) -> np.ndarray:
    """Index of the nearest centroid for every point; ties go to the lowest index."""
    x = _as_points(data)
    z = np.asarray(centroids, dtype=float)
    if z.ndim != 2 or z.shape[0] < 1:
        raise ValueError("centroids must be a non-empty (K, d) array")
    if z.shape[1] != x.shape[1]:
        raise ValueError(f"centroid dimension {z.shape[1]} does not match data dimension {x.shape[1]}")
    return np.argmin(squared_distances(x, z), axis=1)


def update_centroids(data, labels, k: int, rng: np.random.Generator, return_repaired: bool = False):
    """
    Move every centroid to the mean of its points.

    A cluster with no points is re-seeded at a datapoint drawn uniformly with
    ``rng``.
    """
    x = _as_points(data)
    labels = np.asarray(labels)
    counts = np.bincount(labels, minlength=k)
    if counts.size > k:
        raise ValueError(f"labels must lie in [0, {k})")
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    z = np.empty_like(sums)
    filled = counts > 0
    z[filled] = sums[filled] / counts[filled, None]
    repaired = np.flatnonzero(~filled)
    for j in repaired:
        z[j] = x[rng.integers(x.shape[0])]
    if return_repaired:
        return z, repaired.size > 0
    return z


def kmeans_step(data, centroids, rng: np.random.Generator) -> np.ndarray:
    """One assignment pass followed by one centroid update."""
    z = np.asarray(centroids, dtype=float)
    labels = assign_points(data, z)
    return update_centroids(data, labels, z.shape[0], rng)


def sse(data, centroids, labels=None) -> float:
    """Sum of squared distances of points to their (nearest, by default) centroid."""
    x = _as_points(data)
    z = np.asarray(centroids, dtype=float)
    if labels is None:
        return float(np.min(squared_distances(x, z), axis=1).sum())
    diff = x - z[np.asarray(labels)]
    return float(np.einsum("nd,nd->n", diff, diff).sum())


def kmeans_full(data, k: int, init, maxiter: int = 100, tol: float = 1e-6, rng=None) -> KMeansResult:
    """
    Lloyd iterations from ``init`` until no centroid coordinate moves by more
    than ``tol`` or ``maxiter`` steps have run.
    """
    if maxiter < 1:
        raise ValueError("maxiter must be at least 1")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if rng is None:
        rng = np.random.default_rng()
    x = _as_points(data)
    z = np.asarray(init, dtype=float).copy()
    if z.shape[0] != k:
        raise ValueError(f"init has {z.shape[0]} centroids, expected {k}")
    it = 0
    for it in range(1, maxiter + 1):
        z_new = kmeans_step(x, z, rng)
        shift = np.max(np.abs(z_new - z))
        z = z_new
        if shift <= tol:
            break
    labels = assign_points(x, z)
    return KMeansResult(z, labels, sse(x, z, labels), it)
