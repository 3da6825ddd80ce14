"""
Partitional clustering with HKA and with the HKA-K hybrid.

Both search over flat vectors ``q = [z_1, ..., z_K]`` holding the K
centroids back to back, minimizing the sum of squared distances of every
point to its nearest centroid. HKA-K adds, after each Kalman estimate, one
weighted K-Means step and a restart from random datapoints whenever the
best samples have collapsed together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import bounding_hyperbox
from .kmeans import assign_points, kmeans_step, sse
from .optimizer import (
    Bounds,
    EvaluationError,
    GaussianSearchState,
    HkaParams,
    _evaluate,
    hka_minimize,
    kalman_estimate,
    measure,
    sample_candidates,
    slowdown_update,
)

__all__ = [
    "HkakParams",
    "ClusteringResult",
    "encode",
    "decode",
    "batch_objective",
    "clustering_objective",
    "search_bounds",
    "init_from_data",
    "restart_state",
    "hka_cluster",
    "hkak_time_update",
    "restart_radius",
    "hkak_cluster",
]

# |m_hat_i| below this makes the transition factor for coordinate i the identity
A_GUARD = 1e-12


@dataclass(frozen=True)
class HkakParams:
    """
    HKA-K parameters.

    ``w`` weights the K-Means move, ``epsilon`` is the restart threshold on
    the scaled spread of the best ``n_xi`` samples. ``eval_budget_cap``
    bounds the total evaluations across restarts; it defaults to
    ``10 * maxiter * (n + 1)``.
    """

    n: int = 20
    n_xi: int = 10
    alpha: float = 0.7
    w: float = 0.4
    epsilon: float = 0.005
    maxiter: int = 250
    eval_budget_cap: Optional[int] = None

    def __post_init__(self):
        HkaParams(self.n, self.n_xi, self.alpha, self.maxiter)
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w must be in [0, 1], got {self.w}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.eval_budget_cap is None:
            object.__setattr__(self, "eval_budget_cap", 10 * self.maxiter * (self.n + 1))
        if self.eval_budget_cap < self.maxiter * (self.n + 1):
            raise ValueError("eval_budget_cap must be at least maxiter * (n + 1)")

    def hka_params(self) -> HkaParams:
        return HkaParams(self.n, self.n_xi, self.alpha, self.maxiter)


@dataclass
class ClusteringResult:
    centroids: np.ndarray
    labels: np.ndarray
    objective: float
    evals: int
    iterations: int
    restarts: int = 0
    history: list = field(default_factory=list)


def encode(centroids) -> np.ndarray:
    z = np.asarray(centroids, dtype=float)
    if z.ndim != 2:
        raise ValueError("centroids must be a (K, d) array")
    return z.reshape(-1).copy()


def decode(q, k: int, d: Optional[int] = None) -> np.ndarray:
    q = np.asarray(q, dtype=float).ravel()
    if k < 1 or q.size % k:
        raise ValueError(f"length {q.size} is not divisible by K={k}")
    if d is not None and q.size != k * d:
        raise ValueError(f"length {q.size} != K*d = {k * d}")
    return q.reshape(k, -1).copy()


def batch_objective(qs, x: np.ndarray, k: int) -> np.ndarray:
    """Clustering objective for each row of ``qs`` (shape ``(m, K*d)``)."""
    qs = np.asarray(qs, dtype=float)
    z = qs.reshape(qs.shape[0], k, x.shape[1])
    diff = x[None, :, None, :] - z[:, None, :, :]
    d2 = np.einsum("mnkd,mnkd->mnk", diff, diff)
    return d2.min(axis=2).sum(axis=1)


def clustering_objective(q, data, k: Optional[int] = None) -> float:
    """
    Sum over points of the squared distance to the nearest centroid in ``q``.

    ``k`` defaults to ``len(q) // d``.
    """
    x = np.asarray(getattr(data, "points", data), dtype=float)
    q = np.asarray(q, dtype=float).ravel()
    if k is None:
        k = q.size // x.shape[1]
    if q.size != k * x.shape[1]:
        raise ValueError(f"length {q.size} != K*d = {k * x.shape[1]}")
    if not np.all(np.isfinite(q)):
        raise EvaluationError("non-finite centroid coordinates")
    return float(batch_objective(q[None, :], x, k)[0])


def search_bounds(data, k: int) -> Bounds:
    """The data's bounding box repeated once per centroid."""
    return bounding_hyperbox(data).tile(k)


def init_from_data(data, k: int) -> GaussianSearchState:
    box = bounding_hyperbox(data)
    mean = np.tile(0.5 * (box.upper + box.lower), k)
    std = np.tile(box.width / 6.0, k)
    return GaussianSearchState(mean, std**2, 0)


def restart_state(data, k: int, rng: np.random.Generator) -> GaussianSearchState:
    """Mean at K distinct random datapoints, variance as at initialization."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    idx = rng.choice(x.shape[0], size=k, replace=False)
    return GaussianSearchState(x[idx].reshape(-1), init_from_data(x, k).var_diag, 0)


def _check(data, k):
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("data must be a non-empty (n, d) array")
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"K must be in [1, n], got K={k}, n={x.shape[0]}")
    return x


def hka_cluster(data, k: int, params: HkaParams, rng: np.random.Generator) -> ClusteringResult:
    """Pure HKA over the tiled bounding box of the data."""
    x = _check(data, k)
    res = hka_minimize(
        lambda qs: batch_objective(qs, x, k),
        search_bounds(x, k),
        params,
        rng,
        vectorized=True,
        state=init_from_data(x, k),
    )
    z = decode(res.best_q, k)
    labels = assign_points(x, z)
    return ClusteringResult(z, labels, sse(x, z, labels), res.evals, res.iterations, 0, res.history)


def hkak_time_update(m_hat, p_hat_diag, data, k: int, w: float, rng: np.random.Generator):
    """
    Weighted K-Means time update.

    Returns ``(m_prime, m_next, w_next_diag)``: the un-weighted K-Means step
    from ``m_hat``, the weighted move ``m_hat + w (m_prime - m_hat)``, and
    the variance propagated through the diagonal transition
    ``a_ii = m_next_i / m_hat_i``.
    """
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"w must be in [0, 1], got {w}")
    x = np.asarray(getattr(data, "points", data), dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    m_prime = encode(kmeans_step(x, decode(m_hat, k), rng))
    m_next = m_hat + w * (m_prime - m_hat)
    a = np.ones_like(m_hat)
    ok = np.abs(m_hat) >= A_GUARD
    a[ok] = m_next[ok] / m_hat[ok]
    return m_prime, m_next, a**2 * np.asarray(p_hat_diag, dtype=float)


def restart_radius(top, bounds: Bounds, k: int, d: int) -> float:
    """
    Spread of the best samples after scaling the search box to the unit cube.

    The largest distance from the first (best) row to the others, divided by
    ``K*d``. Zero-width box dimensions scale to 0.
    """
    top = np.asarray(top, dtype=float)
    if top.ndim != 2 or len(top) == 0:
        raise ValueError("need at least one candidate")
    if len(top) == 1:
        return 0.0
    width = bounds.width
    s = np.divide(top - bounds.lower, width, out=np.zeros_like(top), where=width > 0)
    return float(np.max(np.linalg.norm(s[1:] - s[0], axis=1)) / (k * d))


def hkak_cluster(data, k: int, params: HkakParams, rng: np.random.Generator) -> ClusteringResult:
    """
    HKA-K clustering.

    Runs ``params.maxiter`` iterations after the latest (re)start, stopping
    early only if another iteration would exceed ``params.eval_budget_cap``.
    Each iteration costs ``n + 1`` evaluations: the samples plus the
    un-weighted K-Means point used for best tracking.
    """
    x = _check(data, k)
    d = x.shape[1]
    bounds = search_bounds(x, k)
    hp = params.hka_params()
    objective = lambda qs: batch_objective(qs, x, k)  # noqa: E731

    state = init_from_data(x, k)
    # the initial best is the box centre; any K-Means point beats it, so its
    # value is never needed
    best_q, best_j = state.mean.copy(), np.inf
    evals = iterations = restarts = 0
    history = []
    kk = 0
    while kk < params.maxiter and evals + hp.n + 1 <= params.eval_budget_cap:
        pop = sample_candidates(state, objective, hp, bounds, rng, vectorized=True)
        meas = measure(pop, hp.n_xi)
        m_hat, p_hat, _ = kalman_estimate(state, meas)
        m_prime, m_next, w_diag = hkak_time_update(m_hat, p_hat, x, k, params.w, rng)
        p_next, _ = slowdown_update(state.var_diag, w_diag, meas.v_diag, hp.alpha)
        j_prime = float(_evaluate(objective, m_prime[None, :], True)[0])
        evals += hp.n + 1
        iterations += 1
        if j_prime < best_j:
            best_q, best_j = m_prime, j_prime
        history.append(best_j)

        if restart_radius(pop.top(hp.n_xi), bounds, k, d) < params.epsilon:
            state = restart_state(x, k, rng)
            restarts += 1
            kk = 0
        else:
            kk += 1
            state = GaussianSearchState(m_next, p_next, kk)

    z = decode(best_q, k)
    labels = assign_points(x, z)
    return ClusteringResult(z, labels, sse(x, z, labels), evals, iterations, restarts, history)
