"""
Heuristic Kalman Algorithm (HKA) for bounded minimization.

A Gaussian search distribution with diagonal covariance is refined each
iteration: ``N`` points are drawn from it, the best ``N_xi`` of them form a
noisy "measurement" of the optimum, and a Kalman update fuses the measurement
with the current distribution. A slowdown factor keeps the variance from
collapsing too quickly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Bounds",
    "GaussianSearchState",
    "CandidateSolution",
    "Population",
    "Measurement",
    "HkaParams",
    "HkaResult",
    "EvaluationError",
    "init_search_state",
    "sample_candidates",
    "measure",
    "kalman_estimate",
    "slowdown_factor",
    "slowdown_update",
    "top_spread",
    "hka_minimize",
]


class EvaluationError(RuntimeError):
    """Raised when the objective returns a non-finite value."""


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape:
            raise ValueError(
                f"lower and upper must have the same length, got {lower.size} and {upper.size}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("lower must not exceed upper")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def tile(self, k: int) -> "Bounds":
        """Repeat the box ``k`` times, e.g. once per centroid."""
        return Bounds(np.tile(self.lower, k), np.tile(self.upper, k))


@dataclass
class GaussianSearchState:
    mean: np.ndarray
    var_diag: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).ravel()
        self.var_diag = np.asarray(self.var_diag, dtype=float).ravel()
        if self.mean.shape != self.var_diag.shape:
            raise ValueError("mean and var_diag must have the same length")
        if np.any(self.var_diag < 0):
            raise ValueError("variances must be nonnegative")

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.var_diag)


@dataclass(frozen=True)
class CandidateSolution:
    q: np.ndarray
    objective: float


@dataclass
class Population:
    """Sampled points sorted by ascending objective (best first)."""

    q: np.ndarray
    objective: np.ndarray

    def __len__(self):
        return len(self.objective)

    def __getitem__(self, i) -> CandidateSolution:
        return CandidateSolution(self.q[i], float(self.objective[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def top(self, n: int) -> np.ndarray:
        return self.q[:n]


@dataclass(frozen=True)
class Measurement:
    xi: np.ndarray
    v_diag: np.ndarray


@dataclass(frozen=True)
class HkaParams:
    """
    Parameters of the HKA minimizer.

    Parameters
    ----------
    n : int
        Number of points sampled per iteration.
    n_xi : int
        Number of best points forming the measurement.
    alpha : float
        Slowdown coefficient in (0, 1].
    maxiter : int
        Iteration cap.
    stop_radius : float, optional
        Stop once the best ``n_xi`` points lie within this Euclidean distance
        of the best one. Disabled when None.
    """

    n: int = 30
    n_xi: int = 6
    alpha: float = 0.8
    maxiter: int = 500
    stop_radius: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if int(self.n_xi) != self.n_xi or not 1 <= self.n_xi <= self.n:
            raise ValueError(f"n_xi must be in [1, n], got {self.n_xi}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if int(self.maxiter) != self.maxiter or self.maxiter < 1:
            raise ValueError(f"maxiter must be a positive integer, got {self.maxiter}")
        if self.stop_radius is not None and self.stop_radius < 0:
            raise ValueError("stop_radius must be nonnegative")


@dataclass
class HkaResult:
    best_q: np.ndarray
    best_objective: float
    evals: int
    iterations: int
    history: list = field(default_factory=list)


def init_search_state(bounds: Bounds) -> GaussianSearchState:
    """Centre of the box, standard deviation one sixth of its width."""
    mean = 0.5 * (bounds.upper + bounds.lower)
    std = bounds.width / 6.0
    return GaussianSearchState(mean, std**2, 0)


def _evaluate(objective, q, vectorized):
    if vectorized:
        values = np.asarray(objective(q), dtype=float).ravel()
        if values.size != len(q):
            raise EvaluationError(
                f"vectorized objective returned {values.size} values for {len(q)} points"
            )
    else:
        values = np.array([float(objective(x)) for x in q])
    if not np.all(np.isfinite(values)):
        raise EvaluationError("objective returned a non-finite value")
    return values


def sample_candidates(
    state: GaussianSearchState,
    objective: Callable,
    params: HkaParams,
    bounds: Bounds,
    rng: np.random.Generator,
    vectorized: bool = False,
) -> Population:
    """
    Draw ``params.n`` points from the search distribution and rank them.

    Coordinates falling outside ``bounds`` are clamped. With ``vectorized``
    the objective receives the whole ``(n, D)`` array at once.
    """
    if state.mean.size != bounds.dim:
        raise ValueError("state and bounds dimensions differ")
    z = rng.standard_normal((params.n, state.mean.size))
    q = bounds.clip(state.mean + state.std * z)
    values = _evaluate(objective, q, vectorized)
    order = np.argsort(values, kind="stable")
    return Population(q[order], values[order])


def measure(population, n_xi: int) -> Measurement:
    """Mean and population variance (divisor ``n_xi``) of the best ``n_xi`` points."""
    if n_xi < 1:
        raise ValueError("n_xi must be at least 1")
    q = population.q if isinstance(population, Population) else np.asarray(population, dtype=float)
    if n_xi > len(q):
        raise ValueError(f"n_xi={n_xi} exceeds population size {len(q)}")
    top = q[:n_xi]
    xi = top.mean(axis=0)
    v = ((top - xi) ** 2).sum(axis=0) / n_xi
    return Measurement(xi, v)


def kalman_estimate(state: GaussianSearchState, meas: Measurement):
    """
    Fuse the search distribution with the measurement.

    Returns ``(m_hat, p_hat_diag, gain_diag)``. The gain is ``p / (p + v)``,
    taken as 0 where both variances vanish.
    """
    p = state.var_diag
    v = np.asarray(meas.v_diag, dtype=float)
    xi = np.asarray(meas.xi, dtype=float)
    if p.shape != v.shape or xi.shape != p.shape:
        raise ValueError("state and measurement dimensions differ")
    denom = p + v
    gain = np.divide(p, denom, out=np.zeros_like(p), where=denom > 0)
    m_hat = state.mean + gain * (xi - state.mean)
    p_hat = (1.0 - gain) * p
    return m_hat, p_hat, gain


def slowdown_factor(p_hat_diag, v_diag, alpha: float) -> float:
    """Scalar in ``[0, alpha]`` throttling the variance decrease."""
    v_term = min(1.0, float(np.mean(np.sqrt(v_diag))) ** 2)
    p_term = float(np.max(np.sqrt(p_hat_diag))) if np.size(p_hat_diag) else 0.0
    denom = v_term + p_term
    if denom <= 0.0:
        return 0.0
    return alpha * (v_term / denom)


def slowdown_update(p_diag, p_hat_diag, v_diag, alpha: float):
    """Return ``(p_next_diag, a)``; ``p_next`` moves from ``p`` toward ``p_hat`` by ``a``."""
    p_diag = np.asarray(p_diag, dtype=float)
    p_hat_diag = np.asarray(p_hat_diag, dtype=float)
    a = slowdown_factor(p_hat_diag, v_diag, alpha)
    sp = np.sqrt(p_diag)
    p_next = (sp + a * (np.sqrt(p_hat_diag) - sp)) ** 2
    return p_next, a


def top_spread(top: np.ndarray) -> float:
    """Largest Euclidean distance from the first row to the others."""
    if len(top) < 2:
        return 0.0
    return float(np.max(np.linalg.norm(top[1:] - top[0], axis=1)))


def hka_minimize(
    objective: Callable,
    bounds: Bounds,
    params: HkaParams,
    rng: np.random.Generator,
    vectorized: bool = False,
    state: Optional[GaussianSearchState] = None,
) -> HkaResult:
    """
    Minimize ``objective`` over ``bounds``.

    Each iteration costs ``params.n`` evaluations for the samples plus one
    for the Kalman estimate of the optimum. The best point seen among the
    estimates and the best samples is returned.

    Parameters
    ----------
    objective : callable
        Maps a D-vector to a real, or an ``(n, D)`` array to n reals when
        ``vectorized`` is set.
    bounds : Bounds
        Search box.
    params : HkaParams
    rng : numpy.random.Generator
    vectorized : bool, default False
    state : GaussianSearchState, optional
        Initial distribution; defaults to ``init_search_state(bounds)``.

    Returns
    -------
    HkaResult
        ``history`` holds the best objective after every iteration.
    """
    if state is None:
        state = init_search_state(bounds)
    else:
        state = GaussianSearchState(state.mean.copy(), state.var_diag.copy(), state.iteration)

    best_q = None
    best_j = np.inf
    evals = 0
    history = []
    k = 0
    while k < params.maxiter:
        pop = sample_candidates(state, objective, params, bounds, rng, vectorized)
        evals += params.n
        k += 1
        if pop.objective[0] < best_j:
            best_q, best_j = pop.q[0].copy(), float(pop.objective[0])

        if params.stop_radius is not None and top_spread(pop.top(params.n_xi)) <= params.stop_radius:
            history.append(best_j)
            break

        meas = measure(pop, params.n_xi)
        m_hat, p_hat, _ = kalman_estimate(state, meas)
        j_hat = float(_evaluate(objective, m_hat[None, :], vectorized)[0])
        evals += 1
        if j_hat < best_j:
            best_q, best_j = m_hat.copy(), j_hat

        p_next, _ = slowdown_update(state.var_diag, p_hat, meas.v_diag, params.alpha)
        state = GaussianSearchState(m_hat, p_next, k)
        history.append(best_j)

    return HkaResult(best_q, best_j, evals, k, history)
