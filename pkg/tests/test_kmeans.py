import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hkaclust.kmeans import assign_points, kmeans_full, kmeans_step, sse, update_centroids


def _instances(count=200, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(3, 13))
        k = int(rng.integers(2, 4 if n <= 7 else 3))
        d = int(rng.integers(1, 4))
        x = rng.normal(size=(n, d)) * rng.uniform(0.5, 5)
        z = x[rng.choice(n, k, replace=False)] + rng.normal(size=(k, d))
        yield x, z, rng


def _exhaustive_best(x, z):
    # every labelling of n points into K clusters, scored against fixed centroids
    best = np.inf
    for lab in itertools.product(range(len(z)), repeat=len(x)):
        best = min(best, sse(x, z, np.array(lab)))
    return best


def test_step_never_increases_objective_exhaustive():
    checked = 0
    for x, z, rng in _instances():
        j0 = sse(x, z)
        labels = assign_points(x, z)
        # the assignment step is optimal over all K**n labellings
        assert sse(x, z, labels) == pytest.approx(_exhaustive_best(x, z), rel=1e-12, abs=1e-12)
        z1, repaired = update_centroids(x, labels, len(z), rng, return_repaired=True)
        if repaired:
            continue
        assert sse(x, z1) <= j0 + 1e-10
        checked += 1
    assert checked >= 150


def test_ties_go_to_lowest_index():
    x = np.array([[0.0], [1.0]])
    z = np.array([[0.5], [0.5]])
    np.testing.assert_array_equal(assign_points(x, z), [0, 0])


def test_empty_cluster_reseeded_from_data():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    z, repaired = update_centroids(x, np.array([0, 0, 0]), 2, np.random.default_rng(0), return_repaired=True)
    assert repaired
    np.testing.assert_allclose(z[0], x.mean(axis=0))
    assert any(np.array_equal(z[1], p) for p in x)


def test_step_on_separated_blobs_recovers_means():
    rng = np.random.default_rng(1)
    a = rng.normal(0, 0.1, (20, 2))
    b = rng.normal(10, 0.1, (20, 2))
    x = np.vstack([a, b])
    z = kmeans_step(x, np.array([[1.0, 1.0], [9.0, 9.0]]), rng)
    np.testing.assert_allclose(z, [a.mean(0), b.mean(0)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_full_run_monotone_and_converged(seed, k):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(30, 2))
    init = x[rng.choice(30, k, replace=False)]
    res = kmeans_full(x, k, init, maxiter=100, tol=1e-9, rng=rng)
    assert res.objective <= sse(x, init) + 1e-9
    assert 1 <= res.iterations <= 100
    np.testing.assert_array_equal(res.labels, assign_points(x, res.centroids))


def test_input_validation():
    x = np.zeros((3, 2))
    with pytest.raises(ValueError):
        assign_points(x, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        kmeans_full(x, 2, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        kmeans_full(x, 1, np.zeros((1, 2)), maxiter=0)
