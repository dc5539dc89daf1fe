"""Parity between the jitted kernels and their numpy fallbacks."""
from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from papertab import kernels


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def silhouette_oracle(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Brute-force silhouette, written independently of both kernel paths."""
    n = len(x)
    if n <= 1 or k <= 1:
        return 0.0
    counts = [int((labels == c).sum()) for c in range(k)]
    total = 0.0
    for i in range(n):
        c = int(labels[i])
        if counts[c] <= 1:
            continue
        same = [float(np.linalg.norm(x[i] - x[j])) for j in range(n)
                if labels[j] == c and j != i]
        a = sum(same) / len(same)
        b = None
        for other in range(k):
            if other == c or counts[other] == 0:
                continue
            d = [float(np.linalg.norm(x[i] - x[j])) for j in range(n)
                 if labels[j] == other]
            mean = sum(d) / len(d)
            if b is None or mean < b:
                b = mean
        if b is None:
            continue
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / n


PAIRS = [
    (kernels.cosine_scores_numpy, kernels.cosine_scores_numba),
    (kernels.pairwise_sq_dists_numpy, kernels.pairwise_sq_dists_numba),
    (kernels.assign_labels_numpy, kernels.assign_labels_numba),
    (kernels.silhouette_mean_numpy, kernels.silhouette_mean_numba),
]


def test_cosine_scores_paths_agree():
    r = rng(1)
    matrix = r.normal(size=(40, 16))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    query = r.normal(size=16)
    query /= np.linalg.norm(query)
    a = kernels.cosine_scores_numpy(matrix, query)
    b = kernels.cosine_scores_numba(matrix, query)
    np.testing.assert_allclose(a, b, atol=1e-12)
    np.testing.assert_allclose(a, matrix @ query, atol=1e-12)


def test_pairwise_sq_dists_paths_agree():
    x = rng(2).normal(size=(30, 8))
    a = kernels.pairwise_sq_dists_numpy(x)
    b = kernels.pairwise_sq_dists_numba(x)
    np.testing.assert_allclose(a, b, atol=1e-9)
    assert a.shape == (30, 30)
    np.testing.assert_allclose(np.diag(b), 0.0, atol=1e-12)
    np.testing.assert_allclose(b, b.T, atol=1e-12)
    i, j = 4, 17
    assert b[i, j] == pytest.approx(float(((x[i] - x[j]) ** 2).sum()))


def test_assign_labels_paths_agree():
    r = rng(3)
    x = r.normal(size=(50, 6))
    centroids = r.normal(size=(4, 6))
    labels_np, inertia_np = kernels.assign_labels_numpy(x, centroids)
    labels_nb, inertia_nb = kernels.assign_labels_numba(x, centroids)
    np.testing.assert_array_equal(labels_np, labels_nb)
    assert inertia_np == pytest.approx(inertia_nb, rel=1e-9)
    manual = min(float(((x[0] - c) ** 2).sum()) for c in centroids)
    assert float(((x[0] - centroids[labels_nb[0]]) ** 2).sum()) == pytest.approx(manual)


def test_silhouette_paths_match_oracle():
    r = rng(4)
    x = np.vstack([
        r.normal(loc=0.0, size=(12, 5)),
        r.normal(loc=6.0, size=(9, 5)),
        r.normal(loc=-6.0, size=(7, 5)),
    ])
    labels = np.array([0] * 12 + [1] * 9 + [2] * 7, dtype=np.int64)
    expected = silhouette_oracle(x, labels, 3)
    assert kernels.silhouette_mean_numpy(x, labels, 3) == pytest.approx(expected, abs=1e-7)
    assert kernels.silhouette_mean_numba(x, labels, 3) == pytest.approx(expected, abs=1e-7)
    assert expected > 0.5


def test_silhouette_edge_cases():
    x = rng(5).normal(size=(6, 3))
    assert kernels.silhouette_mean_numpy(x[:1], np.zeros(1, dtype=np.int64), 1) == 0.0
    assert kernels.silhouette_mean_numba(x, np.zeros(6, dtype=np.int64), 1) == 0.0
    # a singleton cluster contributes zero on both paths
    labels = np.array([0, 0, 0, 0, 0, 1], dtype=np.int64)
    a = kernels.silhouette_mean_numpy(x, labels, 2)
    b = kernels.silhouette_mean_numba(x, labels, 2)
    assert a == pytest.approx(b, abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=2, max_value=25),
    st.integers(min_value=1, max_value=10),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=0, max_value=10_000),
)
def test_parity_property(n, d, k, seed):
    r = rng(seed)
    x = r.normal(size=(n, d))
    centroids = r.normal(size=(k, d))
    query = r.normal(size=d)

    np.testing.assert_allclose(
        kernels.cosine_scores_numpy(x, query),
        kernels.cosine_scores_numba(x, query),
        atol=1e-10,
    )
    np.testing.assert_allclose(
        kernels.pairwise_sq_dists_numpy(x),
        kernels.pairwise_sq_dists_numba(x),
        atol=1e-9,
    )
    labels_np, inertia_np = kernels.assign_labels_numpy(x, centroids)
    labels_nb, inertia_nb = kernels.assign_labels_numba(x, centroids)
    np.testing.assert_array_equal(labels_np, labels_nb)
    assert inertia_np == pytest.approx(inertia_nb, rel=1e-9, abs=1e-12)
    assert kernels.silhouette_mean_numpy(x, labels_np, k) == pytest.approx(
        kernels.silhouette_mean_numba(x, labels_nb, k), abs=1e-7
    )


def test_active_bindings_follow_numba_availability():
    if kernels.use_numba():
        assert kernels.cosine_scores is kernels.cosine_scores_numba
        assert kernels.silhouette_mean is kernels.silhouette_mean_numba
    else:
        assert kernels.cosine_scores is kernels.cosine_scores_numpy


def test_env_flag_forces_numpy_path():
    code = (
        "from papertab import kernels\n"
        "assert not kernels.use_numba()\n"
        "assert kernels.cosine_scores is kernels.cosine_scores_numpy\n"
        "assert kernels.pairwise_sq_dists is kernels.pairwise_sq_dists_numpy\n"
        "assert kernels.assign_labels is kernels.assign_labels_numpy\n"
        "assert kernels.silhouette_mean is kernels.silhouette_mean_numpy\n"
        "print('numpy path active')\n"
    )
    env = dict(os.environ, PAPERTAB_NO_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert "numpy path active" in proc.stdout
