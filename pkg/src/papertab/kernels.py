"""Numeric inner loops: cosine scan, pairwise distances, k-means steps, silhouette.

Every kernel has two implementations: a numba ``@njit`` version and a pure-numpy
fallback. Set ``PAPERTAB_NO_NUMBA=1`` to force the numpy path; the fallback is
also selected automatically when numba is unavailable. ``benchmarks/bench_kernels.py``
compares both.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PAPERTAB_NO_NUMBA", "").strip() in {"1", "true", "yes"}

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range


def use_numba() -> bool:
    """True when the jitted kernels are active."""
    return HAVE_NUMBA and not _DISABLED


# ---------------------------------------------------------------------------
# numpy implementations


def cosine_scores_numpy(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot product of each row with the query; cosine for unit-norm inputs."""
    return matrix @ query


def pairwise_sq_dists_numpy(x: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    return d


def assign_labels_numpy(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-centroid assignment. Returns (labels, inertia)."""
    d = (
        np.einsum("ij,ij->i", x, x)[:, None]
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
        - 2.0 * (x @ centroids.T)
    )
    np.maximum(d, 0.0, out=d)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(x.shape[0]), labels].sum())
    return labels.astype(np.int64), inertia


def silhouette_mean_numpy(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Mean silhouette over all points; singleton-cluster points score 0."""
    n = x.shape[0]
    if n <= 1 or k <= 1:
        return 0.0
    dist = np.sqrt(pairwise_sq_dists_numpy(x))
    counts = np.bincount(labels, minlength=k)
    # mean distance from every point to every cluster
    sums = np.zeros((n, k))
    for c in range(k):
        sums[:, c] = dist[:, labels == c].sum(axis=1)
    total = 0.0
    for i in range(n):
        c = labels[i]
        if counts[c] <= 1:
            continue
        a = sums[i, c] / (counts[c] - 1)
        b = np.inf
        for other in range(k):
            if other == c or counts[other] == 0:
                continue
            b = min(b, sums[i, other] / counts[other])
        if not np.isfinite(b):
            continue
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / n


# ---------------------------------------------------------------------------
# numba implementations (same contracts, explicit loops)


@njit(cache=True)
def _cosine_scores_nb(matrix, query):
    n, d = matrix.shape
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += matrix[i, j] * query[j]
        out[i] = s
    return out


@njit(cache=True, parallel=True)
def _pairwise_sq_dists_nb(x):
    n, d = x.shape
    out = np.zeros((n, n), dtype=np.float64)
    for i in prange(n):
        for j in range(i + 1, n):
            s = 0.0
            for t in range(d):
                diff = x[i, t] - x[j, t]
                s += diff * diff
            out[i, j] = s
            out[j, i] = s
    return out


@njit(cache=True)
def _assign_labels_nb(x, centroids):
    n, d = x.shape
    k = centroids.shape[0]
    labels = np.empty(n, dtype=np.int64)
    inertia = 0.0
    for i in range(n):
        best = 0
        best_d = np.inf
        for c in range(k):
            s = 0.0
            for t in range(d):
                diff = x[i, t] - centroids[c, t]
                s += diff * diff
            if s < best_d:
                best_d = s
                best = c
        labels[i] = best
        inertia += best_d
    return labels, inertia


@njit(cache=True)
def _silhouette_mean_nb(x, labels, k):
    n = x.shape[0]
    if n <= 1 or k <= 1:
        return 0.0
    dist = np.sqrt(_pairwise_sq_dists_nb(x))
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        counts[labels[i]] += 1
    sums = np.zeros((n, k), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            sums[i, labels[j]] += dist[i, j]
    total = 0.0
    for i in range(n):
        c = labels[i]
        if counts[c] <= 1:
            continue
        a = sums[i, c] / (counts[c] - 1)
        b = np.inf
        for other in range(k):
            if other != c and counts[other] > 0:
                m = sums[i, other] / counts[other]
                if m < b:
                    b = m
        if not np.isfinite(b):
            continue
        denom = a if a > b else b
        if denom > 0.0:
            total += (b - a) / denom
    return total / n


def cosine_scores_numba(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    return _cosine_scores_nb(np.ascontiguousarray(matrix), np.ascontiguousarray(query))


def pairwise_sq_dists_numba(x: np.ndarray) -> np.ndarray:
    return _pairwise_sq_dists_nb(np.ascontiguousarray(x))


def assign_labels_numba(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    labels, inertia = _assign_labels_nb(
        np.ascontiguousarray(x), np.ascontiguousarray(centroids)
    )
    return labels, float(inertia)


def silhouette_mean_numba(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    return float(
        _silhouette_mean_nb(np.ascontiguousarray(x), np.ascontiguousarray(labels), k)
    )


# ---------------------------------------------------------------------------
# active selection

if use_numba():
    cosine_scores = cosine_scores_numba
    pairwise_sq_dists = pairwise_sq_dists_numba
    assign_labels = assign_labels_numba
    silhouette_mean = silhouette_mean_numba
else:  # pragma: no cover - exercised via PAPERTAB_NO_NUMBA in the benchmark
    cosine_scores = cosine_scores_numpy
    pairwise_sq_dists = pairwise_sq_dists_numpy
    assign_labels = assign_labels_numpy
    silhouette_mean = silhouette_mean_numpy
