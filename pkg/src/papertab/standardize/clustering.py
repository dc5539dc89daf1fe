"""Seeded k-means with silhouette-driven k selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import UsageError

KMEANS_SEED = 1337
MAX_AUTO_K = 8
MAX_ITER = 100


@dataclass
class ClusterResult:
    labels: np.ndarray
    centroids: np.ndarray
    k: int


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        centers = points[chosen]
        cross = (
            np.einsum("ij,ij->i", points, points)[:, None]
            + np.einsum("ij,ij->i", centers, centers)[None, :]
            - 2.0 * (points @ centers.T)
        )
        d2 = np.maximum(cross, 0.0).min(axis=1)
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass on already-chosen points; take the first unused
            for i in range(n):
                if i not in chosen:
                    chosen.append(i)
                    break
            else:
                chosen.append(chosen[-1])
            continue
        chosen.append(int(rng.choice(n, p=d2 / total)))
    return points[chosen].astype(np.float64).copy()


def kmeans(points: np.ndarray, k: int, seed: int = KMEANS_SEED) -> ClusterResult:
    """Lloyd iterations from a k-means++ start; fully determined by the seed."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        raise UsageError("kmeans needs at least one point")
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    if k >= n:
        return ClusterResult(
            labels=np.arange(n, dtype=np.int64), centroids=points.copy(), k=n
        )
    if k == 1:
        return ClusterResult(
            labels=np.zeros(n, dtype=np.int64),
            centroids=points.mean(axis=0, keepdims=True),
            k=1,
        )
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(points, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(MAX_ITER):
        new_labels, _ = kernels.assign_labels(points, centroids)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
            else:
                # revive an empty cluster at the point farthest from its centroid
                d2 = kernels.pairwise_sq_dists(points, centroids).min(axis=1)
                centroids[j] = points[int(np.argmax(d2))]
    return ClusterResult(labels=labels, centroids=centroids, k=k)


def silhouette(points: np.ndarray, labels: np.ndarray, k: int) -> float:
    points = np.ascontiguousarray(points, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    return float(kernels.silhouette_mean(points, labels, k))


def cluster(
    points: np.ndarray, k: int | None = None, seed: int = KMEANS_SEED
) -> ClusterResult:
    """Cluster points; when k is absent, pick it by maximum mean silhouette."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        raise UsageError("cluster needs at least one point")
    if k is not None:
        return kmeans(points, k, seed)
    if n < 3:
        return kmeans(points, 1, seed)
    best: ClusterResult | None = None
    best_score = -np.inf
    for candidate in range(2, min(MAX_AUTO_K, n - 1) + 1):
        result = kmeans(points, candidate, seed)
        score = silhouette(points, result.labels, result.k)
        if score > best_score + 1e-12:
            best = result
            best_score = score
    assert best is not None
    return best
