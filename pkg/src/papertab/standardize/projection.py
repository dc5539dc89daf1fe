"""Deterministic 2D projection of embedding vectors."""
from __future__ import annotations

import numpy as np

from ..errors import UsageError


def project_2d(vectors: np.ndarray) -> np.ndarray:
    """Top-2 principal coordinates of mean-centered vectors.

    Sign convention: each axis is flipped so its largest-magnitude loading
    is positive, making the output reproducible across runs and libraries.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise UsageError("project_2d expects a nonempty (n, d) matrix")
    n = X.shape[0]
    coords = np.zeros((n, 2))
    if n == 1:
        return coords
    centered = X - X.mean(axis=0)
    _, S, Vt = np.linalg.svd(centered, full_matrices=False)
    if S.size == 0 or S[0] <= 0.0:
        return coords
    tol = S[0] * 1e-12
    for j in range(min(2, S.size)):
        if S[j] <= tol:
            break
        loading = Vt[j]
        pivot = int(np.argmax(np.abs(loading)))
        sign = 1.0 if loading[pivot] >= 0 else -1.0
        coords[:, j] = sign * (centered @ loading)
    return coords
