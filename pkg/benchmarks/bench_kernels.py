"""Benchmark the jitted kernels against their numpy fallbacks.

Run as ``python3 benchmarks/bench_kernels.py``. Shapes are sized like a busy
collection: a few thousand chunk vectors, a few dozen clusters.
"""
from __future__ import annotations

import argparse
import logging
import time

import numpy as np

from papertab import kernels

LOGGER = logging.getLogger("bench_kernels")


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def run(n: int, d: int, k: int, repeats: int) -> list[tuple[str, float, float]]:
    r = np.random.default_rng(0)
    matrix = r.normal(size=(n, d))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    query = matrix[0]
    small = matrix[: min(n, 600)]
    centroids = matrix[:k].copy()
    labels, _ = kernels.assign_labels_numpy(small, centroids)

    cases = [
        ("cosine_scores", (matrix, query),
         kernels.cosine_scores_numpy, kernels.cosine_scores_numba),
        ("pairwise_sq_dists", (small,),
         kernels.pairwise_sq_dists_numpy, kernels.pairwise_sq_dists_numba),
        ("assign_labels", (matrix, centroids),
         kernels.assign_labels_numpy, kernels.assign_labels_numba),
        ("silhouette_mean", (small, labels, k),
         kernels.silhouette_mean_numpy, kernels.silhouette_mean_numba),
    ]

    rows = []
    for name, args, numpy_fn, numba_fn in cases:
        numba_fn(*args)  # trigger jit compile outside the timed region
        t_np = _time(numpy_fn, *args, repeats=repeats)
        t_nb = _time(numba_fn, *args, repeats=repeats)
        rows.append((name, t_np, t_nb))
    return rows


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4000, help="number of vectors")
    parser.add_argument("--d", type=int, default=64, help="vector dimension")
    parser.add_argument("--k", type=int, default=24, help="number of centroids")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best-of)")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    if not kernels.use_numba():
        LOGGER.warning("numba path unavailable or disabled; timing the fallback twice")

    rows = run(args.n, args.d, args.k, args.repeats)
    LOGGER.info("n=%d d=%d k=%d (best of %d)", args.n, args.d, args.k, args.repeats)
    LOGGER.info("%-20s %12s %12s %8s", "kernel", "numpy (ms)", "numba (ms)", "speedup")
    for name, t_np, t_nb in rows:
        LOGGER.info(
            "%-20s %12.3f %12.3f %7.1fx", name, t_np * 1e3, t_nb * 1e3, t_np / t_nb
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
