"""Exact k-nearest-neighbor search over a PointCloud.

A full pairwise scan (chunked over query rows) keeps the search exact and
deterministic; equidistant neighbors are broken toward the smaller index.
Approximate indexes can be slotted in behind the same signature later.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .core_types import PointCloud
from .errors import ConfigError, DataError

_CHUNK = 512


def pairwise_rows(pc: PointCloud, lo: int, hi: int) -> np.ndarray:
    """Distances from points lo..hi-1 to every point, one row per query."""
    if pc.metric == "precomputed":
        return np.array(pc.precomputed[lo:hi], dtype=np.float64)
    return cdist(pc.points[lo:hi], pc.points)


def knn(pc: PointCloud, k: int):
    """Indices and distances of the k nearest neighbors of every point.

    Parameters
    ----------
    pc : PointCloud
    k : int
        Neighbor count, 1 <= k <= N-1.

    Returns
    -------
    neighbor_idx : (N, k) int64 array
        Row i holds the k points minimizing d(x_i, .) over X \\ {x_i},
        in nondecreasing distance order, ties broken by smaller index.
    raw_dist : (N, k) float64 array
        The matching distances.
    """
    n = pc.n_points
    if not 1 <= k <= n - 1:
        raise ConfigError(f"k must satisfy 1 <= k <= N-1 = {n - 1}, got {k}")
    if pc.metric == "precomputed" and np.isnan(pc.precomputed).any():
        raise DataError("precomputed distance matrix contains NaN")
    if pc.metric == "euclidean" and not np.isfinite(pc.points).all():
        raise DataError("point coordinates contain non-finite values")

    neighbor_idx = np.empty((n, k), dtype=np.int64)
    raw_dist = np.empty((n, k), dtype=np.float64)
    for lo in range(0, n, _CHUNK):
        hi = min(n, lo + _CHUNK)
        block = pairwise_rows(pc, lo, hi)
        if np.isnan(block).any():
            raise DataError("pairwise distances contain NaN")
        block[np.arange(lo, hi) - lo, np.arange(lo, hi)] = np.inf
        # stable sort on distances = ascending-index tie-break
        order = np.argsort(block, axis=1, kind="stable")[:, :k]
        neighbor_idx[lo:hi] = order
        raw_dist[lo:hi] = np.take_along_axis(block, order, axis=1)
    return neighbor_idx, raw_dist
