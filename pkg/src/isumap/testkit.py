"""Correctness anchors for the test suite.

Everything here is an independent oracle: exhaustive path enumeration,
full-sort neighbor search, finite differences, alignment helpers, and
Monte-Carlo nulls. None of it shares code with the implementation it
certifies, and instance sizes are capped to keep the suite fast.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core_types import PointCloud, SparseMetric
from .errors import ConfigError

_PATHS_MAX_POINTS = 12


def brute_force_paths(sm: SparseMetric, i: int, j: int) -> float:
    """Minimum total weight over all simple paths between i and j; inf if none.

    Each path sum is accumulated left to right from both endpoints and the
    smaller value kept, matching the direction-free infimum over sequences.
    """
    n = sm.n_points
    if n > _PATHS_MAX_POINTS:
        raise ConfigError(f"brute-force path oracle refuses N={n} > {_PATHS_MAX_POINTS}")
    if i == j:
        return 0.0
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (a, b), w in sm.entries.items():
        adj[a].append((b, w))
        adj[b].append((a, w))

    def search(src: int, dst: int) -> float:
        best = math.inf
        visited = [False] * n
        visited[src] = True

        def dfs(u: int, acc: float):
            nonlocal best
            if acc >= best:
                return
            for v, w in adj[u]:
                if v == dst:
                    total = acc + w
                    if total < best:
                        best = total
                elif not visited[v]:
                    visited[v] = True
                    dfs(v, acc + w)
                    visited[v] = False

        dfs(src, 0.0)
        return best

    return min(search(i, j), search(j, i))


def brute_force_knn(pc: PointCloud, k: int):
    """Full-sort k-NN oracle: per-point scan of all candidates, ties by index."""
    n = pc.n_points
    if not 1 <= k <= n - 1:
        raise ConfigError(f"k must satisfy 1 <= k <= N-1 = {n - 1}, got {k}")
    idx = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        cand = []
        for j in range(n):
            if j == i:
                continue
            if pc.metric == "precomputed":
                d = float(pc.precomputed[i, j])
            else:
                d = float(np.linalg.norm(pc.points[i] - pc.points[j]))
            cand.append((d, j))
        cand.sort()
        idx[i] = [j for _, j in cand[:k]]
        dist[i] = [d for d, _ in cand[:k]]
    return idx, dist


def finite_diff_gradient(f, coords: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar functional of the coordinates."""
    if h <= 0:
        raise ConfigError(f"step size must be > 0, got {h}")
    coords = np.asarray(coords, dtype=np.float64)
    grad = np.zeros_like(coords)
    flat = coords.copy()
    for pos in itertools.product(*(range(s) for s in coords.shape)):
        orig = flat[pos]
        flat[pos] = orig + h
        up = f(flat)
        flat[pos] = orig - h
        down = f(flat)
        flat[pos] = orig
        grad[pos] = (up - down) / (2.0 * h)
    return grad


def random_sparse_metric(
    n: int, seed: int = 0, edge_prob: float = 0.5, zero_edge_prob: float = 0.0
) -> SparseMetric:
    """Random symmetric sparse metric for oracle comparisons."""
    rng = np.random.default_rng(seed)
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < edge_prob:
                if zero_edge_prob and rng.uniform() < zero_edge_prob:
                    entries[(i, j)] = 0.0
                else:
                    entries[(i, j)] = float(rng.uniform(0.05, 4.0))
    return SparseMetric(n, entries)


def procrustes_align(a: np.ndarray, b: np.ndarray, allow_scale: bool = False) -> np.ndarray:
    """Return a centered and rotated (optionally rescaled) onto centered b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigError(f"shape mismatch: {a.shape} vs {b.shape}")
    a0 = a - a.mean(axis=0)
    b0 = b - b.mean(axis=0)
    u, s, vt = np.linalg.svd(a0.T @ b0)
    rotation = u @ vt
    aligned = a0 @ rotation
    if allow_scale:
        denom = (a0**2).sum()
        if denom > 0:
            aligned = aligned * (s.sum() / denom)
    return aligned


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    return float(np.corrcoef(x, y)[0, 1])


def psi_null_mean(labels_a: np.ndarray, n_labels: int, runs: int, seed: int = 0) -> float:
    """Mean pair-sets index of labels_a against uniform random labelings."""
    from .evaluation import pair_sets_index

    rng = np.random.default_rng(seed)
    n = np.asarray(labels_a).shape[0]
    values = [
        pair_sets_index(labels_a, rng.integers(0, n_labels, n)) for _ in range(runs)
    ]
    return float(np.mean(values))
