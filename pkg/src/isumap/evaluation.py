"""Embedding quality metrics: k-means, pair-set partition similarity,
nearest-neighbor uniformity, and geodesic preservation."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist, pdist, squareform

from .core_types import DenseMetric, Embedding
from .errors import ConfigError


def kmeans(
    coords: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    return_history: bool = False,
):
    """Lloyd's algorithm from distance-weighted (k-means++ style) seeding.

    Deterministic under ``seed``. An empty cluster is reseeded from the point
    farthest from its assigned centroid, which keeps the within-cluster sum
    of squares nonincreasing across iterations. With ``return_history`` the
    per-iteration objective values are returned alongside the labels.
    """
    coords = np.asarray(coords, dtype=np.float64)
    n = coords.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must satisfy 1 <= k <= N = {n}, got {k}")
    rng = np.random.default_rng(seed)

    centers = np.empty((k, coords.shape[1]), dtype=np.float64)
    centers[0] = coords[rng.integers(n)]
    closest = ((coords - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            pick = rng.choice(n, p=closest / total)
        else:
            pick = int(rng.integers(n))
        centers[c] = coords[pick]
        closest = np.minimum(closest, ((coords - centers[c]) ** 2).sum(axis=1))

    labels = np.full(n, -1, dtype=np.int64)
    history = []
    for _ in range(max_iter):
        d2 = cdist(coords, centers, metric="sqeuclidean")
        new_labels = d2.argmin(axis=1)
        for c in range(k):
            members = new_labels == c
            if members.any():
                centers[c] = coords[members].mean(axis=0)
            else:
                farthest = int(np.argmax(d2[np.arange(n), new_labels]))
                centers[c] = coords[farthest]
        history.append(within_cluster_ss(coords, new_labels))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    if return_history:
        return labels, history
    return labels


def within_cluster_ss(coords: np.ndarray, labels: np.ndarray) -> float:
    coords = np.asarray(coords, dtype=np.float64)
    total = 0.0
    for c in np.unique(labels):
        members = coords[labels == c]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


_PSI_NULL_PERMUTATIONS = 64


def _matched_similarity(a: np.ndarray, b: np.ndarray, ka: int, kb: int) -> float:
    """Maximum-weight one-to-one cluster matching on overlap scores
    |a_i & b_j| / max(|a_i|, |b_j|); returns the total matched score."""
    contingency = np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb).astype(np.float64)
    sizes_a = contingency.sum(axis=1)
    sizes_b = contingency.sum(axis=0)
    score = contingency / np.maximum(np.maximum(sizes_a[:, None], sizes_b[None, :]), 1.0)
    rows, cols = linear_sum_assignment(-score)
    return float(score[rows, cols].sum())


def pair_sets_index(labels_a: np.ndarray, labels_b: np.ndarray) -> float:
    """Chance-adjusted partition similarity from matched cluster pair sets.

    Clusters of the two labelings are matched one-to-one by a maximum-weight
    assignment on the overlap scores |a_i & b_j| / max(|a_i|, |b_j|); the
    total score S is then adjusted for chance:

        PSI = (S - E[S]) / (max(Ka, Kb) - E[S])

    E[S] is the expectation of the same matched score under the
    fixed-margins null, estimated from a fixed-seed permutation sample
    (the closed-form sorted-size approximation under-corrects the
    matching's selection gain, leaving a positive bias at small cluster
    counts). Identical partitions score exactly 1; independent random
    partitions score about 0 in expectation, and slightly negative values
    are possible.
    """
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if labels_a.shape != labels_b.shape or labels_a.ndim != 1 or labels_a.size == 0:
        raise ConfigError(
            f"labelings must be equal-length non-empty vectors, got {labels_a.shape} and {labels_b.shape}"
        )
    _, a = np.unique(labels_a, return_inverse=True)
    _, b = np.unique(labels_b, return_inverse=True)
    ka, kb = int(a.max()) + 1, int(b.max()) + 1
    s = _matched_similarity(a, b, ka, kb)

    # mirrored permutation streams keep the index symmetric in its arguments
    rng = np.random.default_rng(0)
    null_b = np.mean(
        [_matched_similarity(a, rng.permutation(b), ka, kb) for _ in range(_PSI_NULL_PERMUTATIONS)]
    )
    rng = np.random.default_rng(0)
    null_a = np.mean(
        [_matched_similarity(rng.permutation(a), b, ka, kb) for _ in range(_PSI_NULL_PERMUTATIONS)]
    )
    expected = 0.5 * (null_a + null_b)

    denom = max(ka, kb) - expected
    if denom <= 1e-12:
        # degenerate margins (e.g. both single-cluster): any matching is perfect
        return 1.0
    return (s - expected) / denom


def nn_distance_uniformity(coords: np.ndarray) -> float:
    """Coefficient of variation (std/mean) of nearest-neighbor distances."""
    coords = np.asarray(coords, dtype=np.float64)
    n = coords.shape[0]
    if n < 2:
        raise ConfigError("need at least two points")
    nn = np.empty(n, dtype=np.float64)
    chunk = 1024
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        block = cdist(coords[lo:hi], coords)
        block[np.arange(lo, hi) - lo, np.arange(lo, hi)] = np.inf
        nn[lo:hi] = block.min(axis=1)
    mean = nn.mean()
    if mean == 0:
        return 0.0
    return float(nn.std() / mean)


def geodesic_correlation(dm: DenseMetric, emb) -> float:
    """Pearson correlation between target geodesics and embedded distances."""
    coords = emb.coords if isinstance(emb, Embedding) else np.asarray(emb, dtype=np.float64)
    if coords.shape[0] != dm.n_points:
        raise ConfigError(f"embedding has {coords.shape[0]} rows, metric has {dm.n_points}")
    target = squareform(dm.dist, checks=False)
    embedded = pdist(coords)
    if target.std() == 0 or embedded.std() == 0:
        raise ConfigError("correlation undefined: one distance set is constant")
    return float(np.corrcoef(target, embedded)[0, 1])
