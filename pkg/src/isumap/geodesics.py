"""Completion of the merged sparse metric by all-pairs shortest paths.

Restricted to the vertex set, the metric realization of the merged graph is
the graph shortest-path distance, so the completion runs one Dijkstra per
source vertex. Sources are independent; the module parallelizes over them
with threads against a read-only CSR view (the kernel releases the GIL), so
the result is bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core_types import DenseMetric, SparseMetric
from .errors import ConfigError, DataError

WORKERS_ENV = "ISUMAP_WORKERS"
ON_DISCONNECT_MODES = ("error", "largest_component", "cap")
_ORACLE_MAX_POINTS = 12
_CAP_FACTOR = 1.5


def resolve_workers(workers: int = 0) -> int:
    """0 means auto: the ISUMAP_WORKERS env var, else the CPU count."""
    if workers < 0:
        raise ConfigError(f"workers must be >= 0, got {workers}")
    if workers:
        return workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


@njit(cache=True, nogil=True)
def _dijkstra_rows(indptr, indices, weights, start, stop, out):  # pragma: no cover - jitted
    n = indptr.shape[0] - 1
    cap = indices.shape[0] + 2
    dist = np.empty(n, np.float64)
    done = np.empty(n, np.uint8)
    heap_d = np.empty(cap, np.float64)
    heap_v = np.empty(cap, np.int64)
    for s in range(start, stop):
        for i in range(n):
            dist[i] = np.inf
            done[i] = 0
        dist[s] = 0.0
        heap_d[0] = 0.0
        heap_v[0] = s
        size = 1
        while size > 0:
            d = heap_d[0]
            u = heap_v[0]
            size -= 1
            heap_d[0] = heap_d[size]
            heap_v[0] = heap_v[size]
            pos = 0
            while True:
                left = 2 * pos + 1
                right = left + 1
                small = pos
                if left < size and heap_d[left] < heap_d[small]:
                    small = left
                if right < size and heap_d[right] < heap_d[small]:
                    small = right
                if small == pos:
                    break
                heap_d[pos], heap_d[small] = heap_d[small], heap_d[pos]
                heap_v[pos], heap_v[small] = heap_v[small], heap_v[pos]
                pos = small
            if done[u]:
                continue
            done[u] = 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                nd = d + weights[e]
                if nd < dist[v]:
                    dist[v] = nd
                    pos = size
                    heap_d[pos] = nd
                    heap_v[pos] = v
                    size += 1
                    while pos > 0:
                        parent = (pos - 1) // 2
                        if heap_d[parent] <= heap_d[pos]:
                            break
                        heap_d[pos], heap_d[parent] = heap_d[parent], heap_d[pos]
                        heap_v[pos], heap_v[parent] = heap_v[parent], heap_v[pos]
                        pos = parent
        out[s, :] = dist


def dijkstra_all_pairs(sm: SparseMetric, workers: int = 0) -> DenseMetric:
    """All-pairs shortest-path distances through the stored edges.

    Unreachable pairs stay at +inf. Each row is a single-source run; the
    matrix is then symmetrized by an elementwise min with its transpose,
    which only collapses the one-ulp ambiguity between the two accumulation
    directions of a path sum.

    Parameters
    ----------
    sm : SparseMetric
    workers : int
        Thread count; 0 picks ISUMAP_WORKERS or the CPU count. The output
        is independent of this value.
    """
    workers = resolve_workers(workers)
    n = sm.n_points
    indptr, indices, weights = sm.to_csr()
    out = np.empty((n, n), dtype=np.float64)
    if workers == 1 or n < 64:
        _dijkstra_rows(indptr, indices, weights, 0, n, out)
    else:
        bounds = np.linspace(0, n, workers + 1, dtype=np.int64)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_dijkstra_rows, indptr, indices, weights, int(lo), int(hi), out)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if lo < hi
            ]
            for f in futures:
                f.result()
    return DenseMetric(np.minimum(out, out.T))


@dataclass(frozen=True, eq=False)
class ComponentPartition:
    """Connected components of a sparse metric: per-point labels and sizes."""

    labels: np.ndarray
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def count(self) -> int:
        return len(self.sizes)


def connectivity_report(sm: SparseMetric) -> ComponentPartition:
    """Union-find over the stored edges; components numbered by first point."""
    n = sm.n_points
    parent = np.arange(n, dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j) in sm.entries:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    roots = np.array([find(i) for i in range(n)], dtype=np.int64)
    uniq, labels = np.unique(roots, return_inverse=True)
    sizes = np.bincount(labels, minlength=len(uniq))
    return ComponentPartition(labels=labels, sizes=tuple(sizes))


def largest_component_indices(partition: ComponentPartition) -> np.ndarray:
    """Indices of the largest component (earliest-numbered one on ties)."""
    comp = int(np.argmax(np.asarray(partition.sizes)))
    return np.nonzero(partition.labels == comp)[0]


def subgraph(sm: SparseMetric, keep: np.ndarray) -> SparseMetric:
    """Restriction of the sparse metric to ``keep``, indices remapped to 0..len-1."""
    keep = np.asarray(keep, dtype=np.int64)
    remap = {int(old): new for new, old in enumerate(keep)}
    entries = {}
    for (i, j), w in sm.entries.items():
        if i in remap and j in remap:
            entries[(remap[i], remap[j])] = w
    return SparseMetric(len(keep), entries)


def apply_disconnection_policy(dense: DenseMetric, mode: str = "error"):
    """Resolve infinite entries left by disconnected inputs.

    "error" raises; "cap" replaces +inf with 1.5x the largest finite
    geodesic; "largest_component" is handled upstream (the graph must be
    restricted before completion) and is rejected here.

    Returns (DenseMetric, info dict).
    """
    if mode not in ("error", "cap"):
        raise ConfigError(f"on_disconnect policy {mode!r} cannot be applied post hoc")
    d = dense.dist
    inf_mask = np.isinf(d)
    if not inf_mask.any():
        return dense, {"capped_pairs": 0}
    if mode == "error":
        raise DataError(
            "geodesic completion found unreachable pairs; rerun with "
            "on_disconnect=largest_component or on_disconnect=cap"
        )
    cap = _CAP_FACTOR * float(d[~inf_mask].max())
    fixed = d.copy()
    fixed[inf_mask] = cap
    return DenseMetric(fixed), {"capped_pairs": int(inf_mask.sum() // 2), "cap_value": cap}


def quotient_metric_oracle(sm: SparseMetric) -> DenseMetric:
    """Gluing distance by exhaustive path enumeration (test oracle, N <= 12).

    Certifies :func:`dijkstra_all_pairs`; shares no code with it.
    """
    from .testkit import brute_force_paths

    n = sm.n_points
    if n > _ORACLE_MAX_POINTS:
        raise ConfigError(f"quotient metric oracle refuses N={n} > {_ORACLE_MAX_POINTS}")
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = brute_force_paths(sm, i, j)
    return DenseMetric(out)
