"""Shared data model for the pipeline.

Five immutable containers flow between stages:

    PointCloud  ->  NeighborGraph  ->  SparseMetric  ->  DenseMetric  ->  Embedding

Infinite distance is encoded by *absence* in SparseMetric and by IEEE +inf in
DenseMetric. All floating data is float64. Every type serializes to plain
dicts (JSON-safe, bit-exact round trip for finite values via float repr).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

METRIC_KINDS = ("euclidean", "precomputed")
MDS_METHODS = ("classical_mds", "metric_mds")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PointCloud:
    """A raw dataset: N points as feature vectors, or a precomputed distance matrix.

    Labels are optional and carried passively; only evaluation reads them.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    metric: str = "euclidean"
    precomputed: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", _freeze(np.asarray(self.points, dtype=np.float64)))
        if self.labels is not None:
            object.__setattr__(self, "labels", _freeze(np.asarray(self.labels, dtype=np.int64)))
        if self.precomputed is not None:
            object.__setattr__(
                self, "precomputed", _freeze(np.asarray(self.precomputed, dtype=np.float64))
            )

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1] if self.points.ndim == 2 else 0

    def to_dict(self) -> dict:
        return {
            "kind": "PointCloud",
            "points": self.points.tolist(),
            "labels": None if self.labels is None else self.labels.tolist(),
            "metric": self.metric,
            "precomputed": None if self.precomputed is None else self.precomputed.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PointCloud":
        return cls(
            points=np.asarray(d["points"], dtype=np.float64),
            labels=None if d["labels"] is None else np.asarray(d["labels"], dtype=np.int64),
            metric=d["metric"],
            precomputed=None
            if d["precomputed"] is None
            else np.asarray(d["precomputed"], dtype=np.float64),
        )


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Per-point star graphs: k nearest neighbors with raw and locally distorted distances."""

    k: int
    neighbor_idx: np.ndarray
    raw_dist: np.ndarray
    local_dist: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "neighbor_idx", _freeze(np.asarray(self.neighbor_idx, dtype=np.int64))
        )
        for name in ("raw_dist", "local_dist", "rho", "sigma"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), dtype=np.float64)))

    @property
    def n_points(self) -> int:
        return self.neighbor_idx.shape[0]

    def to_dict(self) -> dict:
        return {
            "kind": "NeighborGraph",
            "k": self.k,
            "neighbor_idx": self.neighbor_idx.tolist(),
            "raw_dist": self.raw_dist.tolist(),
            "local_dist": self.local_dist.tolist(),
            "rho": self.rho.tolist(),
            "sigma": self.sigma.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NeighborGraph":
        return cls(
            k=d["k"],
            neighbor_idx=np.asarray(d["neighbor_idx"], dtype=np.int64),
            raw_dist=np.asarray(d["raw_dist"], dtype=np.float64),
            local_dist=np.asarray(d["local_dist"], dtype=np.float64),
            rho=np.asarray(d["rho"], dtype=np.float64),
            sigma=np.asarray(d["sigma"], dtype=np.float64),
        )


class SparseMetric:
    """Symmetric sparse distance matrix; a missing pair means distance infinity.

    Keys are unordered index pairs stored as (i, j) with i < j. Stored values
    are finite and >= 0; exact zeros are legal (pseudo-metric) and distinct
    from absence.
    """

    __slots__ = ("n_points", "_entries")

    def __init__(self, n_points: int, entries: dict):
        if n_points < 1:
            raise ValueError("n_points must be >= 1")
        norm: dict[tuple[int, int], float] = {}
        for (i, j), w in entries.items():
            if i == j:
                raise ValueError(f"self distance for index {i} is implicit (0), not storable")
            if not (0 <= i < n_points and 0 <= j < n_points):
                raise ValueError(f"index pair ({i},{j}) out of range for n_points={n_points}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"stored distance for pair ({i},{j}) must be finite and >= 0, got {w}")
            key = (i, j) if i < j else (j, i)
            norm[key] = w
        self.n_points = int(n_points)
        self._entries = norm

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    @property
    def n_edges(self) -> int:
        return len(self._entries)

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self._entries.get(key, math.inf)

    def to_csr(self):
        """Both-direction CSR arrays (indptr, indices, weights), rows sorted."""
        m = len(self._entries)
        n = self.n_points
        rows = np.empty(2 * m, dtype=np.int64)
        cols = np.empty(2 * m, dtype=np.int64)
        vals = np.empty(2 * m, dtype=np.float64)
        for t, ((i, j), w) in enumerate(self._entries.items()):
            rows[2 * t] = i
            cols[2 * t] = j
            rows[2 * t + 1] = j
            cols[2 * t + 1] = i
            vals[2 * t] = vals[2 * t + 1] = w
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), cols, vals

    def __eq__(self, other):
        return (
            isinstance(other, SparseMetric)
            and self.n_points == other.n_points
            and self._entries == other._entries
        )

    def __repr__(self):
        return f"SparseMetric(n_points={self.n_points}, n_edges={self.n_edges})"

    def to_dict(self) -> dict:
        return {
            "kind": "SparseMetric",
            "n_points": self.n_points,
            "entries": sorted([i, j, w] for (i, j), w in self._entries.items()),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SparseMetric":
        return cls(d["n_points"], {(int(i), int(j)): w for i, j, w in d["entries"]})


@dataclass(frozen=True, eq=False)
class DenseMetric:
    """Completed N x N geodesic distance matrix; +inf marks unreachable pairs."""

    dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dist", _freeze(np.asarray(self.dist, dtype=np.float64)))

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    def to_dict(self) -> dict:
        return {"kind": "DenseMetric", "dist": self.dist.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "DenseMetric":
        return cls(dist=np.asarray(d["dist"], dtype=np.float64))


@dataclass(frozen=True, eq=False)
class Embedding:
    """Low-dimensional coordinates plus the residual stress of the configuration.

    ``eigenvalues`` is a diagnostic payload set by classical scaling (head of
    the centered spectrum, in the order used for the coordinate columns);
    nonpositive entries mark zero-filled columns.
    """

    coords: np.ndarray
    m: int
    stress: float
    method: str
    eigenvalues: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "coords", _freeze(np.asarray(self.coords, dtype=np.float64)))
        if self.method not in MDS_METHODS:
            raise ValueError(f"method must be one of {MDS_METHODS}, got {self.method!r}")
        if self.eigenvalues is not None:
            object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    def to_dict(self) -> dict:
        return {
            "kind": "Embedding",
            "coords": self.coords.tolist(),
            "m": self.m,
            "stress": self.stress,
            "method": self.method,
            "eigenvalues": None if self.eigenvalues is None else list(self.eigenvalues),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Embedding":
        eig = d.get("eigenvalues")
        return cls(
            coords=np.asarray(d["coords"], dtype=np.float64),
            m=d["m"],
            stress=d["stress"],
            method=d["method"],
            eigenvalues=None if eig is None else tuple(eig),
        )


_KINDS = {
    "PointCloud": PointCloud,
    "NeighborGraph": NeighborGraph,
    "SparseMetric": SparseMetric,
    "DenseMetric": DenseMetric,
    "Embedding": Embedding,
}


def dumps(obj) -> str:
    """Serialize any of the five pipeline types to JSON."""
    return json.dumps(obj.to_dict())


def loads(text: str):
    d = json.loads(text)
    return _KINDS[d["kind"]].from_dict(d)


def validate_point_cloud(pc: PointCloud) -> list:
    """Report every PointCloud invariant violation; an empty list means valid."""
    violations = []
    pts = pc.points
    if pts.ndim != 2 or pts.shape[0] < 1:
        violations.append(f"points must be a non-empty N x n matrix, got shape {pts.shape}")
        return violations
    n = pts.shape[0]
    if not np.isfinite(pts).all():
        violations.append("points contain non-finite values")
    if pc.metric not in METRIC_KINDS:
        violations.append(f"metric must be one of {METRIC_KINDS}, got {pc.metric!r}")
    if pc.labels is not None and pc.labels.shape != (n,):
        violations.append(f"labels must have length {n}, got shape {pc.labels.shape}")
    if pc.metric == "precomputed":
        mat = pc.precomputed
        if mat is None:
            violations.append("metric=precomputed requires a precomputed matrix")
        else:
            if mat.shape != (n, n):
                violations.append(f"precomputed matrix must be {n} x {n}, got {mat.shape}")
            else:
                asym = np.abs(mat - mat.T)
                if np.nanmax(asym) > 1e-12:
                    i, j = np.unravel_index(np.nanargmax(asym), asym.shape)
                    violations.append(
                        f"precomputed matrix asymmetric at ({i},{j}): "
                        f"{mat[i, j]!r} vs {mat[j, i]!r}"
                    )
                diag = np.diagonal(mat)
                if np.any(diag != 0):
                    i = int(np.nonzero(diag)[0][0])
                    violations.append(f"precomputed diagonal must be zero, entry {i} is {diag[i]!r}")
                if np.any(mat < 0):
                    i, j = np.unravel_index(int(np.argmax(mat < 0)), mat.shape)
                    violations.append(f"precomputed entry ({i},{j}) is negative: {mat[i, j]!r}")
                if np.isnan(mat).any():
                    violations.append("precomputed matrix contains NaN")
    elif pc.precomputed is not None:
        violations.append("precomputed matrix given but metric is not 'precomputed'")
    return violations
