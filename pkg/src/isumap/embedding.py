"""Multidimensional scaling of the completed metric.

Classical scaling takes the top eigenpairs of the double-centered squared
distance matrix; only the m requested pairs are computed (Lanczos on large
inputs). Metric scaling minimizes raw stress by full-batch gradient descent
with step halving, which keeps runs deterministic and stress monotone over
accepted steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.spatial.distance import cdist, pdist, squareform

from .core_types import DenseMetric, Embedding
from .errors import ConfigError, DataError, NumericalError

INIT_MODES = ("classical_mds", "random")
_DENSE_EIG_LIMIT = 256
_MAX_HALVINGS = 40


@dataclass(frozen=True)
class MdsConfig:
    method: str = "classical_mds"
    m: int = 2
    max_iter: int = 500
    learning_rate: float = 1e-2
    init: str = "classical_mds"
    seed: int = 0
    convergence_tol: float = 1e-7

    def __post_init__(self):
        if self.method not in ("classical_mds", "metric_mds"):
            raise ConfigError(f"unknown MDS method {self.method!r}")
        if self.m < 1:
            raise ConfigError(f"target dimension must be >= 1, got {self.m}")
        if self.max_iter < 1 or self.learning_rate <= 0 or self.convergence_tol <= 0:
            raise ConfigError("max_iter, learning_rate and convergence_tol must be positive")
        if self.init not in INIT_MODES:
            raise ConfigError(f"init must be one of {INIT_MODES}, got {self.init!r}")


def double_center(dist: np.ndarray) -> np.ndarray:
    """B = -1/2 J D^2 J with J = I - (1/N) 1 1^T, symmetrized exactly."""
    d2 = np.asarray(dist, dtype=np.float64) ** 2
    row_means = d2.mean(axis=1, keepdims=True)
    grand_mean = d2.mean()
    b = -0.5 * (d2 - row_means - row_means.T + grand_mean)
    return 0.5 * (b + b.T)


def top_eigenpairs(b: np.ndarray, r: int):
    """The r largest-algebraic eigenpairs of symmetric b, sorted descending.

    Eigenvector signs are normalized by forcing the largest-magnitude entry
    positive, so results are deterministic across solvers and runs.
    """
    n = b.shape[0]
    if not 1 <= r <= n:
        raise ConfigError(f"need 1 <= r <= N, got r={r}, N={n}")
    use_dense = n <= _DENSE_EIG_LIMIT or r >= n - 1
    if use_dense:
        vals, vecs = scipy.linalg.eigh(b, subset_by_index=[n - r, n - 1])
        vals, vecs = vals[::-1], vecs[:, ::-1]
    else:
        # fixed start vector keeps Lanczos deterministic; a seeded random
        # vector avoids starting in the centering null space
        v0 = np.random.RandomState(1234).uniform(-0.5, 0.5, n)
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(b, k=r, which="LA", v0=v0)
        except scipy.sparse.linalg.ArpackError as exc:
            try:
                vals, vecs = scipy.linalg.eigh(b, subset_by_index=[n - r, n - 1])
            except Exception:
                raise NumericalError(f"eigendecomposition failed: {exc}") from exc
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
    vecs = vecs.copy()
    for c in range(vecs.shape[1]):
        lead = int(np.argmax(np.abs(vecs[:, c])))
        if vecs[lead, c] < 0:
            vecs[:, c] = -vecs[:, c]
    return vals, vecs


def stress(coords: np.ndarray, dist: np.ndarray) -> float:
    """Raw stress: sum over i<j of (D_ij - ||y_i - y_j||)^2."""
    emb = pdist(np.asarray(coords, dtype=np.float64))
    target = squareform(np.asarray(dist, dtype=np.float64), checks=False)
    return float(((target - emb) ** 2).sum())


def stress_gradient(coords: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Analytic gradient of :func:`stress` with respect to the coordinates.

    Coincident pairs contribute zero (the standard subgradient choice).
    """
    coords = np.asarray(coords, dtype=np.float64)
    emb = cdist(coords, coords)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(emb > 0.0, (emb - dist) / emb, 0.0)
    np.fill_diagonal(ratio, 0.0)
    return 2.0 * (coords * ratio.sum(axis=1, keepdims=True) - ratio @ coords)


def _check_metric_input(dm: DenseMetric):
    d = dm.dist
    if np.isnan(d).any():
        raise DataError("distance matrix contains NaN")
    if np.isinf(d).any():
        raise DataError(
            "distance matrix contains infinite entries; resolve connectivity before embedding"
        )


def classical_mds(dm: DenseMetric, m: int) -> Embedding:
    """Classical (Torgerson) scaling into R^m.

    Coordinate column r is sqrt(max(lambda_r, 0)) times the r-th eigenvector
    of the double-centered matrix; columns with nonpositive eigenvalues are
    zero-filled and visible through ``Embedding.eigenvalues``.
    """
    _check_metric_input(dm)
    n = dm.n_points
    if not 1 <= m <= n - 1:
        raise ConfigError(f"target dimension must satisfy 1 <= m <= N-1 = {n - 1}, got {m}")
    b = double_center(dm.dist)
    vals, vecs = top_eigenpairs(b, m)
    coords = vecs * np.sqrt(np.maximum(vals, 0.0))[None, :]
    return Embedding(
        coords=coords,
        m=m,
        stress=stress(coords, dm.dist),
        method="classical_mds",
        eigenvalues=tuple(vals),
    )


def _init_coords(dm: DenseMetric, cfg: MdsConfig) -> np.ndarray:
    if cfg.init == "classical_mds":
        return np.array(classical_mds(dm, cfg.m).coords)
    rng = np.random.default_rng(cfg.seed)
    positive = dm.dist[dm.dist > 0]
    scale = float(positive.mean()) * 0.5 if positive.size else 1.0
    return rng.standard_normal((dm.n_points, cfg.m)) * scale


def metric_mds(dm: DenseMetric, cfg: MdsConfig, return_history: bool = False):
    """Minimize raw stress by gradient descent with step halving.

    Steps are accepted only when the stress does not increase, so the stress
    sequence is nonincreasing; iteration stops at max_iter, when the relative
    improvement drops below convergence_tol, or when no acceptable step
    remains.
    """
    _check_metric_input(dm)
    n = dm.n_points
    if not 1 <= cfg.m <= n - 1:
        raise ConfigError(f"target dimension must satisfy 1 <= m <= N-1 = {n - 1}, got {cfg.m}")
    coords = _init_coords(dm, cfg)
    current = stress(coords, dm.dist)
    if not math.isfinite(current):
        raise NumericalError("initial stress is not finite")
    history = [current]
    lr = cfg.learning_rate
    for _ in range(cfg.max_iter):
        grad = stress_gradient(coords, dm.dist)
        accepted = False
        for _ in range(_MAX_HALVINGS):
            candidate = coords - lr * grad
            value = stress(candidate, dm.dist)
            if math.isnan(value):
                lr *= 0.5
                continue
            if value <= current:
                accepted = True
                break
            lr *= 0.5
        if not accepted:
            last = stress(coords - lr * grad, dm.dist)
            if math.isnan(last):
                raise NumericalError(
                    "metric MDS diverged (stress became NaN); try a smaller learning_rate"
                )
            break
        improvement = current - value
        coords, current = candidate, value
        history.append(current)
        lr *= 1.2
        if improvement < cfg.convergence_tol * max(current, 1e-300):
            break
    emb = Embedding(coords=coords, m=cfg.m, stress=current, method="metric_mds")
    if return_history:
        return emb, history
    return emb


def _as_coords(obj) -> np.ndarray:
    coords = obj.coords if isinstance(obj, Embedding) else obj
    return np.asarray(coords, dtype=np.float64)


def procrustes_distance(a, b) -> float:
    """Minimal RMSD between two configurations over rotation, reflection and translation."""
    ca, cb = _as_coords(a), _as_coords(b)
    if ca.shape != cb.shape:
        raise ConfigError(f"shape mismatch: {ca.shape} vs {cb.shape}")
    ca = ca - ca.mean(axis=0)
    cb = cb - cb.mean(axis=0)
    u, _, vt = np.linalg.svd(ca.T @ cb)
    rotation = u @ vt
    resid = ca @ rotation - cb
    return float(np.sqrt((resid**2).sum(axis=1).mean()))
