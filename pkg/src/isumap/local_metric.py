"""Locally distorted metric spaces: one star graph per point.

Around each point the raw neighbor distances are shifted by rho (distance to
the first neighbor) and rescaled by a per-point conformal factor sigma, so
that nearest-neighbor distances become comparable across dense and sparse
regions. All non-neighbor distances are implicitly infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_types import NeighborGraph, PointCloud
from .errors import ConfigError, NumericalError
from .neighbors import knn

SIGMA_MODES = ("kth_neighbor", "binary_search", "identity")


@dataclass(frozen=True)
class LocalMetricConfig:
    """Knobs for the local distortion step.

    sigma_mode "kth_neighbor" pins the farthest local distance at 1;
    "binary_search" solves the smooth-neighborhood normalization
    sum_j exp(-d_j / sigma) = log2(k); "identity" applies no rescaling
    (sigma = 1), which together with apply_rho=False reduces the pipeline
    to plain geodesics on the raw k-NN graph.
    """

    sigma_mode: str = "kth_neighbor"
    apply_rho: bool = True
    binary_search_tolerance: float = 1e-5
    binary_search_max_iter: int = 100
    sigma_floor: float = 1e-12

    def __post_init__(self):
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(f"sigma_mode must be one of {SIGMA_MODES}, got {self.sigma_mode!r}")
        if self.binary_search_tolerance <= 0:
            raise ConfigError("binary_search_tolerance must be > 0")
        if self.binary_search_max_iter < 1:
            raise ConfigError("binary_search_max_iter must be >= 1")
        if self.sigma_floor <= 0:
            raise ConfigError("sigma_floor must be > 0")


def compute_rho(raw_dist: np.ndarray, apply_rho: bool = True) -> np.ndarray:
    """Per-point shift: the distance to the first nearest neighbor, or zero."""
    raw_dist = np.asarray(raw_dist, dtype=np.float64)
    if apply_rho:
        return raw_dist[:, 0].copy()
    return np.zeros(raw_dist.shape[0], dtype=np.float64)


def compute_sigma_kth(raw_dist: np.ndarray, rho: np.ndarray, sigma_floor: float = 1e-12) -> np.ndarray:
    """Conformal scale per point: the shifted distance to the k-th neighbor.

    Degenerate rows (k-th neighbor at or below rho) are clamped to
    sigma_floor so the rescaling stays well defined.
    """
    raw_dist = np.asarray(raw_dist, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    return np.maximum(raw_dist[:, -1] - rho, sigma_floor)


def _shifted_row(raw_row: np.ndarray, rho_i: float) -> np.ndarray:
    return np.maximum(raw_row - rho_i, 0.0)


def smooth_knn_residuals(raw_dist: np.ndarray, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """|sum_j exp(-d_j/sigma_i) - log2(k)| per point, for reporting clamped rows."""
    raw_dist = np.asarray(raw_dist, dtype=np.float64)
    k = raw_dist.shape[1]
    target = math.log2(k)
    shifted = np.maximum(raw_dist - np.asarray(rho, dtype=np.float64)[:, None], 0.0)
    lhs = np.exp(-shifted / np.asarray(sigma, dtype=np.float64)[:, None]).sum(axis=1)
    return np.abs(lhs - target)


def compute_sigma_binary_search(
    raw_dist: np.ndarray, rho: np.ndarray, cfg: LocalMetricConfig
) -> np.ndarray:
    """Solve sum_{j=1..k} exp(-(d_ij - rho_i)/sigma_i) = log2(k) per point.

    The left side is increasing in sigma, so once a sign change is bracketed,
    bisection is safe. Rows whose shifted-zero count already meets or exceeds
    the target have no root; they clamp to sigma_floor (the residual there is
    visible through :func:`smooth_knn_residuals`).
    """
    raw_dist = np.asarray(raw_dist, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    n, k = raw_dist.shape
    if k < 2:
        raise ConfigError("binary_search sigma mode requires k >= 2")
    target = math.log2(k)
    tol = cfg.binary_search_tolerance
    max_iter = cfg.binary_search_max_iter
    sigma = np.empty(n, dtype=np.float64)
    for i in range(n):
        d = _shifted_row(raw_dist[i], rho[i])
        n_zero = int(np.count_nonzero(d == 0.0))
        if n_zero >= target:
            sigma[i] = cfg.sigma_floor
            continue
        mx = float(d[-1])

        def f(s: float) -> float:
            return float(np.exp(-d / s).sum()) - target

        lo = 1e-6 * mx
        hi = 1e3 * mx
        it = 0
        while f(lo) > 0.0:
            lo /= 2.0
            it += 1
            if it > max_iter:
                raise NumericalError(f"sigma bracket expansion failed (low side) at point {i}")
        it = 0
        while f(hi) < 0.0:
            hi *= 2.0
            it += 1
            if it > max_iter:
                raise NumericalError(f"sigma bracket expansion failed (high side) at point {i}")
        mid = 0.5 * (lo + hi)
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if abs(fm) <= tol:
                break
            if fm < 0.0:
                lo = mid
            else:
                hi = mid
        sigma[i] = max(mid, cfg.sigma_floor)
    return sigma


def build_star_graphs(pc: PointCloud, k: int, cfg: LocalMetricConfig | None = None) -> NeighborGraph:
    """Run k-NN search and attach the locally distorted edge weights.

    Returns a NeighborGraph whose local_dist rows are
    max((raw - rho_i)/sigma_i, 0); every pair not covered by a star graph is
    implicitly at infinite local distance.
    """
    cfg = cfg or LocalMetricConfig()
    neighbor_idx, raw_dist = knn(pc, k)
    rho = compute_rho(raw_dist, cfg.apply_rho)
    if cfg.sigma_mode == "kth_neighbor":
        sigma = compute_sigma_kth(raw_dist, rho, cfg.sigma_floor)
    elif cfg.sigma_mode == "binary_search":
        sigma = compute_sigma_binary_search(raw_dist, rho, cfg)
    else:
        sigma = np.ones(pc.n_points, dtype=np.float64)
    local_dist = np.maximum((raw_dist - rho[:, None]) / sigma[:, None], 0.0)
    return NeighborGraph(
        k=k,
        neighbor_idx=neighbor_idx,
        raw_dist=raw_dist,
        local_dist=local_dist,
        rho=rho,
        sigma=sigma,
    )
