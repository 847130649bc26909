"""Merging the star graphs into one symmetric sparse metric via t-conorms.

A t-conorm combines membership strengths in [0, 1]; its metric counterpart
acts on distances in [0, inf] through the strictly decreasing conversions
Phi(W) = exp(-W) and Psi(w) = -log(w). The canonical t-conorm (max) has the
direct metric form min(A, B) and needs no round trip. Missing directions
contribute infinity, the identity element of every metric t-conorm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_types import NeighborGraph, SparseMetric
from .errors import ConfigError

TCONORM_KINDS = ("canonical", "algebraic_sum", "bounded_sum", "drastic_sum")


@dataclass(frozen=True)
class TConorm:
    kind: str = "canonical"

    def __post_init__(self):
        if self.kind not in TCONORM_KINDS:
            raise ConfigError(f"tconorm must be one of {TCONORM_KINDS}, got {self.kind!r}")


def weight_to_strength(W: float) -> float:
    """Phi: [0, inf] -> [0, 1], exp(-W); infinity maps to 0."""
    if W == math.inf:
        return 0.0
    if W < 0:
        raise ConfigError(f"metric weight must be >= 0, got {W}")
    return math.exp(-W)


def strength_to_weight(w: float) -> float:
    """Psi: [0, 1] -> [0, inf], -log(w); 0 maps to infinity."""
    if not 0.0 <= w <= 1.0:
        raise ConfigError(f"strength must lie in [0, 1], got {w}")
    if w == 0.0:
        return math.inf
    return -math.log(w)


def fuzzy_tconorm(t: TConorm, a: float, b: float) -> float:
    """Combine two membership strengths in [0, 1]."""
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ConfigError(f"t-conorm arguments must lie in [0, 1], got ({a}, {b})")
    if t.kind == "canonical":
        return max(a, b)
    if t.kind == "algebraic_sum":
        return a + b - a * b
    if t.kind == "bounded_sum":
        return min(1.0, a + b)
    # drastic_sum
    if b == 0.0:
        return a
    if a == 0.0:
        return b
    return 1.0


def metric_tconorm(t: TConorm, A: float, B: float) -> float:
    """Combine two distances in [0, inf]; infinity is the identity element.

    The canonical kind is min(A, B) computed directly. The others evaluate
    Psi(T(Phi(A), Phi(B))) in a log-domain form that stays accurate for
    large weights.
    """
    if A < 0 or B < 0:
        raise ConfigError(f"metric t-conorm arguments must be >= 0, got ({A}, {B})")
    if t.kind == "canonical":
        return min(A, B)
    if t.kind == "drastic_sum":
        if A == math.inf:
            return B
        if B == math.inf:
            return A
        return 0.0
    if A == math.inf:
        return B
    if B == math.inf:
        return A
    lo, hi = (A, B) if A <= B else (B, A)
    if t.kind == "algebraic_sum":
        # -log(e^-A + e^-B - e^-(A+B)) = lo - log1p(e^-(hi-lo) - e^-hi)
        return lo - math.log1p(math.exp(lo - hi) - math.exp(-hi))
    # bounded_sum: -log(min(1, e^-A + e^-B))
    return max(0.0, lo - math.log1p(math.exp(lo - hi)))


def symmetrize(graph: NeighborGraph, t: TConorm) -> SparseMetric:
    """Merge all directed star-graph edges into one symmetric sparse metric.

    Every unordered pair covered by at least one star graph receives
    metric_tconorm(t, d_i(x_i, x_j), d_j(x_j, x_i)), a missing direction
    contributing infinity. Zero local distances (rho-pulled nearest
    neighbors) are stored as genuine zero entries.
    """
    n = graph.n_points
    idx = graph.neighbor_idx
    ld = graph.local_dist
    directed: dict[tuple[int, int], float] = {}
    for i in range(n):
        row_idx = idx[i]
        row_w = ld[i]
        for c in range(graph.k):
            directed[(i, int(row_idx[c]))] = float(row_w[c])

    canonical = t.kind == "canonical"
    entries: dict[tuple[int, int], float] = {}
    for (i, j) in directed:
        key = (i, j) if i < j else (j, i)
        if key in entries:
            continue
        a = directed.get(key, math.inf)
        b = directed.get((key[1], key[0]), math.inf)
        entries[key] = min(a, b) if canonical else metric_tconorm(t, a, b)
    return SparseMetric(n, entries)
