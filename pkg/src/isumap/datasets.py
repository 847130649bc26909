"""Deterministic synthetic shape generators and CSV ingestion.

All generators are pure functions of (parameters, seed). Default parameter
ranges follow common conventions and are overridable through the pipeline
config; labels are coarse quantizations of a latent coordinate, for coloring.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .core_types import PointCloud
from .errors import ConfigError, DataError

SWISS_U_MIN = 1.5 * math.pi
SWISS_U_MAX = 4.5 * math.pi
SWISS_V_MAX = 21.0
# centered rejection window in the (u, v) chart, as fractions of each range
HOLE_U_FRACTION = 0.35
HOLE_V_FRACTION = 0.25
_LABEL_BINS = 10


def _quantize(values: np.ndarray, bins: int = _LABEL_BINS) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.zeros(values.shape[0], dtype=np.int64)
    edges = np.linspace(lo, hi, bins + 1)[1:-1]
    return np.digitize(values, edges).astype(np.int64)


def swiss_roll_chart(
    n: int,
    hole: bool,
    seed: int,
    u_min: float = SWISS_U_MIN,
    u_max: float = SWISS_U_MAX,
    v_max: float = SWISS_V_MAX,
):
    """The latent (u, v) draws behind :func:`swiss_roll`, for chart comparisons."""
    rng = np.random.default_rng(seed)
    if not hole:
        u = rng.uniform(u_min, u_max, n)
        v = rng.uniform(0.0, v_max, n)
        return u, v
    uc, vc = 0.5 * (u_min + u_max), 0.5 * v_max
    uh = 0.5 * HOLE_U_FRACTION * (u_max - u_min)
    vh = 0.5 * HOLE_V_FRACTION * v_max
    us, vs = [], []
    need = n
    while need > 0:
        u = rng.uniform(u_min, u_max, 2 * need)
        v = rng.uniform(0.0, v_max, 2 * need)
        outside = ~((np.abs(u - uc) < uh) & (np.abs(v - vc) < vh))
        u, v = u[outside][:need], v[outside][:need]
        us.append(u)
        vs.append(v)
        need -= u.size
    return np.concatenate(us), np.concatenate(vs)


def swiss_roll(n: int, hole: bool = False, seed: int = 0, **chart_kwargs) -> PointCloud:
    """Swiss roll sample: (u, v) uniform on a rectangle, mapped to
    (u cos u, v, u sin u); with ``hole`` a centered rectangle of the chart is
    rejection-sampled away. Labels quantize u."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    u, v = swiss_roll_chart(n, hole, seed, **chart_kwargs)
    points = np.column_stack([u * np.cos(u), v, u * np.sin(u)])
    return PointCloud(points=points, labels=_quantize(u))


def roll_arclength(u: np.ndarray) -> np.ndarray:
    """Arc length of the spiral u -> (u cos u, u sin u) from u=0, closed form."""
    u = np.asarray(u, dtype=np.float64)
    return 0.5 * (u * np.sqrt(1.0 + u * u) + np.arcsinh(u))


def rolled_plane(n: int, c: int = 4, seed: int = 0, t_min: float = 1.0, t_max: float = 4.0,
                 v_max: float = SWISS_V_MAX) -> PointCloud:
    """A plane rolled along the spiral t -> (t cos(c t), t sin(c t)).

    Larger c winds the sheet more tightly (total turning angle of the
    generating curve grows with c). Labels quantize t.
    """
    if c not in (4, 5, 6):
        raise ConfigError(f"winding factor c must be 4, 5 or 6, got {c}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    t = rng.uniform(t_min, t_max, n)
    v = rng.uniform(0.0, v_max, n)
    points = np.column_stack([t * np.cos(c * t), v, t * np.sin(c * t)])
    return PointCloud(points=points, labels=_quantize(t))


def rolled_plane_curve(c: int, t_min: float = 1.0, t_max: float = 4.0, samples: int = 20000):
    """Dense sampling of the generating spiral, for curvature checks."""
    t = np.linspace(t_min, t_max, samples)
    return np.column_stack([t * np.cos(c * t), t * np.sin(c * t)])


def torus(n: int, R: float = 2.0, r: float = 0.6, seed: int = 0) -> PointCloud:
    """Area-weighted torus sample via rejection on the tube angle.

    The tube angle theta is accepted with probability proportional to
    R + r cos(theta), which makes the sampling uniform with respect to
    surface area. Labels quantize the azimuthal angle.
    """
    if not R > r > 0:
        raise ConfigError(f"need R > r > 0, got R={R}, r={r}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    thetas = []
    need = n
    while need > 0:
        cand = rng.uniform(0.0, 2.0 * math.pi, 2 * need)
        accept = rng.uniform(0.0, 1.0, cand.size) <= (R + r * np.cos(cand)) / (R + r)
        kept = cand[accept][:need]
        thetas.append(kept)
        need -= kept.size
    theta = np.concatenate(thetas)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    ring = R + r * np.cos(theta)
    points = np.column_stack([ring * np.cos(phi), ring * np.sin(phi), r * np.sin(theta)])
    return PointCloud(points=points, labels=_quantize(phi))


def nonuniform_hemisphere(n: int, concentration: float = 3.0, seed: int = 0) -> PointCloud:
    """Unit upper hemisphere with density concentrated at the pole.

    The polar angle is drawn from the truncated exponential density
    proportional to exp(-concentration * theta) on [0, pi/2] (inverse CDF),
    so larger concentration packs more points near the pole. Labels quantize
    the polar angle.
    """
    if concentration <= 0:
        raise ConfigError(f"concentration must be > 0, got {concentration}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, n)
    norm = 1.0 - math.exp(-concentration * math.pi / 2.0)
    theta = -np.log1p(-u * norm) / concentration
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    sin_t = np.sin(theta)
    points = np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta)])
    return PointCloud(points=points, labels=_quantize(theta))


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"non-numeric cell at row {row}, column {col}: {text!r}") from None


def load_csv(path, has_labels: bool = False, precomputed: bool = False) -> PointCloud:
    """Read a PointCloud from CSV.

    Feature files hold one point per row with an optional trailing integer
    label column; a header row is detected and skipped (a trailing ``label``
    header also switches labels on). Precomputed files hold a square,
    symmetric, zero-diagonal distance matrix with no labels.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty CSV")

    def _is_number(tok: str) -> bool:
        try:
            float(tok)
            return True
        except ValueError:
            return False

    start = 0
    if not all(_is_number(tok) for tok in rows[0]):
        if rows[0] and rows[0][-1].strip().lower() == "label":
            has_labels = True
        start = 1
    body = rows[start:]
    if not body:
        raise DataError(f"{path}: no data rows")
    width = len(body[0])
    for offset, row in enumerate(body):
        if len(row) != width:
            raise DataError(
                f"{path}: ragged row {start + offset}: expected {width} cells, got {len(row)}"
            )
    values = np.array(
        [[_parse_cell(tok, start + i, j) for j, tok in enumerate(row)] for i, row in enumerate(body)],
        dtype=np.float64,
    )

    if precomputed:
        if has_labels:
            raise ConfigError("precomputed matrices carry no label column")
        n = values.shape[0]
        if values.shape[1] != n:
            raise DataError(f"{path}: precomputed matrix must be square, got {values.shape}")
        asym = np.abs(values - values.T)
        if asym.max() > 1e-12:
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise DataError(
                f"{path}: precomputed matrix asymmetric at ({i},{j}): "
                f"{values[i, j]!r} vs {values[j, i]!r}"
            )
        if np.any(np.diagonal(values) != 0):
            i = int(np.nonzero(np.diagonal(values))[0][0])
            raise DataError(f"{path}: precomputed diagonal entry {i} is nonzero")
        if np.any(values < 0):
            i, j = np.unravel_index(int(np.argmax(values < 0)), values.shape)
            raise DataError(f"{path}: negative distance at ({i},{j})")
        placeholder = np.zeros((n, 1), dtype=np.float64)
        return PointCloud(points=placeholder, metric="precomputed", precomputed=values)

    if has_labels:
        if values.shape[1] < 2:
            raise DataError(f"{path}: need at least one feature column besides the label")
        labels = values[:, -1]
        if np.any(labels != np.round(labels)):
            bad = int(np.argmax(labels != np.round(labels)))
            raise DataError(f"{path}: label in row {start + bad} is not an integer: {labels[bad]!r}")
        return PointCloud(points=values[:, :-1], labels=labels.astype(np.int64))
    return PointCloud(points=values)


def write_points_csv(pc: PointCloud, path) -> None:
    """Write features (and labels, if present) using repr-exact floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{i + 1}" for i in range(pc.dim)]
        if pc.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(pc.n_points):
            row = [repr(float(x)) for x in pc.points[i]]
            if pc.labels is not None:
                row.append(str(int(pc.labels[i])))
            writer.writerow(row)
