"""Static SVG scatter plots of embeddings (2-D, or 3-D as two projections)."""

from __future__ import annotations

import numpy as np

from .core_types import Embedding
from .errors import ConfigError

# categorical 10-color palette
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
_SIZE = 480
_MARGIN = 24
_RADIUS = 2.0


def _project(xy: np.ndarray) -> np.ndarray:
    span = xy.max(axis=0) - xy.min(axis=0)
    scale = (_SIZE - 2 * _MARGIN) / max(float(span.max()), 1e-300)
    centered = xy - (xy.min(axis=0) + xy.max(axis=0)) / 2.0
    out = centered * scale
    out[:, 1] = -out[:, 1]  # SVG y axis points down
    return out + _SIZE / 2.0


def _circles(xy: np.ndarray, labels) -> list:
    proj = _project(xy)
    parts = []
    for i in range(proj.shape[0]):
        color = PALETTE[int(labels[i]) % len(PALETTE)] if labels is not None else PALETTE[0]
        parts.append(
            f'<circle cx="{proj[i, 0]:.2f}" cy="{proj[i, 1]:.2f}" r="{_RADIUS}" '
            f'fill="{color}" fill-opacity="0.7"/>'
        )
    return parts


def emit_scatter_svg(emb: Embedding, labels, path) -> None:
    """Write one marker per point; 3-D embeddings render xy and xz panels."""
    coords = emb.coords
    if emb.m not in (2, 3):
        raise ConfigError(f"scatter plots support 2 or 3 dimensions, got m={emb.m}")
    width = _SIZE if emb.m == 2 else 2 * _SIZE
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{_SIZE}" '
        f'viewBox="0 0 {width} {_SIZE}">',
        f'<rect width="{width}" height="{_SIZE}" fill="white"/>',
    ]
    if emb.m == 2:
        lines.append('<g id="points">')
        lines.extend(_circles(coords[:, :2], labels))
        lines.append("</g>")
    else:
        lines.append('<g id="proj-xy">')
        lines.extend(_circles(coords[:, [0, 1]], labels))
        lines.append("</g>")
        lines.append(f'<g id="proj-xz" transform="translate({_SIZE},0)">')
        lines.extend(_circles(coords[:, [0, 2]], labels))
        lines.append("</g>")
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
