"""Plot data for 2-D sets: a flat CSV and a dependency-free SVG scatter."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .dataset import TrainingSet, UnsupportedDimensionError

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _selected_mask(P: TrainingSet, subset) -> np.ndarray:
    mask = np.zeros(P.n, dtype=bool)
    if subset is not None:
        mask[list(getattr(subset, "indices", subset))] = True
    return mask


def _require_2d(P: TrainingSet) -> None:
    if P.dimension != 2:
        raise UnsupportedDimensionError(f"plots need 2-D data, got d={P.dimension}")


def plot_csv(P: TrainingSet, subset=None) -> str:
    """Rows of ``x,y,label,selected``; with no subset every point counts as selected."""
    _require_2d(P)
    mask = _selected_mask(P, subset) if subset is not None else np.ones(P.n, dtype=bool)
    lines = ["x,y,label,selected"]
    for (x, y), lab, sel in zip(P.coords, P.labels, mask):
        lines.append(f"{float(x)!r},{float(y)!r},{P.class_names[lab]},{int(sel)}")
    return "\n".join(lines) + "\n"


def scatter_svg(P: TrainingSet, subset=None, size: int = 600, margin: int = 20) -> str:
    """Selected points drawn solid and on top; the rest faded."""
    _require_2d(P)
    mask = _selected_mask(P, subset) if subset is not None else np.ones(P.n, dtype=bool)
    lo = P.coords.min(axis=0)
    span = float(max((P.coords.max(axis=0) - lo).max(), 1e-12))
    scale = (size - 2 * margin) / span
    px = margin + (P.coords[:, 0] - lo[0]) * scale
    py = size - margin - (P.coords[:, 1] - lo[1]) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f"<title>{escape(f'{P.n} points, {int(mask.sum())} selected')}</title>",
    ]
    for faded in (True, False):
        for i in np.flatnonzero(mask != faded):
            color = PALETTE[P.labels[i] % len(PALETTE)]
            if faded:
                out.append(f'<circle cx="{px[i]:.2f}" cy="{py[i]:.2f}" r="1.5" fill="{color}" fill-opacity="0.15"/>')
            else:
                out.append(
                    f'<circle class="selected" cx="{px[i]:.2f}" cy="{py[i]:.2f}" r="3" fill="{color}" stroke="black" stroke-width="0.5"/>'
                )
    out.append("</svg>")
    return "\n".join(out) + "\n"
