"""Minimal deterministic SVG output for two-dimensional pictures."""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedPlot

PALETTE = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#5d6d7e")


def _fmt(x):
    return f"{x:.6g}"


def polylines_svg(curves, width=480, height=480, pad=20, title=""):
    """Render ``[(points, label), ...]`` into an SVG document string.

    Points are ``(n, 2)`` arrays in data coordinates; the y axis is flipped
    so that larger values are drawn higher.
    """
    finite = [np.asarray(p, float) for p, _ in curves]
    finite = [p[np.all(np.isfinite(p), axis=1)] for p in finite]
    if not finite or any(p.ndim != 2 or p.shape[1] != 2 for p in finite):
        raise UnsupportedPlot("only planar polylines can be drawn")
    allpts = np.vstack([p for p in finite if p.size])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)

    def to_px(p):
        u = pad + (p[:, 0] - lo[0]) / span[0] * (width - 2 * pad)
        v = height - pad - (p[:, 1] - lo[1]) / span[1] * (height - 2 * pad)
        return u, v

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    if title:
        lines.append(f"  <title>{title}</title>")
    lines.append(f'  <desc>x range [{_fmt(lo[0])}, {_fmt(hi[0])}], '
                 f'y range [{_fmt(lo[1])}, {_fmt(hi[1])}]</desc>')
    for i, (pts, (_, label)) in enumerate(zip(finite, curves)):
        if not pts.size:
            continue
        u, v = to_px(pts)
        coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(u, v))
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'  <polyline data-label="{label}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def bent_slice_curves(level=0.0, levels=(0.5, 1.0, 2.0), n=400, span=3.0):
    """Boundary ``x = -log y + level`` of a 2D bent domain, plus horospheres.

    Drawn with y horizontal and x vertical.
    """
    y = np.exp(np.linspace(-span, span, n))
    curves = [(np.column_stack([y, -np.log(y) + level]), "boundary")]
    for c in levels:
        curves.append((np.column_stack([y, -np.log(y) + level + c]), f"horosphere c={c:g}"))
    return curves


def circle_curves(circle, lo=-1.0, hi=2.0, n=601):
    s = np.linspace(lo, hi, n)
    graph = np.column_stack([s, [circle(x) for x in s]])
    return [(graph, "developing map"), (np.column_stack([s, s]), "identity")]
