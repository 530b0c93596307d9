"""Minimal SVG line plots: fixed 800x500 canvas, linear axes, polylines and a legend."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#000000", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _segments(xs, ys):
    """Split a curve at non-finite samples."""
    seg = []
    for x, y in zip(xs, ys):
        if math.isfinite(x) and math.isfinite(y):
            seg.append((x, y))
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg


def line_plot(series, title: str = "", xlabel: str = "z", ylabel: str = "",
              width: int = 800, height: int = 500, margin: int = 50) -> str:
    """Render ``series`` (sequence of (label, xs, ys)) as an SVG document string."""
    if not series:
        raise ValueError("nothing to plot")
    allx = np.concatenate([np.asarray(s[1], float) for s in series])
    ally = np.concatenate([np.asarray(s[2], float) for s in series])
    allx, ally = allx[np.isfinite(allx)], ally[np.isfinite(ally)]
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = width - 2 * margin, height - 2 * margin

    def px(x):
        return margin + (x - x0) / (x1 - x0) * pw

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="{margin / 2 + 5:.2f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="15">{escape(title)}</text>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{height - margin}" x2="{px(t):.2f}" y2="{height - margin + 5}" stroke="#444444"/>')
        out.append(f'<text x="{px(t):.2f}" y="{height - margin + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{margin - 5}" y1="{py(t):.2f}" x2="{margin}" y2="{py(t):.2f}" stroke="#444444"/>')
        out.append(f'<text x="{margin - 8}" y="{py(t) + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{t:.3g}</text>')
    if xlabel:
        out.append(f'<text x="{width / 2:.2f}" y="{height - 12}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{height / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12" transform="rotate(-90 14 {height / 2:.2f})">{escape(ylabel)}</text>')

    for idx, (label, xs, ys) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        pts = []
        for seg in _segments(xs, ys):
            pts.append(" ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in seg))
        # one polyline per series; gaps from failed samples become separate subpaths in the same group
        out.append(f'<g class="series" data-label="{escape(label)}">')
        for p in pts[:1]:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{p}"/>')
        for p in pts[1:]:
            out.append(f'<path fill="none" stroke="{color}" stroke-width="1.5" d="M {p.replace(" ", " L ")}"/>')
        out.append("</g>")
        ly = margin + 15 + 16 * idx
        lx = width - margin - 130
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
