"""Minimal static SVG plots: line charts and a log-colored heatmap."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_plot", "heatmap"]

WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=80, right=150, top=40, bottom=55)
PALETTE = ["#1f77b4", "#d62728", "#17becf", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
# viridis anchors, low to high
RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], dtype=float)


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    return list(np.arange(first, hi + step * 1e-9, step))


def _fmt(v):
    return f"{v:.4g}"


def _frame(title, xlabel, ylabel):
    w, h = WIDTH, HEIGHT
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<text x="{(MARGIN["left"] + w - MARGIN["right"]) / 2}" y="{h - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{h / 2}" text-anchor="middle" transform="rotate(-90 18 {h / 2})">{escape(ylabel)}</text>',
    ]


def _axes(out, xlo, xhi, ylo, yhi, sx, sy, logy=False):
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>')
    for xv in _ticks(xlo, xhi):
        px = sx(xv)
        out.append(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{y0 + 18}" text-anchor="middle">{_fmt(xv)}</text>')
    for yv in _ticks(ylo, yhi):
        py = sy(yv)
        label = _fmt(10**yv) if logy else _fmt(yv)
        out.append(f'<line x1="{x0 - 5}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end">{label}</text>')


def _decimate(x, y, n_max=2000):
    if len(x) <= n_max:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, n_max).astype(int))
    return x[idx], y[idx]


def line_plot(path, series, title="", xlabel="t (days)", ylabel="", logy=False) -> Path:
    """``series`` is a list of ``(x, y, label)``; nonpositive values are dropped on a log axis."""
    prepared = []
    for x, y, label in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(y) & ((y > 0) if logy else True)
        x, y = x[keep], y[keep]
        if logy:
            y = np.log10(y)
        prepared.append((*_decimate(x, y), label))
    xs = np.concatenate([p[0] for p in prepared]) if prepared else np.array([0.0, 1.0])
    ys = np.concatenate([p[1] for p in prepared]) if prepared else np.array([0.0, 1.0])
    xlo, xhi = (float(xs.min()), float(xs.max())) if len(xs) else (0.0, 1.0)
    ylo, yhi = (float(ys.min()), float(ys.max())) if len(ys) else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    if xhi == xlo:
        xhi = xlo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    sx = lambda v: x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)  # noqa: E731
    sy = lambda v: y0 - (v - ylo) / (yhi - ylo) * (y0 - y1)  # noqa: E731

    out = _frame(title, xlabel, ylabel + (" (log10)" if logy else ""))
    _axes(out, xlo, xhi, ylo, yhi, sx, sy, logy)
    for i, (x, y, label) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        if len(x):
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        ly = MARGIN["top"] + 16 + 18 * i
        out.append(f'<line x1="{x1 + 10}" y1="{ly}" x2="{x1 + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 35}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def _color(frac):
    frac = min(max(frac, 0.0), 1.0) * (len(RAMP) - 1)
    i = min(int(frac), len(RAMP) - 2)
    c = RAMP[i] + (RAMP[i + 1] - RAMP[i]) * (frac - i)
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def heatmap(path, x, y, z, title="", xlabel="t (days)", ylabel="k", floor=1e-12) -> Path:
    """Cells ``z[j, i]`` at ``(x[i], y[j])`` colored by ``log10`` of the value, clipped at ``floor``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    logz = np.log10(np.maximum(z, floor))
    lo, hi = float(logz.min()), float(logz.max())
    span = hi - lo if hi > lo else 1.0
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    xlo, xhi = float(x.min()), float(x.max()) if len(x) > 1 else float(x.min()) + 1.0
    ylo, yhi = float(y.min()), float(y.max()) if len(y) > 1 else float(y.min()) + 1.0
    sx = lambda v: x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)  # noqa: E731
    sy = lambda v: y0 - (v - ylo) / (yhi - ylo) * (y0 - y1)  # noqa: E731
    cw = (x1 - x0) / max(len(x), 1)
    ch = (y0 - y1) / max(len(y), 1)

    out = _frame(title, xlabel, ylabel)
    for j in range(len(y)):
        for i in range(len(x)):
            color = _color((logz[j, i] - lo) / span)
            out.append(
                f'<rect x="{sx(x[i]) - cw / 2:.2f}" y="{sy(y[j]) - ch / 2:.2f}" '
                f'width="{cw + 0.3:.2f}" height="{ch + 0.3:.2f}" fill="{color}"/>'
            )
    _axes(out, xlo, xhi, ylo, yhi, sx, sy)
    # color bar
    bx = x1 + 20
    for n in range(50):
        f = n / 49
        py = y0 - f * (y0 - y1)
        out.append(f'<rect x="{bx}" y="{py - (y0 - y1) / 50:.2f}" width="16" height="{(y0 - y1) / 49 + 0.5:.2f}" fill="{_color(f)}"/>')
    out.append(f'<text x="{bx + 22}" y="{y0}">1e{lo:.0f}</text>')
    out.append(f'<text x="{bx + 22}" y="{y1 + 10}">1e{hi:.0f}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
