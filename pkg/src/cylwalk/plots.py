"""Minimal dependency-free SVG line/CDF plots for experiment output."""

from __future__ import annotations

import math


def _ticks(lo: float, hi: float, n: int = 5):
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        return [lo]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / max(n, 1)))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * span:
        out.append(round(v, 12))
        v += step
    return out or [lo]


def svg_line_plot(series, path: str, title: str = "", xlabel: str = "",
                  ylabel: str = "", width: int = 640, height: int = 420) -> None:
    """Write a simple multi-series line plot.

    series: list of (label, xs, ys) triples.
    """
    margin = 60
    pw, ph = width - 2 * margin, height - 2 * margin
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys
              if y is not None and math.isfinite(y)]
    if not xs_all or not ys_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y0 == y1:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
              "#8c564b", "#17becf"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="15" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {height / 2})">{ylabel}</text>',
        f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#333"/>',
    ]
    for tx in _ticks(x0, x1):
        X = sx(tx)
        parts.append(f'<line x1="{X:.1f}" y1="{height - margin}" x2="{X:.1f}" '
                     f'y2="{height - margin + 5}" stroke="#333"/>')
        parts.append(f'<text x="{X:.1f}" y="{height - margin + 18}" '
                     f'text-anchor="middle" font-size="10">{tx:g}</text>')
    for ty in _ticks(y0, y1):
        Y = sy(ty)
        parts.append(f'<line x1="{margin - 5}" y1="{Y:.1f}" x2="{margin}" '
                     f'y2="{Y:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{margin - 8}" y="{Y + 3:.1f}" '
                     f'text-anchor="end" font-size="10">{ty:g}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = colors[i % len(colors)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys)
                       if y is not None and math.isfinite(y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin - 5}" y="{margin + 15 + 14 * i}" '
                     f'text-anchor="end" font-size="11" fill="{color}">'
                     f'{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("\n".join(parts))


def svg_cdf_plot(samples_by_label, path: str, title: str = "",
                 xlabel: str = "") -> None:
    """Empirical CDF overlay of several samples."""
    series = []
    for label, vals in samples_by_label:
        xs = sorted(float(v) for v in vals)
        n = len(xs)
        ys = [(i + 1) / n for i in range(n)]
        series.append((label, xs, ys))
    svg_line_plot(series, path, title=title, xlabel=xlabel, ylabel="F(x)")
