"""Minimal log-log SVG plots: one polyline per curve, optional fitted lines."""

import math
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _decades(lo, hi):
    """Integer decade range covering [lo, hi], at least two decades wide."""
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    return a, max(b, a + 2)


def loglog_svg(series, xlabel="p", ylabel="N(p)", title="", fits=(), width=640, height=440):
    """Render ``series`` = [(label, xs, ys), ...] on log-log axes.

    ``fits`` = [(label, slope, intercept, xs), ...] are drawn dashed as
    ``log10 y = slope * log10 x + intercept`` over the given x range.
    Nonpositive points are dropped.
    """
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    xa, xb = _decades(min(p[0] for p in pts), max(p[0] for p in pts))
    ya, yb = _decades(min(p[1] for p in pts), max(p[1] for p in pts))
    L, R, T, B = 70, 20, 40, 50
    pw, ph = width - L - R, height - T - B

    def X(x):
        return L + (math.log10(x) - xa) / (xb - xa) * pw

    def Y(y):
        return T + (yb - math.log10(y)) / (yb - ya) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(xa, xb + 1):
        x = X(10.0**d)
        out.append(f'<line x1="{x:.2f}" y1="{T}" x2="{x:.2f}" y2="{T + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{T + ph + 16}" text-anchor="middle">1e{d}</text>')
    for d in range(ya, yb + 1):
        y = Y(10.0**d)
        out.append(f'<line x1="{L}" y1="{y:.2f}" x2="{L + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{L - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{L + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{T + ph / 2}" text-anchor="middle" transform="rotate(-90 16 {T + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{L + pw / 2}" y="22" text-anchor="middle">{escape(title)}</text>')
    legend = []
    for i, (label, xs, ys) in enumerate(series):
        c = COLORS[i % len(COLORS)]
        coords = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in zip(xs, ys) if x > 0 and y > 0)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        legend.append((label, c, ""))
    for j, (label, slope, intercept, xs) in enumerate(fits):
        c = COLORS[(len(series) + j) % len(COLORS)]
        x0, x1 = min(xs), max(xs)
        y0, y1 = (10 ** (slope * math.log10(x) + intercept) for x in (x0, x1))
        out.append(f'<line x1="{X(x0):.2f}" y1="{Y(y0):.2f}" x2="{X(x1):.2f}" y2="{Y(y1):.2f}" '
                   f'stroke="{c}" stroke-dasharray="6 4"/>')
        legend.append((label, c, ' stroke-dasharray="6 4"'))
    for k, (label, c, dash) in enumerate(legend):
        y = T + 16 + 16 * k
        out.append(f'<line x1="{L + 10}" y1="{y - 4}" x2="{L + 34}" y2="{y - 4}" stroke="{c}"{dash}/>')
        out.append(f'<text x="{L + 40}" y="{y}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
