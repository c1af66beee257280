"""Static SVG rendering of log-rank / log-corank series.

Empirical points are drawn as blue dots and model curves as red
polylines. Output is deterministic: identical inputs give identical bytes.
"""

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 70, "right": 30, "top": 40, "bottom": 60}
EMPIRICAL_COLOR = "#1f4fd8"
MODEL_COLOR = "#d62728"
LINE_COLOR = "#555555"


def _nice_ticks(lo, hi, count=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = mag * min((1, 2, 2.5, 5, 10), key=lambda m: abs(m * mag - raw))
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _fmt(v):
    return f"{v:.2f}"


def render_rank_svg(empirical, models=(), title="", path=None):
    """Render one empirical series and any number of model/line series.

    Parameters
    ----------
    empirical : RankSeries
    models : sequence of (label, RankSeries)
        Model curves, each drawn as a polyline and named in the legend.
    title : str
    path : path-like, optional
        Where to write the SVG. The markup is returned either way.
    """
    xs = [empirical.g] + [s.g for _, s in models]
    ys = [empirical.log_rank] + [s.log_rank for _, s in models]
    x_all = np.concatenate([x for x in xs if x.size])
    y_all = np.concatenate([y for y in ys if y.size])
    x_lo, x_hi = float(x_all.min()), float(x_all.max())
    y_lo, y_hi = min(0.0, float(y_all.min())), float(y_all.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (np.asarray(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return MARGIN["top"] + (1.0 - (np.asarray(y) - y_lo) / (y_hi - y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
    ]
    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{MARGIN["top"]}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for t in _nice_ticks(x_lo, x_hi):
        if x_lo <= t <= x_hi:
            x = float(px(t))
            out.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="black"/>')
            out.append(f'<text x="{_fmt(x)}" y="{y0 + 20}" text-anchor="middle" font-family="sans-serif" '
                       f'font-size="11">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        if y_lo <= t <= y_hi:
            y = float(py(t))
            out.append(f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="black"/>')
            out.append(f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" text-anchor="end" font-family="sans-serif" '
                       f'font-size="11">{t:g}</text>')
    out.append(f'<text x="{x0 + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">g</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14" transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.0f})">ln(rank)</text>')

    # one dot per distinct half-pixel keeps large samples readable
    pts = np.round(np.column_stack([px(empirical.g), py(empirical.log_rank)]) * 2) / 2
    pts = pts[np.sort(np.unique(pts, axis=0, return_index=True)[1])]
    out.append(f'<g fill="{EMPIRICAL_COLOR}" stroke="none">')
    out.extend(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2"/>' for x, y in pts)
    out.append("</g>")

    for label, series in models:
        if not series.g.size:
            continue
        order = np.argsort(series.g, kind="stable")
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in
                          zip(px(series.g[order]), py(series.log_rank[order])))
        color = LINE_COLOR if series.kind.value.startswith("Line") else MODEL_COLOR
        dash = ' stroke-dasharray="6 4"' if color == LINE_COLOR else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{coords}"/>')

    lx, ly = x0 + pw - 190, MARGIN["top"] + 12
    entries = [("Empirical", EMPIRICAL_COLOR, True)] + [
        (label, LINE_COLOR if s.kind.value.startswith("Line") else MODEL_COLOR, False) for label, s in models
    ]
    for i, (label, color, dot) in enumerate(entries):
        yy = ly + 18 * i
        if dot:
            out.append(f'<circle cx="{lx + 10}" cy="{yy}" r="3" fill="{color}"/>')
        else:
            out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 20}" y2="{yy}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{yy + 4}" font-family="sans-serif" font-size="12">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg
