"""Self-contained SVG line plots for sweep results.

No plotting dependency: the chart is assembled as SVG text directly, so a
given row list always serializes to identical bytes. Ratios go on a log-10
x axis, metric values on a linear y axis, one polyline per method; rows
without a ratio (pipeline reference scores) become dashed horizontal lines.
"""

import math

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 168, 40, 48
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v):
    """Fixed-width coordinate formatting keeps the file byte-stable."""
    return f"{v:.2f}"


def _tick_values(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def sweep_plot_svg(rows, title=""):
    """Render metric rows as a standalone SVG document (a str).

    rows: MetricRow-like objects (method, ratio_x, value, metric). Rows with
    a ratio form the per-method polylines; ratio-free rows draw as dashed
    reference lines spanning the x range.
    """
    series = {}
    references = {}
    metrics = set()
    for r in rows:
        metrics.add(r.metric)
        if r.ratio_x is None:
            references[r.method] = r.value
        else:
            series.setdefault(r.method, []).append((float(r.ratio_x), float(r.value)))
    for pts in series.values():
        pts.sort()

    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts] + list(references.values())
    if xs:
        x_lo, x_hi = math.log10(min(xs)), math.log10(max(xs))
        if x_hi - x_lo < 1e-9:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    else:
        x_lo, x_hi = -2.0, 0.0
    if ys:
        y_lo, y_hi = min(ys), max(ys)
        pad = 0.05 * (y_hi - y_lo) or 0.05
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        y_lo, y_hi = 0.0, 1.0

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(ratio):
        return _MARGIN_L + (math.log10(ratio) - x_lo) / (x_hi - x_lo) * plot_w

    def py(value):
        return _MARGIN_T + (y_hi - value) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>',
    ]
    if title:
        out.append(f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
                   f'font-size="15">{title}</text>')

    # x ticks at decade marks inside the range, plus the endpoints
    decades = [d for d in range(math.ceil(x_lo - 1e-9), math.floor(x_hi + 1e-9) + 1)]
    for d in decades:
        x = _MARGIN_L + (d - x_lo) / (x_hi - x_lo) * plot_w
        out.append(f'<line x1="{_fmt(x)}" y1="{_MARGIN_T}" x2="{_fmt(x)}" '
                   f'y2="{_MARGIN_T + plot_h}" stroke="#dddddd"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_MARGIN_T + plot_h + 18}" '
                   f'text-anchor="middle">1e{d}</text>')
    for v in _tick_values(y_lo, y_hi):
        y = py(v)
        out.append(f'<line x1="{_MARGIN_L}" y1="{_fmt(y)}" x2="{_MARGIN_L + plot_w}" '
                   f'y2="{_fmt(y)}" stroke="#eeeeee"/>')
        out.append(f'<text x="{_MARGIN_L - 8}" y="{_fmt(y + 4)}" '
                   f'text-anchor="end">{v:.3f}</text>')

    out.append(f'<text x="{_MARGIN_L + plot_w // 2}" y="{_HEIGHT - 10}" '
               f'text-anchor="middle">ground-truth ratio</text>')
    metric_label = "/".join(sorted(metrics)) or "value"
    out.append(f'<text x="16" y="{_MARGIN_T + plot_h // 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_MARGIN_T + plot_h // 2})">'
               f'{metric_label}</text>')

    legend_x = _MARGIN_L + plot_w + 12
    legend_y = _MARGIN_T + 10
    color_of = {}
    for i, method in enumerate(sorted(series) + sorted(references)):
        color_of[method] = _COLORS[i % len(_COLORS)]

    for method in sorted(series):
        color = color_of[method]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in series[method])
        out.append(f'<polyline points="{points}" fill="none" stroke="{color}" '
                   f'stroke-width="2"/>')
        for x, y in series[method]:
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" '
                       f'fill="{color}"/>')
    for method in sorted(references):
        color = color_of[method]
        y = py(references[method])
        out.append(f'<line x1="{_MARGIN_L}" y1="{_fmt(y)}" x2="{_MARGIN_L + plot_w}" '
                   f'y2="{_fmt(y)}" stroke="{color}" stroke-width="2" '
                   f'stroke-dasharray="6 4"/>')

    for method in sorted(series) + sorted(references):
        color = color_of[method]
        dash = ' stroke-dasharray="6 4"' if method in references else ""
        out.append(f'<line x1="{legend_x}" y1="{legend_y - 4}" x2="{legend_x + 24}" '
                   f'y2="{legend_y - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{legend_x + 30}" y="{legend_y}">{method}</text>')
        legend_y += 18

    out.append("</svg>")
    return "\n".join(out) + "\n"
