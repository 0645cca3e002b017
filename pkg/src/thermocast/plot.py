"""Static SVG line chart of a forecast report (predicted red, actual blue)."""

import math

WIDTH, HEIGHT = 800, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 20, 30, 50
PREDICTED_COLOUR = "#d62728"
ACTUAL_COLOUR = "#1f77b4"


def _fmt(v):
    return f"{v:.2f}"


def _nice_ticks(lo, hi, count=5):
    span = hi - lo
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(round(v, 10))
        v += step
    return ticks


def report_svg(report, title="Forecast"):
    """Render ``report`` as an 800x400 SVG document; output is deterministic."""
    predicted = [float(v) for v in report.predicted]
    actual = None if report.actual is None else [float(v) for v in report.actual]
    series = predicted + (actual or [])
    lo, hi = min(series), max(series)
    if hi - lo < 1e-9:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    n = len(predicted)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(k):
        return MARGIN_LEFT + (plot_w * k / (n - 1) if n > 1 else plot_w / 2)

    def py(v):
        return MARGIN_TOP + plot_h * (hi - v) / (hi - lo)

    def polyline(values, colour):
        pts = " ".join(f"{_fmt(px(k))},{_fmt(py(v))}" for k, v in enumerate(values))
        return (f'<polyline fill="none" stroke="{colour}" stroke-width="2" '
                f'points="{pts}"/>')

    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{_escape(title)}</text>',
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for v in _nice_ticks(lo, hi):
        y = _fmt(py(v))
        out.append(f'<line x1="{x0 - 4}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif" font-size="10">{v:g}</text>')
    x_step = 6 if n > 12 else 1
    for k in range(0, n, x_step):
        x = _fmt(px(k))
        out.append(f'<line x1="{x}" y1="{y1}" x2="{x}" y2="{y1 + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{y1 + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{k + 1}</text>')
    out.append(f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">hour</text>')
    out.append(f'<text x="15" y="{(y0 + y1) // 2}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 15 {(y0 + y1) // 2})">temperature (°C)</text>')
    if actual is not None:
        out.append(polyline(actual, ACTUAL_COLOUR))
    out.append(polyline(predicted, PREDICTED_COLOUR))
    legend = [("predicted", PREDICTED_COLOUR)] + ([("actual", ACTUAL_COLOUR)] if actual else [])
    for i, (label, colour) in enumerate(legend):
        y = y0 + 10 + 16 * i
        out.append(f'<line x1="{x1 - 110}" y1="{y}" x2="{x1 - 85}" y2="{y}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{x1 - 80}" y="{y}" dominant-baseline="middle" '
                   f'font-family="sans-serif" font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
