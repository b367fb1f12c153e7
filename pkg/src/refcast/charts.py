"""Dependency-free SVG emission.

Two static chart types, mirroring what the toolkit computes: an uplift
curve (required uplift against acceptable risk) and an inaccuracy
histogram with one mean marker per region group. Fixed 800x500 viewport.

The plot rectangle and both data ranges are embedded as ``data-*``
attributes on the root element so the numbers can be read back out of the
geometry (tests and downstream tools decode the polyline this way).
"""

from __future__ import annotations

import math
from statistics import fmean

WIDTH = 800
HEIGHT = 500
MARGIN_LEFT = 70
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 60

_PALETTE = ("#1f6fb2", "#d55e00", "#2e8540", "#8558a5", "#b00000")


def _plot_rect() -> tuple[float, float, float, float]:
    return (
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM,
    )


def _scale(value, lo, hi, px_lo, px_hi):
    if hi == lo:
        return (px_lo + px_hi) / 2.0
    return px_lo + (value - lo) / (hi - lo) * (px_hi - px_lo)


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _svg_open(x_lo, x_hi, y_lo, y_hi) -> list[str]:
    px0, py0, px1, py1 = _plot_rect()
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-x-min="{x_lo!r}" data-x-max="{x_hi!r}" '
        f'data-y-min="{y_lo!r}" data-y-max="{y_hi!r}" data-plot-x0="{px0}" '
        f'data-plot-y0="{py0}" data-plot-x1="{px1}" data-plot-y1="{py1}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{px0}" y="{py0}" width="{px1 - px0}" height="{py1 - py0}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]


def _axes(parts, x_lo, x_hi, y_lo, y_hi, x_label, y_label):
    px0, py0, px1, py1 = _plot_rect()
    for tick in _ticks(x_lo, x_hi):
        x = _scale(tick, x_lo, x_hi, px0, px1)
        parts.append(f'<line x1="{x:.2f}" y1="{py1}" x2="{x:.2f}" y2="{py1 + 5}" stroke="#444"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{py1 + 20}" font-size="12" text-anchor="middle" '
            f'fill="#222">{tick:.3g}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        y = _scale(tick, y_lo, y_hi, py1, py0)
        parts.append(f'<line x1="{px0 - 5}" y1="{y:.2f}" x2="{px0}" y2="{y:.2f}" stroke="#444"/>')
        parts.append(
            f'<text x="{px0 - 8}" y="{y + 4:.2f}" font-size="12" text-anchor="end" '
            f'fill="#222">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{(px0 + px1) / 2:.2f}" y="{HEIGHT - 15}" font-size="13" '
        f'text-anchor="middle" fill="#222">{x_label}</text>'
    )
    parts.append(
        f'<text x="18" y="{(py0 + py1) / 2:.2f}" font-size="13" text-anchor="middle" '
        f'fill="#222" transform="rotate(-90 18 {(py0 + py1) / 2:.2f})">{y_label}</text>'
    )


def curve_svg(points, title: str = "Required uplift by acceptable risk of overrun") -> str:
    """Line chart of an uplift curve: one polyline over the given points."""
    if not points:
        raise ValueError("no curve points")
    risks = [p[0] for p in points]
    uplifts = [p[1] for p in points]
    x_lo, x_hi = min(risks), max(risks)
    span = (max(uplifts) - min(uplifts)) or 1.0
    y_lo = min(uplifts) - 0.05 * span
    y_hi = max(uplifts) + 0.05 * span
    px0, py0, px1, py1 = _plot_rect()

    parts = _svg_open(x_lo, x_hi, y_lo, y_hi)
    parts.append(
        f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle" '
        f'fill="#111">{title}</text>'
    )
    _axes(parts, x_lo, x_hi, y_lo, y_hi,
          "acceptable risk of cost overrun", "required uplift (%)")
    coords = " ".join(
        f"{_scale(r, x_lo, x_hi, px0, px1):.3f},{_scale(u, y_lo, y_hi, py1, py0):.3f}"
        for r, u in points
    )
    parts.append(
        f'<polyline fill="none" stroke="{_PALETTE[0]}" stroke-width="2" points="{coords}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _bins(values, bin_width: float) -> list[tuple[float, float]]:
    lo = math.floor(min(values) / bin_width) * bin_width
    hi = math.ceil(max(values) / bin_width) * bin_width
    if hi == lo:
        hi = lo + bin_width
    edges = []
    edge = lo
    while edge < hi - 1e-9:
        edges.append((edge, edge + bin_width))
        edge += bin_width
    return edges


def _bin_counts(values, edges) -> list[int]:
    counts = [0] * len(edges)
    last = len(edges) - 1
    for v in values:
        for i, (lo, hi) in enumerate(edges):
            if lo <= v < hi or (i == last and v == hi):
                counts[i] += 1
                break
    return counts


def histogram_svg(
    samples_by_region: dict[str, list[float]],
    bin_width: float = 10.0,
    title: str = "Inaccuracy of cost forecasts in reference class",
) -> str:
    """Bar histogram of inaccuracies, grouped by region tag.

    Bars for the region groups sit side by side within each bin; a vertical
    line (class ``mean-marker``) marks each group's mean.
    """
    if not samples_by_region or not any(samples_by_region.values()):
        raise ValueError("no histogram data")
    if bin_width <= 0:
        raise ValueError(f"bin_width must be > 0, got {bin_width}")
    regions = sorted(samples_by_region)
    pooled = [v for vs in samples_by_region.values() for v in vs]
    edges = _bins(pooled, bin_width)
    counts = {r: _bin_counts(samples_by_region[r], edges) for r in regions}
    max_count = max(max(c) for c in counts.values()) or 1

    x_lo, x_hi = edges[0][0], edges[-1][1]
    y_lo, y_hi = 0.0, float(max_count)
    px0, py0, px1, py1 = _plot_rect()

    parts = _svg_open(x_lo, x_hi, y_lo, y_hi)
    parts.append(
        f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle" '
        f'fill="#111">{title}</text>'
    )
    _axes(parts, x_lo, x_hi, y_lo, y_hi, "inaccuracy (%)", "number of projects")
    group_frac = 1.0 / len(regions)
    for gi, region in enumerate(regions):
        color = _PALETTE[gi % len(_PALETTE)]
        for (lo, hi), count in zip(edges, counts[region]):
            if count == 0:
                continue
            x_left = _scale(lo + gi * group_frac * bin_width, x_lo, x_hi, px0, px1)
            x_right = _scale(lo + (gi + 1) * group_frac * bin_width, x_lo, x_hi, px0, px1)
            y_top = _scale(count, y_lo, y_hi, py1, py0)
            parts.append(
                f'<rect x="{x_left:.2f}" y="{y_top:.2f}" width="{x_right - x_left:.2f}" '
                f'height="{py1 - y_top:.2f}" fill="{color}" fill-opacity="0.8" '
                f'data-region="{region}" data-bin-low="{lo!r}" data-count="{count}"/>'
            )
    for gi, region in enumerate(regions):
        if not samples_by_region[region]:
            continue
        color = _PALETTE[gi % len(_PALETTE)]
        mean = fmean(samples_by_region[region])
        x = _scale(mean, x_lo, x_hi, px0, px1)
        parts.append(
            f'<line class="mean-marker" x1="{x:.2f}" y1="{py0}" x2="{x:.2f}" y2="{py1}" '
            f'stroke="{color}" stroke-width="2" stroke-dasharray="6 3" '
            f'data-region="{region}" data-mean="{mean!r}"/>'
        )
        parts.append(
            f'<text x="{x + 4:.2f}" y="{py0 + 14 + 14 * gi}" font-size="12" '
            f'fill="{color}">{region} mean {mean:.1f}%</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_csv(samples_by_region: dict[str, list[float]], bin_width: float = 10.0) -> str:
    """Histogram bins as CSV: region, bin bounds, count."""
    if not samples_by_region or not any(samples_by_region.values()):
        raise ValueError("no histogram data")
    if bin_width <= 0:
        raise ValueError(f"bin_width must be > 0, got {bin_width}")
    pooled = [v for vs in samples_by_region.values() for v in vs]
    edges = _bins(pooled, bin_width)
    lines = ["region,bin_low,bin_high,count"]
    for region in sorted(samples_by_region):
        for (lo, hi), count in zip(edges, _bin_counts(samples_by_region[region], edges)):
            lines.append(f"{region},{lo:.10g},{hi:.10g},{count}")
    return "\n".join(lines) + "\n"
