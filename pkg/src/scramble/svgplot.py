"""Minimal standalone SVG line plots.

No rendering dependency: the output is a single self-contained <svg>
element with fixed geometry and formatting, so plots are diffable and
byte-identical across reruns.  Log-log mode drops points outside the
domain of the log and reports how many were dropped.
"""

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640.0
HEIGHT = 440.0
MARGIN_L = 68.0
MARGIN_R = 16.0
MARGIN_T = 30.0
MARGIN_B = 46.0

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass(frozen=True)
class PlotGroup:
    label: str
    x: np.ndarray
    y: np.ndarray


def _nice_ticks(lo, hi, target=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (mult * mag) <= target:
            step = mult * mag
            break
    ticks = []
    v = math.ceil(lo / step) * step
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-9 * step else v)
        v += step
    return ticks


def _log_ticks(lo, hi):
    # decade ticks when the range spans any; otherwise nice ticks in
    # log space mapped back
    first = math.ceil(lo - 1e-9)
    last = math.floor(hi + 1e-9)
    if last >= first and last - first >= 1:
        return [float(k) for k in range(first, last + 1)]
    return _nice_ticks(lo, hi)


def _fmt_tick(value, log):
    if log:
        return "%.4g" % (10.0 ** value)
    return "%.6g" % value


def _data_range(values):
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _clean_groups(groups, loglog):
    """Finite (and, in log mode, positive) points only; count drops."""
    skipped = 0
    cleaned = []
    for g in groups:
        x = np.asarray(g.x, dtype=float)
        y = np.asarray(g.y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if loglog:
            keep &= (x > 0.0) & (y > 0.0)
        skipped += int(x.size - keep.sum())
        if keep.any():
            xs, ys = x[keep], y[keep]
            if loglog:
                xs, ys = np.log10(xs), np.log10(ys)
            cleaned.append(PlotGroup(g.label, xs, ys))
    return cleaned, skipped


def render_line_plot(groups, xlabel, ylabel, title="", loglog=False):
    """Render groups to SVG text; returns (svg, skipped_point_count)."""
    cleaned, skipped = _clean_groups(list(groups), loglog)
    if cleaned:
        xlo, xhi = _data_range(np.concatenate([g.x for g in cleaned]))
        ylo, yhi = _data_range(np.concatenate([g.y for g in cleaned]))
    else:
        xlo, xhi, ylo, yhi = 0.0, 1.0, 0.0, 1.0

    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - xlo) / (xhi - xlo) * px_w

    def sy(v):
        return HEIGHT - MARGIN_B - (v - ylo) / (yhi - ylo) * px_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:g}" '
        f'height="{HEIGHT:g}" viewBox="0 0 {WIDTH:g} {HEIGHT:g}">')
    out.append(f'<rect width="{WIDTH:g}" height="{HEIGHT:g}" fill="white"/>')
    out.append(
        f'<rect x="{MARGIN_L:g}" y="{MARGIN_T:g}" width="{px_w:g}" '
        f'height="{px_h:g}" fill="none" stroke="#333" stroke-width="1"/>')

    xticks = _log_ticks(xlo, xhi) if loglog else _nice_ticks(xlo, xhi)
    yticks = _log_ticks(ylo, yhi) if loglog else _nice_ticks(ylo, yhi)
    for v in xticks:
        if not xlo <= v <= xhi:
            continue
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN_B:.2f}" '
                   f'x2="{x:.2f}" y2="{HEIGHT - MARGIN_B + 5:.2f}" '
                   'stroke="#333" stroke-width="1"/>')
        out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 18:.2f}" '
                   'font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">{_fmt_tick(v, loglog)}</text>')
    for v in yticks:
        if not ylo <= v <= yhi:
            continue
        y = sy(v)
        out.append(f'<line x1="{MARGIN_L - 5:.2f}" y1="{y:.2f}" '
                   f'x2="{MARGIN_L:.2f}" y2="{y:.2f}" '
                   'stroke="#333" stroke-width="1"/>')
        out.append(f'<text x="{MARGIN_L - 8:.2f}" y="{y + 3.5:.2f}" '
                   'font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{_fmt_tick(v, loglog)}</text>')

    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="{MARGIN_T - 10:.2f}" '
                   'font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{MARGIN_L + px_w / 2:.2f}" '
               f'y="{HEIGHT - 10:.2f}" font-family="sans-serif" '
               f'font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN_T + px_h / 2:.2f}" '
               'font-family="sans-serif" font-size="12" '
               'text-anchor="middle" transform="rotate(-90 16 '
               f'{MARGIN_T + px_h / 2:.2f})">{escape(ylabel)}</text>')

    for k, g in enumerate(cleaned):
        color = PALETTE[k % len(PALETTE)]
        pts = [(sx(xv), sy(yv)) for xv, yv in zip(g.x, g.y)]
        if len(pts) == 1:
            x, y = pts[0]
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" '
                       f'fill="{color}"/>')
        else:
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            out.append(f'<polyline points="{coords}" fill="none" '
                       f'stroke="{color}" stroke-width="1.5"/>')

    if len(cleaned) > 1 or (cleaned and cleaned[0].label):
        ly = MARGIN_T + 14.0
        for k, g in enumerate(cleaned):
            color = PALETTE[k % len(PALETTE)]
            lx = WIDTH - MARGIN_R - 150.0
            out.append(f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" '
                       f'x2="{lx + 22:.2f}" y2="{ly - 4:.2f}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{lx + 28:.2f}" y="{ly:.2f}" '
                       'font-family="sans-serif" font-size="11">'
                       f'{escape(g.label)}</text>')
            ly += 16.0

    out.append("</svg>")
    return "\n".join(out) + "\n", skipped
