"""Plot artifacts: overlay data as CSV (canonical) and a self-contained SVG.

The SVG is a minimal two-panel line chart - input and prediction on top,
residual below, detected cluster spans shaded in both - with no external
dependencies and no timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import numpy as np

from ._util import atomic_write_text
from .core.trace import CirTrace
from .detect import AnomalyReport

_W, _H = 960, 560
_PANEL_H = 230
_MARGIN = 50


def overlay_csv(trace: CirTrace, predicted, report: AnomalyReport) -> str:
    lines = ["index,input_db,predicted_db,residual_db,cluster"]
    res = report.residual.values
    for i, (x, p, r, c) in enumerate(
        zip(trace.samples, predicted, res, report.point_labels)
    ):
        lines.append(f"{i},{x!r},{p!r},{r!r},{int(c)}")
    return "\n".join(lines) + "\n"


def _scale(values, lo_px, hi_px):
    vmin, vmax = float(np.min(values)), float(np.max(values))
    if vmax == vmin:
        vmax = vmin + 1.0
    span = vmax - vmin

    def to_px(v):
        return hi_px - (v - vmin) / span * (hi_px - lo_px)

    return to_px, vmin, vmax


def _polyline(xs_px, ys_px, color, width=1.0):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs_px, ys_px))
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _panel(series_list, colors, labels, clusters, n, top):
    bottom = top + _PANEL_H
    allv = np.concatenate([np.asarray(s) for s in series_list])
    to_py, vmin, vmax = _scale(allv, top + 8, bottom - 8)
    x_of = lambda i: _MARGIN + i / max(n - 1, 1) * (_W - 2 * _MARGIN)

    parts = [
        f'<rect x="{_MARGIN}" y="{top}" width="{_W - 2 * _MARGIN}" height="{_PANEL_H}" '
        f'fill="#fafafa" stroke="#ccc"/>'
    ]
    for c in clusters:
        x0, x1 = x_of(c.start_index), x_of(c.end_index)
        parts.append(
            f'<rect x="{x0:.2f}" y="{top}" width="{max(x1 - x0, 1.5):.2f}" '
            f'height="{_PANEL_H}" fill="#d33" fill-opacity="0.18"/>'
        )
    idx = np.arange(n)
    for series, color in zip(series_list, colors):
        parts.append(_polyline([x_of(i) for i in idx], [to_py(v) for v in series], color))
    legend_x = _MARGIN + 8
    for label, color in zip(labels, colors):
        parts.append(
            f'<text x="{legend_x}" y="{top + 16}" font-size="12" fill="{color}" '
            f'font-family="sans-serif">{label}</text>'
        )
        legend_x += 9 * len(label) + 18
    parts.append(
        f'<text x="{_W - _MARGIN}" y="{top + 16}" font-size="11" fill="#666" text-anchor="end" '
        f'font-family="sans-serif">[{vmin:.1f}, {vmax:.1f}] dB</text>'
    )
    return parts


def overlay_svg(trace: CirTrace, predicted, report: AnomalyReport, title: str = "") -> str:
    n = len(trace)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="24" font-size="15" text-anchor="middle" '
        f'font-family="sans-serif">{title or trace.label}</text>',
    ]
    parts += _panel(
        [trace.samples, np.asarray(predicted)],
        ["#1f4e9c", "#e07b00"],
        ["input", "prediction"],
        report.clusters,
        n,
        top=40,
    )
    parts += _panel(
        [report.residual.values],
        ["#1a7a3a"],
        ["residual"],
        report.clusters,
        n,
        top=40 + _PANEL_H + 30,
    )
    parts.append(
        f'<text x="{_W / 2}" y="{_H - 10}" font-size="12" text-anchor="middle" '
        f'fill="#444" font-family="sans-serif">sample index (0..{n - 1}); '
        f'shaded spans = detected peak clusters</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_overlay(trace, predicted, report, csv_path, svg_path=None, title: str = "") -> None:
    atomic_write_text(csv_path, overlay_csv(trace, predicted, report))
    if svg_path is not None:
        atomic_write_text(svg_path, overlay_svg(trace, predicted, report, title))
