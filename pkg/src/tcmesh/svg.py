"""Static SVG scatter plots of (predicted, actual) growth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape


@dataclass(frozen=True)
class PlotSpec:
    x_label: str = "predicted log growth"
    y_label: str = "actual log growth"
    reference_line: bool = True
    width: int = 480
    height: int = 480
    title: str = ""
    margin: int = 48


def _bounds(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    # shared range for both axes, always containing the origin
    values = [0.0] + [v for p in points for v in p]
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_svg(points: Sequence[tuple[float, float]], spec: PlotSpec) -> str:
    pts = [(float(x), float(y)) for x, y in points]
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite coordinate ({x}, {y})")
    lo, hi = _bounds(pts)
    m = spec.margin
    pw, ph = spec.width - 2 * m, spec.height - 2 * m

    def sx(x: float) -> float:
        return m + (x - lo) / (hi - lo) * pw

    def sy(y: float) -> float:
        return m + (hi - y) / (hi - lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect x="{m}" y="{m}" width="{pw}" height="{ph}" fill="white" stroke="#888"/>',
        f'<line id="x-axis" x1="{m}" y1="{sy(0):.4f}" x2="{m + pw}" y2="{sy(0):.4f}" stroke="black"/>',
        f'<line id="y-axis" x1="{sx(0):.4f}" y1="{m}" x2="{sx(0):.4f}" y2="{m + ph}" stroke="black"/>',
    ]
    if spec.reference_line:
        out.append(
            f'<line id="reference" x1="{sx(lo):.4f}" y1="{sy(lo):.4f}" x2="{sx(hi):.4f}" y2="{sy(hi):.4f}" '
            'stroke="red" stroke-dasharray="4 3"/>'
        )
    out.append('<g id="points" fill="steelblue" fill-opacity="0.6">')
    for x, y in pts:
        out.append(f'<circle cx="{sx(x):.4f}" cy="{sy(y):.4f}" r="2.5"/>')
    out.append("</g>")
    out.append(
        f'<text x="{spec.width / 2}" y="{spec.height - 12}" text-anchor="middle" font-size="12">{escape(spec.x_label)}</text>'
    )
    out.append(
        f'<text x="14" y="{spec.height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {spec.height / 2})">{escape(spec.y_label)}</text>'
    )
    if spec.title:
        out.append(f'<text x="{spec.width / 2}" y="24" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(f'<text x="{m}" y="{m + ph + 14}" font-size="10">{lo:.3g}</text>')
    out.append(f'<text x="{m + pw}" y="{m + ph + 14}" font-size="10" text-anchor="end">{hi:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_scatter(points: Sequence[tuple[float, float]], spec: PlotSpec, path: str | Path) -> Path:
    text = render_svg(points, spec)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
