"""Minimal deterministic SVG charts (no plotting dependency, stable bytes)."""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

_WIDTH, _HEIGHT = 720, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 30, 40, 70
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(vals: Sequence[float]) -> Tuple[float, float]:
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Canvas:
    def __init__(self, title: str):
        self.parts: List[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
            f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="monospace" font-size="12">',
            f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
            f'<text x="{_WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        ]

    def add(self, fragment: str) -> None:
        self.parts.append(fragment)

    def finish(self) -> str:
        self.parts.append("</svg>")
        return "\n".join(self.parts) + "\n"


def _axes(canvas: _Canvas, ylo: float, yhi: float) -> None:
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T
    canvas.add(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    canvas.add(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for i in range(5):
        frac = i / 4
        y = y0 + (y1 - y0) * frac
        val = ylo + (yhi - ylo) * frac
        canvas.add(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
        canvas.add(f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end">{_fmt(val)}</text>')


def line_chart(series: Dict[str, List[Tuple[float, float]]], title: str,
               x_label: str = "", y_label: str = "") -> str:
    """Multi-series line chart; series maps name -> [(x, y), ...]."""
    canvas = _Canvas(title)
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if not xs:
        return canvas.finish()
    xlo, xhi = _scale(xs)
    ylo, yhi = _scale(ys)
    _axes(canvas, ylo, yhi)
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T

    def px(x):
        return x0 + (x1 - x0) * (x - xlo) / (xhi - xlo)

    def py(y):
        return y0 + (y1 - y0) * (y - ylo) / (yhi - ylo)

    for idx, (name, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
        canvas.add(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            canvas.add(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{color}"/>')
        ly = _MARGIN_T + 16 * idx
        canvas.add(f'<rect x="{x1 - 150}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        canvas.add(f'<text x="{x1 - 135}" y="{ly}">{name}</text>')
    if x_label:
        canvas.add(f'<text x="{(x0 + x1) / 2}" y="{_HEIGHT - 20}" text-anchor="middle">{x_label}</text>')
    if y_label:
        canvas.add(f'<text x="18" y="{_MARGIN_T - 12}">{y_label}</text>')
    return canvas.finish()


def bar_chart(categories: List[str], groups: Dict[str, List[float]], title: str,
              y_label: str = "") -> str:
    """Grouped bar chart; groups maps series name -> per-category values."""
    canvas = _Canvas(title)
    values = [v for vals in groups.values() for v in vals]
    if not values or not categories:
        return canvas.finish()
    ylo = min(0.0, min(values))
    yhi = max(values)
    if yhi - ylo < 1e-12:
        yhi = ylo + 1.0
    yhi *= 1.05
    _axes(canvas, ylo, yhi)
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T
    slot = (x1 - x0) / len(categories)
    bar_w = slot * 0.8 / max(len(groups), 1)

    def py(y):
        return y0 + (y1 - y0) * (y - ylo) / (yhi - ylo)

    for gi, (name, vals) in enumerate(groups.items()):
        color = _PALETTE[gi % len(_PALETTE)]
        for ci, v in enumerate(vals):
            bx = x0 + slot * ci + slot * 0.1 + bar_w * gi
            top = py(v)
            canvas.add(f'<rect x="{bx:.1f}" y="{top:.1f}" width="{bar_w:.1f}" '
                       f'height="{y0 - top:.1f}" fill="{color}"/>')
        ly = _MARGIN_T + 16 * gi
        canvas.add(f'<rect x="{x1 - 150}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        canvas.add(f'<text x="{x1 - 135}" y="{ly}">{name}</text>')
    for ci, cat in enumerate(categories):
        cx = x0 + slot * (ci + 0.5)
        canvas.add(f'<text x="{cx:.1f}" y="{y0 + 16}" text-anchor="middle">{cat}</text>')
    if y_label:
        canvas.add(f'<text x="18" y="{_MARGIN_T - 12}">{y_label}</text>')
    return canvas.finish()
