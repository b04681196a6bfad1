"""Bare-bones SVG line charts for quick looks at sweep output."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H, _PAD = 640, 400, 60


def line_chart(
    curves: Mapping[str, tuple[Sequence[float], Sequence[float | None]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
) -> str:
    """Render ``{label: (x, y)}`` as polylines; ``None``/NaN samples break the line."""
    def tx(x: float) -> float:
        return math.log10(x) if logx else x

    xs = [tx(x) for xv, _ in curves.values() for x in xv]
    ys = [y for _, yv in curves.values() for y in yv if y is not None and math.isfinite(y)]
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x: float) -> float:
        return _PAD + (tx(x) - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def py(y: float) -> float:
        return _H - _PAD - (y - y0) / (y1 - y0) * (_H - 2 * _PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle">{title}</text>',
        f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{_H / 2}" transform="rotate(-90 15 {_H / 2})" '
        f'text-anchor="middle">{ylabel}</text>',
        f'<text x="{_PAD}" y="{_H - _PAD + 15}" font-size="10">{_tick(x0, logx)}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 15}" font-size="10" text-anchor="end">'
        f'{_tick(x1, logx)}</text>',
        f'<text x="{_PAD - 5}" y="{_H - _PAD}" font-size="10" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{_PAD - 5}" y="{_PAD + 10}" font-size="10" text-anchor="end">{y1:.3g}</text>',
    ]
    for k, (label, (xv, yv)) in enumerate(curves.items()):
        color = _COLORS[k % len(_COLORS)]
        segment: list[str] = []
        for x, y in zip(xv, yv):
            if y is None or not math.isfinite(y):
                parts.extend(_polyline(segment, color))
                segment = []
                continue
            segment.append(f"{px(x):.2f},{py(y):.2f}")
        parts.extend(_polyline(segment, color))
        parts.append(
            f'<text x="{_W - _PAD - 5}" y="{_PAD + 15 + 15 * k}" font-size="11" '
            f'text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _polyline(points: list[str], color: str) -> list[str]:
    if len(points) < 2:
        return []
    return [f'<polyline fill="none" stroke="{color}" points="{" ".join(points)}"/>']


def _tick(x: float, logx: bool) -> str:
    return f"{10 ** x:.3g}" if logx else f"{x:.3g}"
