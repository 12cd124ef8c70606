"""Minimal hand-rolled SVG line charts.

No plotting library: charts are plain polylines in a fixed 800x600
viewBox so that repeated runs produce byte-identical files.  Each series'
data points are embedded as an XML comment, which lets tests confirm the
rendered data matches the CSV it accompanies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _fmt(value: float) -> str:
    return repr(round(float(value), 3))


@dataclass
class Series:
    label: str
    xs: list[float]
    ys: list[float]


@dataclass
class LineChart:
    title: str
    x_label: str
    y_label: str
    log_y: bool = False
    series: list[Series] = field(default_factory=list)
    hlines: list[tuple[float, str]] = field(default_factory=list)
    vlines: list[tuple[float, str]] = field(default_factory=list)

    def add_series(self, label: str, xs, ys) -> None:
        self.series.append(Series(label, [float(x) for x in xs], [float(y) for y in ys]))

    def _y_transform(self, y: float) -> float | None:
        if not self.log_y:
            return y
        return math.log10(y) if y > 0 else None

    def render(self) -> str:
        pts = [
            (x, ty)
            for s in self.series
            for x, y in zip(s.xs, s.ys)
            if (ty := self._y_transform(y)) is not None
        ]
        for y, _ in self.hlines:
            ty = self._y_transform(y)
            if ty is not None:
                pts.append((pts[0][0] if pts else 0.0, ty))
        if not pts:
            raise ValueError("nothing to plot")
        x_lo = min(p[0] for p in pts)
        x_hi = max(p[0] for p in pts)
        y_lo = min(p[1] for p in pts)
        y_hi = max(p[1] for p in pts)
        if x_hi == x_lo:
            x_hi = x_lo + 1.0
        if y_hi == y_lo:
            y_hi = y_lo + 1.0
        plot_w = WIDTH - MARGIN_L - MARGIN_R
        plot_h = HEIGHT - MARGIN_T - MARGIN_B

        def px(x: float) -> float:
            return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

        def py(ty: float) -> float:
            return MARGIN_T + (y_hi - ty) / (y_hi - y_lo) * plot_h

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-size="16">{self.title}</text>',
        ]
        # axes
        out.append(
            f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
            f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>'
        )
        out.append(
            f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" '
            f'x2="{WIDTH - MARGIN_R}" y2="{HEIGHT - MARGIN_B}" stroke="black"/>'
        )
        for i in range(6):
            fx = x_lo + (x_hi - x_lo) * i / 5
            fy = y_lo + (y_hi - y_lo) * i / 5
            out.append(
                f'<text x="{_fmt(px(fx))}" y="{HEIGHT - MARGIN_B + 18}" '
                f'text-anchor="middle" font-size="11">{_fmt(fx)}</text>'
            )
            label = f"1e{_fmt(fy)}" if self.log_y else _fmt(fy)
            out.append(
                f'<text x="{MARGIN_L - 8}" y="{_fmt(py(fy) + 4)}" '
                f'text-anchor="end" font-size="11">{label}</text>'
            )
        out.append(
            f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
            f'font-size="13">{self.x_label}</text>'
        )
        out.append(
            f'<text x="18" y="{HEIGHT // 2}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 18 {HEIGHT // 2})">{self.y_label}</text>'
        )
        for y, color in self.hlines:
            ty = self._y_transform(y)
            if ty is None or not (y_lo <= ty <= y_hi):
                continue
            out.append(
                f'<line x1="{MARGIN_L}" y1="{_fmt(py(ty))}" x2="{WIDTH - MARGIN_R}" '
                f'y2="{_fmt(py(ty))}" stroke="{color}" stroke-dasharray="6,4"/>'
            )
        for x, color in self.vlines:
            if not (x_lo <= x <= x_hi):
                continue
            out.append(
                f'<line x1="{_fmt(px(x))}" y1="{MARGIN_T}" x2="{_fmt(px(x))}" '
                f'y2="{HEIGHT - MARGIN_B}" stroke="{color}" stroke-dasharray="3,3"/>'
            )
        for idx, s in enumerate(self.series):
            color = _PALETTE[idx % len(_PALETTE)]
            coords = [
                (px(x), py(ty))
                for x, y in zip(s.xs, s.ys)
                if (ty := self._y_transform(y)) is not None
            ]
            points = " ".join(f"{_fmt(cx)},{_fmt(cy)}" for cx, cy in coords)
            data = " ".join(f"{x!r}:{y!r}" for x, y in zip(s.xs, s.ys))
            out.append(f"<!-- data {s.label} {data} -->")
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{points}"/>'
            )
            out.append(
                f'<text x="{WIDTH - MARGIN_R - 150}" y="{MARGIN_T + 16 * (idx + 1)}" '
                f'font-size="12" fill="{color}">{s.label}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"
