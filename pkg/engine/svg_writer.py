"""
Minimal SVG plot writer: a framed axes box with ticks, polylines and scatter
markers. Output depends only on the data, so re-runs are byte-identical.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 480
MARGIN = 60
PALETTE = ("#1f4e79", "#c0392b", "#2e7d32", "#8e44ad")


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _nice_range(values: Sequence[float]) -> Tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


@dataclass
class _Series:
    kind: str
    xs: List[float]
    ys: List[float]
    color: str
    label: str
    dashed: bool = False


@dataclass
class SvgPlot:
    title: str
    x_label: str
    y_label: str
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None
    series: List[_Series] = field(default_factory=list)

    def add_polyline(self, xs: Sequence[float], ys: Sequence[float], label: str = "", dashed: bool = False) -> "SvgPlot":
        color = PALETTE[len(self.series) % len(PALETTE)]
        self.series.append(_Series("line", [float(v) for v in xs], [float(v) for v in ys], color, label, dashed))
        return self

    def add_scatter(self, xs: Sequence[float], ys: Sequence[float], label: str = "") -> "SvgPlot":
        color = PALETTE[len(self.series) % len(PALETTE)]
        self.series.append(_Series("scatter", [float(v) for v in xs], [float(v) for v in ys], color, label))
        return self

    def _ranges(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        xs = [v for s in self.series for v in s.xs]
        ys = [v for s in self.series for v in s.ys]
        return self.x_range or _nice_range(xs), self.y_range or _nice_range(ys)

    def render(self) -> str:
        (x0, x1), (y0, y1) = self._ranges()
        plot_w = WIDTH - 2 * MARGIN
        plot_h = HEIGHT - 2 * MARGIN

        def px(x: float) -> float:
            return MARGIN + (x - x0) / (x1 - x0) * plot_w

        def py(y: float) -> float:
            return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * plot_h

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="14">{escape(self.title)}</text>',
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
        ]
        for i in range(5):
            xv = x0 + (x1 - x0) * i / 4
            yv = y0 + (y1 - y0) * i / 4
            out.append(
                f'<line x1="{_fmt(px(xv))}" y1="{HEIGHT - MARGIN}" x2="{_fmt(px(xv))}" y2="{HEIGHT - MARGIN + 5}" stroke="black"/>'
                f'<text x="{_fmt(px(xv))}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">{_fmt(xv)}</text>'
            )
            out.append(
                f'<line x1="{MARGIN - 5}" y1="{_fmt(py(yv))}" x2="{MARGIN}" y2="{_fmt(py(yv))}" stroke="black"/>'
                f'<text x="{MARGIN - 8}" y="{_fmt(py(yv) + 4)}" text-anchor="end">{_fmt(yv)}</text>'
            )
        out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(self.x_label)}</text>')
        out.append(
            f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 15 {HEIGHT / 2})">'
            f"{escape(self.y_label)}</text>"
        )

        legend_y = MARGIN + 15
        for s in self.series:
            pts = [(px(x), py(y)) for x, y in zip(s.xs, s.ys) if math.isfinite(x) and math.isfinite(y)]
            if s.kind == "line" and pts:
                dash = ' stroke-dasharray="6 4"' if s.dashed else ""
                coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
                out.append(f'<polyline fill="none" stroke="{s.color}" stroke-width="1.5"{dash} points="{coords}"/>')
            elif s.kind == "scatter":
                for a, b in pts:
                    out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3.5" fill="{s.color}"/>')
            if s.label:
                out.append(
                    f'<text x="{WIDTH - MARGIN - 5}" y="{legend_y}" text-anchor="end" fill="{s.color}">{escape(s.label)}</text>'
                )
                legend_y += 15
        out.append("</svg>")
        return "\n".join(out) + "\n"
