"""Small deterministic SVG writers for the report figures."""
from __future__ import annotations

import colorsys
import hashlib
import math
from typing import Sequence
from xml.sax.saxutils import escape

from .limit import HingeSection
from .model import FrameGeometry

PATTERN_COLORS = {"A": "#1f77b4", "B": "#d62728"}


class Svg:
    def __init__(self, width: float, height: float):
        self.width, self.height = width, height
        self.parts: list[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{stroke}" stroke-width="{width:.2f}"{extra}/>'
        )

    def polyline(self, pts, stroke="#000", width=1.5):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width:.2f}"/>')

    def circle(self, x, y, r, fill="#000"):
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}"/>')

    def rect(self, x, y, w, h, fill):
        self.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}"/>')

    def text(self, x, y, s, size=11, anchor="start"):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{escape(s)}</text>'
        )

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width:.0f}" height="{self.height:.0f}" '
            f'viewBox="0 0 {self.width:.0f} {self.height:.0f}">'
        )
        return "\n".join([head, f'<rect width="100%" height="100%" fill="#fff"/>', *self.parts, "</svg>"]) + "\n"


def chromosome_color(genes: Sequence[int]) -> str:
    """Stable color for a chromosome: same genes, same color in every figure."""
    digest = hashlib.sha1(" ".join(map(str, genes)).encode()).digest()
    hue = digest[0] / 255.0
    sat = 0.45 + 0.5 * digest[1] / 255.0
    val = 0.55 + 0.4 * digest[2] / 255.0
    r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


class _Axes:
    def __init__(self, svg: Svg, box, xlim, ylim):
        self.svg, (self.x0, self.y0, self.w, self.h) = svg, box
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo or 1.0) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / (hi - lo or 1.0) * self.h

    def frame(self, xlabel, ylabel, nticks=5):
        s = self.svg
        s.line(self.x0, self.y0 + self.h, self.x0 + self.w, self.y0 + self.h)
        s.line(self.x0, self.y0, self.x0, self.y0 + self.h)
        for i in range(nticks + 1):
            xv = self.xlim[0] + (self.xlim[1] - self.xlim[0]) * i / nticks
            yv = self.ylim[0] + (self.ylim[1] - self.ylim[0]) * i / nticks
            s.text(self.px(xv), self.y0 + self.h + 14, f"{xv:.4g}", size=9, anchor="middle")
            s.text(self.x0 - 4, self.py(yv) + 3, f"{yv:.4g}", size=9, anchor="end")
        s.text(self.x0 + self.w / 2, self.y0 + self.h + 30, xlabel, anchor="middle")
        s.text(self.x0 - 44, self.y0 - 8, ylabel)


def capacity_svg(curves: dict) -> str:
    """Bilinear capacity curves, one polyline per load pattern."""
    svg = Svg(560, 380)
    umax = max(c.u_u for c in curves.values()) * 1.05
    vmax = max(c.v_peak for c in curves.values()) * 1.15
    ax = _Axes(svg, (70, 40, 450, 280), (0.0, umax), (0.0, vmax))
    ax.frame("top displacement u [m]", "base shear V [kN]")
    for i, (pattern, c) in enumerate(sorted(curves.items())):
        color = PATTERN_COLORS.get(pattern, "#333")
        svg.polyline([(ax.px(u), ax.py(v)) for u, v in c.points()], stroke=color, width=2)
        svg.circle(ax.px(c.u_peak), ax.py(c.v_peak), 4, fill=color)
        svg.line(ax.px(c.u_u), ax.py(0), ax.px(c.u_u), ax.py(c.shear(c.u_u)), stroke=color, dash="4,3")
        svg.text(400, 60 + 16 * i, f"{pattern}: u_peak={c.u_peak:.4f} u_u={c.u_u:.4f}", size=10)
    svg.text(280, 22, "Capacity curves", size=13, anchor="middle")
    return svg.render()


def _section_xy(sec: HingeSection, g: FrameGeometry) -> tuple[float, float]:
    L, H = g.bay_length, g.storey_height
    if sec.member == "column":
        x = sec.index * L
        y = (sec.level - 1) * H + (0.12 * H if sec.location == "column-bottom" else 0.88 * H)
        return x, y
    frac = {"beam-left-end": 0.12, "beam-midspan": 0.5, "beam-right-end": 0.88}[sec.location]
    return (sec.index + frac) * L, sec.level * H


def mechanism_svg(geometry: FrameGeometry, sections: Sequence[HingeSection], hinges: dict) -> str:
    """Frame outline with plastic hinges as dots; one panel per load pattern."""
    panel_w, panel_h, pad = 300.0, 300.0, 40.0
    svg = Svg(pad + len(hinges) * (panel_w + pad), panel_h + 2 * pad)
    W = geometry.n_bays * geometry.bay_length
    Ht = geometry.n_floors * geometry.storey_height
    scale = min((panel_w - 20) / W, (panel_h - 20) / Ht)
    for p, (pattern, rotations) in enumerate(sorted(hinges.items())):
        ox = pad + p * (panel_w + pad) + (panel_w - W * scale) / 2
        oy = pad + panel_h - 10

        def at(x, y):
            return ox + x * scale, oy - y * scale

        for j in range(geometry.n_columns):
            svg.line(*at(j * geometry.bay_length, 0), *at(j * geometry.bay_length, Ht), width=2)
        for k in range(1, geometry.n_floors + 1):
            svg.line(*at(0, k * geometry.storey_height), *at(W, k * geometry.storey_height), width=2)
        for j in range(geometry.n_columns):
            x, y = at(j * geometry.bay_length, 0)
            svg.line(x - 8, y, x + 8, y, width=3)
        for sid, rot in rotations:
            x, y = at(*_section_xy(sections[sid], geometry))
            svg.circle(x, y, 3.0 + 1.5 * abs(rot), fill=PATTERN_COLORS.get(pattern, "#333"))
        svg.text(ox + W * scale / 2, pad - 14, f"Collapse mechanism {pattern}", size=12, anchor="middle")
    return svg.render()


def history_svg(best: Sequence[float], mean: Sequence[float]) -> str:
    svg = Svg(560, 360)
    vals = [v for v in list(best) + list(mean) if math.isfinite(v)]
    lo, hi = (min(vals), max(vals)) if vals else (0.0, 1.0)
    span = hi - lo or 1.0
    ax = _Axes(svg, (70, 40, 450, 260), (0, max(1, len(best) - 1)), (lo - 0.05 * span, hi + 0.05 * span))
    ax.frame("generation", "fitness F")
    for series, color in ((best, "#1f77b4"), (mean, "#999999")):
        pts = [(ax.px(i), ax.py(v)) for i, v in enumerate(series) if math.isfinite(v)]
        if pts:
            svg.polyline(pts, stroke=color, width=2)
    svg.text(300, 22, "Fitness history (blue: best, grey: mean of feasible)", size=12, anchor="middle")
    return svg.render()


def spreading_svg(populations: Sequence[Sequence[Sequence[int]]]) -> str:
    """Generation-by-slot raster; generation 0 at the bottom."""
    cell = 6.0
    n_gen = len(populations)
    n_slot = max(len(p) for p in populations)
    svg = Svg(n_slot * cell + 60, n_gen * cell + 50)
    for g, pop in enumerate(populations):
        y = 20 + (n_gen - 1 - g) * cell
        for s, genes in enumerate(pop):
            svg.rect(40 + s * cell, y, cell, cell, chromosome_color(genes))
    svg.text(40, 14, "Temporal spreading (x: population slot, y: generation)", size=11)
    svg.text(40 + n_slot * cell / 2, n_gen * cell + 40, "slot", size=10, anchor="middle")
    return svg.render()
