"""Plain SVG pictures of arrangements on the fundamental domain [0, 2pi)^2."""
from __future__ import annotations

import itertools
from xml.sax.saxutils import escape

import numpy as np

from .arrangement import TWO_PI, IndexMap, TorusArrangement
from .graph import BLACK, MixedGraph

SIZE = 480
MARGIN = 20
SHIFTS = list(itertools.product((-1, 0, 1), repeat=2))

CURVE_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _xy(p) -> tuple[float, float]:
    s = SIZE / TWO_PI
    return MARGIN + p[0] * s, MARGIN + SIZE - p[1] * s


def _path(points) -> str:
    return " ".join(f"{'M' if i == 0 else 'L'}{x:.2f},{y:.2f}" for i, (x, y) in enumerate(map(_xy, points)))


def _torus_step(p, q) -> np.ndarray:
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    return d - TWO_PI * np.round(d / TWO_PI)


def _copies(points) -> list[str]:
    """The polyline and its eight neighbouring translates; the clip path keeps the visible part."""
    pts = np.asarray(points, dtype=float)
    base = np.floor(pts[0] / TWO_PI) * TWO_PI
    pts = pts - base
    return [_path(pts + TWO_PI * np.array(s)) for s in SHIFTS]


class SvgCanvas:
    def __init__(self):
        self.body: list[str] = []

    def polyline(self, points, stroke: str, width: float = 1.5, extra: str = ""):
        for d in _copies(points):
            self.body.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}" {extra}/>')

    def arrow(self, at, tangent, colour: str):
        t = np.asarray(tangent, dtype=float)
        t = t / (np.linalg.norm(t) or 1.0)
        n = np.array([-t[1], t[0]])
        tip = np.asarray(at) + 0.12 * t
        left = np.asarray(at) - 0.06 * t + 0.06 * n
        right = np.asarray(at) - 0.06 * t - 0.06 * n
        for s in SHIFTS:
            off = TWO_PI * np.array(s)
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(_xy, (tip + off, left + off, right + off)))
            self.body.append(f'<polygon points="{pts}" fill="{colour}"/>')

    def dot(self, p, r: float, fill: str, stroke: str = "none"):
        x, y = _xy(p)
        self.body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}" stroke="{stroke}"/>')

    def text(self, p, label: str, size: int = 12, fill: str = "#000"):
        x, y = _xy(p)
        self.body.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" fill="{fill}" '
                         f'text-anchor="middle" dominant-baseline="middle">{escape(label)}</text>')

    def render(self) -> str:
        w = SIZE + 2 * MARGIN
        return "\n".join([
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{w}" '
            f'viewBox="0 0 {w} {w}">',
            f'<defs><clipPath id="domain"><rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" '
            f'height="{SIZE}"/></clipPath></defs>',
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="#fff" stroke="#444"/>',
            '<g clip-path="url(#domain)">',
            *self.body,
            "</g>",
            "</svg>",
        ])


def render_svg(arr: TorusArrangement, index: IndexMap | None = None, graph: MixedGraph | None = None,
               samples=None) -> str:
    """SVG of the arrangement with orientation arrows and optional index labels,
    graph overlay and coamoeba sample cloud."""
    canvas = SvgCanvas()
    if samples is not None:
        for p in np.asarray(samples, dtype=float)[:20000]:
            x, y = _xy(np.mod(p, TWO_PI))
            canvas.body.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="1" height="1" fill="#bbb"/>')
    for k, curve in enumerate(arr.curves):
        colour = CURVE_COLOURS[k % len(CURVE_COLOURS)]
        canvas.polyline(curve.vertices_array(), colour)
        half = curve.length / 2
        canvas.arrow(np.mod(curve.point_at(half), TWO_PI), curve.tangent_at(half), colour)
    if index is not None:
        for cid, cell in enumerate(arr.cells):
            canvas.text(cell.representative, str(index.values[cid]))
    if graph is not None:
        for e in graph.edges:
            a = np.array(graph.nodes[e.tail].position)
            b = np.array(graph.nodes[e.head].position)
            v = arr.vertices[e.crossing].position
            mid = a + _torus_step(a, v)
            end = mid + _torus_step(v, b)
            dash = "" if not e.directed else 'stroke-dasharray="4,3"'
            canvas.polyline([a, mid, end], "#333", 1.0, dash)
            if e.directed:
                canvas.arrow(np.mod(mid, TWO_PI), end - mid, "#333")
        for n in graph.nodes:
            if n.position is None:
                continue
            fill = "#000" if n.color == BLACK else "#fff"
            canvas.dot(n.position, 4, fill, "#000")
    return canvas.render()
