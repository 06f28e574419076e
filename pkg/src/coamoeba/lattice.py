"""Integer lattice geometry: Newton polygons, facets and their normals."""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, NamedTuple

from .errors import DegenerateSupport, ZeroVector


class Vec(NamedTuple):
    """A point or vector of Z^2."""

    x: int
    y: int

    def __add__(self, other):
        return Vec(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return Vec(-self.x, -self.y)

    def scale(self, k: int) -> "Vec":
        return Vec(k * self.x, k * self.y)

    def cross(self, other) -> int:
        return self.x * other[1] - self.y * other[0]

    def dot(self, other) -> int:
        return self.x * other[0] + self.y * other[1]

    def content(self) -> int:
        return gcd(abs(self.x), abs(self.y))

    def is_primitive(self) -> bool:
        return self.content() == 1


LatticePoint = Vec
LatticeVector = Vec


def facet_normal(edge) -> Vec:
    """Clockwise quarter turn ``(x, y) -> (y, -x)``; the outward normal of a CCW edge."""
    edge = Vec(*edge)
    if edge == (0, 0):
        raise ZeroVector("the zero vector has no normal")
    return Vec(edge.y, -edge.x)


def unrotate(v) -> Vec:
    """Inverse of :func:`facet_normal` (counterclockwise quarter turn)."""
    return Vec(-v[1], v[0])


@dataclass(frozen=True)
class Facet:
    gamma_edge: Vec
    gamma_normal: Vec
    primitive_dir: Vec
    lattice_length: int
    endpoint_indices: tuple[int, int]


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon, vertices counterclockwise from the lexicographic minimum."""

    vertices: tuple[Vec, ...]
    facets: tuple[Facet, ...]

    @classmethod
    def from_vertices(cls, vertices: Iterable) -> "LatticePolygon":
        return newton_polygon(vertices)

    @property
    def facet_vectors(self) -> list[Vec]:
        return [f.gamma_edge for f in self.facets]

    def facet_start(self, k: int) -> Vec:
        return self.vertices[self.facets[k].endpoint_indices[0]]

    def double_area(self) -> int:
        return double_area(self)

    def area(self) -> float:
        return double_area(self) / 2

    def translated(self, t) -> "LatticePolygon":
        return newton_polygon([v + t for v in self.vertices])

    def canonical(self) -> "LatticePolygon":
        """Translate so the lexicographically smallest vertex sits at the origin."""
        return self.translated(-self.vertices[0])

    def contains(self, p) -> bool:
        p = Vec(*p)
        return all(f.gamma_edge.cross(p - self.vertices[f.endpoint_indices[0]]) >= 0
                   for f in self.facets)

    def boundary_points(self) -> list[Vec]:
        pts = []
        for k, f in enumerate(self.facets):
            start = self.facet_start(k)
            pts.extend(start + f.primitive_dir.scale(j) for j in range(f.lattice_length))
        return pts

    def to_json(self) -> str:
        return json.dumps([list(v) for v in self.vertices])

    @classmethod
    def from_json(cls, text: str) -> "LatticePolygon":
        return newton_polygon(json.loads(text))


def _cross3(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable) -> list[Vec]:
    """Andrew's monotone chain; collinear boundary points are dropped."""
    pts = sorted({Vec(int(p[0]), int(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[Vec] = []
    for p in pts:
        while len(lower) >= 2 and _cross3(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Vec] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross3(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def newton_polygon(support: Iterable) -> LatticePolygon:
    hull = convex_hull(support)
    if len(hull) < 3:
        raise DegenerateSupport(f"support spans no polygon (hull {hull})")
    m = len(hull)
    facets = []
    for k in range(m):
        edge = hull[(k + 1) % m] - hull[k]
        length = edge.content()
        facets.append(Facet(
            gamma_edge=edge,
            gamma_normal=facet_normal(edge),
            primitive_dir=Vec(edge.x // length, edge.y // length),
            lattice_length=length,
            endpoint_indices=(k, (k + 1) % m),
        ))
    return LatticePolygon(tuple(hull), tuple(facets))


def double_area(p: LatticePolygon) -> int:
    vs = p.vertices
    return sum(vs[k].cross(vs[(k + 1) % len(vs)]) for k in range(len(vs)))


def is_sparse_along_edges(support: Iterable, polygon: LatticePolygon | None = None) -> bool:
    """True iff no point of ``support`` lies in the relative interior of a facet."""
    support = {Vec(*p) for p in support}
    polygon = polygon or newton_polygon(support)
    for k, f in enumerate(polygon.facets):
        start = polygon.facet_start(k)
        for j in range(1, f.lattice_length):
            if start + f.primitive_dir.scale(j) in support:
                return False
    return True


def pentagon(k: int) -> LatticePolygon:
    """The pentagon with vertices (0,0), (1,0), (0,1), (k+1,1), (1,2)."""
    return newton_polygon([(0, 0), (1, 0), (0, 1), (k + 1, 1), (1, 2)])


SIMPLEX = newton_polygon([(0, 0), (1, 0), (0, 1)])
SQUARE = newton_polygon([(0, 0), (1, 0), (0, 1), (1, 1)])
