"""Oriented curve arrangements on the torus T^2 = (R / 2piZ)^2.

Curves are closed polylines given in the universal cover: points ``p_0, ..., p_{n-1}``
with segments ``p_i -> p_{i+1}`` and a closing segment ``p_{n-1} -> p_0 + 2pi h``,
where ``h`` is the homology class.  A geodesic is the case ``n = 1``.

:func:`build_arrangement` computes every crossing, traces the complementary cells
through a half-edge structure and lifts each cell to the plane for areas and angles.
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import shapely

from .errors import (InconsistentCrossing, NonSimpleArrangement, OffsetCountMismatch,
                     UncalibratedIndex)
from .lattice import LatticePolygon, Vec, facet_normal

TWO_PI = 2 * math.pi
EPS = 1e-9


# --------------------------------------------------------------------------
# Curves


@dataclass(frozen=True)
class OrientedCurve:
    points: tuple[tuple[float, float], ...]
    homology: Vec
    facet: int | None = None
    # geodesics only: the line is {theta : <delta, theta> = offset (mod 2pi)}
    delta: Vec | None = None
    offset: float | None = None
    # a curve standing for several coincident copies (repeated roots)
    multiplicity: int = 1

    @property
    def is_geodesic(self) -> bool:
        return len(self.points) == 1

    @property
    def direction(self) -> Vec:
        return self.homology

    def vertices_array(self) -> np.ndarray:
        """Polyline including the closing point ``p_0 + 2pi h``."""
        pts = np.array(self.points + (self.points[0],), dtype=float)
        pts[-1] += TWO_PI * np.array(self.homology, dtype=float)
        return pts

    def cumulative(self) -> np.ndarray:
        pts = self.vertices_array()
        return np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])

    @property
    def length(self) -> float:
        return float(self.cumulative()[-1])

    def point_at(self, s: float) -> np.ndarray:
        pts, cum = self.vertices_array(), self.cumulative()
        L = cum[-1]
        wraps = math.floor(s / L)
        s0 = s - wraps * L
        i = min(int(np.searchsorted(cum, s0, side="right")) - 1, len(pts) - 2)
        t = (s0 - cum[i]) / (cum[i + 1] - cum[i])
        p = pts[i] + t * (pts[i + 1] - pts[i])
        return p + wraps * TWO_PI * np.array(self.homology, dtype=float)

    def tangent_at(self, s: float) -> np.ndarray:
        pts, cum = self.vertices_array(), self.cumulative()
        s0 = s % cum[-1]
        i = min(int(np.searchsorted(cum, s0, side="right")) - 1, len(pts) - 2)
        d = pts[i + 1] - pts[i]
        return d / np.hypot(*d)

    def polyline(self, s0: float, s1: float) -> np.ndarray:
        """Lifted polyline from parameter ``s0`` to ``s1 >= s0``."""
        cum = self.cumulative()
        L = cum[-1]
        pts = [self.point_at(s0)]
        base = math.floor(s0 / L)
        h = TWO_PI * np.array(self.homology, dtype=float)
        raw = self.vertices_array()
        for wrap in range(base, math.floor(s1 / L) + 1):
            for i in range(len(raw) - 1):
                s = wrap * L + cum[i]
                if s0 + 1e-12 < s < s1 - 1e-12:
                    pts.append(raw[i] + wrap * h)
        pts.append(self.point_at(s1))
        return np.array(pts)

    def to_dict(self) -> dict:
        d = {"points": [list(p) for p in self.points], "homology": list(self.homology),
             "facet": self.facet}
        if self.multiplicity != 1:
            d["multiplicity"] = self.multiplicity
        if self.is_geodesic:
            d["direction"] = list(self.homology)
            d["offset"] = self.offset
        return d


def canonical_sign(delta) -> int:
    """+1 when the first nonzero coordinate of ``delta`` is positive."""
    return 1 if (delta[0] > 0 or (delta[0] == 0 and delta[1] > 0)) else -1


def geodesic(delta, offset: float, facet: int | None = None, multiplicity: int = 1) -> OrientedCurve:
    """The line ``<delta, theta> = offset (mod 2pi)`` oriented along ``M delta``."""
    delta = Vec(*delta)
    if not delta.is_primitive():
        raise ValueError(f"direction {delta} is not primitive")
    tangent = facet_normal(delta)
    n2 = delta.dot(delta)
    offset = float(offset) % TWO_PI
    anchor = (offset * delta.x / n2, offset * delta.y / n2)
    return OrientedCurve((anchor,), tangent, facet, delta, offset, multiplicity)


def polyline_curve(points, homology, facet=None) -> OrientedCurve:
    return OrientedCurve(tuple((float(p[0]), float(p[1])) for p in points), Vec(*homology), facet)


def dual_arrangement(polygon: LatticePolygon, offsets, eps: float = EPS) -> "TorusArrangement":
    """Geodesic arrangement dual to ``polygon``.

    ``offsets[k]`` lists ``lattice_length`` values for facet ``k``; each value ``c``
    gives the line ``<d, theta> = c`` where ``d`` is the facet's primitive direction
    with its first nonzero coordinate made positive.  Offsets may be floats or
    :class:`~fractions.Fraction` multiples of pi (``Fraction(1, 2)`` means pi/2).
    """
    return build_arrangement(dual_curves(polygon, offsets), eps=eps)


def _as_angle(c) -> float:
    if isinstance(c, Fraction):
        return float(c) * math.pi
    return float(c)


def dual_curves(polygon: LatticePolygon, offsets) -> list[OrientedCurve]:
    if len(offsets) != len(polygon.facets):
        raise OffsetCountMismatch(f"{len(offsets)} offset groups for {len(polygon.facets)} facets")
    curves = []
    for k, (fac, group) in enumerate(zip(polygon.facets, offsets)):
        group = [group] if np.isscalar(group) or isinstance(group, Fraction) else list(group)
        if len(group) != fac.lattice_length:
            raise OffsetCountMismatch(
                f"facet {k} has lattice length {fac.lattice_length} but {len(group)} offsets")
        sign = canonical_sign(fac.primitive_dir)
        for c in group:
            curves.append(geodesic(fac.primitive_dir, sign * _as_angle(c), facet=k))
    return curves


def offsets_of(polygon: LatticePolygon, curves: Sequence[OrientedCurve]) -> list[list[float]]:
    """Inverse of :func:`dual_curves` for geodesic curves tagged with facets."""
    out: list[list[float]] = [[] for _ in polygon.facets]
    for c in curves:
        sign = canonical_sign(polygon.facets[c.facet].primitive_dir)
        out[c.facet].append((sign * c.offset) % TWO_PI)
    return out


# --------------------------------------------------------------------------
# Arrangement structure


@dataclass
class Cell:
    halfedges: list[int]
    polygon: np.ndarray          # lifted boundary, counterclockwise
    area: float
    centroid: np.ndarray          # in [0, 2pi)^2
    corner_vertices: list[int]
    corner_angles: list[float]
    geometric_corners: int
    representative: np.ndarray    # interior point in [0, 2pi)^2
    lift_centroid: np.ndarray = None       # centroid in the coordinates of ``polygon``
    corner_points: dict = field(default_factory=dict)   # half-edge -> lifted start point

    @property
    def n_arcs(self) -> int:
        return len(self.halfedges)

    @property
    def is_triangle(self) -> bool:
        return self.n_arcs == 3


@dataclass
class Vertex:
    position: np.ndarray               # in [0, 2pi)^2
    passes: tuple[tuple[int, float], ...]         # (curve, parameter), two unless degenerate
    rays: list[int] = field(default_factory=list)  # outgoing half-edges, CCW

    @property
    def curves(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.passes)

    @property
    def degree(self) -> int:
        return 2 * len(self.passes)


class TorusArrangement:
    """Immutable cell decomposition of T^2 cut along a set of oriented curves.

    Half-edges come in pairs ``(2a, 2a + 1)``: the even one runs along the curve's
    orientation.  A half-edge's cell lies on its left.
    """

    def __init__(self, curves, vertices, he_origin, he_curve, he_poly, he_lift, cells, he_face,
                 he_next, eps):
        self.curves: list[OrientedCurve] = list(curves)
        self.vertices: list[Vertex] = vertices
        self.he_origin = he_origin
        self.he_curve = he_curve
        self.he_poly = he_poly
        self.he_lift = he_lift
        self.cells: list[Cell] = cells
        self.he_face = he_face
        self.he_next = he_next
        self.eps = eps
        self._shapes = None
        self.simple = all(len(v.passes) == 2 for v in vertices) and \
            all(c.multiplicity == 1 for c in self.curves)

    # basic counts
    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.he_origin) // 2

    @property
    def F(self) -> int:
        return len(self.cells)

    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @staticmethod
    def twin(e: int) -> int:
        return e ^ 1

    @staticmethod
    def is_forward(e: int) -> bool:
        return e % 2 == 0

    def he_dest(self, e: int) -> int:
        return self.he_origin[e ^ 1]

    def he_direction(self, e: int) -> np.ndarray:
        p = self.he_poly[e]
        d = p[1] - p[0]
        return d / np.hypot(*d)

    def arc_cells(self, arc: int) -> tuple[int, int]:
        """(left cell, right cell) of an arc with respect to the curve orientation."""
        return self.he_face[2 * arc], self.he_face[2 * arc + 1]

    def pair_crossing_counts(self) -> Counter:
        out: Counter = Counter()
        for v in self.vertices:
            cs = v.curves
            for a in range(len(cs)):
                for b in range(a + 1, len(cs)):
                    i, j = sorted((cs[a], cs[b]))
                    out[(i, j)] += 1
        return out

    def sectors(self, vid: int):
        """Corners at a vertex as ``(cell, kind, angle)``; kind is 'in', 'out' or 'mixed'."""
        rays = self.vertices[vid].rays
        out = []
        for i, e in enumerate(rays):
            e2 = rays[(i + 1) % len(rays)]
            a = _ccw_angle(self.he_direction(e), self.he_direction(e2))
            f1, f2 = self.is_forward(e), self.is_forward(e2)
            kind = "out" if f1 and f2 else "in" if not f1 and not f2 else "mixed"
            out.append((self.he_face[e], kind, a))
        return out

    # point location

    def _cell_shapes(self):
        if self._shapes is None:
            shapes = []
            for cell in self.cells:
                poly = shapely.Polygon(cell.polygon)
                if not poly.is_valid:
                    poly = shapely.make_valid(poly)
                shapely.prepare(poly)
                minx, miny, maxx, maxy = poly.bounds
                shifts = [(kx, ky)
                          for kx in range(math.floor(minx / TWO_PI) - 1, math.ceil(maxx / TWO_PI) + 1)
                          for ky in range(math.floor(miny / TWO_PI) - 1, math.ceil(maxy / TWO_PI) + 1)
                          if minx <= TWO_PI * (kx + 1) and maxx >= TWO_PI * kx
                          and miny <= TWO_PI * (ky + 1) and maxy >= TWO_PI * ky]
                shapes.append((poly, shifts))
            self._shapes = shapes
        return self._shapes

    def locate(self, points) -> np.ndarray:
        """Cell index for each point of T^2 (``-1`` when on the curves or unresolved)."""
        pts = np.mod(np.atleast_2d(np.asarray(points, dtype=float)), TWO_PI)
        out = np.full(len(pts), -1, dtype=int)
        for cid, (poly, shifts) in enumerate(self._cell_shapes()):
            for kx, ky in shifts:
                hit = shapely.contains_xy(poly, pts[:, 0] + TWO_PI * kx, pts[:, 1] + TWO_PI * ky)
                out[hit & (out == -1)] = cid
        return out

    def distance_to_curves(self, point) -> float:
        """Euclidean distance on T^2 from ``point`` to the union of the curves."""
        p = np.mod(np.asarray(point, dtype=float), TWO_PI)
        best = math.inf
        for c in self.curves:
            pts = c.vertices_array()
            for a, b in zip(pts[:-1], pts[1:]):
                lo = np.floor((np.minimum(a, b) - p) / TWO_PI) - 1
                hi = np.ceil((np.maximum(a, b) - p) / TWO_PI) + 1
                for kx in range(int(lo[0]), int(hi[0]) + 1):
                    for ky in range(int(lo[1]), int(hi[1]) + 1):
                        q = p + TWO_PI * np.array([kx, ky])
                        best = min(best, _point_segment_distance(q, a, b))
        return best

    def to_dict(self, index: "IndexMap | None" = None) -> dict:
        cells = []
        for cid, c in enumerate(self.cells):
            d = {"area": c.area, "centroid": c.centroid.tolist(), "arcs": c.n_arcs,
                 "triangle": c.is_triangle, "vertices": c.corner_vertices}
            if index is not None:
                d["index"] = index.values[cid]
            cells.append(d)
        out = {
            "curves": [c.to_dict() for c in self.curves],
            "vertices": [{"position": v.position.tolist(), "curves": list(v.curves)}
                         for v in self.vertices],
            "cells": cells,
            "counts": {"V": self.V, "E": self.E, "F": self.F},
        }
        if index is not None:
            out["index_status"] = "calibrated" if index.calibrated else "relative"
        return out

    def to_json(self, index=None) -> str:
        return json.dumps(self.to_dict(index), indent=1)


def _ccw_angle(d1, d2) -> float:
    a = math.atan2(d1[0] * d2[1] - d1[1] * d2[0], d1[0] * d2[0] + d1[1] * d2[1])
    return a if a > 0 else a + TWO_PI


def _point_segment_distance(p, a, b) -> float:
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.hypot(*(a + t * ab - p)))


def _torus_delta(p, q) -> np.ndarray:
    d = np.asarray(q, float) - np.asarray(p, float)
    return d - TWO_PI * np.round(d / TWO_PI)


def _crossings(curves: Sequence[OrientedCurve], eps: float):
    """All crossings as ``(i, s_i, j, s_j, point)`` with ``i <= j``."""
    segs = []
    for ci, c in enumerate(curves):
        pts, cum = c.vertices_array(), c.cumulative()
        for k in range(len(pts) - 1):
            segs.append((ci, k, pts[k], pts[k + 1], cum[k], cum[k + 1] - cum[k]))
    lengths = [c.length for c in curves]
    found: list[tuple[int, float, int, float, np.ndarray]] = []
    tau = 1e-10

    def already(i, si, j, sj):
        for (a, sa, b, sb, _) in found:
            if a == i and b == j:
                if (_cyc_close(sa, si, lengths[i]) and _cyc_close(sb, sj, lengths[j])) or \
                   (i == j and _cyc_close(sa, sj, lengths[i]) and _cyc_close(sb, si, lengths[j])):
                    return True
        return False

    for x in range(len(segs)):
        ci, _, a0, a1, sa0, la = segs[x]
        da = a1 - a0
        amin, amax = np.minimum(a0, a1), np.maximum(a0, a1)
        for y in range(x, len(segs)):
            cj, _, b0, b1, sb0, lb = segs[y]
            db = b1 - b0
            bmin, bmax = np.minimum(b0, b1), np.maximum(b0, b1)
            klo = np.ceil((amin - bmax) / TWO_PI - 1e-9).astype(int)
            khi = np.floor((amax - bmin) / TWO_PI + 1e-9).astype(int)
            det = da[0] * db[1] - da[1] * db[0]
            scale = la * lb
            for kx in range(klo[0], khi[0] + 1):
                for ky in range(klo[1], khi[1] + 1):
                    if x == y and (kx, ky) <= (0, 0):
                        continue
                    off = b0 + TWO_PI * np.array([kx, ky]) - a0
                    if abs(det) <= 1e-12 * scale:
                        if abs(off[0] * da[1] - off[1] * da[0]) <= eps * la:
                            # collinear: overlap of positive length means coincident curves
                            t0 = np.dot(off, da) / la**2
                            t1 = np.dot(off + db, da) / la**2
                            lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
                            if (hi - lo) * la > eps:
                                raise NonSimpleArrangement(
                                    f"curves {ci} and {cj} overlap", curves=(ci, cj))
                        continue
                    t = (off[0] * db[1] - off[1] * db[0]) / det
                    u = (off[0] * da[1] - off[1] * da[0]) / det
                    if -tau <= t <= 1 + tau and -tau <= u <= 1 + tau:
                        if abs(det) <= 1e-9 * scale:
                            raise NonSimpleArrangement(
                                f"curves {ci} and {cj} are tangent", curves=(ci, cj))
                        si = (sa0 + t * la) % lengths[ci]
                        sj = (sb0 + u * lb) % lengths[cj]
                        i, s_i, j, s_j = (ci, si, cj, sj) if ci <= cj else (cj, sj, ci, si)
                        if i == j and _cyc_close(s_i, s_j, lengths[i]):
                            continue
                        if not already(i, s_i, j, s_j):
                            found.append((i, s_i, j, s_j, np.mod(a0 + t * da, TWO_PI)))
    return found


def _cyc_close(a, b, L, tol=1e-9) -> bool:
    d = abs(a - b) % L
    return min(d, L - d) <= tol * max(1.0, L)


def build_arrangement(curves: Sequence[OrientedCurve], eps: float = EPS,
                      allow_degenerate: bool = False) -> TorusArrangement:
    """Crossings, arcs and cells of an arrangement of closed curves on T^2.

    Points where three or more strands meet are rejected unless ``allow_degenerate``,
    in which case they become vertices of higher degree.
    """
    curves = list(curves)
    if not allow_degenerate and any(c.multiplicity != 1 for c in curves):
        raise NonSimpleArrangement("arrangement has repeated curves",
                                   curves=[i for i, c in enumerate(curves) if c.multiplicity != 1])
    crossings = _crossings(curves, eps)

    # group crossings sitting at one torus point
    merge = eps * 10 if not allow_degenerate else max(eps * 10, 1e-7)
    parent = list(range(len(crossings)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(len(crossings)):
        pa = crossings[a][4]
        for b in range(a + 1, len(crossings)):
            if np.hypot(*_torus_delta(pa, crossings[b][4])) <= merge:
                if not allow_degenerate:
                    ids = sorted({crossings[a][0], crossings[a][2], crossings[b][0], crossings[b][2]})
                    raise NonSimpleArrangement(f"curves {ids} meet in a point", curves=ids)
                parent[find(b)] = find(a)
    groups: dict[int, list[int]] = defaultdict(list)
    for a in range(len(crossings)):
        groups[find(a)].append(a)

    vertices = []
    for members in groups.values():
        passes: list[tuple[int, float]] = []
        for a in members:
            i, si, j, sj, _ = crossings[a]
            for c, s_ in ((i, si), (j, sj)):
                if not any(c == c2 and _cyc_close(s_, s2, curves[c].length) for c2, s2 in passes):
                    passes.append((c, s_))
        vertices.append(Vertex(position=crossings[members[0]][4], passes=tuple(passes)))
    per_curve: dict[int, list[tuple[float, int, int]]] = defaultdict(list)
    for vid, v in enumerate(vertices):
        for slot, (c, s) in enumerate(v.passes):
            per_curve[c].append((s, vid, slot))
    for ci in range(len(curves)):
        if not per_curve[ci]:
            raise NonSimpleArrangement(f"curve {ci} crosses no other curve", curves=(ci,))

    he_origin: list[int] = []
    he_curve: list[int] = []
    he_poly: list[np.ndarray] = []
    he_lift: list[Vec] = []
    out_at: dict[tuple[int, int], int] = {}   # (vertex, pass slot) -> forward half-edge
    in_at: dict[tuple[int, int], int] = {}    # (vertex, pass slot) -> backward half-edge
    for ci, c in enumerate(curves):
        L = c.length
        passes = sorted(per_curve[ci])
        for k, (s0, v0, slot0) in enumerate(passes):
            s1, v1, slot1 = passes[(k + 1) % len(passes)]
            if k + 1 == len(passes):
                s1 += L
            poly = c.polyline(s0, s1)
            shift = np.round((vertices[v0].position - poly[0]) / TWO_PI)
            poly = poly + TWO_PI * shift
            lift = np.round((poly[-1] - vertices[v1].position) / TWO_PI).astype(int)
            fwd = len(he_origin)
            he_origin += [v0, v1]
            he_curve += [ci, ci]
            he_poly += [poly, poly[::-1] - TWO_PI * lift]
            he_lift += [Vec(int(lift[0]), int(lift[1])), Vec(-int(lift[0]), -int(lift[1]))]
            out_at[(v0, slot0)] = fwd
            in_at[(v1, slot1)] = fwd + 1

    for vid, v in enumerate(vertices):
        rays = []
        for slot in range(len(v.passes)):
            rays.append(out_at[(vid, slot)])
            rays.append(in_at[(vid, slot)])
        angles = []
        for e in rays:
            d = he_poly[e][1] - he_poly[e][0]
            angles.append(math.atan2(d[1], d[0]))
        v.rays = [e for _, e in sorted(zip(angles, rays))]

    n_he = len(he_origin)
    ray_pos = {}
    for vid, v in enumerate(vertices):
        for i, e in enumerate(v.rays):
            ray_pos[e] = (vid, i)
    he_next = [0] * n_he
    for e in range(n_he):
        vid, i = ray_pos[e ^ 1]
        rays = vertices[vid].rays
        he_next[e] = rays[(i - 1) % len(rays)]

    he_face = [-1] * n_he
    cells: list[Cell] = []
    for e0 in range(n_he):
        if he_face[e0] != -1:
            continue
        cycle = []
        e = e0
        while he_face[e] == -1:
            he_face[e] = len(cells)
            cycle.append(e)
            e = he_next[e]
        cells.append(_make_cell(cycle, vertices, he_origin, he_poly, he_next))

    arr = TorusArrangement(curves, vertices, he_origin, he_curve, he_poly, he_lift, cells,
                           he_face, he_next, eps)
    if arr.euler_characteristic() != 0:
        raise NonSimpleArrangement(f"V - E + F = {arr.euler_characteristic()}, cells are not disks")
    return arr


def _make_cell(cycle, vertices, he_origin, he_poly, he_next) -> Cell:
    pts = []
    corners = {}
    cur = he_poly[cycle[0]][0]
    start = cur.copy()
    for e in cycle:
        seg = he_poly[e] + (cur - he_poly[e][0])
        corners[e] = seg[0]
        pts.extend(seg[:-1])
        cur = seg[-1]
    if np.hypot(*(cur - start)) > 1e-6:
        raise NonSimpleArrangement("a complementary cell is not a disk")
    poly = np.array(pts)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    area2 = cr.sum()
    centroid = np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (3 * area2)
    angles = []
    prev = {he_next[e]: e for e in cycle}
    for e in cycle:
        p = prev[e]
        d_out = he_poly[e][1] - he_poly[e][0]
        d_back = he_poly[p][-2] - he_poly[p][-1]
        angles.append(_ccw_angle(d_out, d_back))
    # geometric corners: polyline vertices where the boundary turns
    n_geo = 0
    for k in range(len(poly)):
        a, b, c = poly[k - 1], poly[k], poly[(k + 1) % len(poly)]
        u, w = b - a, c - b
        if abs(u[0] * w[1] - u[1] * w[0]) > 1e-12 * np.hypot(*u) * np.hypot(*w):
            n_geo += 1
    shape = shapely.Polygon(poly)
    rep = np.array(shape.representative_point().coords[0]) if shape.is_valid else centroid
    return Cell(
        halfedges=list(cycle),
        polygon=poly,
        area=0.5 * float(area2),
        centroid=np.mod(centroid, TWO_PI),
        corner_vertices=[he_origin[e] for e in cycle],
        corner_angles=angles,
        geometric_corners=n_geo,
        representative=np.mod(rep, TWO_PI),
        lift_centroid=centroid,
        corner_points=corners,
    )


# --------------------------------------------------------------------------
# Index map


@dataclass(frozen=True)
class IndexMap:
    values: tuple[int, ...]
    calibrated: bool = False

    def __getitem__(self, cid: int) -> int:
        return self.values[cid]

    def __len__(self):
        return len(self.values)

    def shifted(self, s: int, calibrated: bool | None = None) -> "IndexMap":
        return IndexMap(tuple(v + s for v in self.values),
                        self.calibrated if calibrated is None else calibrated)

    def profile(self) -> list[int]:
        return sorted(self.values)

    def max_abs(self) -> int:
        return max(abs(v) for v in self.values)


def base_cell(arr: TorusArrangement) -> int:
    cid = int(arr.locate([[1e-7, 1e-7]])[0])
    origin_inside = cid >= 0 and arr.locate([[-1e-7, -1e-7]])[0] == cid \
        and arr.locate([[1e-7, -1e-7]])[0] == cid and arr.locate([[-1e-7, 1e-7]])[0] == cid
    if origin_inside:
        return cid
    return max(range(arr.F), key=lambda c: arr.cells[c].area)


def relative_index_map(arr: TorusArrangement) -> IndexMap:
    """Index up to a shift: crossing a curve from its left to its right adds one."""
    total = Vec(0, 0)
    for c in arr.curves:
        total = total + c.homology.scale(c.multiplicity)
    if total != (0, 0):
        raise InconsistentCrossing(f"total homology {tuple(total)} is nonzero")
    base = base_cell(arr)
    idx: list[int | None] = [None] * arr.F
    idx[base] = 0
    queue = deque([base])
    while queue:
        cid = queue.popleft()
        for e in arr.cells[cid].halfedges:
            other = arr.he_face[e ^ 1]
            m = arr.curves[arr.he_curve[e]].multiplicity
            val = idx[cid] + (m if arr.is_forward(e) else -m)
            if idx[other] is None:
                idx[other] = val
                queue.append(other)
    for e in range(0, len(arr.he_origin), 2):
        left, right = arr.he_face[e], arr.he_face[e + 1]
        if idx[right] - idx[left] != arr.curves[arr.he_curve[e]].multiplicity:
            raise InconsistentCrossing(f"arc {e // 2}: index jumps by {idx[right] - idx[left]}")
    return IndexMap(tuple(idx), calibrated=False)


def calibrate_by_area(arr: TorusArrangement, idx: IndexMap, tol: float = 1e-6) -> IndexMap:
    """Shift so that the area-weighted mean index vanishes.

    For a dual arrangement whose offsets sum (with the facet directions) to
    ``n pi`` mod 2pi -- exactly the arrangements realised as shells -- this mean
    is an integer and the normalisation agrees with fiber-count calibration.
    """
    mean = sum(c.area * v for c, v in zip(arr.cells, idx.values)) / TWO_PI**2
    s = round(mean)
    if abs(mean - s) > tol:
        raise UncalibratedIndex(f"area-weighted mean index {mean:.6f} is not an integer; the offsets "
                                f"miss the shell class by {shell_class_defect(arr):+.6f} turns")
    return idx.shifted(-s, calibrated=True)


def shell_class_defect(arr: TorusArrangement) -> float:
    """``(sum of line offsets - n pi) / 2pi`` reduced to (-1/2, 1/2]; zero for shells."""
    total = sum(c.multiplicity * (c.offset - math.pi) for c in arr.curves)
    r = (total / TWO_PI) % 1.0
    return r - 1 if r > 0.5 else r


def calibrate_by_reference(arr: TorusArrangement, idx: IndexMap, ref: TorusArrangement,
                           ref_idx: IndexMap) -> IndexMap:
    """Shift ``idx`` to agree with ``ref_idx`` on the majority of cells (used after local moves)."""
    pts = np.array([c.representative for c in arr.cells])
    where = ref.locate(pts)
    votes = Counter(ref_idx.values[w] - v for w, v in zip(where, idx.values) if w >= 0)
    if not votes:
        raise UncalibratedIndex("no cell could be matched with the reference arrangement")
    s, _ = votes.most_common(1)[0]
    return idx.shifted(s, calibrated=ref_idx.calibrated)


# --------------------------------------------------------------------------
# Diagnostics and predicates


@dataclass
class AngleDiagnostics:
    vertex_class: list[int]
    theta_o: list[float]
    theta_n: list[float]
    Theta_o: dict[int, float]
    Theta_n: dict[int, float]

    @property
    def oriented_total(self) -> float:
        return sum(self.theta_o)

    def zero_cell_angle_sum(self) -> float:
        """``Theta_n(-1) + 2 Theta_o(0) + Theta_n(1)``."""
        return self.Theta_n.get(-1, 0.0) + 2 * self.Theta_o.get(0, 0.0) + self.Theta_n.get(1, 0.0)


def angle_diagnostics(arr: TorusArrangement, idx: IndexMap) -> AngleDiagnostics:
    if not arr.simple:
        raise NonSimpleArrangement("angle diagnostics need a simple arrangement")
    classes, th_o, th_n = [], [], []
    To: dict[int, float] = defaultdict(float)
    Tn: dict[int, float] = defaultdict(float)
    for vid in range(arr.V):
        sec = arr.sectors(vid)
        equal = [(c, a) for c, kind, a in sec if kind != "mixed"]
        other = [(c, a) for c, kind, a in sec if kind == "mixed"]
        k = idx.values[equal[0][0]]
        tn, to = equal[0][1], other[0][1]
        classes.append(k)
        th_o.append(to)
        th_n.append(tn)
        To[k] += to
        Tn[k] += tn
    return AngleDiagnostics(classes, th_o, th_n, dict(To), dict(Tn))


def oriented_cells(arr: TorusArrangement) -> list[bool]:
    """A cell is oriented when its boundary arcs all run the same way around it."""
    return [all(arr.is_forward(e) for e in c.halfedges) or
            not any(arr.is_forward(e) for e in c.halfedges) for c in arr.cells]


def is_admissible(arr: TorusArrangement) -> bool:
    ok = oriented_cells(arr)
    return all(ok[arr.he_face[e]] or ok[arr.he_face[e + 1]] for e in range(0, len(arr.he_origin), 2))


@dataclass(frozen=True)
class Theorem1Record:
    zero_cells: int
    double_area: int
    lhs: bool
    rhs: bool

    @property
    def agrees(self) -> bool:
        return self.lhs == self.rhs


def theorem1_predicates(arr: TorusArrangement, idx: IndexMap, polygon: LatticePolygon) -> Theorem1Record:
    if not idx.calibrated:
        raise UncalibratedIndex("zero-cell predicates need a calibrated index")
    zero = sum(1 for v in idx.values if v == 0)
    da = polygon.double_area()
    rhs = idx.max_abs() <= 2 and all(arr.cells[c].is_triangle
                                     for c, v in enumerate(idx.values) if abs(v) == 2)
    return Theorem1Record(zero, da, zero == da, rhs)


@dataclass(frozen=True)
class TierObstruction:
    k: int
    m: int
    obstructed: bool


def tier_obstruction(k: int) -> TierObstruction:
    """Segments of the bottom tier that can meet the first class: at most ceil((k+1)/2) + 1."""
    if k < 2:
        raise ValueError("the tier bound is stated for k >= 2")
    m = -(-(k + 1) // 2) + 1
    return TierObstruction(k, m, m < k)


def vertex_count_formula(curves: Sequence[OrientedCurve]) -> int:
    """Sum of |det| over pairs of geodesics: the number of crossings of a simple arrangement."""
    return sum(abs(a.homology.cross(b.homology))
               for i, a in enumerate(curves) for b in curves[i + 1:])
