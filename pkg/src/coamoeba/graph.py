"""Index graphs, Yang-Baxter moves, dimer models and consistency of curve arrangements."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arrangement import (TWO_PI, IndexMap, TorusArrangement, build_arrangement,
                          calibrate_by_reference, polyline_curve, relative_index_map,
                          theorem1_predicates)
from .errors import (NonSimpleArrangement, NotAYangBaxterSite, NotBipartite, NotDimerizable,
                     UncalibratedIndex)
from .lattice import Vec

WHITE, BLACK, FACE = "white", "black", "face"


# --------------------------------------------------------------------------
# Graph containers


@dataclass
class GraphNode:
    color: str
    cell: int | None = None
    index: int | None = None
    position: tuple[float, float] | None = None


@dataclass
class GraphEdge:
    tail: int
    head: int
    directed: bool
    crossing: int | None = None
    # the embedded path runs from pos(tail) to pos(head) + 2pi * wrap
    wrap: Vec | None = None
    corners: tuple[int, int] | None = None     # arrangement half-edges at tail and head


@dataclass
class MixedGraph:
    """Bicoloured graph with undirected and directed edges, optionally embedded in T^2.

    ``rotation[v]`` lists the darts leaving ``v`` counterclockwise; a dart is
    ``(edge, 0)`` for tail -> head and ``(edge, 1)`` for the reverse.
    """

    nodes: list[GraphNode]
    edges: list[GraphEdge]
    rotation: list[list[tuple[int, int]]] | None = None
    parity: str | None = None

    @property
    def white(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.color == WHITE]

    @property
    def black(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.color == BLACK]

    @property
    def undirected(self) -> list[int]:
        return [k for k, e in enumerate(self.edges) if not e.directed]

    @property
    def directed(self) -> list[int]:
        return [k for k, e in enumerate(self.edges) if e.directed]

    @property
    def V(self) -> int:
        return len(self.nodes)

    @property
    def E(self) -> int:
        return len(self.edges)

    def is_bipartite(self) -> bool:
        return not self.directed and all(
            {self.nodes[e.tail].color, self.nodes[e.head].color} == {WHITE, BLACK} for e in self.edges)

    def node_of_cell(self) -> dict[int, int]:
        return {n.cell: i for i, n in enumerate(self.nodes) if n.cell is not None}

    def dart_source(self, dart) -> int:
        e = self.edges[dart[0]]
        return e.tail if dart[1] == 0 else e.head

    def dart_target(self, dart) -> int:
        e = self.edges[dart[0]]
        return e.head if dart[1] == 0 else e.tail

    def faces(self) -> list[list[tuple[int, int]]]:
        """Face boundaries as dart cycles with the face on the left."""
        if self.rotation is None:
            raise ValueError("graph has no embedding")
        pos = {}
        for v, rot in enumerate(self.rotation):
            for i, d in enumerate(rot):
                pos[d] = (v, i)
        seen = set()
        faces = []
        for v, rot in enumerate(self.rotation):
            for d0 in rot:
                if d0 in seen:
                    continue
                cycle = []
                d = d0
                while d not in seen:
                    seen.add(d)
                    cycle.append(d)
                    w, i = pos[(d[0], 1 - d[1])]
                    d = self.rotation[w][(i - 1) % len(self.rotation[w])]
                faces.append(cycle)
        return faces

    def to_dict(self) -> dict:
        out = {
            "parity": self.parity,
            "vertices": [{"color": n.color, "cell": n.cell, "index": n.index,
                          "position": list(n.position) if n.position is not None else None}
                         for n in self.nodes],
            "edges": [{"tail": e.tail, "head": e.head,
                       "type": "directed" if e.directed else "undirected",
                       "crossing": e.crossing,
                       "wrap": list(e.wrap) if e.wrap is not None else None}
                      for e in self.edges],
        }
        if self.rotation is not None:
            out["rotation"] = [[list(d) for d in rot] for rot in self.rotation]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MixedGraph":
        nodes = [GraphNode(n["color"], n.get("cell"), n.get("index"),
                           tuple(n["position"]) if n.get("position") is not None else None)
                 for n in data["vertices"]]
        edges = [GraphEdge(e["tail"], e["head"], e["type"] == "directed", e.get("crossing"),
                           Vec(*e["wrap"]) if e.get("wrap") is not None else None)
                 for e in data["edges"]]
        rot = data.get("rotation")
        rotation = [[tuple(d) for d in r] for r in rot] if rot is not None else None
        return cls(nodes, edges, rotation, data.get("parity"))


@dataclass
class DimerModel:
    """A bipartite graph embedded in T^2; undirected edges are stored white -> black."""

    graph: MixedGraph
    faces: list[list[tuple[int, int]]] = field(default_factory=list)
    arrangement: TorusArrangement | None = None
    index: IndexMap | None = None
    face_cells: list[int | None] = field(default_factory=list)

    def __post_init__(self):
        if not self.graph.is_bipartite():
            raise NotBipartite("dimer models need a bipartite graph without directed edges")
        for e in self.graph.edges:
            if self.graph.nodes[e.tail].color != WHITE:
                raise NotBipartite("dimer edges must be stored white -> black")
        if not self.faces:
            self.faces = self.graph.faces()

    @property
    def V(self) -> int:
        return self.graph.V

    @property
    def E(self) -> int:
        return self.graph.E

    @property
    def F(self) -> int:
        return len(self.faces)

    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @property
    def white(self) -> list[int]:
        return self.graph.white

    @property
    def black(self) -> list[int]:
        return self.graph.black

    def mirrored(self) -> "DimerModel":
        """Image under theta -> -theta: rotations reverse and wraps change sign."""
        g = self.graph
        nodes = [GraphNode(n.color, n.cell, n.index,
                           None if n.position is None else
                           tuple(float(x) for x in np.mod(-np.asarray(n.position), TWO_PI)))
                 for n in g.nodes]
        edges = [GraphEdge(e.tail, e.head, e.directed, e.crossing,
                           None if e.wrap is None else -e.wrap) for e in g.edges]
        rotation = [list(reversed(r)) for r in g.rotation]
        return DimerModel(MixedGraph(nodes, edges, rotation, g.parity))

    def to_dict(self) -> dict:
        d = self.graph.to_dict()
        d["faces"] = [[list(x) for x in f] for f in self.faces]
        d["counts"] = {"V": self.V, "E": self.E, "F": self.F}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DimerModel":
        data = json.loads(text)
        g = MixedGraph.from_dict(data)
        faces = [[tuple(x) for x in f] for f in data.get("faces", [])]
        return cls(g, faces)


# --------------------------------------------------------------------------
# The index graph


def _node_position(arr: TorusArrangement, cid: int) -> tuple[tuple[float, float], np.ndarray]:
    lc = arr.cells[cid].lift_centroid
    shift = np.floor(lc / TWO_PI)
    pos = lc - TWO_PI * shift
    return (float(pos[0]), float(pos[1])), shift


def _wrap(arr: TorusArrangement, p_cell: int, p_he: int, q_cell: int, q_he: int) -> Vec:
    _, a_p = _node_position(arr, p_cell)
    _, a_q = _node_position(arr, q_cell)
    qp = arr.cells[p_cell].corner_points[p_he]
    qq = arr.cells[q_cell].corner_points[q_he]
    w = a_q - a_p + (qp - qq) / TWO_PI
    r = np.round(w)
    if np.abs(w - r).max() > 1e-6:
        raise NonSimpleArrangement("crossing lifts disagree")
    return Vec(int(r[0]), int(r[1]))


def _colour(value: int) -> str | None:
    if value % 4 == 1:
        return WHITE
    if value % 4 == 3:
        return BLACK
    return None


def index_graph(arr: TorusArrangement, idx: IndexMap, parity: str = "odd") -> MixedGraph:
    """The mixed graph read off from the index map.

    Odd parity: white vertices on cells of index 1 mod 4, black on -1 mod 4.  At a
    crossing whose two equal-index corners are odd, a directed edge runs from the
    corner both arcs enter to the corner both arcs leave; otherwise the two other
    corners (indices k - 1 and k + 1) are joined by an undirected edge.  The even
    variant is the odd one applied to ``index - 1``.
    """
    if not idx.calibrated:
        raise UncalibratedIndex("index graph needs a calibrated index")
    if not arr.simple:
        raise NonSimpleArrangement("index graph needs a simple arrangement")
    if parity not in ("odd", "even"):
        raise ValueError(f"parity must be 'odd' or 'even', not {parity!r}")
    shift = 0 if parity == "odd" else -1
    values = [v + shift for v in idx.values]

    nodes: list[GraphNode] = []
    node_of: dict[int, int] = {}
    for cid, v in enumerate(values):
        col = _colour(v)
        if col is not None:
            pos, _ = _node_position(arr, cid)
            node_of[cid] = len(nodes)
            nodes.append(GraphNode(col, cid, idx.values[cid], pos))

    edges: list[GraphEdge] = []
    attach: dict[int, list[tuple[int, int]]] = {}   # corner half-edge -> dart leaving that node
    for vid in range(arr.V):
        rays = arr.vertices[vid].rays
        sec = arr.sectors(vid)
        eq = [i for i, (_, kind, _) in enumerate(sec) if kind != "mixed"]
        mixed = [i for i, (_, kind, _) in enumerate(sec) if kind == "mixed"]
        k = values[sec[eq[0]][0]]
        if k % 2:
            src = next(i for i in eq if sec[i][1] == "in")
            dst = next(i for i in eq if sec[i][1] == "out")
            directed = True
        else:
            a, b = mixed
            if _colour(values[sec[a][0]]) == WHITE:
                src, dst = a, b
            else:
                src, dst = b, a
            directed = False
        pc, qc = sec[src][0], sec[dst][0]
        eid = len(edges)
        edges.append(GraphEdge(node_of[pc], node_of[qc], directed, vid,
                               _wrap(arr, pc, rays[src], qc, rays[dst]), (rays[src], rays[dst])))
        attach[rays[src]] = (eid, 0)
        attach[rays[dst]] = (eid, 1)

    rotation = []
    for n in nodes:
        rotation.append([attach[e] for e in arr.cells[n.cell].halfedges if e in attach])
    return MixedGraph(nodes, edges, rotation, parity)


def quiver_orientation(dimer: DimerModel) -> MixedGraph:
    """Dual graph on faces; each dual edge is directed with the black end of its edge on the left."""
    if not dimer.graph.is_bipartite():
        raise NotBipartite("quiver needs a bipartite graph")
    face_of = {}
    for f, cyc in enumerate(dimer.faces):
        for d in cyc:
            face_of[d] = f
    nodes = [GraphNode(FACE, dimer.face_cells[f] if f < len(dimer.face_cells) else None)
             for f in range(dimer.F)]
    edges = []
    for k, e in enumerate(dimer.graph.edges):
        # the face on the left of white -> black is the tail
        edges.append(GraphEdge(face_of[(k, 0)], face_of[(k, 1)], True, e.crossing))
    return MixedGraph(nodes, edges, None, "quiver")


# --------------------------------------------------------------------------
# Yang-Baxter modification


def yang_baxter_sites(arr: TorusArrangement, idx: IndexMap) -> list[int]:
    """Triangle cells of index +-2, ordered lexicographically by centroid."""
    sites = [c for c, v in enumerate(idx.values) if abs(v) == 2 and arr.cells[c].is_triangle]
    return sorted(sites, key=lambda c: tuple(np.round(arr.cells[c].centroid, 9)))


@dataclass
class YangBaxterResult:
    arrangement: TorusArrangement
    index: IndexMap
    curve: int
    new_cell: int
    eta: float


def _detour_curve(arr: TorusArrangement, cell: int, side: int, eta: float, shrink: float = 0.3):
    """Curve ``side`` of triangle ``cell`` rerouted around the opposite corner."""
    tri = arr.cells[cell]
    e = tri.halfedges[side]
    ci = arr.he_curve[e]
    curve = arr.curves[ci]
    others = [arr.he_curve[x] for x in tri.halfedges if x != e]
    if ci in others or others[0] == others[1]:
        raise NotAYangBaxterSite("triangle sides must lie on three distinct curves")
    # corners in the triangle's own lift
    u_start = tri.corner_points[e]
    u_end = tri.corner_points[arr.he_next[e]]
    v = tri.corner_points[arr.he_next[arr.he_next[e]]]
    arc = e if arr.is_forward(e) else e ^ 1
    first_v, second_v = arr.he_origin[arc], arr.he_origin[arc ^ 1]
    L = curve.length
    s_first = next(s for c, s in arr.vertices[first_v].passes if c == ci)
    s_second = next(s for c, s in arr.vertices[second_v].passes if c == ci)
    if s_second <= s_first:
        s_second += L
    # gaps to the neighbouring crossings on this curve
    params = sorted(s for vv in arr.vertices for c, s in vv.passes if c == ci)
    before = min((s_first - s) % L or L for s in params)
    after = min((s - s_second) % L or L for s in params)
    ds = shrink * min(before, after, s_second - s_first)
    s_a, s_b = s_first - ds, s_second + ds
    if s_a < 0:
        s_a += L
        s_b += L
    lifted_first = curve.point_at(s_first)
    shift = np.round((lifted_first - (u_start if arr.is_forward(e) else u_end)) / TWO_PI) * TWO_PI
    m = 0.5 * (u_start + u_end)
    w = v + eta * (v - m) + shift
    path = curve.polyline(s_b, s_a + L)
    w = w + TWO_PI * np.array(curve.homology, dtype=float)
    pts = np.vstack([path, w[None, :]])
    # the new triangle lies between v and the detour corner
    probe = np.mod(v + 0.5 * eta * (v - m), TWO_PI)
    return ci, polyline_curve(pts, curve.homology, curve.facet), probe


def apply_yang_baxter(arr: TorusArrangement, idx: IndexMap, cell: int,
                      etas=(1.0, 0.5, 0.25, 0.1, 0.03, 0.01)) -> YangBaxterResult:
    """Push one side of an index +-2 triangle across the opposite corner.

    The rerouted arrangement keeps every pairwise crossing count; the triangle is
    replaced by one of odd index.  Sides and detour sizes are tried in turn until
    the move validates.
    """
    if cell not in yang_baxter_sites(arr, idx):
        raise NotAYangBaxterSite(f"cell {cell} is not a triangle of index +-2")
    before = arr.pair_crossing_counts()
    n_sites = len(yang_baxter_sites(arr, idx))
    target = -1 if idx.values[cell] == 2 else 1
    last_error = None
    for eta, shrink, side in itertools.product(etas, (0.3, 0.05), range(3)):
        try:
            ci, new_curve, probe = _detour_curve(arr, cell, side, eta, shrink)
            curves = list(arr.curves)
            curves[ci] = new_curve
            new = build_arrangement(curves, eps=arr.eps)
            if new.pair_crossing_counts() != before:
                last_error = "crossing counts changed"
                continue
            rel = relative_index_map(new)
            new_idx = calibrate_by_reference(new, rel, arr, idx)
            q = new.locate([probe])[0]
            if q < 0 or new_idx.values[q] != target or not new.cells[q].is_triangle:
                last_error = "triangle did not flip"
                continue
            if len(yang_baxter_sites(new, new_idx)) != n_sites - 1:
                last_error = "move created new sites"
                continue
            return YangBaxterResult(new, new_idx, ci, int(q), eta)
        except (NonSimpleArrangement, UncalibratedIndex) as exc:
            last_error = str(exc)
    raise NotAYangBaxterSite(f"no valid detour for cell {cell}: {last_error}")


# --------------------------------------------------------------------------
# Dimers


def dimerize(arr: TorusArrangement, idx: IndexMap, polygon=None) -> DimerModel:
    """Resolve every index +-2 triangle, then read the odd index graph as a dimer model."""
    if not idx.calibrated:
        raise UncalibratedIndex("dimerize needs a calibrated index")
    if idx.max_abs() > 2 or any(abs(v) == 2 and not arr.cells[c].is_triangle
                                for c, v in enumerate(idx.values)):
        raise NotDimerizable("needs |index| <= 2 with every index +-2 cell a triangle")
    while True:
        sites = yang_baxter_sites(arr, idx)
        if not sites:
            break
        res = apply_yang_baxter(arr, idx, sites[0])
        arr, idx = res.arrangement, res.index
    g = index_graph(arr, idx, "odd")
    if g.directed:
        raise NotDimerizable(f"{len(g.directed)} directed edges remain")
    dimer = DimerModel(g, arrangement=arr, index=idx)
    dimer.face_cells = _face_cells(arr, g, dimer.faces)
    return dimer


def _face_cells(arr: TorusArrangement, g: MixedGraph, faces) -> list[int]:
    """The even cell each face of the odd index graph surrounds."""
    out = []
    for cyc in faces:
        eid, end = cyc[0]
        ray = g.edges[eid].corners[end]
        rays = arr.vertices[arr.he_origin[ray]].rays
        i = rays.index(ray)
        # a dart leaves corner i towards corner i + 2; corner i - 1 is on its left
        out.append(arr.he_face[rays[(i - 1) % 4]])
    return out


# --------------------------------------------------------------------------
# Consistency conditions


def _in_lattice(v, gens) -> bool:
    """Is the integer vector ``v`` in the lattice spanned by ``gens`` (at most two vectors)?"""
    gens = [Vec(*g) for g in gens if tuple(g) != (0, 0)]
    v = Vec(*v)
    if not gens:
        return v == (0, 0)
    if len(gens) == 2 and gens[0].cross(gens[1]) != 0:
        a, b = gens
        det = a.cross(b)
        x = Fraction(v.cross(b), det)
        y = Fraction(a.cross(v), det)
        return x.denominator == 1 and y.denominator == 1
    p = gens[0]
    g = p.content()
    p = Vec(p.x // g, p.y // g)
    mults = [(q.x // p.x) if p.x else (q.y // p.y) for q in gens]
    step = 0
    for m in mults:
        step = math.gcd(step, abs(m))
    if v.cross(p) != 0:
        return False
    t = (v.x // p.x) if p.x else (v.y // p.y)
    return t % step == 0


@dataclass
class ConsistencyReport:
    consistent: bool
    failed: str | None = None
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.consistent


def crossing_class(arr: TorusArrangement, vid: int):
    """(curve i, curve j, lift offset k, sign) for a crossing; ``X_i(s_i) - X_j(s_j) = 2pi k``."""
    (ci, si), (cj, sj) = arr.vertices[vid].passes
    k = np.round((arr.curves[ci].point_at(si) - arr.curves[cj].point_at(sj)) / TWO_PI).astype(int)
    ti, tj = arr.curves[ci].tangent_at(si), arr.curves[cj].tangent_at(sj)
    sign = 1 if ti[0] * tj[1] - ti[1] * tj[0] > 0 else -1
    return ci, cj, Vec(int(k[0]), int(k[1])), sign


def is_consistent(target) -> ConsistencyReport:
    """Conditions a)-c) on the curves of an arrangement (or of a dimer's arrangement).

    a) every curve has nonzero homology; b) no curve meets itself in the universal
    cover; c) no two lifted curves cross twice in the same direction.
    """
    arr = target.arrangement if isinstance(target, DimerModel) else target
    if arr is None:
        raise ValueError("dimer carries no arrangement")
    bad = [i for i, c in enumerate(arr.curves) if c.homology == (0, 0)]
    if bad:
        return ConsistencyReport(False, "a", bad)
    self_hits = []
    groups: dict[tuple[int, int], list[tuple[Vec, int, int]]] = {}
    for vid in range(arr.V):
        ci, cj, k, sign = crossing_class(arr, vid)
        hi = arr.curves[ci].homology
        if ci == cj:
            if _in_lattice(k, [hi]):
                self_hits.append(vid)
            continue
        groups.setdefault((ci, cj), []).append((k, sign, vid))
    if self_hits:
        return ConsistencyReport(False, "b", self_hits)
    for (ci, cj), items in groups.items():
        gens = [arr.curves[ci].homology, arr.curves[cj].homology]
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                ka, sa, va = items[a]
                kb, sb, vb = items[b]
                if sa == sb and _in_lattice(ka - kb, gens):
                    return ConsistencyReport(False, "c", [(ci, cj, va, vb)])
    return ConsistencyReport(True)


# --------------------------------------------------------------------------
# Combinatorial coamoeba


@dataclass
class CombinatorialCoamoeba:
    cells: list[int]                    # closures of these cells form D
    zero_cells: list[int]
    components: list[list[int]]         # zero cells grouped into complement components

    @property
    def n_components(self) -> int:
        return len(self.components)


def combinatorial_coamoeba(arr: TorusArrangement, idx: IndexMap) -> CombinatorialCoamoeba:
    if not idx.calibrated:
        raise UncalibratedIndex("combinatorial coamoeba needs a calibrated index")
    zero = [c for c, v in enumerate(idx.values) if v == 0]
    parent = {c: c for c in zero}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for e in range(0, len(arr.he_origin), 2):
        a, b = arr.he_face[e], arr.he_face[e + 1]
        if a in parent and b in parent:
            parent[find(a)] = find(b)
    comps: dict[int, list[int]] = {}
    for c in zero:
        comps.setdefault(find(c), []).append(c)
    nonzero = [c for c, v in enumerate(idx.values) if v != 0]
    return CombinatorialCoamoeba(nonzero, zero, sorted(comps.values()))


def complement_components(arr: TorusArrangement, idx: IndexMap) -> int:
    return combinatorial_coamoeba(arr, idx).n_components


def check_dimerizable(arr: TorusArrangement, idx: IndexMap, polygon) -> bool:
    return theorem1_predicates(arr, idx, polygon).rhs
