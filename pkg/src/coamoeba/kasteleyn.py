"""Perfect matchings, Kasteleyn signs and the characteristic polynomial of a dimer model."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import networkx as nx

from .errors import NotBipartite, NoValidSignAssignment, ZeroDeterminant
from .graph import DimerModel
from .lattice import LatticePolygon
from .poly import LaurentPolynomial2, determinant


def _check(dimer: DimerModel):
    if not dimer.graph.is_bipartite():
        raise NotBipartite("Kasteleyn theory needs a bipartite graph")


def perfect_matching_exists(dimer: DimerModel) -> bool:
    _check(dimer)
    W, B = dimer.white, dimer.black
    if len(W) != len(B):
        return False
    g = nx.Graph()
    g.add_nodes_from(("w", i) for i in W)
    g.add_nodes_from(("b", j) for j in B)
    g.add_edges_from((("w", e.tail), ("b", e.head)) for e in dimer.graph.edges)
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=[("w", i) for i in W])
    return len(matching) // 2 == len(W)


def face_sign_target(length: int) -> int:
    """Required sign product around a face with ``length = 2k`` edges: ``(-1)^(k+1)``."""
    return -1 if (length // 2) % 2 == 0 else 1


def _face_edges(dimer: DimerModel) -> list[list[int]]:
    """Edges of each face counted once; an edge seen twice in a face cancels out."""
    out = []
    for cyc in dimer.faces:
        seen: dict[int, int] = {}
        for eid, _ in cyc:
            seen[eid] = seen.get(eid, 0) + 1
        out.append([e for e, n in seen.items() if n % 2])
    return out


def sign_violations(dimer: DimerModel, signs) -> list[int]:
    bad = []
    for f, (cyc, edges) in enumerate(zip(dimer.faces, _face_edges(dimer))):
        prod = 1
        for e in edges:
            prod *= signs[e]
        if prod != face_sign_target(len(cyc)):
            bad.append(f)
    return bad


@dataclass
class KasteleynSigns:
    signs: list[int]
    twist: tuple[int, int]
    free_edges: tuple[int, ...]


def kasteleyn_signs(dimer: DimerModel, twist: tuple[int, int] | None = None) -> KasteleynSigns:
    """Edge signs with the prescribed product around every face.

    A spanning tree gets +1; the faces are then solved leaf-first along a dual
    spanning tree built from the remaining edges.  The two edges left over carry
    the homology twist ``(+-1, +-1)``; the first twist that validates is used.
    """
    _check(dimer)
    g = dimer.graph
    n_e = g.E
    # primal spanning tree (BFS)
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.V)}
    for k, e in enumerate(g.edges):
        adj[e.tail].append((e.head, k))
        adj[e.head].append((e.tail, k))
    in_tree = [False] * n_e
    seen = {0} if g.V else set()
    queue = deque([0] if g.V else [])
    while queue:
        v = queue.popleft()
        for u, k in adj[v]:
            if u not in seen:
                seen.add(u)
                in_tree[k] = True
                queue.append(u)
    if len(seen) != g.V:
        raise NoValidSignAssignment("graph is disconnected", faces=[])

    face_edges = _face_edges(dimer)
    faces_of: dict[int, list[int]] = {k: [] for k in range(n_e)}
    for f, edges in enumerate(face_edges):
        for k in edges:
            faces_of[k].append(f)
    # dual spanning tree on the non-tree edges that separate two faces
    dual_adj: dict[int, list[tuple[int, int]]] = {f: [] for f in range(dimer.F)}
    for k in range(n_e):
        if not in_tree[k] and len(faces_of[k]) == 2:
            f1, f2 = faces_of[k]
            dual_adj[f1].append((f2, k))
            dual_adj[f2].append((f1, k))
    root = 0
    parent_edge: dict[int, int | None] = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for h, k in dual_adj[f]:
            if h not in parent_edge:
                parent_edge[h] = k
                order.append(h)
                queue.append(h)
    if len(parent_edge) != dimer.F:
        raise NoValidSignAssignment("dual graph is disconnected", faces=[])
    cotree = {k for k in parent_edge.values() if k is not None}
    free = tuple(k for k in range(n_e) if not in_tree[k] and k not in cotree)

    twists = [twist] if twist is not None else list(itertools.product((1, -1), repeat=2))
    for tw in twists:
        signs = [1] * n_e
        for k, t in zip(free, itertools.chain(tw, itertools.repeat(1))):
            signs[k] = t
        for f in reversed(order[1:]):
            k = parent_edge[f]
            prod = 1
            for e in face_edges[f]:
                if e != k:
                    prod *= signs[e]
            signs[k] = prod * face_sign_target(len(dimer.faces[f]))
        if not sign_violations(dimer, signs):
            return KasteleynSigns(signs, tw, free)
    raise NoValidSignAssignment("no twist satisfies every face",
                                faces=sign_violations(dimer, signs))


def kasteleyn_matrix(dimer: DimerModel, signs=None, weights=None) -> list[list[LaurentPolynomial2]]:
    """``K[w][b] = sum sign * weight * z^a w^b`` over edges.

    ``(a, b) = M(wrap)`` with ``wrap`` the white-to-black homology of the edge.
    """
    if signs is None:
        signs = kasteleyn_signs(dimer).signs
    W, B = dimer.white, dimer.black
    if len(W) != len(B):
        raise NotBipartite(f"{len(W)} white and {len(B)} black vertices")
    row = {v: i for i, v in enumerate(W)}
    col = {v: i for i, v in enumerate(B)}
    K = [[LaurentPolynomial2() for _ in B] for _ in W]
    for k, e in enumerate(dimer.graph.edges):
        wt = 1 if weights is None else weights[k]
        # curves of the shell have homology M delta, so exponents pair with M(wrap)
        a, b = e.wrap.y, -e.wrap.x
        K[row[e.tail]][col[e.head]] = K[row[e.tail]][col[e.head]] + \
            LaurentPolynomial2.monomial(a, b, signs[k] * wt)
    return K


def characteristic_polynomial(dimer: DimerModel, signs=None, weights=None) -> LaurentPolynomial2:
    return determinant(kasteleyn_matrix(dimer, signs, weights))


def characteristic_polygon(dimer: DimerModel, signs=None) -> LatticePolygon:
    """Newton polygon of the characteristic polynomial, lexicographic-minimal vertex at the origin."""
    p = characteristic_polynomial(dimer, signs)
    if not p:
        raise ZeroDeterminant("characteristic polynomial vanishes")
    return p.newton_polygon().canonical()


def count_perfect_matchings(dimer: DimerModel) -> int:
    """Brute-force count of perfect matchings of the fundamental domain."""
    W, B = dimer.white, dimer.black
    if len(W) != len(B):
        return 0
    by_white: dict[int, list[int]] = {w: [] for w in W}
    for e in dimer.graph.edges:
        by_white[e.tail].append(e.head)
    total = 0

    def rec(i, used):
        nonlocal total
        if i == len(W):
            total += 1
            return
        for b in by_white[W[i]]:
            if b not in used:
                used.add(b)
                rec(i + 1, used)
                used.discard(b)
    rec(0, set())
    return total


def same_polygon(p: LatticePolygon, q: LatticePolygon) -> bool:
    """Equality up to lattice translation."""
    return p.canonical().vertices == q.canonical().vertices

