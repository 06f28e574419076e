import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from coamoeba.arrangement import (build_arrangement, calibrate_by_area, dual_arrangement, geodesic,
                                  is_admissible, polyline_curve, relative_index_map)
from coamoeba.errors import NotAYangBaxterSite, NotBipartite, NotDimerizable, UncalibratedIndex
from coamoeba.graph import (DimerModel, apply_yang_baxter, combinatorial_coamoeba,
                            complement_components, dimerize, index_graph, is_consistent,
                            quiver_orientation, yang_baxter_sites)
from coamoeba.harness import random_dual_arrangement
from coamoeba.kasteleyn import perfect_matching_exists
from coamoeba.lattice import SIMPLEX, SQUARE, newton_polygon, pentagon
from coamoeba.shell import shell
from conftest import DILATED, HARNACK, index_two_arrangements

TWO_PI = 2 * math.pi
PI, HALF = Fraction(1), Fraction(1, 2)


def calibrated(arr):
    return arr, calibrate_by_area(arr, relative_index_map(arr))


@pytest.fixture
def simplex():
    return calibrated(dual_arrangement(SIMPLEX, [PI, PI, PI]))


@pytest.fixture
def square():
    return calibrated(dual_arrangement(SQUARE, [PI, HALF, HALF, PI]))


def test_square_odd_graph(square):
    g = index_graph(*square)
    assert len(g.white) == 1 and len(g.black) == 1
    assert len(g.undirected) == 4 and not g.directed
    assert len(g.faces()) == 2


def test_simplex_odd_graph(simplex):
    g = index_graph(*simplex)
    assert (len(g.white), len(g.black), len(g.undirected), len(g.directed)) == (1, 1, 3, 0)
    assert len(g.faces()) == 1


def test_square_even_graph_is_the_quiver(square):
    even = index_graph(*square, parity="even")
    assert even.V == 2 and even.E == 4 and len(even.directed) == 4
    quiver = quiver_orientation(dimerize(*square))
    arr = square[0]
    # both graphs have one edge per crossing; compare them crossing by crossing
    by_crossing = {e.crossing: (even.nodes[e.tail].cell, even.nodes[e.head].cell) for e in even.edges}
    for e in quiver.edges:
        assert by_crossing[e.crossing] == (quiver.nodes[e.tail].cell, quiver.nodes[e.head].cell)
    assert len(by_crossing) == arr.V


def test_simplex_quiver_has_three_loops(simplex):
    q = quiver_orientation(dimerize(*simplex))
    assert q.V == 1 and q.E == 3
    assert all(e.tail == e.head == 0 for e in q.edges)
    d = dimerize(*simplex)
    assert len({tuple(e.wrap) for e in d.graph.edges}) == 3


def test_mirroring_reverses_the_quiver(square):
    d = dimerize(*square)
    q = quiver_orientation(d)
    qm = quiver_orientation(d.mirrored())
    for e, em in zip(q.edges, qm.edges):
        assert (em.tail, em.head) == (e.head, e.tail)


def test_graph_requires_calibration(square):
    arr, idx = square
    with pytest.raises(UncalibratedIndex):
        index_graph(arr, relative_index_map(arr))


def test_no_sites_on_admissible_shells(simplex, square):
    assert yang_baxter_sites(*simplex) == []
    assert yang_baxter_sites(*square) == []


def test_yang_baxter_move_on_dilated_simplex():
    arr, idx = index_two_arrangements(1, seed=1)[0]
    [site] = yang_baxter_sites(arr, idx)[:1]
    before = index_graph(arr, idx)
    corners = {arr.he_origin[e] for e in arr.cells[site].halfedges}
    cycle = [before.edges[k] for k in before.directed if before.edges[k].crossing in corners]
    assert len(cycle) == 3
    assert {e.tail for e in cycle} == {e.head for e in cycle}

    res = apply_yang_baxter(arr, idx, site)
    assert res.arrangement.pair_crossing_counts() == arr.pair_crossing_counts()
    after = index_graph(res.arrangement, res.index)
    node = after.node_of_cell()[res.new_cell]
    star = [e for e in after.edges if node in (e.tail, e.head)]
    assert len(star) == 3 and not any(e.directed for e in star)
    assert len(after.directed) == len(before.directed) - 3
    old_colour = before.nodes[cycle[0].tail].color
    assert after.nodes[node].color != old_colour
    assert {after.nodes[e.head if e.tail == node else e.tail].color for e in star} == {old_colour}


def test_move_refuses_non_sites(square):
    with pytest.raises(NotAYangBaxterSite):
        apply_yang_baxter(*square, 0)


def test_moves_reach_a_fixpoint():
    for arr, idx in index_two_arrangements(4, seed=2):
        while yang_baxter_sites(arr, idx):
            res = apply_yang_baxter(arr, idx, yang_baxter_sites(arr, idx)[0])
            arr, idx = res.arrangement, res.index
        assert not index_graph(arr, idx).directed
        assert is_admissible(arr)


def test_dimer_examples(simplex, square):
    d = dimerize(*square)
    assert (d.V, d.E, d.F) == (2, 4, 2)
    assert sorted(square[1].values[c] for c in d.face_cells) == [0, 0]
    d = dimerize(*simplex)
    assert (d.V, d.E, d.F) == (2, 3, 1)


def test_dimerize_rejects_large_index():
    rng = np.random.default_rng(0)
    polygon = newton_polygon([(0, 0), (4, 0), (0, 4)])
    for _ in range(50):
        arr, idx = calibrated(random_dual_arrangement(polygon, rng))
        if idx.max_abs() > 2:
            with pytest.raises(NotDimerizable):
                dimerize(arr, idx)
            return
    pytest.fail("no arrangement with |index| > 2 in 50 draws")


def test_dimer_json_round_trip(square):
    d = dimerize(*square)
    back = DimerModel.from_json(d.to_json())
    assert (back.V, back.E, back.F) == (d.V, d.E, d.F)
    assert [tuple(e.wrap) for e in back.graph.edges] == [tuple(e.wrap) for e in d.graph.edges]


def test_dimer_needs_bipartite(simplex):
    arr, idx = index_two_arrangements(1, seed=1)[0]
    with pytest.raises(NotBipartite):
        DimerModel(index_graph(arr, idx))


def test_consistency_of_dual_arrangements(simplex, square):
    assert is_consistent(simplex[0]) and is_consistent(square[0])


def test_null_homologous_loop_fails_a():
    loop = polyline_curve([(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0), (1.0, 1.0)], (0, 0))
    arr = dual_arrangement(SQUARE, [PI, HALF, HALF, PI])
    report = is_consistent(build_arrangement(list(arr.curves) + [loop]))
    assert not report and report.failed == "a"


def test_self_crossing_fails_b():
    curve = polyline_curve([(0, 1), (3, 1), (3, 2), (2, 2), (2, 0.5), (TWO_PI, 1)], (1, 0))
    report = is_consistent(build_arrangement([curve, geodesic((1, 0), 1.0)]))
    assert not report and report.failed == "b"


def test_double_crossing_fails_c():
    wiggle = polyline_curve([(4, 0), (4, 2), (5, 2), (5, 0.5), (5.5, 0.5), (5.5, TWO_PI - 0.5),
                             (4, TWO_PI)], (0, 1))
    report = is_consistent(build_arrangement([geodesic((0, 1), 1.0), wiggle]))
    assert not report and report.failed == "c"


def test_complement_components_examples(simplex, square):
    assert complement_components(*simplex) == 1
    assert complement_components(*square) == 2
    arr = shell(HARNACK, allow_degenerate=True)
    cc = combinatorial_coamoeba(*calibrated(arr))
    assert cc.n_components == 2 < HARNACK.newton_polygon().double_area()


POLYGONS = [SIMPLEX, SQUARE, DILATED, newton_polygon([(0, 0), (2, 0), (1, 1), (0, 1)]), pentagon(1),
            pentagon(2)]


@given(st.integers(0, len(POLYGONS) - 1), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_graph_invariants(i, seed):
    polygon = POLYGONS[i]
    arr, idx = calibrated(random_dual_arrangement(polygon, np.random.default_rng(seed)))
    for parity in ("odd", "even"):
        g = index_graph(arr, idx, parity)
        assert g.E == arr.V
        for e in g.edges:
            same = g.nodes[e.tail].color == g.nodes[e.head].color
            assert same == e.directed
        if parity == "odd":
            assert (not g.directed) == is_admissible(arr) == (idx.max_abs() <= 1)
    zero = sum(1 for v in idx.values if v == 0)
    assert complement_components(arr, idx) <= zero <= polygon.double_area()
    assert is_consistent(arr)
    if idx.max_abs() <= 2 and all(arr.cells[c].is_triangle for c, v in enumerate(idx.values) if abs(v) == 2):
        d = dimerize(arr, idx)
        assert d.graph.is_bipartite() and perfect_matching_exists(d)
        assert d.euler_characteristic() == 0 and d.F == d.E - d.V
        assert d.F == sum(1 for v in d.index.values if v == 0)
        assert is_consistent(d)
        assert d.arrangement.pair_crossing_counts() == arr.pair_crossing_counts()
