import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from coamoeba.harness import CIRCUIT_SHAPES, circuit_corpus, random_circuit
from coamoeba.numeric import (arg_bijection_check, circuit_center, critical_points, fiber_count,
                              sample_coamoeba, translation_order)
from coamoeba.poly import SupportedPolynomial
from coamoeba.shell import shell
from conftest import LINE, SQUARE_POLY

TWO_PI = 2 * math.pi


def test_line_samples_avoid_the_hexagon(line_shell):
    arr, idx = line_shell
    sample = sample_coamoeba(LINE, arr=arr)
    hexagon = next(c for c, v in enumerate(idx.values) if v == 0)
    stray = sample.points[sample.cells == hexagon]
    assert all(arr.distance_to_curves(p) < 1e-2 for p in stray)
    assert sample.hits[[c for c in range(arr.F) if c != hexagon]].min() > 0


def test_square_zero_cells_keep_an_uncovered_core(square_shell):
    arr, idx = square_shell
    sample = sample_coamoeba(SQUARE_POLY, arr=arr)
    for c, v in enumerate(idx.values):
        inside = sample.points[sample.cells == c]
        if v == 0:
            # the coamoeba may enter a zero cell, but only in a band along the shell
            assert all(arr.distance_to_curves(p) < 0.5 for p in inside[::5])
            assert arr.distance_to_curves(arr.cells[c].centroid) > 0.5
            assert fiber_count(SQUARE_POLY, arr.cells[c].centroid) == 0
        else:
            assert len(inside) > 0


def _nearest(points, queries):
    d = np.abs(queries[:, None, :] - points[None, :, :])
    d = np.minimum(d, TWO_PI - d)
    return np.sqrt((d ** 2).sum(axis=2)).min(axis=1)


def test_real_coefficients_give_a_symmetric_cloud():
    f = SupportedPolynomial({(0, 0): 1.0, (1, 0): -0.7, (0, 1): 2.0, (1, 1): 0.4})
    pts = sample_coamoeba(f, n=96).points
    rng = np.random.default_rng(0)
    q = np.mod(-pts[rng.choice(len(pts), 300, replace=False)], TWO_PI)
    assert _nearest(pts, q).max() < 1e-9


def test_swapping_variables_swaps_the_coamoeba():
    f = SupportedPolynomial({(0, 0): 1, (2, 0): 0.3 - 1j, (0, 1): 2j, (1, 1): -0.5})
    g = SupportedPolynomial({(b, a): c for (a, b), c in f.terms.items()})
    arr_g = shell(g)
    own = sample_coamoeba(g, arr=arr_g).hits
    swapped = arr_g.locate(sample_coamoeba(f).points[:, ::-1])
    hits = np.bincount(swapped[swapped >= 0], minlength=arr_g.F)
    assert [h == 0 for h in hits] == [h == 0 for h in own]


def test_fiber_counts_of_a_line(line_shell):
    arr, idx = line_shell
    for c, v in enumerate(idx.values):
        assert fiber_count(LINE, arr.cells[c].representative) == abs(v)


def test_critical_points_square_example():
    f = SQUARE_POLY
    pts = critical_points(f, (1, 1))
    assert len(pts) == 2
    want = np.roots([2j, 3, 1])
    for z, w in pts:
        assert abs(z - w) < 1e-9
        assert min(abs(z - r) for r in want) < 1e-9


@pytest.mark.parametrize("a, b", [(1, 1), (1, 2), (-2, 3), (2, -1), (-3, -1)])
def test_critical_point_of_a_line(a, b):
    [(z, w)] = critical_points(LINE, (a, b))
    s = 1 + a + b
    assert z == pytest.approx(-a / s, abs=1e-10) and w == pytest.approx(-b / s, abs=1e-10)


def test_degenerate_translation_of_square():
    c = 0.3 + 2j
    f = SupportedPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): c})
    [(z, w)] = critical_points(f, (0, 0))
    assert z == pytest.approx(-1 / c) and w == pytest.approx(-1 / c)
    report = arg_bijection_check(f, max_l1=0)
    assert not report.bijective and len(report.images) == 1
    assert report.boundary_degenerate      # the point sits on the shell


def _newton_count(f, t, starts=300, seed=0):
    """Independent count: damped Newton from random starts on the torus."""
    a, b = t
    P = [{e: (a + e[0]) * c for e, c in f.terms.items()}, {e: (b + e[1]) * c for e, c in f.terms.items()}]

    def F(z, w):
        return np.array([sum(c * z ** e[0] * w ** e[1] for e, c in Q.items()) for Q in P])

    def J(z, w):
        return np.array([[sum(c * e[0] * z ** (e[0] - 1) * w ** e[1] for e, c in Q.items()),
                          sum(c * e[1] * z ** e[0] * w ** (e[1] - 1) for e, c in Q.items())] for Q in P])

    rng = np.random.default_rng(seed)
    found = []
    for _ in range(starts):
        z, w = np.exp(rng.uniform(-2, 2, 2) + 1j * rng.uniform(0, TWO_PI, 2))
        # diverging starts overflow harmlessly and are discarded below
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(50):
                try:
                    d = np.linalg.solve(J(z, w), F(z, w))
                except np.linalg.LinAlgError:
                    break
                z, w = z - d[0], w - d[1]
        if np.isfinite(z) and np.isfinite(w) and min(abs(z), abs(w)) > 1e-8 and abs(F(z, w)).sum() < 1e-10:
            if all(abs(z - z1) + abs(w - w1) > 1e-6 for z1, w1 in found):
                found.append((z, w))
    return len(found)


@given(st.sampled_from(sorted(CIRCUIT_SHAPES)), st.integers(0, 2 ** 32 - 1),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_critical_points_match_newton_and_bkk(shape, seed, t):
    _, f = random_circuit(np.random.default_rng(seed), shape)
    try:
        pts = critical_points(f, t)
    except Exception:
        return
    assert len(pts) <= f.newton_polygon().double_area()
    assert len(pts) == _newton_count(f, t)


def test_generic_translation_count():
    for _, f in circuit_corpus(12, seed=4):
        assert len(critical_points(f, (1, 1))) == f.newton_polygon().double_area()


def test_translation_order():
    order = translation_order(3)
    assert order[0] == (0, 0) and len(order) == 49
    assert order[1:5] == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert [abs(a) + abs(b) for a, b in order] == sorted(abs(a) + abs(b) for a, b in order)


def test_circuit_centres():
    def centre(pts):
        return circuit_center(SupportedPolynomial({p: 1 for p in pts}))
    assert centre(CIRCUIT_SHAPES["square"]) == (0.5, 0.5)
    assert centre(CIRCUIT_SHAPES["triangle"]) == (1, 1)
    # the kite's diagonals cross at (1/2, 1/2) although (1, 1) is interior
    assert centre(CIRCUIT_SHAPES["kite"]) == (0.5, 0.5)
    with pytest.raises(ValueError):
        centre([(0, 0), (1, 0), (2, 0), (0, 1)])


def test_bijection_on_interior_point_circuits():
    for shape in ("triangle", "quadrilateral", "kite"):
        _, f = random_circuit(np.random.default_rng(7), shape)
        report = arg_bijection_check(f)
        assert report.bijective and report.translation == (-1, -1)
        assert len(set(report.components)) == f.newton_polygon().double_area()


def test_square_needs_the_half_integer_shift():
    _, f = random_circuit(np.random.default_rng(7), "square")
    assert not arg_bijection_check(f).bijective
    report = arg_bijection_check(f, centre=True)
    assert report.bijective and report.translation == (-0.5, -0.5)
