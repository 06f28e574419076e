import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coamoeba.errors import NotAFace
from coamoeba.poly import (GaussianRational, LaurentPolynomial2, SupportedPolynomial,
                           UnivariatePolynomial, determinant, edge_polynomial, truncate,
                           univariate_roots)
from conftest import HARNACK, LINE, SQUARE_POLY

Z = LaurentPolynomial2.monomial(1, 0)
W = LaurentPolynomial2.monomial(0, 1)
ONE = LaurentPolynomial2.constant(1)


def facet_with(f, direction):
    polygon = f.newton_polygon()
    return next(k for k, fac in enumerate(polygon.facets) if tuple(fac.primitive_dir) == direction)


def test_truncate_square_bottom():
    assert truncate(SQUARE_POLY, facet_with(SQUARE_POLY, (1, 0))) == SupportedPolynomial({(0, 0): 1, (1, 0): 1})


def test_truncate_harnack_bottom():
    bottom = truncate(HARNACK, facet_with(HARNACK, (1, 0)))
    assert bottom == SupportedPolynomial({(0, 0): 1, (1, 0): 2, (2, 0): 1})


def test_truncate_vertex_and_chain():
    assert truncate(SQUARE_POLY, (1, 1)) == SupportedPolynomial({(1, 1): 1j})
    bottom = truncate(HARNACK, 0)
    assert truncate(bottom, (0, 0)) == truncate(HARNACK, (0, 0))
    assert truncate(HARNACK) == HARNACK
    with pytest.raises(NotAFace):
        truncate(HARNACK, (1, 0))


def test_edge_polynomials():
    base, g = edge_polynomial(LINE, facet_with(LINE, (1, 0)))
    assert base == (0, 0) and g.coefficients == (1, 1)
    base, g = edge_polynomial(SQUARE_POLY, facet_with(SQUARE_POLY, (0, 1)))
    assert base == (1, 0) and g.coefficients == (1, 1j)
    base, g = edge_polynomial(HARNACK, facet_with(HARNACK, (1, 0)))
    assert base == (0, 0) and g.coefficients == (1, 2, 1)


@pytest.mark.parametrize("coeffs, expected", [((1, 1), [(-1, 1)]), ((1, 2, 1), [(-1, 2)]), ((1, 1j), [(1j, 1)])])
def test_univariate_roots(coeffs, expected):
    got = univariate_roots(UnivariatePolynomial(tuple(complex(c) for c in coeffs)))
    assert len(got) == len(expected)
    for (r, m), (r0, m0) in zip(got, expected):
        assert abs(r - r0) < 1e-9 and m == m0


@given(st.lists(st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_roots_reconstruct(roots):
    roots = np.array(roots)
    if len(roots) > 1 and min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]) < 1e-3:
        return
    g = UnivariatePolynomial(tuple(np.poly(roots)[::-1]))
    got = univariate_roots(g)
    assert sum(m for _, m in got) == g.degree
    for r, _ in got:
        assert abs(g(r)) <= 1e-9 * g.norm() * (1 + abs(r)) ** g.degree


def test_double_root_detected_with_random_rotation():
    c = cmath.exp(0.7j)
    g = UnivariatePolynomial((c * c, 2 * c, 1))       # (u + c)^2
    [(r, m)] = univariate_roots(g)
    assert m == 2 and abs(r + c) < 1e-6


def test_determinants():
    assert determinant([[ONE + Z + W]]) == ONE + Z + W
    assert determinant([[Z, 0], [0, W]]) == Z * W
    assert determinant([[ONE + Z, ONE], [ONE, ONE + W]]) == Z + W + Z * W


def test_row_times_z_shifts_support():
    m = [[ONE + Z, W, ONE], [ONE, Z * W, W], [Z, ONE, ONE + W]]
    d = determinant(m)
    shifted = determinant([[Z * x for x in m[0]], m[1], m[2]])
    assert shifted == d.shift((1, 0))


def test_gaussian_rational_exact():
    i = GaussianRational.of(1j)
    assert i * i == GaussianRational.of(-1)
    assert complex(GaussianRational.of(0.5) + i) == 0.5 + 1j


@given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                       st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False,
                                          allow_infinity=False), min_size=3, max_size=8))
def test_text_and_json_round_trip(terms):
    f = SupportedPolynomial(terms)
    assert SupportedPolynomial.from_text(f.to_text()) == f
    assert SupportedPolynomial.from_json(f.to_json()) == f


def test_zero_coefficients_rejected():
    with pytest.raises(ValueError):
        SupportedPolynomial({(0, 0): 1, (1, 0): 0})
