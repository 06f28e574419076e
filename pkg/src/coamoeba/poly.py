"""Supported polynomials, truncations, edge polynomials, and exact Laurent arithmetic."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import IllConditioned, NotAFace, NotAFacet
from .lattice import LatticePolygon, Vec, convex_hull, newton_polygon


# --------------------------------------------------------------------------
# Complex polynomials with a fixed support


class SupportedPolynomial:
    """``f(z, w) = sum x_k z^a_k w^b_k`` with every listed coefficient nonzero."""

    def __init__(self, terms: Mapping | Iterable):
        items = terms.items() if isinstance(terms, Mapping) else terms
        self.terms: dict[Vec, complex] = {}
        for exp, coef in items:
            exp = Vec(int(exp[0]), int(exp[1]))
            if exp in self.terms:
                raise ValueError(f"repeated exponent {tuple(exp)}")
            coef = complex(coef)
            if coef == 0:
                raise ValueError(f"zero coefficient at {tuple(exp)}")
            self.terms[exp] = coef
        if not self.terms:
            raise ValueError("a supported polynomial needs at least one term")

    @property
    def support(self) -> list[Vec]:
        return sorted(self.terms)

    def newton_polygon(self) -> LatticePolygon:
        return newton_polygon(self.terms)

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for (a, b), c in self.terms.items():
            out = out + c * z**a * w**b
        return out

    def log_derivatives(self, z, w):
        """Return ``(z df/dz, w df/dw)``."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        dz = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        dw = np.zeros_like(dz)
        for (a, b), c in self.terms.items():
            m = c * z**a * w**b
            dz = dz + a * m
            dw = dw + b * m
        return dz, dw

    def translated(self, t) -> "SupportedPolynomial":
        return SupportedPolynomial({e + t: c for e, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, SupportedPolynomial) and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"({c:g})*z^{a}*w^{b}" for (a, b), c in sorted(self.terms.items()))
        return f"SupportedPolynomial({body})"

    # text / json formats: one term per line "a b re im"

    def to_text(self) -> str:
        return "".join(f"{a} {b} {c.real!r} {c.imag!r}\n" for (a, b), c in sorted(self.terms.items()))

    @classmethod
    def from_text(cls, text: str) -> "SupportedPolynomial":
        terms = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (3, 4):
                raise ValueError(f"line {lineno}: expected 'a b re [im]', got {line!r}")
            a, b = int(parts[0]), int(parts[1])
            re = float(parts[2])
            im = float(parts[3]) if len(parts) == 4 else 0.0
            terms.append(((a, b), complex(re, im)))
        return cls(terms)

    def to_json(self) -> str:
        return json.dumps([[a, b, c.real, c.imag] for (a, b), c in sorted(self.terms.items())])

    @classmethod
    def from_json(cls, text: str) -> "SupportedPolynomial":
        data = json.loads(text)
        return cls(((t[0], t[1]), complex(t[2], t[3] if len(t) > 3 else 0.0)) for t in data)


def _face_points(polygon: LatticePolygon, face):
    if face is None or face is polygon:
        return None
    if isinstance(face, int):
        if not 0 <= face < len(polygon.facets):
            raise NotAFace(f"polygon has no facet {face}")
        f = polygon.facets[face]
        start = polygon.facet_start(face)
        return {start + f.primitive_dir.scale(j) for j in range(f.lattice_length + 1)}
    v = Vec(*face)
    if v not in polygon.vertices:
        raise NotAFace(f"{tuple(v)} is not a vertex of the Newton polygon")
    return {v}


def truncate(f: SupportedPolynomial, face=None) -> SupportedPolynomial:
    """Restrict ``f`` to a face: ``None`` (the polygon), a facet index, or a vertex."""
    if face is not None and not isinstance(face, int):
        # vertices also make sense when f is already a truncation to a segment
        v = Vec(*face)
        if v not in convex_hull(f.terms):
            raise NotAFace(f"{tuple(v)} is not a vertex of the Newton polygon")
        return SupportedPolynomial({v: f.terms[v]})
    pts = _face_points(f.newton_polygon(), face)
    if pts is None:
        return f
    return SupportedPolynomial({e: c for e, c in f.terms.items() if e in pts})


# --------------------------------------------------------------------------
# Univariate polynomials and root finding


@dataclass(frozen=True)
class UnivariatePolynomial:
    coefficients: tuple[complex, ...]  # ascending powers

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, u):
        # numpy.polyval wants descending powers
        return np.polyval(self.coefficients[::-1], u)

    def derivative(self) -> "UnivariatePolynomial":
        return UnivariatePolynomial(tuple(k * c for k, c in enumerate(self.coefficients))[1:] or (0j,))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))


def edge_polynomial(f: SupportedPolynomial, facet: int) -> tuple[Vec, UnivariatePolynomial]:
    """Write ``f_facet = z^base * g(z^delta)`` with ``deg g`` the lattice length of the facet."""
    polygon = f.newton_polygon()
    if not isinstance(facet, int) or not 0 <= facet < len(polygon.facets):
        raise NotAFacet(f"polygon has no facet {facet!r}")
    fac = polygon.facets[facet]
    base = polygon.facet_start(facet)
    coeffs = tuple(complex(f.terms.get(base + fac.primitive_dir.scale(j), 0))
                   for j in range(fac.lattice_length + 1))
    return base, UnivariatePolynomial(coeffs)


def _cluster(roots: np.ndarray, radius: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, r in enumerate(roots):
        for g in groups:
            if any(abs(r - roots[j]) <= radius * (1 + abs(r)) for j in g):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def univariate_roots(g: UnivariatePolynomial, tol: float = 1e-9) -> list[tuple[complex, int]]:
    """Roots with multiplicities, via companion-matrix eigenvalues and a Newton polish.

    Eigenvalues of an m-fold root spread by about eps^(1/m); clusters closer than
    that are merged when the derivative also vanishes at their centre.
    """
    c = np.asarray(g.coefficients, dtype=complex)
    if g.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    if c[0] == 0 or c[-1] == 0:
        raise ValueError("leading and constant coefficients must be nonzero")
    raw = np.roots(c[::-1])
    dg = g.derivative()
    polished = []
    for r in raw:
        d = dg(r)
        if abs(d) > 1e-6 * g.norm():
            r = r - g(r) / d
        polished.append(r)
    polished = np.array(polished)
    groups = _cluster(polished, tol)
    # merge near-coincident clusters that form a genuine multiple root
    loose = np.finfo(float).eps ** (1 / max(2, g.degree))
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci = polished[groups[i]].mean()
                cj = polished[groups[j]].mean()
                if abs(ci - cj) <= 10 * loose * (1 + abs(ci)):
                    centre = polished[groups[i] + groups[j]].mean()
                    if abs(dg(centre)) <= 1e-6 * g.norm() * (1 + abs(centre)) ** g.degree:
                        groups[i] = groups[i] + groups[j]
                        del groups[j]
                        merged = True
                        break
            if merged:
                break
    out = []
    for grp in groups:
        r = complex(polished[grp].mean())
        bound = tol * g.norm() * (1 + abs(r)) ** g.degree
        if abs(g(r)) > bound and len(grp) == 1:
            r = _refine_mp(g, r)
            if abs(g(r)) > bound:
                raise IllConditioned(f"root {r} has residual {abs(g(r)):.3e} > {bound:.3e}")
        out.append((r, len(grp)))
    out.sort(key=lambda t: (round(np.angle(t[0]), 12), abs(t[0])))
    return out


def _refine_mp(g: UnivariatePolynomial, r: complex) -> complex:
    import mpmath

    with mpmath.workdps(50):
        coeffs = [mpmath.mpc(c.real, c.imag) for c in g.coefficients[::-1]]
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        best = min(roots, key=lambda x: abs(complex(x) - r))
    return complex(best)


# --------------------------------------------------------------------------
# Exact Gaussian rationals and Laurent polynomials


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), Fraction(0))

    def __add__(self, o):
        o = GaussianRational.of(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussianRational.of(o))

    def __mul__(self, o):
        o = GaussianRational.of(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = GaussianRational.of(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I = GaussianRational(Fraction(0), Fraction(1))


class LaurentPolynomial2:
    """Bivariate Laurent polynomial with exact Gaussian-rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict[Vec, GaussianRational] = {}
        for e, c in (terms or {}).items():
            c = GaussianRational.of(c)
            if c:
                self.terms[Vec(*e)] = c

    @classmethod
    def monomial(cls, a: int, b: int, coef=1) -> "LaurentPolynomial2":
        return cls({(a, b): coef})

    @classmethod
    def constant(cls, c) -> "LaurentPolynomial2":
        return cls({(0, 0): c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial2):
            other = LaurentPolynomial2.constant(other)
        return self.terms == other.terms

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial2):
            other = LaurentPolynomial2.constant(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, GaussianRational()) + c
        return LaurentPolynomial2(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial2({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial2):
            other = LaurentPolynomial2.constant(other)
        out: dict[Vec, GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = Vec(e1[0] + e2[0], e1[1] + e2[1])
                out[e] = out.get(e, GaussianRational()) + c1 * c2
        return LaurentPolynomial2(out)

    __rmul__ = __mul__

    def shift(self, t) -> "LaurentPolynomial2":
        return LaurentPolynomial2({e + t: c for e, c in self.terms.items()})

    def substitute_signs(self, sz: int, sw: int) -> "LaurentPolynomial2":
        """``p(sz * z, sw * w)`` for signs ``sz, sw`` in {+1, -1}."""
        return LaurentPolynomial2({e: c * (sz ** (e[0] % 2)) * (sw ** (e[1] % 2))
                                   for e, c in self.terms.items()})

    @property
    def support(self) -> list[Vec]:
        return sorted(self.terms)

    def newton_polygon(self) -> LatticePolygon:
        return newton_polygon(self.terms)

    def __call__(self, z, w):
        return sum(complex(c) * z ** e[0] * w ** e[1] for e, c in self.terms.items())

    def to_json_terms(self) -> list:
        return [[e[0], e[1], str(c.re), str(c.im)] for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json_terms(cls, data) -> "LaurentPolynomial2":
        return cls({(t[0], t[1]): GaussianRational(Fraction(t[2]), Fraction(t[3])) for t in data})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r}*z^{e[0]}*w^{e[1]}" for e, c in sorted(self.terms.items()))


def determinant(matrix) -> LaurentPolynomial2:
    """Exact determinant by expansion over column subsets (division free, O(n 2^n))."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return LaurentPolynomial2.constant(1)
    entries = [[m if isinstance(m, LaurentPolynomial2) else LaurentPolynomial2.constant(m)
                for m in row] for row in matrix]
    dp: dict[int, LaurentPolynomial2] = {0: LaurentPolynomial2.constant(1)}
    for r in range(n):
        nxt: dict[int, LaurentPolynomial2] = {}
        for mask, acc in dp.items():
            if not acc:
                continue
            for c in range(n):
                if mask >> c & 1 or not entries[r][c]:
                    continue
                sign = -1 if bin(mask >> (c + 1)).count("1") % 2 else 1
                term = acc * entries[r][c]
                if sign < 0:
                    term = -term
                key = mask | (1 << c)
                nxt[key] = nxt[key] + term if key in nxt else term
        dp = nxt
    return dp.get((1 << n) - 1, LaurentPolynomial2())
