"""The shell of a coamoeba and calibration of its index map."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrangement import (TWO_PI, IndexMap, OrientedCurve, TorusArrangement, build_arrangement,
                          geodesic, relative_index_map)
from .errors import AmbiguousCalibration, BudgetExceeded, NonSimpleArrangement
from .numeric import DEFAULT_R, DEFAULT_RESOLUTION, DEFAULT_STARTS, fiber_count, sample_coamoeba
from .poly import SupportedPolynomial, edge_polynomial, univariate_roots


@dataclass(frozen=True)
class ShellLine:
    facet: int
    delta: tuple[int, int]
    offset: float          # <delta, theta> = offset
    multiplicity: int


def shell_lines(f: SupportedPolynomial, tol: float = 1e-9) -> list[ShellLine]:
    """One line per distinct root argument of each edge polynomial, with multiplicity."""
    polygon = f.newton_polygon()
    lines = []
    for k, fac in enumerate(polygon.facets):
        _, g = edge_polynomial(f, k)
        merged: list[list] = []
        for r, mult in univariate_roots(g, tol):
            c = float(np.angle(r)) % TWO_PI
            for m in merged:
                d = abs(m[0] - c) % TWO_PI
                if min(d, TWO_PI - d) <= max(tol, 1e-9):
                    m[1] += mult
                    break
            else:
                merged.append([c, mult])
        for c, mult in merged:
            lines.append(ShellLine(k, tuple(fac.primitive_dir), c, mult))
    return lines


def shell_curves(f: SupportedPolynomial, tol: float = 1e-9) -> list[OrientedCurve]:
    return [geodesic(ln.delta, ln.offset, ln.facet, ln.multiplicity) for ln in shell_lines(f, tol)]


def shell(f: SupportedPolynomial, tol: float = 1e-9, allow_degenerate: bool = False) -> TorusArrangement:
    """The shell of the coamoeba of ``f``.

    Repeated roots or concurrent lines raise :class:`NonSimpleArrangement` unless
    ``allow_degenerate`` is set; the returned arrangement then has ``simple == False``.
    """
    return build_arrangement(shell_curves(f, tol), allow_degenerate=allow_degenerate)


def is_degenerate(f: SupportedPolynomial, tol: float = 1e-9) -> bool:
    try:
        shell(f, tol)
    except NonSimpleArrangement:
        return True
    return False


@dataclass
class CalibrationEvidence:
    method: str
    hits: list[int]
    uncovered: list[int]
    fibers: dict[int, int]
    shift: int | None

    def to_dict(self) -> dict:
        return {"method": self.method, "hits": self.hits, "uncovered": self.uncovered,
                "fibers": self.fibers, "shift": self.shift}


def calibrate_index(arr: TorusArrangement, f: SupportedPolynomial, R: float = DEFAULT_R,
                    n: int = DEFAULT_RESOLUTION, starts: int = DEFAULT_STARTS, seed: int = 0,
                    relative: IndexMap | None = None, evidence: list | None = None,
                    probe_clearance: float = 0.02) -> IndexMap:
    """Fix the universal shift of the index map from the coamoeba itself.

    Cells the coamoeba never reaches get index 0.  When every cell is reached, fiber
    counts at one interior point per cell pin the shift: ``|index| <= count`` with
    equal parity.
    """
    if not arr.simple:
        raise NonSimpleArrangement("degenerate shell: index calibration is not defined")
    rel = relative if relative is not None else relative_index_map(arr)
    sample = sample_coamoeba(f, R, n, arr)
    hits = sample.hits.tolist()
    min_area = 50 * (TWO_PI / n) ** 2
    uncovered = [c for c in range(arr.F) if hits[c] == 0 and arr.cells[c].area > min_area]
    if uncovered:
        values = {rel.values[c] for c in uncovered}
        if len(values) != 1:
            ev = CalibrationEvidence("coverage", hits, uncovered, {}, None)
            if evidence is not None:
                evidence.append(ev)
            raise AmbiguousCalibration(
                f"uncovered cells carry relative indices {sorted(values)}", evidence=ev.to_dict())
        s = -values.pop()
        if evidence is not None:
            evidence.append(CalibrationEvidence("coverage", hits, uncovered, {}, s))
        return rel.shifted(s, calibrated=True)

    fibers = {}
    for c in range(arr.F):
        # near the shell the fiber escapes past |log| = R
        if arr.distance_to_curves(arr.cells[c].representative) < probe_clearance:
            continue
        try:
            fibers[c] = fiber_count(f, arr.cells[c].representative, R, starts, seed)
        except BudgetExceeded:
            continue
    if not fibers:
        raise AmbiguousCalibration("no fiber could be counted", evidence={"hits": hits})
    lo = -max(rel.values) - max(fibers.values())
    hi = -min(rel.values) + max(fibers.values())
    feasible = [s for s in range(lo, hi + 1)
                if all(abs(rel.values[c] + s) <= fibers[c] and (rel.values[c] + s - fibers[c]) % 2 == 0
                       for c in fibers)]
    ev = CalibrationEvidence("fiber", hits, [], fibers, feasible[0] if len(feasible) == 1 else None)
    if evidence is not None:
        evidence.append(ev)
    if len(feasible) != 1:
        raise AmbiguousCalibration(f"{len(feasible)} shifts fit the fiber counts", evidence=ev.to_dict())
    return rel.shifted(feasible[0], calibrated=True)


def polynomial_from_offsets(polygon, curves) -> SupportedPolynomial:
    """A polynomial whose shell is the given dual arrangement (unit-modulus roots).

    Each facet gets the edge polynomial ``prod (u - e^{i c_j})``, rotated by a
    common constant per facet so the coefficients at shared vertices agree; this
    only works when the product of the boundary rotations closes up, which is
    exactly the condition on the offset sum.
    """
    facets = polygon.facets
    coef: dict = {}
    scale = 1.0 + 0j
    for k, fac in enumerate(facets):
        roots = [np.exp(1j * c.offset) for c in curves if c.facet == k]
        g = np.poly(roots)[::-1] if roots else np.array([1.0])   # ascending
        start = polygon.facet_start(k)
        if k == 0:
            scale = 1.0 / g[0]
        else:
            scale = coef[start] / g[0]
        for j, cj in enumerate(g):
            p = start + fac.primitive_dir.scale(j)
            if j == len(g) - 1 and k == len(facets) - 1:
                if abs(coef[p] - scale * cj) > 1e-8 * abs(coef[p]):
                    raise NonSimpleArrangement("offsets do not close up around the polygon")
                continue
            coef[p] = scale * cj
    return SupportedPolynomial({p: complex(c) for p, c in coef.items()})

