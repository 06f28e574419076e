"""Experiment drivers: random dual arrangements, the zero-cell criterion sweep, admissibility search."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arrangement import (TWO_PI, TorusArrangement, angle_diagnostics, build_arrangement,
                          calibrate_by_area, dual_curves, geodesic, is_admissible, offsets_of,
                          relative_index_map, theorem1_predicates, tier_obstruction)
from .errors import CoamoebaError, NonSimpleArrangement
from .lattice import LatticePolygon, Vec, newton_polygon, pentagon

MAX_RESAMPLES = 100


def shell_class_offsets(polygon: LatticePolygon, rng: np.random.Generator) -> list[list[float]]:
    """Uniform offsets per line, with the last one moved so the offsets sum to n pi.

    Offsets refer to the actual facet directions, as stored on the curves.
    """
    sizes = [f.lattice_length for f in polygon.facets]
    flat = rng.uniform(0, TWO_PI, sum(sizes))
    n = len(flat)
    flat[-1] = (flat[-1] - (flat.sum() - n * math.pi)) % TWO_PI
    out, k = [], 0
    for s in sizes:
        out.append(list(flat[k:k + s]))
        k += s
    return out


def curves_from_raw(polygon: LatticePolygon, raw) -> list:
    """Geodesics ``<delta_k, theta> = c`` for raw offsets ``c`` on the actual facet directions."""
    curves = []
    for k, (fac, group) in enumerate(zip(polygon.facets, raw)):
        for c in group:
            curves.append(geodesic(fac.primitive_dir, c, facet=k))
    return curves


def random_dual_arrangement(polygon: LatticePolygon, rng: np.random.Generator,
                            shell_class: bool = True) -> TorusArrangement:
    """A simple random dual arrangement, resampling non-simple draws up to 100 times."""
    for _ in range(MAX_RESAMPLES):
        if shell_class:
            curves = curves_from_raw(polygon, shell_class_offsets(polygon, rng))
        else:
            offs = [list(rng.uniform(0, TWO_PI, f.lattice_length)) for f in polygon.facets]
            curves = dual_curves(polygon, offs)
        try:
            return build_arrangement(curves)
        except NonSimpleArrangement:
            continue
    raise NonSimpleArrangement(f"{MAX_RESAMPLES} draws in a row were not simple")


# --------------------------------------------------------------------------
# Zero-cell criterion sweep


@dataclass
class SweepSample:
    zero_cells: int
    lhs: bool
    rhs: bool
    angle_residual: float
    offsets: list[list[float]]


@dataclass
class SweepReport:
    polygon: LatticePolygon
    samples: list[SweepSample] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def discrepancies(self) -> list[int]:
        return [i for i, s in enumerate(self.samples) if s.lhs != s.rhs]

    @property
    def over_bound(self) -> list[int]:
        da = self.polygon.double_area()
        return [i for i, s in enumerate(self.samples) if s.zero_cells > da]

    @property
    def max_angle_residual(self) -> float:
        return max((s.angle_residual for s in self.samples), default=0.0)

    @property
    def ok(self) -> bool:
        return not self.discrepancies and not self.over_bound

    def to_dict(self) -> dict:
        return {
            "polygon": [list(v) for v in self.polygon.vertices],
            "samples": len(self.samples),
            "lhs_true": sum(s.lhs for s in self.samples),
            "rhs_true": sum(s.rhs for s in self.samples),
            "discrepancies": self.discrepancies,
            "over_bound": self.over_bound,
            "max_angle_residual": self.max_angle_residual,
            "seconds": round(self.seconds, 3),
        }


def verify_theorem1(polygon: LatticePolygon, samples: int = 100, seed: int = 0) -> SweepReport:
    """Compare both sides of the zero-cell criterion on random dual arrangements.

    Also records the residual of the corner-angle identity ``2 sum theta_o = 4 pi area``.
    """
    rng = np.random.default_rng(seed)
    report = SweepReport(polygon)
    t0 = time.perf_counter()
    for _ in range(samples):
        arr = random_dual_arrangement(polygon, rng)
        idx = calibrate_by_area(arr, relative_index_map(arr))
        rec = theorem1_predicates(arr, idx, polygon)
        diag = angle_diagnostics(arr, idx)
        resid = abs(2 * diag.oriented_total - 2 * math.pi * polygon.double_area())
        report.samples.append(SweepSample(rec.zero_cells, rec.lhs, rec.rhs, resid,
                                          offsets_of(polygon, arr.curves)))
    report.seconds = time.perf_counter() - t0
    return report


# --------------------------------------------------------------------------
# Admissibility search


def _pair_vertices(d1: Vec, d2: Vec):
    """Inverse matrix and the lattice shifts giving every crossing of two line families."""
    D = np.array([[d1.x, d1.y], [d2.x, d2.y]], dtype=float)
    det = int(round(np.linalg.det(D)))
    Dinv = np.linalg.inv(D)
    reps = []
    for m, n in itertools.product(range(abs(det)), repeat=2):
        p = Dinv @ np.array([m, n], dtype=float)
        p = p - np.floor(p + 1e-9)
        if not any(np.allclose(p, q, atol=1e-9) for q in reps):
            reps.append(p)
    return Dinv, np.array(reps)


def index_range_batch(deltas: list[Vec], offsets: np.ndarray) -> np.ndarray:
    """``max - min`` of the index map for a batch of geodesic arrangements.

    Up to a constant the index is ``sum_k fract((<delta_k, theta> - c_k) / 2pi)``.
    Every cell has a corner, and at the crossing of lines i, j the four corners take
    the values ``S, S+1, S+1, S+2`` with ``S`` the sum over the other lines.
    """
    B, n = offsets.shape
    dirs = np.array(deltas, dtype=float)
    smin = np.full(B, np.inf)
    smax = np.full(B, -np.inf)
    for i, j in itertools.combinations(range(n), 2):
        if Vec(*deltas[i]).cross(deltas[j]) == 0:
            continue
        Dinv, reps = _pair_vertices(Vec(*deltas[i]), Vec(*deltas[j]))
        base = offsets[:, [i, j]] @ Dinv.T                      # (B, 2)
        others = [k for k in range(n) if k not in (i, j)]
        for r in reps:
            theta = base + TWO_PI * r
            vals = (theta @ dirs[others].T - offsets[:, others]) / TWO_PI
            S = (vals - np.floor(vals)).sum(axis=1)
            smin = np.minimum(smin, S)
            smax = np.maximum(smax, S)
    return np.round(smax - smin).astype(int) + 2


@dataclass
class SearchReport:
    polygon: LatticePolygon
    found: bool
    offsets: list[list[float]] | None
    tried: int
    budget: int
    seed: int
    obstruction: dict | None = None
    range_histogram: dict[int, int] = field(default_factory=dict)
    rejected_nonsimple: int = 0
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "polygon": [list(v) for v in self.polygon.vertices],
            "found": self.found,
            "offsets": self.offsets,
            "tried": self.tried,
            "budget": self.budget,
            "seed": self.seed,
            "obstruction": self.obstruction,
            "index_range_histogram": {str(k): v for k, v in sorted(self.range_histogram.items())},
            "rejected_nonsimple": self.rejected_nonsimple,
            "status": "found" if self.found else ("obstructed" if self.obstruction else "exhausted"),
            "seconds": round(self.seconds, 3),
        }


def pentagon_parameter(polygon: LatticePolygon) -> int | None:
    """``k`` when ``polygon`` is a translate of the pentagon family member, else None."""
    verts = polygon.canonical().vertices
    for k in range(1, 64):
        if pentagon(k).canonical().vertices == verts:
            return k
    return None


def search_admissible(polygon: LatticePolygon, budget: int = 10_000, seed: int = 0,
                      batch: int = 4096) -> SearchReport:
    """Random restarts over shell-class offsets looking for an admissible dual arrangement.

    Candidates are screened by their index range (admissible means range <= 2) and
    confirmed by building the arrangement.  Pentagon-family members with k >= 5 are
    answered by the tier obstruction without searching.
    """
    t0 = time.perf_counter()
    k = pentagon_parameter(polygon)
    if k is not None and k >= 2:
        obs = tier_obstruction(k)
        if obs.obstructed:
            return SearchReport(polygon, False, None, 0, budget, seed,
                                obstruction={"k": k, "m": obs.m, "obstructed": True},
                                seconds=time.perf_counter() - t0)
    rng = np.random.default_rng(seed)
    deltas = [f.primitive_dir for f in polygon.facets for _ in range(f.lattice_length)]
    sizes = [f.lattice_length for f in polygon.facets]
    hist: dict[int, int] = {}
    tried = 0
    rejected = 0
    while tried < budget:
        m = min(batch, budget - tried)
        offs = rng.uniform(0, TWO_PI, size=(m, len(deltas)))
        # move the last offset into the shell class so every candidate is realisable
        offs[:, -1] = (offs[:, -1] - (offs.sum(axis=1) - len(deltas) * math.pi)) % TWO_PI
        ranges = index_range_batch(deltas, offs)
        for r in ranges:
            hist[int(r)] = hist.get(int(r), 0) + 1
        for row in np.nonzero(ranges <= 2)[0]:
            raw, pos = [], 0
            for s in sizes:
                raw.append(list(offs[row, pos:pos + s]))
                pos += s
            try:
                arr = build_arrangement(curves_from_raw(polygon, raw))
            except NonSimpleArrangement:
                rejected += 1
                continue
            if is_admissible(arr):
                return SearchReport(polygon, True, offsets_of(polygon, arr.curves), tried + int(row) + 1,
                                    budget, seed, range_histogram=hist, rejected_nonsimple=rejected,
                                    seconds=time.perf_counter() - t0)
        tried += m
    return SearchReport(polygon, False, None, tried, budget, seed, range_histogram=hist,
                        rejected_nonsimple=rejected, seconds=time.perf_counter() - t0)


# --------------------------------------------------------------------------
# Circuit corpus


CIRCUIT_SHAPES = {
    "square": [(0, 0), (1, 0), (0, 1), (1, 1)],
    "triangle": [(0, 0), (2, 1), (1, 2), (1, 1)],
    "quadrilateral": [(0, 0), (2, 0), (0, 1), (1, 2)],
    "kite": [(0, 0), (1, 0), (0, 1), (2, 2)],
}


def random_circuit(rng: np.random.Generator, shape: str | None = None):
    """A tetranomial with random complex coefficients on one of a few circuit supports."""
    from .poly import SupportedPolynomial
    if shape is None:
        shape = list(CIRCUIT_SHAPES)[rng.integers(len(CIRCUIT_SHAPES))]
    pts = CIRCUIT_SHAPES[shape]
    coef = rng.normal(size=4) + 1j * rng.normal(size=4)
    return shape, SupportedPolynomial(dict(zip(pts, coef)))


def circuit_corpus(n: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    shapes = list(CIRCUIT_SHAPES)
    return [random_circuit(rng, shapes[i % len(shapes)]) for i in range(n)]


def standard_polygons() -> dict[str, LatticePolygon]:
    return {
        "simplex": newton_polygon([(0, 0), (1, 0), (0, 1)]),
        "square": newton_polygon([(0, 0), (1, 0), (0, 1), (1, 1)]),
        "dilated-simplex": newton_polygon([(0, 0), (2, 0), (0, 2)]),
        "quadrilateral": newton_polygon([(0, 0), (2, 0), (1, 1), (0, 1)]),
        "pentagon-1": pentagon(1),
    }


def safe_call(fn, *args, **kwargs):
    """Run ``fn`` and return ``(result, None)`` or ``(None, error)`` for library errors."""
    try:
        return fn(*args, **kwargs), None
    except CoamoebaError as exc:
        return None, exc
