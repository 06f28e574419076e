"""Numerical side: coamoeba sampling, fiber counts and critical points."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arrangement import TWO_PI, IndexMap, TorusArrangement
from .errors import BudgetExceeded, DegenerateSystem
from .poly import SupportedPolynomial

DEFAULT_R = 8.0
DEFAULT_RESOLUTION = 256
DEFAULT_STARTS = 64
DEDUP_RADIUS = 1e-6


def _w_coefficients(f: SupportedPolynomial, z: np.ndarray) -> np.ndarray:
    """Coefficients (ascending in w) of ``f(z, .)`` times a monomial, one row per z."""
    amin = min(e.x for e in f.terms)
    bmin = min(e.y for e in f.terms)
    deg = max(e.y for e in f.terms) - bmin
    out = np.zeros((len(z), deg + 1), dtype=complex)
    for (a, b), c in f.terms.items():
        out[:, b - bmin] += c * z ** (a - amin)
    return out


def _batched_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of each row (ascending coefficients); NaN where the leading term vanishes."""
    n, d1 = coeffs.shape
    d = d1 - 1
    if d == 0:
        return np.empty((n, 0), dtype=complex)
    lead = coeffs[:, -1]
    scale = np.abs(coeffs).max(axis=1)
    bad = np.abs(lead) <= 1e-14 * scale
    lead = np.where(bad, 1.0, lead)
    comp = np.zeros((n, d, d), dtype=complex)
    comp[:, 0, :] = -coeffs[:, -2::-1] / lead[:, None]
    if d > 1:
        comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    roots = np.linalg.eigvals(comp)
    roots[bad] = np.nan
    return roots


@dataclass
class CoamoebaSample:
    points: np.ndarray                  # (m, 2) in [0, 2pi)^2
    hits: np.ndarray | None = None      # per-cell counts when an arrangement was given
    cells: np.ndarray | None = None     # per-point cell (-1 on the shell)


def sample_coamoeba(f: SupportedPolynomial, R: float = DEFAULT_R, n: int = DEFAULT_RESOLUTION,
                    arr: TorusArrangement | None = None) -> CoamoebaSample:
    """Arguments of points of V(f) with ``|log|z|| <= R`` on an ``n x n`` grid in (log|z|, arg z)."""
    rho = np.linspace(-R, R, n)
    theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
    rr, tt = np.meshgrid(rho, theta, indexing="ij")
    z = np.exp(rr.ravel() + 1j * tt.ravel())
    roots = _batched_roots(_w_coefficients(f, z))
    th1 = np.broadcast_to(tt.ravel()[:, None], roots.shape)
    ok = np.isfinite(roots) & (np.abs(roots) > 0)
    pts = np.column_stack([th1[ok], np.mod(np.angle(roots[ok]), TWO_PI)])
    sample = CoamoebaSample(points=pts)
    if arr is not None:
        where = arr.locate(pts)
        sample.cells = where
        sample.hits = np.bincount(where[where >= 0], minlength=arr.F)
    return sample


# --------------------------------------------------------------------------
# fibers of the argument map


def _eval_with_log_derivs(f: SupportedPolynomial, z, w):
    val = np.zeros(np.shape(z), dtype=complex)
    dz = np.zeros_like(val)
    dw = np.zeros_like(val)
    size = np.zeros(np.shape(z))
    for (a, b), c in f.terms.items():
        t = c * z ** a * w ** b
        val += t
        dz += a * t
        dw += b * t
        size += np.abs(t)
    return val, dz, dw, size


def _newton(f, theta, starts: np.ndarray, iters: int = 80):
    """Damped Newton in (log|z|, log|w|) from each start; returns points and relative residuals."""
    x = starts.astype(float).copy()
    e1, e2 = np.exp(1j * theta[0]), np.exp(1j * theta[1])
    for _ in range(iters):
        z = np.exp(x[:, 0]) * e1
        w = np.exp(x[:, 1]) * e2
        F, Fz, Fw, _ = _eval_with_log_derivs(f, z, w)
        j11, j12, j21, j22 = Fz.real, Fw.real, Fz.imag, Fw.imag
        det = j11 * j22 - j12 * j21
        safe = np.abs(det) > 1e-300
        det = np.where(safe, det, 1.0)
        dx = (j22 * F.real - j12 * F.imag) / det
        dy = (-j21 * F.real + j11 * F.imag) / det
        step = np.column_stack([dx, dy])
        norm = np.hypot(dx, dy)
        step *= np.minimum(1.0, 1.0 / np.maximum(norm, 1e-300))[:, None]
        step[~safe] = 0.0
        x -= step
        x = np.clip(x, -60, 60)
    z = np.exp(x[:, 0]) * e1
    w = np.exp(x[:, 1]) * e2
    F, _, _, size = _eval_with_log_derivs(f, z, w)
    return x, np.abs(F) / size


def _scan_seeds(f: SupportedPolynomial, theta, R: float, n: int = 161, window: float = 0.3):
    seeds = []
    rho = np.linspace(-R, R, n)
    z = np.exp(rho + 1j * theta[0])
    roots = _batched_roots(_w_coefficients(f, z))
    for k in range(len(rho)):
        for r in roots[k]:
            if np.isfinite(r) and r != 0:
                d = (np.angle(r) - theta[1] + math.pi) % TWO_PI - math.pi
                if abs(d) < window:
                    seeds.append((rho[k], math.log(abs(r))))
    swapped = SupportedPolynomial({(b, a): c for (a, b), c in f.terms.items()})
    w = np.exp(rho + 1j * theta[1])
    roots = _batched_roots(_w_coefficients(swapped, w))
    for k in range(len(rho)):
        for r in roots[k]:
            if np.isfinite(r) and r != 0:
                d = (np.angle(r) - theta[0] + math.pi) % TWO_PI - math.pi
                if abs(d) < window:
                    seeds.append((math.log(abs(r)), rho[k]))
    return np.array(seeds).reshape(-1, 2)


def fiber_points(f: SupportedPolynomial, theta, R: float = DEFAULT_R, starts: int = DEFAULT_STARTS,
                 seed: int = 0, tol: float = 1e-11) -> np.ndarray:
    """Solutions ``(log|z|, log|w|)`` in ``[-R, R]^2`` with ``Arg(z, w) = theta``."""
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    rng = np.random.default_rng(seed)
    x0 = np.vstack([rng.uniform(-R, R, size=(starts, 2)), _scan_seeds(f, theta, R)])
    x, res = _newton(f, theta, x0)
    good = res < tol
    stuck = (res < 1e-5) & ~good & np.all(np.abs(x) <= R, axis=1)
    if stuck.any():
        # slow convergence signals a near-singular fiber; try once more before giving up
        x2, res2 = _newton(f, theta, x[stuck], iters=200)
        near = (res2 >= tol) & (res2 < 1e-5) & np.all(np.abs(x2) <= R, axis=1)
        if near.any():
            raise BudgetExceeded(f"fiber over {theta.tolist()}: residual {res2[near].max():.2e} "
                                 f"above {tol:.0e}")
        x[stuck], res[stuck] = x2, res2
        good = res < tol
    found: list[np.ndarray] = []
    for p in x[good]:
        if np.all(np.abs(p) <= R) and all(np.hypot(*(p - q)) > DEDUP_RADIUS for q in found):
            found.append(p)
    return np.array(found).reshape(-1, 2)


def fiber_count(f: SupportedPolynomial, theta, R: float = DEFAULT_R, starts: int = DEFAULT_STARTS,
                seed: int = 0) -> int:
    return len(fiber_points(f, theta, R, starts, seed))


# --------------------------------------------------------------------------
# critical points


def _terms_times(f: SupportedPolynomial, weight) -> dict:
    out = {}
    for e, c in f.terms.items():
        k = weight(e)
        if k != 0:
            out[e] = k * c
    return out


def _normalise(terms: dict) -> dict:
    amin = min(e[0] for e in terms)
    bmin = min(e[1] for e in terms)
    return {(e[0] - amin, e[1] - bmin): c for e, c in terms.items()}


def _poly_in_w(terms: dict) -> list[np.ndarray]:
    """Coefficient list in w, each entry an ascending numpy coefficient array in z."""
    dz = max(e[0] for e in terms)
    dw = max(e[1] for e in terms)
    out = [np.zeros(dz + 1, dtype=complex) for _ in range(dw + 1)]
    for (a, b), c in terms.items():
        out[b][a] += c
    return out


def _sylvester(p: list, q: list, z: complex) -> np.ndarray:
    pv = [np.polyval(c[::-1], z) for c in p]
    qv = [np.polyval(c[::-1], z) for c in q]
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = pv[::-1]
    for i in range(m):
        S[n + i, i:i + n + 1] = qv[::-1]
    return S


def resultant_in_z(p: list, q: list) -> np.ndarray:
    """Ascending coefficients of Res_w(p, q) as a polynomial in z (evaluation and interpolation)."""
    m, n = len(p) - 1, len(q) - 1
    if m + n == 0:
        return np.array([1.0 + 0j])
    bound = n * max(len(c) - 1 for c in p) + m * max(len(c) - 1 for c in q)
    N = bound + 1
    nodes = np.exp(2j * math.pi * np.arange(N) / N)
    vals = np.array([np.linalg.det(_sylvester(p, q, zk)) for zk in nodes])
    return np.fft.fft(vals) / N


def _polish(sys, jac, zv: complex, wv: complex, steps: int = 30) -> tuple[complex, complex]:
    for _ in range(steps):
        F = np.array(sys(zv, wv))
        try:
            d = np.linalg.solve(jac(zv, wv), F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(d)):
            break
        zv, wv = zv - d[0], wv - d[1]
        if abs(d[0]) + abs(d[1]) < 1e-15 * (abs(zv) + abs(wv)):
            break
    return zv, wv


def critical_points(f: SupportedPolynomial, translation=(0, 0), tol: float = 1e-8) -> list[tuple[complex, complex]]:
    """Torus solutions of ``a f + z f_z = 0``, ``b f + w f_w = 0``."""
    a, b = translation
    P1 = _terms_times(f, lambda e: a + e[0])
    P2 = _terms_times(f, lambda e: b + e[1])
    if not P1 or not P2:
        raise DegenerateSystem(f"an equation vanishes identically for translation {(a, b)}",
                               translation=(a, b))
    P1, P2 = _normalise(P1), _normalise(P2)
    p, q = _poly_in_w(P1), _poly_in_w(P2)
    res = resultant_in_z(p, q)
    scale = np.abs(res).max()
    norm_p = sum(np.abs(c).sum() for c in p)
    norm_q = sum(np.abs(c).sum() for c in q)
    if scale <= 1e-12 * norm_p ** (len(q) - 1) * norm_q ** (len(p) - 1):
        raise DegenerateSystem(f"resultant vanishes identically for translation {(a, b)}",
                               translation=(a, b))
    coeffs = res.copy()
    coeffs[np.abs(coeffs) <= 1e-10 * scale] = 0
    nz = np.nonzero(coeffs)[0]
    coeffs = coeffs[nz[0]:nz[-1] + 1]         # strip the z = 0 factor
    zs = np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.array([])

    def sys(zv, wv):
        v1 = sum(c * zv ** e[0] * wv ** e[1] for e, c in P1.items())
        v2 = sum(c * zv ** e[0] * wv ** e[1] for e, c in P2.items())
        return v1, v2

    def jac(zv, wv):
        return np.array([
            [sum(c * e[0] * zv ** (e[0] - 1) * wv ** e[1] for e, c in P.items() if e[0]),
             sum(c * e[1] * zv ** e[0] * wv ** (e[1] - 1) for e, c in P.items() if e[1])]
            for P in (P1, P2)])

    sols: list[tuple[complex, complex]] = []
    for z0 in zs:
        if not np.isfinite(z0) or abs(z0) < 1e-10:
            continue
        pz = np.array([np.polyval(c[::-1], z0) for c in p])
        qz = np.array([np.polyval(c[::-1], z0) for c in q])
        use = pz if np.abs(pz[1:]).max(initial=0) > 1e-9 * np.abs(pz).max() else qz
        nzw = np.nonzero(np.abs(use) > 1e-12 * np.abs(use).max())[0]
        if len(nzw) == 0 or nzw[-1] == 0:
            continue
        cands = np.roots(use[:nzw[-1] + 1][::-1])
        # two solutions may share z, so every w candidate is polished and kept if it converges
        for w0 in cands:
            if not np.isfinite(w0) or abs(w0) < 1e-10:
                continue
            zv, wv = _polish(sys, jac, complex(z0), complex(w0))
            size = sum(abs(c) * abs(zv) ** e[0] * abs(wv) ** e[1] for e, c in P1.items()) + \
                sum(abs(c) * abs(zv) ** e[0] * abs(wv) ** e[1] for e, c in P2.items())
            if np.abs(sys(zv, wv)).sum() > tol * size or abs(zv) < 1e-10 or abs(wv) < 1e-10:
                continue
            if all(abs(zv - z1) + abs(wv - w1) > 1e-7 * (1 + abs(zv) + abs(wv)) for z1, w1 in sols):
                sols.append((zv, wv))
    return sols


# --------------------------------------------------------------------------
# the argument map on critical points


@dataclass
class BijectionAttempt:
    translation: tuple[float, float]
    images: list[tuple[float, float]]
    components: list[int | None]
    boundary_degenerate: bool
    bijective: bool
    error: str | None = None


@dataclass
class BijectionReport:
    translation: tuple[float, float] | None
    images: list[tuple[float, float]]
    components: list[int | None]
    bijective: bool
    boundary_degenerate: bool
    n_components: int
    attempts: list[BijectionAttempt] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"translation": self.translation, "images": self.images,
                "components": self.components, "bijective": self.bijective,
                "boundary_degenerate": self.boundary_degenerate,
                "n_components": self.n_components, "attempts": len(self.attempts)}


def translation_order(limit: int = 3):
    pts = itertools.product(range(-limit, limit + 1), repeat=2)
    return sorted(pts, key=lambda t: (abs(t[0]) + abs(t[1]), t))


def circuit_center(f: SupportedPolynomial) -> tuple[Fraction, Fraction]:
    """The point where the two halves of a circuit's affine relation meet.

    For a support ``A`` of four points with relation ``sum l_i a_i = 0, sum l_i = 0``
    this is ``sum_{l_i > 0} l_i a_i / sum_{l_i > 0} l_i``.  It is the interior lattice
    point for a triangle circuit and the crossing of the diagonals for a quadrilateral.
    """
    pts = list(f.terms)
    if len(pts) != 4:
        raise ValueError("a circuit has exactly four support points")
    # relation coefficients are signed 3x3 minors of the homogenised points
    rows = [(1, p[0], p[1]) for p in pts]
    lam = []
    for i in range(4):
        m = [r for j, r in enumerate(rows) if j != i]
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        lam.append((-1) ** i * det)
    if any(v == 0 for v in lam):
        raise ValueError("support is not a circuit (three points are collinear)")
    pos = [(v, p) for v, p in zip(lam, pts) if v > 0]
    total = sum(v for v, _ in pos)
    return (Fraction(sum(v * p[0] for v, p in pos), total),
            Fraction(sum(v * p[1] for v, p in pos), total))


def arg_bijection_check(f: SupportedPolynomial, arr: TorusArrangement | None = None,
                        idx: IndexMap | None = None, limit: int = 3, boundary_tol: float = 1e-6,
                        max_l1: int | None = None, centre: bool = False) -> BijectionReport:
    """Search translations for one whose critical points map to distinct complement components.

    Integer translations are tried in :func:`translation_order`.  With ``centre=True``
    the translation moving :func:`circuit_center` to the origin is tried afterwards;
    it is a half-integer shift for the unit square, where no integer one works.
    """
    if arr is None or idx is None:
        from .shell import calibrate_index, shell
        arr = shell(f)
        idx = calibrate_index(arr, f)
    # components of the complement of the closed coamoeba are the index-zero cells
    comps = [c for c, v in enumerate(idx.values) if v == 0]
    comp_of = {c: k for k, c in enumerate(comps)}
    attempts: list[BijectionAttempt] = []
    order = [t for t in translation_order(limit) if max_l1 is None or abs(t[0]) + abs(t[1]) <= max_l1]
    if centre:
        cx, cy = circuit_center(f)
        order.append((float(-cx), float(-cy)))
    for t in order:
        try:
            pts = critical_points(f, t)
        except DegenerateSystem as exc:
            attempts.append(BijectionAttempt(t, [], [], False, False, str(exc)))
            continue
        images = [(float(np.angle(z) % TWO_PI), float(np.angle(w) % TWO_PI)) for z, w in pts]
        where = arr.locate(images) if images else np.array([], dtype=int)
        on_shell = any(arr.distance_to_curves(p) < boundary_tol for p in images)
        components = [comp_of.get(int(c)) if c >= 0 else None for c in where]
        hit = [c for c in components if c is not None]
        ok = (not on_shell and len(pts) == len(comps) and len(hit) == len(pts)
              and len(set(hit)) == len(hit))
        attempts.append(BijectionAttempt(t, images, components, on_shell, ok))
        if ok:
            break

    def quality(a: BijectionAttempt):
        hit = {c for c in a.components if c is not None}
        return (a.bijective, len(hit), -abs(len(a.images) - len(comps)))

    best = max(attempts, key=quality)
    return BijectionReport(best.translation, best.images, best.components, best.bijective,
                           best.boundary_degenerate, len(comps), attempts)
