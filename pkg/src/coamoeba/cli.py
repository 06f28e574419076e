"""``coamoeba`` command line.

Exit codes: 0 success, 1 usage error, 2 a verification failed, 3 degenerate input.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arrangement import calibrate_by_area, dual_arrangement, relative_index_map, tier_obstruction
from .errors import (AmbiguousCalibration, CoamoebaError, DegenerateSystem, NonSimpleArrangement,
                     NotDimerizable, NoValidSignAssignment, ZeroDeterminant)
from .graph import DimerModel, complement_components, dimerize, index_graph
from .harness import search_admissible, verify_theorem1
from .kasteleyn import characteristic_polynomial, kasteleyn_signs, same_polygon
from .lattice import LatticePolygon, pentagon
from .numeric import arg_bijection_check, critical_points, sample_coamoeba
from .poly import SupportedPolynomial
from .render import render_svg
from .shell import calibrate_index, shell

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_DEGENERATE = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_angle(text: str):
    """``pi/2``, ``3pi/4``, ``-pi`` become Fractions of pi; anything else is radians."""
    m = _ANGLE.match(text)
    if m:
        num = m.group(1)
        coef = Fraction(1) if num in ("", "+") else Fraction(-1) if num == "-" else Fraction(num)
        return coef / int(m.group(2) or 1)
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"cannot read angle {text!r}") from None


def parse_offsets(text: str) -> list[list]:
    """Facet groups separated by ``;``, offsets within a group by ``,``."""
    return [[parse_angle(x) for x in group.split(",") if x.strip()] for group in text.split(";")]


def parse_translation(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--translate expects 'a,b', got {text!r}") from None
    return a, b


def _read_poly(path: str) -> SupportedPolynomial:
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return SupportedPolynomial.from_json(text)
    return SupportedPolynomial.from_text(text)


def _read_polygon(args) -> LatticePolygon:
    if getattr(args, "k", None) is not None and not args.polygon:
        return pentagon(args.k)
    if not args.polygon:
        raise UsageError("--polygon is required")
    return LatticePolygon.from_json(Path(args.polygon).read_text())


def _arrangement(args):
    """Arrangement and calibrated index from ``--poly`` or ``--polygon`` with ``--offsets``."""
    if args.poly:
        f = _read_poly(args.poly)
        arr = shell(f, args.tol)
        return f, arr, calibrate_index(arr, f, seed=args.seed)
    if args.polygon and args.offsets:
        polygon = _read_polygon(args)
        arr = dual_arrangement(polygon, parse_offsets(args.offsets))
        return None, arr, calibrate_by_area(arr, relative_index_map(arr))
    raise UsageError("give --poly FILE, or --polygon FILE with --offsets LIST")


def _emit(args, payload: dict):
    text = json.dumps(payload, indent=1, default=str)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n")
    else:
        print(text)


def _svg(args, arr, index=None, graph=None, samples=None):
    if getattr(args, "svg", None):
        Path(args.svg).write_text(render_svg(arr, index, graph, samples))


# --------------------------------------------------------------------------
# subcommands


def cmd_shell(args) -> int:
    f = _read_poly(args.poly) if args.poly else None
    if f is None:
        raise UsageError("--poly is required")
    arr = shell(f, args.tol, allow_degenerate=args.allow_degenerate)
    _emit(args, {"simple": arr.simple, **arr.to_dict()})
    _svg(args, arr)
    return EXIT_OK if arr.simple else EXIT_DEGENERATE


def cmd_index(args) -> int:
    _, arr, idx = _arrangement(args)
    _emit(args, arr.to_dict(idx))
    _svg(args, arr, idx)
    return EXIT_OK


def cmd_graph(args) -> int:
    _, arr, idx = _arrangement(args)
    g = index_graph(arr, idx, args.parity)
    _emit(args, g.to_dict())
    _svg(args, arr, idx, g)
    return EXIT_OK


def cmd_dimerize(args) -> int:
    _, arr, idx = _arrangement(args)
    dimer = dimerize(arr, idx)
    _emit(args, dimer.to_dict())
    _svg(args, dimer.arrangement, dimer.index, dimer.graph)
    return EXIT_OK


def cmd_charpoly(args) -> int:
    if args.dimer:
        dimer = DimerModel.from_json(Path(args.dimer).read_text())
        target = None
    else:
        f, arr, idx = _arrangement(args)
        dimer = dimerize(arr, idx)
        target = f.newton_polygon() if f is not None else _read_polygon(args)
    ks = kasteleyn_signs(dimer)
    p = characteristic_polynomial(dimer, ks.signs)
    if not p:
        raise ZeroDeterminant("characteristic polynomial vanishes")
    polygon = p.newton_polygon().canonical()
    out = {"terms": p.to_json_terms(), "polygon": [list(v) for v in polygon.vertices],
           "twist": list(ks.twist)}
    if target is not None:
        out["matches_input"] = same_polygon(polygon, target)
    _emit(args, out)
    return EXIT_FAILED if out.get("matches_input") is False else EXIT_OK


def cmd_verify_thm1(args) -> int:
    polygon = _read_polygon(args)
    report = verify_theorem1(polygon, samples=args.random_offsets, seed=args.seed)
    _emit(args, report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_render(args) -> int:
    if not args.poly:
        raise UsageError("--poly is required")
    f = _read_poly(args.poly)
    arr = shell(f, args.tol, allow_degenerate=True)
    idx = calibrate_index(arr, f, seed=args.seed) if arr.simple else None
    sample = sample_coamoeba(f, n=args.resolution)
    if not args.svg:
        raise UsageError("--svg is required")
    Path(args.svg).write_text(render_svg(arr, idx, samples=sample.points))
    _emit(args, {"points": int(len(sample.points)), "simple": arr.simple, "svg": args.svg})
    return EXIT_OK


def cmd_circuit_check(args) -> int:
    f = _read_poly(args.poly) if args.poly else None
    if f is None:
        raise UsageError("--poly is required")
    arr = shell(f, args.tol)
    idx = calibrate_index(arr, f, seed=args.seed)
    out = {"double_area": f.newton_polygon().double_area(),
           "zero_cells": sum(1 for v in idx.values if v == 0),
           "complement_components": complement_components(arr, idx)}
    if args.translate:
        t = parse_translation(args.translate)
        pts = critical_points(f, t)
        out["translation"] = list(t)
        out["critical_points"] = [[[z.real, z.imag], [w.real, w.imag]] for z, w in pts]
        out["images"] = [[float(np.angle(z) % (2 * np.pi)), float(np.angle(w) % (2 * np.pi))]
                         for z, w in pts]
        ok = out["complement_components"] == out["double_area"]
    else:
        report = arg_bijection_check(f, arr, idx, centre=args.centre)
        out["bijection"] = report.to_dict()
        ok = out["complement_components"] == out["double_area"] and report.bijective
    _emit(args, out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_search(args) -> int:
    polygon = _read_polygon(args)
    report = search_admissible(polygon, budget=args.budget, seed=args.seed)
    _emit(args, report.to_dict())
    return EXIT_OK


def cmd_obstruction(args) -> int:
    if args.k is None or args.k < 2:
        raise UsageError("--k must be at least 2")
    obs = tier_obstruction(args.k)
    _emit(args, {"k": args.k, "m": obs.m, "obstructed": obs.obstructed})
    return EXIT_OK


COMMANDS = {
    "shell": cmd_shell,
    "index": cmd_index,
    "graph": cmd_graph,
    "dimerize": cmd_dimerize,
    "charpoly": cmd_charpoly,
    "verify-thm1": cmd_verify_thm1,
    "coamoeba-render": cmd_render,
    "circuit-check": cmd_circuit_check,
    "search-admissible": cmd_search,
    "obstruction": cmd_obstruction,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="polynomial file ('a b re [im]' per line, or JSON terms)")
    common.add_argument("--polygon", help="polygon JSON: list of vertices")
    common.add_argument("--offsets", help="offsets, e.g. 'pi;pi/2;pi/2;pi'")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--json", help="write the JSON result here instead of stdout")
    common.add_argument("--svg", help="write an SVG picture")

    parser = _Parser(prog="coamoeba", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "graph":
            p.add_argument("--parity", choices=("odd", "even"), default="odd")
        if name == "shell":
            p.add_argument("--allow-degenerate", action="store_true")
        if name == "charpoly":
            p.add_argument("--dimer", help="dimer JSON written by 'dimerize'")
        if name == "verify-thm1":
            p.add_argument("--random-offsets", type=int, default=100, metavar="N")
        if name == "coamoeba-render":
            p.add_argument("--resolution", type=int, default=256)
        if name == "circuit-check":
            p.add_argument("--translate", help="'a,b': report critical points for this translation only")
            p.add_argument("--centre", action="store_true",
                           help="also try moving the circuit centre to the origin")
        if name in ("search-admissible", "obstruction", "verify-thm1"):
            p.add_argument("--k", type=int, help="pentagon family member instead of --polygon")
        if name == "search-admissible":
            p.add_argument("--budget", type=int, default=10_000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"coamoeba {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonSimpleArrangement, DegenerateSystem) as exc:
        print(f"coamoeba {args.command}: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (NotDimerizable, NoValidSignAssignment, ZeroDeterminant, AmbiguousCalibration) as exc:
        print(f"coamoeba {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (CoamoebaError, OSError, ValueError) as exc:
        print(f"coamoeba {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
