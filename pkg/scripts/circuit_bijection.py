"""Complement maximality and the critical-point Arg bijection on random circuits.

Prints one row per circuit: integer-translation result and the result when the
circuit centre shift is allowed as well.
"""
import argparse
from collections import Counter

import numpy as np

from coamoeba.errors import CoamoebaError
from coamoeba.graph import complement_components
from coamoeba.harness import circuit_corpus, random_circuit
from coamoeba.numeric import arg_bijection_check
from coamoeba.shell import calibrate_index, shell


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--shape", help="draw every circuit with this shape instead of the balanced corpus")
    args = ap.parse_args()
    if args.shape:
        rng = np.random.default_rng(args.seed)
        corpus = [random_circuit(rng, args.shape) for _ in range(args.n)]
    else:
        corpus = circuit_corpus(args.n, seed=args.seed)
    tally = Counter()
    for shape, f in corpus:
        try:
            arr = shell(f)
        except CoamoebaError as exc:
            print(f"{shape:14s} excluded: {exc}")
            tally["excluded"] += 1
            continue
        idx = calibrate_index(arr, f)
        comps = complement_components(arr, idx)
        plain = arg_bijection_check(f, arr, idx, limit=6, max_l1=6)
        shifted = arg_bijection_check(f, arr, idx, limit=6, max_l1=6, centre=True)
        tally["maximal"] += comps == f.newton_polygon().double_area()
        tally["integer"] += plain.bijective
        tally["centre"] += shifted.bijective
        tally["kept"] += 1
        print(f"{shape:14s} 2A={f.newton_polygon().double_area()} complement={comps} "
              f"integer={plain.bijective} at {plain.translation} "
              f"flagged={plain.boundary_degenerate} centre={shifted.bijective} at {shifted.translation}")
    print(dict(tally))


if __name__ == "__main__":
    main()
