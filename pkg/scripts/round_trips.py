"""Dimerize random dual arrangements and compare the characteristic polygon with the input."""
import argparse
from collections import Counter

import numpy as np

from coamoeba.arrangement import calibrate_by_area, relative_index_map, theorem1_predicates
from coamoeba.graph import dimerize, is_consistent
from coamoeba.harness import random_dual_arrangement, standard_polygons
from coamoeba.kasteleyn import characteristic_polygon, kasteleyn_signs, same_polygon


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name, polygon in standard_polygons().items():
        rng = np.random.default_rng(args.seed)
        tally = Counter()
        for _ in range(args.samples):
            arr = random_dual_arrangement(polygon, rng)
            idx = calibrate_by_area(arr, relative_index_map(arr))
            if not theorem1_predicates(arr, idx, polygon).rhs:
                tally["not dimerizable"] += 1
                continue
            d = dimerize(arr, idx)
            ks = kasteleyn_signs(d)
            tally["twist " + str(ks.twist)] += 1
            tally["consistent"] += bool(is_consistent(d))
            tally["polygon matches"] += same_polygon(characteristic_polygon(d, ks.signs), polygon)
            tally["dimers"] += 1
        print(f"{name:16s} {dict(tally)}")


if __name__ == "__main__":
    main()
