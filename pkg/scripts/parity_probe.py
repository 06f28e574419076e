"""Fiber counts against the index at random points of the circuit corpus."""
import argparse
from collections import Counter

import numpy as np

from coamoeba.harness import circuit_corpus
from coamoeba.numeric import fiber_count
from coamoeba.shell import calibrate_index, shell


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--probes", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--margin", type=float, default=0.05, help="skip points this close to the shell")
    args = ap.parse_args()
    corpus = []
    for _, f in circuit_corpus(20):
        arr = shell(f)
        corpus.append((f, arr, calibrate_index(arr, f)))
    rng = np.random.default_rng(args.seed)
    seen = Counter()
    bad = 0
    while sum(seen.values()) < args.probes:
        f, arr, idx = corpus[rng.integers(len(corpus))]
        theta = rng.uniform(0, 2 * np.pi, 2)
        if arr.distance_to_curves(theta) <= args.margin:
            continue
        i = idx.values[int(arr.locate([theta])[0])]
        c = fiber_count(f, theta)
        seen[(i, c)] += 1
        bad += c < abs(i) or (c - i) % 2 != 0
    print("(index, fiber count):", dict(sorted(seen.items())))
    print("violations:", bad)


if __name__ == "__main__":
    main()
