"""Tier obstruction and random admissibility search on the pentagon family."""
import argparse

from coamoeba.arrangement import tier_obstruction
from coamoeba.harness import search_admissible
from coamoeba.lattice import pentagon


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for k in range(1, args.kmax + 1):
        obs = f"m={tier_obstruction(k).m} obstructed={tier_obstruction(k).obstructed}" if k >= 2 else "-"
        rep = search_admissible(pentagon(k), budget=args.budget, seed=args.seed).to_dict()
        print(f"k={k} {obs:26s} {rep['status']:10s} tried={rep['tried']:6d} "
              f"ranges={rep['index_range_histogram']} {rep['seconds']}s")


if __name__ == "__main__":
    main()
