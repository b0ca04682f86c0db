"""Second eigenvalue and sampled edge expansion of random unions of perfect matchings.

    python scripts/expansion_stats.py --m 200 --d 3 --seeds 100
"""
import argparse
import math

import numpy as np

from spintest.gadget import sampled_edge_expansion, spectral_gap, union_of_matchings


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=200)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--samples", type=int, default=200)
    args = ap.parse_args()

    bound = 2 * math.sqrt(args.d - 1) + 0.1
    gaps, ratios = [], []
    for s in range(args.seeds):
        g = union_of_matchings(args.m, args.d, s)
        gaps.append(spectral_gap(g))
        ratios.append(sampled_edge_expansion(g, args.m, args.samples, s))
    gaps, ratios = np.array(gaps), np.array(ratios)
    print(f"m={args.m} d={args.d} seeds={args.seeds}")
    print(f"lambda_2: median {np.median(gaps):.4f}  max {gaps.max():.4f}  Ramanujan+0.1 bound {bound:.4f}")
    print(f"fraction below bound: {np.mean(gaps < bound):.3f}")
    print(f"sampled expansion ratio: min {ratios.min():.4f}  median {np.median(ratios):.4f}")


if __name__ == "__main__":
    main()
