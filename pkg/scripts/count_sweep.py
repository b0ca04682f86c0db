"""Accuracy of the tester-driven 3-coloring counter across small bipartite graphs.

Runs the binary search with the exact TV oracle for several seeds and
reports how often the estimate lands inside the (1 +- eps) window.

    python scripts/count_sweep.py --graphs P3 P4 C4 K23 --runs 20
"""
import argparse
import warnings

from spintest.cli import load_graph
from spintest.coloring import count_colorings
from spintest.counter import CounterConfig, count_3colorings_via_tester


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", nargs="+", default=["P3", "P4", "C4"])
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--q", type=int, default=4)
    ap.add_argument("--rounds", type=int, default=3)
    ap.add_argument("--runs", type=int, default=20)
    args = ap.parse_args()

    warnings.simplefilter("ignore")
    for name in args.graphs:
        H = load_graph(name)
        Z = count_colorings(H, 3)
        hits, calls = 0, 0
        for seed in range(args.runs):
            cfg = CounterConfig(epsilon=args.epsilon, q=args.q, rounds=args.rounds, seed=seed)
            res = count_3colorings_via_tester(H, cfg=cfg)
            hits += (1 - args.epsilon) * res.estimate <= Z <= (1 + args.epsilon) * res.estimate
            calls = max(calls, res.calls)
        print(f"{name:<5} Z3={Z:<6} in-window {hits}/{args.runs}  max calls {calls}")


if __name__ == "__main__":
    main()
