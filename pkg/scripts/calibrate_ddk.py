"""Success rate of the pairwise-correlation test as the sample count and constant vary.

For each (L, C) pair the test runs on samples from the visible model
(should say YES) and from a model with every coupling scaled by
``--scale`` (should say NO).

    python scripts/calibrate_ddk.py --graph C6 --beta 0.7 --scale 2
"""
import argparse

from spintest.cli import load_graph
from spintest.ferro import ddk_covariance_test, ddk_threshold, exact_correlations, exact_sampler
from spintest.ising import IsingModel
from spintest.verdict import Answer


def rate(visible, hidden, L, C, eps, trials, expected):
    draw = exact_sampler(hidden)
    corr = exact_correlations(visible)
    hits = sum(ddk_covariance_test(visible, draw(hidden, L, s), eps, C=C, model_corr=corr).answer is expected
               for s in range(trials))
    return hits / trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", default="C6")
    ap.add_argument("--beta", type=float, default=0.7)
    ap.add_argument("--scale", type=float, default=2.0)
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--L", type=int, nargs="+", default=[2000, 5000, 10_000, 50_000])
    ap.add_argument("--C", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    args = ap.parse_args()

    G = load_graph(args.graph)
    visible = IsingModel.homogeneous(G, args.beta)
    hidden = IsingModel.homogeneous(G, args.beta * args.scale)
    print(f"{'L':>7} {'C':>5} {'thresh':>8} {'YES|same':>9} {'NO|scaled':>10}")
    for L in args.L:
        for C in args.C:
            t = ddk_threshold(G.n, L, args.beta, C)
            yes = rate(visible, visible, L, C, args.eps, args.trials, Answer.YES)
            no = rate(visible, hidden, L, C, args.eps, args.trials, Answer.NO)
            print(f"{L:>7} {C:>5} {t:>8.4f} {yes:>9.2f} {no:>10.2f}")


if __name__ == "__main__":
    main()
