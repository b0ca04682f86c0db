"""Verification suites shared by the CLI ``verify`` verb and the experiment scripts.

Each suite fills a :class:`RunReport` with one check per fixture; the
fixtures are small enough to be settled by exact enumeration.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from .coloring import (
    build_gadget_coloring,
    build_instance,
    classify_colorings,
    count_colorings,
    critical_degree,
    default_port_count,
    enumerate_colorings,
    omega_counts,
    phase_vector,
    sample_G_star,
    tilde_graph,
)
from .counter import CounterConfig, count_3colorings_via_tester
from .ferro import exact_sampler, ferro_identity_test, lemma_floor
from .gadget import sampled_edge_expansion, spectral_gap, union_of_matchings
from .graph import Multigraph, complete_graph, cycle_graph, max_cut_exact, path_graph
from .ising import IsingModel, tv_between
from .reduction import (
    InstanceParams,
    exact_tv_tester,
    maxcut_via_tester,
    micro_gadget,
    phase_oracle_tester,
    tv_regime_check,
    two_large_cuts_criterion,
    two_large_cuts_enumeration,
)
from .report import RunReport
from .rng import child_seed
from .verdict import Answer

# Hand-built Ising micro fixtures: (gadget kind, d_in, w, beta); H = K2, ell = 5.
REGIME_FIXTURES = [
    ("K33", 3, 0, -6.0),
    ("K33", 3, 3, -6.0),
    ("K33", 3, 4, -6.0),
    ("C6", 2, 0, -6.0),
    ("C6", 2, 3, -6.0),
    ("C6", 2, 4, -6.0),
]
REGIME_ELL = 5

# End-to-end MaxCut micro setting for K2 (exact full-model TV).
MAXCUT_MICRO = {"kind": "K33", "d_in": 3, "ell": 3, "beta": -4.0}

COLORING_COUNT_GRAPHS = ("K2", "P3", "C4")
GADGET_FIXTURES = [(m, q, t) for m in (1, 2, 3) for q in (3, 4) for t in (1, 2)]
SAMPLER_FIXTURE = {"H": "K2", "q": 4, "k": 1, "ell": 2, "gadget_m": 1, "gadget_t": 3}


def all_graphs(N: int):
    pairs = list(itertools.combinations(range(N), 2))
    for mask in range(1 << len(pairs)):
        yield Multigraph.from_edges(N, [p for i, p in enumerate(pairs) if mask >> i & 1])


def cut_arithmetic(report: RunReport, max_n: int = 4) -> None:
    for N in range(2, max_n + 1):
        total = mismatches = 0
        for H in all_graphs(N):
            for w in range(N * N + 1):
                total += 1
                mismatches += two_large_cuts_criterion(H, w) != two_large_cuts_enumeration(H, w)
        report.add(f"cut arithmetic N={N}", mismatches == 0, {"cases": total, "mismatches": mismatches}, 0)


def regime(report: RunReport, fixtures=None) -> None:
    for kind, d_in, w, beta in fixtures or REGIME_FIXTURES:
        params = InstanceParams(3, 3, d_in, 1, REGIME_ELL)
        r = tv_regime_check(complete_graph(2), w, params, beta, gadget=micro_gadget(kind))
        for c in r.checks:
            report.add(
                f"{kind} w={w} beta={beta} [{r.regime.value}] {c.name}",
                c.holds or not c.asserted,
                {"lhs": c.lhs, "rhs": c.rhs, "relation": c.relation, "slack": c.slack},
                asserted=c.asserted,
            )
        report.results[f"{kind} w={w}"] = {"eps_M": r.eps_M, "eps_Mstar": r.eps_Mstar, "tv": r.tv, "vertices": r.vertices}


def maxcut(report: RunReport) -> None:
    micro = MAXCUT_MICRO
    K2 = complete_graph(2)
    params = InstanceParams(3, 3, micro["d_in"], 1, micro["ell"])
    truth = max_cut_exact(K2)[0]
    for k in range(0, 6):
        d = maxcut_via_tester(K2, k, exact_tv_tester, params=params, beta=micro["beta"],
                              gadget=micro_gadget(micro["kind"]), allow_port_reuse=True)
        report.add(f"K2 cut >= {k} (exact TV)", bool(d) == (truth >= k), bool(d), truth >= k)
    C4 = cycle_graph(4)
    truth = max_cut_exact(C4)[0]
    for k in range(0, 18):
        d = maxcut_via_tester(C4, k, phase_oracle_tester)
        report.add(f"C4 cut >= {k} (phase TV)", bool(d) == (truth >= k), bool(d), truth >= k)


def coloring_lemmas(report: RunReport) -> None:
    for m, q, t in GADGET_FIXTURES:
        if t >= q:
            continue
        g = build_gadget_coloring(m, q, t)
        ports = list(g.ports)
        phases = Counter()
        mono = True
        for col in enumerate_colorings(g.graph, q):
            pc = {col[p] for p in ports}
            mono &= len(pc) == 1
            mono &= all({col[x] for x in C} == set(range(q)) - pc for C in g.cliques)
            phases[next(iter(pc))] += 1
        expected = math.factorial(q - 1) ** m
        report.add(f"G({m},{q},{t}) ports monochromatic", mono, mono, True)
        report.add(f"G({m},{q},{t}) per-phase count", set(phases.values()) == {expected} and len(phases) == q,
                   dict(sorted(phases.items())), expected)
    for q in range(3, 13):
        t, d = default_port_count(q), critical_degree(q)
        g = build_gadget_coloring(3, q, t)
        deg = g.graph.degrees()
        pmax = int(deg[list(g.ports)].max())
        report.add(f"degree bounds q={q}", pmax <= d - 1 and int(deg.max()) <= d, {"port": pmax, "max": int(deg.max())}, d)
    for q, expected in ((4, (24, 24)), (3, (192, 48))):
        inst = build_instance(complete_graph(2), 1, 2, q, expand=False)
        got = classify_colorings(inst)
        report.add(f"omega classes q={q}", got == expected == omega_counts(complete_graph(2), 1, 2, q), list(got), list(expected))
    for name, H in (("K2", complete_graph(2)), ("P3", path_graph(3))):
        T, s, t = tilde_graph(H)
        Z = count_colorings(H, 3)
        same = count_colorings(T, 3, {s: 0, t: 0})
        diff = count_colorings(T, 3, {s: 0, t: 1})
        report.add(f"interface counts {name}", same == 2 ** (H.n + 1) and diff == 2**H.n * Z,
                   [same, diff], [2 ** (H.n + 1), 2**H.n * Z])


def coloring_sampler(report: RunReport, draws: int = 100_000, seed: int = 0, bins: int = 256) -> None:
    from scipy.stats import chisquare

    from .graph import NAMED_GRAPHS

    f = SAMPLER_FIXTURE
    inst = build_instance(NAMED_GRAPHS[f["H"]](), f["k"], f["ell"], f["q"], gadget_m=f["gadget_m"], gadget_t=f["gadget_t"])
    rank = {c: i for i, c in enumerate(enumerate_colorings(inst.star_graph, inst.q))}
    total = len(rank)
    samples = sample_G_star(inst, seed, count=draws)
    proper = all(tuple(s.tolist()) in rank for s in samples)
    report.add("sampler outputs are proper", proper, proper, True)
    width = -(-total // bins)
    obs = np.bincount([rank[tuple(s.tolist())] // width for s in samples], minlength=-(-total // width))
    sizes = np.array([min(width, total - b * width) for b in range(obs.size)])
    p = float(chisquare(obs, sizes * draws / total).pvalue)
    report.add("sampler chi-square vs exact uniform", p > 0.01, {"pvalue": p, "colorings": total, "bins": int(obs.size)}, "> 0.01")
    phases = Counter(tuple(phase_vector(inst, s, star=True).tolist()) for s in samples)
    pre_total = count_colorings(inst.pre_star, inst.q)
    counts = np.array([phases.get(c, 0) for c in enumerate_colorings(inst.pre_star, inst.q)])
    p2 = float(chisquare(counts, np.full(pre_total, draws / pre_total)).pvalue)
    report.add("phase vectors uniform", p2 > 0.01 and counts.sum() == draws, {"pvalue": p2, "classes": pre_total}, "> 0.01")


def counting(report: RunReport, runs: int = 50, epsilon: float = 0.5, delta: float = 0.2, seed: int = 0) -> None:
    from .graph import NAMED_GRAPHS

    for name in COLORING_COUNT_GRAPHS:
        H = NAMED_GRAPHS[name]()
        Z = count_colorings(H, 3)
        hits = 0
        for r in range(runs):
            cfg = CounterConfig(epsilon=epsilon, delta=delta, seed=child_seed(seed, name, r))
            est = count_3colorings_via_tester(H, cfg=cfg).estimate
            hits += (1 - epsilon) * est <= Z <= (1 + epsilon) * est
        report.add(f"count {name}", hits >= 0.8 * runs, {"hits": hits, "runs": runs, "Z3": Z}, ">= 80%")


def ferro_fixtures():
    """(name, visible model, hidden model, eps, expected answer)."""
    K2 = complete_graph(2)
    six = Multigraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (2, 3)])
    mixed = IsingModel(six, {(0, 1): 25.0, (0, 2): 0.6, (1, 2): 25.0, (2, 3): 0.4, (3, 4): 0.8, (4, 5): 25.0})
    C6 = cycle_graph(6)
    return [
        ("K2 equal", IsingModel.homogeneous(K2, 1.0), IsingModel.homogeneous(K2, 1.0), 0.5, Answer.YES),
        ("six-vertex mixed equal", mixed, mixed, 0.5, Answer.YES),
        ("K2 vs empty", IsingModel.homogeneous(K2, 1.0), IsingModel(Multigraph(2, {}), {}), 0.2, Answer.NO),
        ("C6 beta change", IsingModel.homogeneous(C6, 1.0), IsingModel.homogeneous(C6, 0.2), 0.3, Answer.NO),
        ("K2 heavy edge", IsingModel.homogeneous(K2, 20.0), IsingModel.homogeneous(K2, 1.0), 0.25, Answer.NO),
        ("K2 merged classes", IsingModel.homogeneous(K2, 1.0), IsingModel.homogeneous(K2, 30.0), 0.25, Answer.NO),
    ]


def ferro_runs(visible, hidden, eps, runs, seed=0):
    n = visible.n
    L = lemma_floor(n, eps)
    hidden_draw = exact_sampler(hidden)
    own = exact_sampler(visible)
    answers = []
    for r in range(runs):
        samples = hidden_draw(hidden, L, child_seed(seed, "hidden", r))
        answers.append(ferro_identity_test(visible, samples, eps, sampler=own, seed=child_seed(seed, "own", r)).answer)
    return answers


def ferro(report: RunReport, runs: int = 200, seed: int = 0) -> None:
    from scipy.stats import binomtest

    for name, visible, hidden, eps, expected in ferro_fixtures():
        tv = tv_between(visible, hidden)
        answers = ferro_runs(visible, hidden, eps, runs, seed)
        hits = sum(a is expected for a in answers)
        p = binomtest(hits, runs, 0.70, alternative="greater").pvalue
        report.add(f"ferro {name}", hits / runs >= 0.70 and p < 0.05,
                   {"hits": hits, "runs": runs, "tv": tv, "pvalue": float(p)}, expected.value)


def expansion(report: RunReport, d: int = 3, m: int = 200, seeds: int = 100, samples: int = 200) -> None:
    bound = 2 * math.sqrt(d - 1) + 0.1
    gaps, positive = [], 0
    for s in range(seeds):
        g = union_of_matchings(m, d, s)
        gaps.append(spectral_gap(g))
        positive += sampled_edge_expansion(g, m, samples, s) > 0
    frac = float(np.mean(np.array(gaps) < bound))
    report.add("spectral fraction", frac >= 0.9, {"fraction": frac, "bound": bound, "median": float(np.median(gaps))},
               ">= 0.9", asserted=False)
    report.add("positive sampled expansion fraction", True, positive / seeds, None, asserted=False)


SUITES = {
    "cut-arithmetic": cut_arithmetic,
    "regime": regime,
    "maxcut": maxcut,
    "coloring-lemmas": coloring_lemmas,
    "coloring-sampler": coloring_sampler,
    "counting": counting,
    "ferro": ferro,
    "expansion": expansion,
}
