"""Random bipartite Ising gadgets built from unions of perfect matchings.

Left side is ``0..m-1`` and right side is ``m..2m-1``.  A gadget has ``p``
ports on each side; ports receive ``d_in`` matchings and non-ports a
further ``d_out`` matchings among themselves, so ports keep spare degree
for connections to other gadgets.

Random stream discipline: ports draw from ``(seed, "ports")`` and the
k-th matching from ``(seed, "in", k)`` or ``(seed, "out", k)``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, NotRegular, TooLarge
from .graph import Multigraph, cut_size
from .rng import stream

VARIANTS = ("direct", "alt-matching-removal", "alt-complete-matching")
DENSE_EIG_LIMIT = 512


@dataclass(frozen=True)
class IsingGadgetParams:
    m: int
    p: int
    d_in: int
    d_out: int

    def __post_init__(self):
        if not (self.m >= self.p >= 0):
            raise InvalidParams(f"need m >= p >= 0, got m={self.m}, p={self.p}")
        if self.d_in < 1 or self.d_out < 0:
            raise InvalidParams("need d_in >= 1 and d_out >= 0")
        if self.d_in + self.d_out < 3:
            raise InvalidParams("need d_in + d_out >= 3")

    @property
    def d(self) -> int:
        return self.d_in + self.d_out


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    graph: Multigraph
    m: int
    ports: tuple[int, ...]
    seed: int
    variant: str = "direct"
    params: IsingGadgetParams | None = None
    raw: Multigraph | None = field(default=None, repr=False)

    @property
    def left(self) -> range:
        return range(self.m)

    @property
    def right(self) -> range:
        return range(self.m, 2 * self.m)

    @property
    def left_ports(self) -> tuple[int, ...]:
        return tuple(v for v in self.ports if v < self.m)

    @property
    def right_ports(self) -> tuple[int, ...]:
        return tuple(v for v in self.ports if v >= self.m)

    def key(self) -> tuple:
        """Hashable identity of the outcome: edge set plus port set."""
        return tuple(self.graph.edges), self.ports

    def serialize(self) -> str:
        from .graph import format_graph

        text = format_graph(self.graph)
        text += "ports " + " ".join(map(str, self.ports)) + "\n"
        text += f"seed {self.seed}\n"
        return text

    @classmethod
    def parse(cls, text: str) -> "GadgetInstance":
        from .graph import parse_graph

        g, extras = parse_graph(text)
        if g.n % 2:
            raise InvalidParams("gadget files must have an even vertex count")
        ports = tuple(sorted(int(x) for x in extras.get("ports", [])))
        seed = int(extras.get("seed", ["0"])[0])
        return cls(g, g.n // 2, ports, seed, variant="file")


def _matching_edges(rng: np.random.Generator, left: np.ndarray, right: np.ndarray) -> list[tuple[int, int]]:
    perm = rng.permutation(right.size)
    return list(zip(left.tolist(), right[perm].tolist()))


def _assemble(m: int, edge_lists, ports, seed, variant, params) -> GadgetInstance:
    raw = Multigraph.from_edges(2 * m, [e for edges in edge_lists for e in edges])
    return GadgetInstance(raw.simple(), m, tuple(sorted(int(x) for x in ports)), int(seed), variant, params, raw)


def sample_gadget(params: IsingGadgetParams, variant: str = "direct", seed: int = 0) -> GadgetInstance:
    """Sample a gadget; deterministic given ``(params, variant, seed)``.

    ``direct`` picks ``p`` uniform ports per side, lays ``d_in`` perfect
    matchings over the full sides and ``d_out`` over the non-ports, then
    merges parallel edges.  The two ``alt-*`` variants are equivalent
    generation procedures that produce the same distribution.  For the
    alternatives the first out-matching comes from the variant's own
    mechanism and any further ones are drawn as in ``direct``.
    """
    if variant not in VARIANTS:
        raise InvalidParams(f"unknown variant {variant!r}; choose from {VARIANTS}")
    m, p = params.m, params.p
    L = np.arange(m)
    R = np.arange(m, 2 * m)
    in_matchings = [_matching_edges(stream(seed, "in", k), L, R) for k in range(params.d_in)]

    if variant == "direct":
        rng = stream(seed, "ports")
        pl = np.sort(rng.choice(m, size=p, replace=False))
        pr = np.sort(rng.choice(m, size=p, replace=False)) + m
        rest_l, rest_r = np.setdiff1d(L, pl), np.setdiff1d(R, pr)
        outs = [_matching_edges(stream(seed, "out", k), rest_l, rest_r) for k in range(params.d_out)]
        return _assemble(m, in_matchings + outs, np.concatenate([pl, pr]), seed, variant, params)

    if params.d_out < 1:
        raise InvalidParams("alternative generation procedures need d_out >= 1")
    pl = np.sort(stream(seed, "ports").choice(m, size=p, replace=False))
    rest_l = np.setdiff1d(L, pl)
    if variant == "alt-matching-removal":
        last = _matching_edges(stream(seed, "out", 0), L, R)
        in_pl = set(pl.tolist())
        pr = np.array(sorted(r for l, r in last if l in in_pl), dtype=np.int64)
        first_out = [(l, r) for l, r in last if l not in in_pl]
    else:
        perm = stream(seed, "out", 0).permutation(m)
        targets = R[perm]
        first_out = list(zip(rest_l.tolist(), targets[: rest_l.size].tolist()))
        pr = np.sort(targets[rest_l.size:])
    rest_r = np.setdiff1d(R, pr)
    outs = [first_out] + [_matching_edges(stream(seed, "out", k), rest_l, rest_r) for k in range(1, params.d_out)]
    return _assemble(m, in_matchings + outs, np.concatenate([pl, pr]), seed, variant, params)


@dataclass
class GadgetReport:
    degree_ok: bool
    port_degree_max: int
    nonport_degree_max: int
    bipartite: bool
    left_ports: int
    right_ports: int
    port_counts_ok: bool
    max_multiplicity: int | None = None

    @property
    def ok(self) -> bool:
        return self.degree_ok and self.bipartite and self.port_counts_ok


def verify_gadget(g: GadgetInstance, params: IsingGadgetParams, raw: Multigraph | None = None) -> GadgetReport:
    """Check degree bounds, bipartiteness between the sides and port counts.

    If a pre-merge multigraph is given (or stored on the instance) its
    largest edge multiplicity is reported as well.
    """
    deg = g.graph.degrees()
    ports = np.array(g.ports, dtype=np.int64)
    is_port = np.zeros(g.graph.n, dtype=bool)
    is_port[ports] = True
    pmax = int(deg[is_port].max()) if is_port.any() else 0
    npmax = int(deg[~is_port].max()) if (~is_port).any() else 0
    bipartite = all((u < g.m) != (v < g.m) for u, v in g.graph.edges)
    lp, rp = len(g.left_ports), len(g.right_ports)
    raw = raw if raw is not None else g.raw
    return GadgetReport(
        degree_ok=pmax <= params.d_in and npmax <= params.d,
        port_degree_max=pmax,
        nonport_degree_max=npmax,
        bipartite=bipartite,
        left_ports=lp,
        right_ports=rp,
        port_counts_ok=lp == params.p and rp == params.p,
        max_multiplicity=max(raw.edges.values(), default=0) if raw is not None else None,
    )


def union_of_matchings(m: int, d: int, seed: int) -> Multigraph:
    """Multigraph union of ``d`` uniform perfect matchings between the two sides (no merging)."""
    L, R = np.arange(m), np.arange(m, 2 * m)
    return Multigraph.from_edges(2 * m, [e for k in range(d) for e in _matching_edges(stream(seed, "in", k), L, R)])


def spectral_gap(union: Multigraph, limit: int = DENSE_EIG_LIMIT) -> float:
    """Second largest eigenvalue of the multiplicity-weighted adjacency matrix."""
    if union.n > 2 * limit:
        raise TooLarge(f"dense eigen-solve limited to {limit} vertices per side")
    deg = union.degrees()
    if union.n == 0 or np.any(deg != deg[0]):
        raise NotRegular("spectral_gap needs a regular multigraph")
    eig = np.linalg.eigvalsh(union.adjacency())
    return float(eig[-2])


def sampled_edge_expansion(g: Multigraph, max_size: int, samples: int, seed: int) -> float:
    """Smallest ``|E(S, V-S)| / |S|`` over random connected-ish subsets grown by BFS.

    This is a heuristic upper estimate of the true minimum; exhaustive
    scans live in ``graph.expansion_min``.
    """
    rng = stream(seed, "expansion")
    best = math.inf
    for _ in range(samples):
        size = int(rng.integers(1, max_size + 1))
        start = int(rng.integers(g.n))
        S = {start}
        frontier = [start]
        while len(S) < size and frontier:
            x = frontier.pop(int(rng.integers(len(frontier))))
            for y in g.neighbors(x):
                if y not in S and len(S) < size:
                    S.add(y)
                    frontier.append(y)
        if len(S) == g.n:
            continue
        best = min(best, cut_size(g, S) / len(S))
    return best


def variant_frequency_table(params: IsingGadgetParams, draws: int, seed: int = 0) -> dict[str, Counter]:
    """Outcome frequencies of every generation variant over disjoint seed ranges."""
    tables = {}
    for i, variant in enumerate(VARIANTS):
        base = (seed * len(VARIANTS) + i) * draws
        tables[variant] = Counter(sample_gadget(params, variant, base + s).key() for s in range(draws))
    return tables


def variant_chi_square(tables: dict[str, Counter]) -> tuple[float, float]:
    """Chi-square homogeneity test across the variant frequency tables; returns (statistic, p-value)."""
    from scipy.stats import chi2_contingency

    outcomes = sorted(set().union(*tables.values()))
    obs = np.array([[tables[v][o] for o in outcomes] for v in tables])
    stat, pvalue, _, _ = chi2_contingency(obs)
    return float(stat), float(pvalue)
