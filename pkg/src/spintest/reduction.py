"""From MaxCut to Ising identity testing.

``build_H_bar`` adds two hub vertices ``s, t`` to a graph ``H`` so that the
cut ``({s, t}, V)`` has size ``2N^2``; deciding whether it is the unique
maximum cut is equivalent to ``MaxCut(H) < N^2 - w``.  A testing instance
replaces every vertex of the augmented graph by a copy of one random
bipartite gadget and every edge by ``2 * ell`` connector edges between
ports: left ports to left ports and right ports to right ports, so that
in an antiferromagnetic model two gadgets pay a penalty exactly when
they sit in the same phase.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np

from .errors import ConditionViolation, Infeasible, InvalidParams, PortExhaustion, TooLarge
from .gadget import GadgetInstance, IsingGadgetParams, sample_gadget
from .graph import Multigraph, _mask_cut_values, empty_graph, max_cut_exact
from .ising import (
    IsingModel,
    PhaseLayout,
    index_chunks,
    phase_codes,
    tv_between,
)
from .rng import child_seed, stream
from .verdict import Answer, TesterVerdict

TESTER_THRESHOLD = 1.0 / 3.0


# ---------------------------------------------------------------- augmented graph

@dataclass(frozen=True)
class AugmentedGraph:
    base: Multigraph
    w: int
    graph: Multigraph

    @property
    def N(self) -> int:
        return self.base.n

    @property
    def s(self) -> int:
        return self.base.n

    @property
    def t(self) -> int:
        return self.base.n + 1

    def hub_mask(self) -> int:
        return (1 << self.s) | (1 << self.t)


def build_H_bar(H: Multigraph, w: int) -> AugmentedGraph:
    """``H`` plus hubs ``s, t`` joined to every vertex with multiplicity ``N`` and to each other ``w`` times."""
    N = H.n
    if N < 2:
        raise InvalidParams("the base graph needs at least two vertices")
    if w < 0:
        raise InvalidParams("w must be non-negative")
    if any(m != 1 for m in H.edges.values()):
        raise InvalidParams("the base graph must be simple")
    s, t = N, N + 1
    edges = dict(H.edges)
    for v in range(N):
        edges[(v, s)] = N
        edges[(v, t)] = N
    if w:
        edges[(s, t)] = w
    return AugmentedGraph(H, w, Multigraph(N + 2, edges))


def _all_cuts(G: Multigraph, limit: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Every bipartition as a mask containing vertex 0, with its cut value."""
    if G.n > limit:
        raise TooLarge(f"cut enumeration limited to {limit} vertices")
    rest = np.arange((1 << (G.n - 1)) - 1, dtype=np.int64)
    masks = (rest << 1) | 1
    return masks, _mask_cut_values(G, masks)


class CutRegime(str, enum.Enum):
    UNIQUE = "unique"
    TIE = "tie"
    LARGER = "larger"


def cut_regime(H: Multigraph, w: int) -> CutRegime:
    """How ``({s,t}, V)`` compares with every other cut of the augmented graph, by enumeration."""
    aug = build_H_bar(H, w)
    masks, values = _all_cuts(aug.graph)
    hub = aug.hub_mask()
    full = (1 << aug.graph.n) - 1
    other = (masks != hub) & (masks != (full ^ hub))
    best_other = int(values[other].max())
    target = 2 * aug.N**2
    if best_other < target:
        return CutRegime.UNIQUE
    return CutRegime.TIE if best_other == target else CutRegime.LARGER


def two_large_cuts_criterion(H: Multigraph, w: int) -> bool:
    N = H.n
    best = max_cut_exact(H)[0] if H.n >= 2 else 0
    return best >= N * N - w


def two_large_cuts_enumeration(H: Multigraph, w: int) -> bool:
    aug = build_H_bar(H, w)
    _, values = _all_cuts(aug.graph)
    return int(np.count_nonzero(values >= 2 * aug.N**2)) >= 2


def two_large_cuts_exact(H: Multigraph, w: int) -> bool:
    """TRUE iff the augmented graph has two cuts of size at least ``2N^2``.

    Decided twice, through the max-cut criterion and through full cut
    enumeration; a disagreement raises.
    """
    by_rule = two_large_cuts_criterion(H, w)
    by_scan = two_large_cuts_enumeration(H, w)
    if by_rule != by_scan:
        raise AssertionError(f"criterion ({by_rule}) and enumeration ({by_scan}) disagree for w={w}")
    return by_rule


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class InstanceParams:
    m: int
    p: int
    d_in: int
    d_out: int
    ell: int

    @property
    def d(self) -> int:
        return self.d_in + self.d_out

    def gadget_params(self) -> IsingGadgetParams:
        return IsingGadgetParams(self.m, self.p, self.d_in, self.d_out)


def check_conditions(N: int, w: int, params: InstanceParams) -> dict[str, bool]:
    """Named construction conditions for an instance with ``N`` base vertices."""
    P = params
    return {
        "degree_fits": P.d <= P.m,
        "dout_divides_ell": P.d_out > 0 and P.ell % P.d_out == 0,
        "ports_suffice": P.ell * (N * N + w) <= P.p * P.d_out,
        "dout_squared_le_ell": P.d_out**2 <= P.ell,
    }


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            return r
        r = s


def _ceil_root(x: int, k: int) -> int:
    r = iroot(x, k)
    return r if r**k == x else r + 1


@dataclass
class ParameterChoice:
    N: int
    m: int
    p: int
    d_in: int
    d_out: int
    ell: int
    regime: str
    conditions: dict[str, bool]
    notes: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return all(self.conditions.values())

    @property
    def vertices(self) -> int:
        return 2 * self.m * (self.N + 2)

    def instance_params(self) -> InstanceParams:
        return InstanceParams(self.m, self.p, self.d_in, self.d_out, self.ell)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["feasible"] = self.feasible
        out["vertices"] = self.vertices
        return out


def theta(rho: float) -> float:
    return (300 + 0.75 * rho) / (300 + rho)


def select_parameters(
    n: int,
    d: int,
    rho: float | None = None,
    low_degree_cutoff: int = 16,
    overrides: dict | None = None,
    w: int | None = None,
) -> ParameterChoice:
    """Instance parameters for target size ``n`` and degree ``d``.

    Bounded degree (``d <= low_degree_cutoff``): ``N = floor(n^(1/14)) - 2``,
    ``m = floor(n^(13/14) / 2)``, ``p = floor(m^(1/4))``, ``d_in = d - 1``,
    ``d_out = 1`` and ``ell`` of order ``n^(9/112)``.  Growing degree with
    ``d = n^rho``: ``N = floor(n^(rho/4)) - 2``, ``m = floor(n^(1 - rho/4) / 2)``,
    ``p = m``, ``d_in = floor(theta d)``, ``d_out = d - d_in`` and ``ell`` of
    order ``n^(1 - 3 rho/4)``.  The order-of-magnitude ``ell`` is taken as the
    ceiling of the power, rounded up to a multiple of ``d_out``, then lowered
    to the largest such multiple the ports can carry.

    ``overrides`` may fix any of ``N, m, p, d_in, d_out, ell``; the result
    then reports the conditions instead of raising.  ``w`` defaults to the
    worst case ``N^2``.
    """
    if d < 3 or n < 1:
        raise InvalidParams("need n >= 1 and d >= 3")
    overrides = dict(overrides or {})
    unknown = set(overrides) - {"N", "m", "p", "d_in", "d_out", "ell"}
    if unknown:
        raise InvalidParams(f"unknown overrides {sorted(unknown)}")
    notes: list[str] = []
    if d <= low_degree_cutoff:
        regime = "low-degree"
        N = overrides.get("N", iroot(n, 14) - 2)
        m = overrides.get("m", iroot(n**13, 14) // 2)
        p = overrides.get("p", iroot(m, 4))
        d_in = overrides.get("d_in", d - 1)
        d_out = overrides.get("d_out", 1)
        ell_target = _ceil_root(n**9, 112)
    else:
        regime = "high-degree"
        if rho is None:
            rho = math.log(d) / math.log(n)
        if not 0 < rho < 1:
            raise InvalidParams("rho must lie in (0, 1)")
        N = overrides.get("N", math.floor(n ** (rho / 4) + 1e-9) - 2)
        m = overrides.get("m", math.floor(n ** (1 - rho / 4) / 2 + 1e-9))
        p = overrides.get("p", m)
        d_in = overrides.get("d_in", math.floor(theta(rho) * d))
        d_out = overrides.get("d_out", d - d_in)
        ell_target = math.ceil(n ** (1 - 0.75 * rho) - 1e-9)
        notes.append(f"theta={theta(rho):.6f}")
    if N < 2:
        raise Infeasible(f"n={n} gives N={N}; at least two base vertices are needed")
    w_eff = N * N if w is None else w
    if d_out < 1:
        raise Infeasible("d_out must be positive")
    ell = overrides.get("ell", -(-ell_target // d_out) * d_out)
    if not overrides:
        cap = (p * d_out // (N * N + w_eff)) // d_out * d_out
        if cap < ell:
            notes.append(f"ell lowered from {ell} to {cap} so the ports can carry every connector")
            ell = cap
    conditions = check_conditions(N, w_eff, InstanceParams(m, p, d_in, d_out, ell))
    conditions["positive_ell"] = ell > 0
    choice = ParameterChoice(N, m, p, d_in, d_out, ell, regime, conditions, notes)
    if choice.vertices < n:
        notes.append(f"pad with {n - choice.vertices} isolated vertices to reach n={n}")
    if not overrides and not choice.feasible:
        failed = [k for k, ok in conditions.items() if not ok]
        raise Infeasible(f"construction conditions fail at n={n}, d={d}: {failed}")
    return choice


def desk_parameters(N: int, w: int, beta: float, d_in: int = 2, d_out: int = 1) -> InstanceParams:
    """Smallest instance meeting every construction condition and ``|beta| (ell - d) >= N``.

    Ports are sized for the busiest augmented-graph vertex: a hub carries
    ``N^2 + w`` edge units and a base vertex at most ``3N - 1``, which is
    larger only when ``N = 2`` and ``w = 0``.
    """
    d = d_in + d_out
    ell = max(d_out**2, d + math.ceil(N / abs(beta)))
    ell = -(-ell // d_out) * d_out
    p = -(-ell * max(N * N + w, 3 * N - 1) // d_out)
    return InstanceParams(max(p, d), p, d_in, d_out, ell)


# ---------------------------------------------------------------- instances

@dataclass(frozen=True, eq=False)
class TestingInstance:
    """The model pair of the reduction, sharing one gadget sample."""

    __test__ = False  # not a pytest class

    M_graph: Multigraph
    Mstar_graph: Multigraph
    layout: PhaseLayout
    beta: float
    params: InstanceParams
    aug: AugmentedGraph
    gadget: GadgetInstance
    gadget_seed: int
    port_reuse: bool = False

    @property
    def N(self) -> int:
        return self.aug.N

    @property
    def w(self) -> int:
        return self.aug.w

    @property
    def n(self) -> int:
        return self.M_graph.n

    def model(self) -> IsingModel:
        return IsingModel.homogeneous(self.M_graph, self.beta)

    def star_model(self) -> IsingModel:
        return IsingModel.homogeneous(self.Mstar_graph, self.beta)

    def sigma_plus(self) -> int:
        """Index of the configuration with the hub gadgets plus and the rest minus."""
        return self.layout.config({self.aug.s, self.aug.t})

    def sigma_minus(self) -> int:
        return self.layout.config(set(range(self.N)))

    def sidecar(self) -> dict:
        return {
            "N": self.N,
            "w": self.w,
            "beta": self.beta,
            "params": asdict(self.params),
            "gadget_seed": self.gadget_seed,
            "port_reuse": self.port_reuse,
            "layout": {"left": [list(x) for x in self.layout.left], "right": [list(x) for x in self.layout.right]},
            "ports": list(self.gadget.ports),
        }


class _PortPool:
    """First-free allocation of the ports of one side of one gadget copy."""

    def __init__(self, ports: Sequence[int], reuse: bool):
        self.ports = list(ports)
        self.next = 0
        self.reuse = reuse

    def take(self, count: int) -> list[int]:
        if self.reuse:
            if not self.ports:
                raise PortExhaustion("gadget has no ports")
            out = [self.ports[(self.next + i) % len(self.ports)] for i in range(count)]
        else:
            if self.next + count > len(self.ports):
                raise PortExhaustion(f"needed {count} more ports, {len(self.ports) - self.next} left")
            out = self.ports[self.next:self.next + count]
        self.next += count
        return out


def _connect(edges: dict, a: list[int], b: list[int], d_out: int) -> None:
    """Circulant d_out-regular bipartite graph: a[i] joined to b[(i + j) mod k]."""
    k = len(a)
    for i in range(k):
        for j in range(d_out):
            key = tuple(sorted((a[i], b[(i + j) % k])))
            edges[key] = edges.get(key, 0) + 1


def _expand(logical: Multigraph, gadget: GadgetInstance, params: InstanceParams, reuse: bool) -> Multigraph:
    m = gadget.m
    size = 2 * m
    edges: dict[tuple[int, int], int] = {}
    for v in range(logical.n):
        off = v * size
        for (a, b), mult in gadget.graph.edges.items():
            edges[(a + off, b + off)] = mult
    pools_l = [_PortPool([x + v * size for x in gadget.left_ports], reuse) for v in range(logical.n)]
    pools_r = [_PortPool([x + v * size for x in gadget.right_ports], reuse) for v in range(logical.n)]
    group = params.ell // params.d_out
    for (u, v), mult in logical.edges.items():
        for _ in range(mult):
            _connect(edges, pools_l[u].take(group), pools_l[v].take(group), params.d_out)
            _connect(edges, pools_r[u].take(group), pools_r[v].take(group), params.d_out)
    return Multigraph(logical.n * size, edges)


def build_testing_instance(
    H: Multigraph,
    w: int,
    params: InstanceParams,
    beta: float,
    seed: int = 0,
    gadget: GadgetInstance | None = None,
    allow_port_reuse: bool = False,
) -> TestingInstance:
    """Expand the augmented graph of ``(H, w)`` and of an ``N``-vertex independent set.

    Both expansions use the same gadget sample.  With ``allow_port_reuse``
    the construction conditions are not enforced: ports are reused
    cyclically and connectors may become parallel edges.  That mode exists
    for tiny instances whose full configuration space can be enumerated;
    it keeps exactly ``2 * ell`` connector edges per augmented-graph edge.
    """
    aug = build_H_bar(H, w)
    star = build_H_bar(empty_graph(H.n), 0)
    if not allow_port_reuse:
        cond = check_conditions(H.n, w, params)
        if not cond["ports_suffice"]:
            raise PortExhaustion(f"ell*(N^2+w) = {params.ell * (H.n**2 + w)} exceeds p*d_out = {params.p * params.d_out}")
        failed = [k for k, ok in cond.items() if not ok]
        if failed:
            raise ConditionViolation(f"construction conditions fail: {failed}")
    elif params.d_out < 1 or params.ell % params.d_out:
        raise ConditionViolation("ell must be a positive multiple of d_out")
    if gadget is None:
        gadget = sample_gadget(params.gadget_params(), "direct", child_seed(seed, "gadget"))
    elif gadget.m != params.m:
        raise ConditionViolation("hand-built gadget has a different side size")
    size = 2 * gadget.m
    layout = PhaseLayout(
        tuple(tuple(range(v * size, v * size + gadget.m)) for v in range(aug.graph.n)),
        tuple(tuple(range(v * size + gadget.m, (v + 1) * size)) for v in range(aug.graph.n)),
        aug.graph.n * size,
    )
    M_graph = _expand(aug.graph, gadget, params, allow_port_reuse)
    Mstar_graph = _expand(star.graph, gadget, params, allow_port_reuse)
    return TestingInstance(M_graph, Mstar_graph, layout, float(beta), params, aug, gadget, gadget.seed, allow_port_reuse)


def sample_M_star_batch(instance: TestingInstance, count: int, seed: int = 0) -> np.ndarray:
    """``count`` draws of the two-point sampler as a (count, n) spin array."""
    plus = np.zeros(instance.n, dtype=np.int8)
    for v, (left, right) in enumerate(zip(instance.layout.left, instance.layout.right)):
        hub = v in (instance.aug.s, instance.aug.t)
        plus[list(left)] = 1 if hub else -1
        plus[list(right)] = -1 if hub else 1
    flips = stream(seed, "mstar").random(count) < 0.5
    out = np.tile(plus, (count, 1))
    out[flips] *= -1
    return out


def sample_M_star(instance: TestingInstance, seed: int = 0) -> np.ndarray:
    """``sigma_plus`` or its global flip, each with probability one half."""
    return sample_M_star_batch(instance, 1, seed)[0]


# ---------------------------------------------------------------- testers

Tester = Callable[[TestingInstance, np.ndarray], TesterVerdict]


def _phase_model(aug_graph: Multigraph, beta: float, ell: int) -> IsingModel:
    return IsingModel.homogeneous(aug_graph, 2 * ell * beta)


def phase_tv(instance: TestingInstance) -> float:
    """Exact TV between the two models conditioned on every gadget being in a pure phase.

    On that event a configuration is a phase pattern of the augmented
    graph, weighted like an Ising model with coupling ``2 * ell * beta``.
    """
    star = build_H_bar(empty_graph(instance.N), 0)
    return tv_between(_phase_model(instance.aug.graph, instance.beta, instance.params.ell),
                      _phase_model(star.graph, instance.beta, instance.params.ell))


def phase_oracle_tester(instance: TestingInstance, samples: np.ndarray) -> TesterVerdict:
    """YES iff the phase-conditioned models are within TV 1/3; ignores the samples."""
    tv = phase_tv(instance)
    return TesterVerdict(Answer.YES if tv <= TESTER_THRESHOLD else Answer.NO,
                         {"tv": tv, "stage": "phase-oracle", "samples": int(len(samples))})


def exact_tv(instance: TestingInstance, precision: int = 60, limit: int = 24) -> float:
    """Exact TV between the two full models.

    One enumeration pass buckets configurations by their agreement counts
    in both graphs; the TV is then a finite sum of powers of ``e^beta``.
    """
    import mpmath

    if instance.n > limit:
        raise TooLarge(f"instance has {instance.n} vertices, exact TV limited to {limit}")
    hist = _histograms(instance)
    with mpmath.workdps(precision):
        x = mpmath.exp(mpmath.mpf(instance.beta))
        Z_M = mpmath.fsum(c * x**a for (a, b, _), c in hist.counts.items())
        Z_S = mpmath.fsum(c * x**b for (a, b, _), c in hist.counts.items())
        tv = mpmath.fsum(c * abs(x**a / Z_M - x**b / Z_S) for (a, b, _), c in hist.counts.items()) / 2
        return float(tv)


def exact_tv_tester(instance: TestingInstance, samples: np.ndarray) -> TesterVerdict:
    """YES iff the full models are within TV 1/3, by enumeration of every configuration."""
    tv = exact_tv(instance)
    return TesterVerdict(Answer.YES if tv <= TESTER_THRESHOLD else Answer.NO,
                         {"tv": tv, "stage": "exact-tv", "samples": int(len(samples))})


def constant_tester(answer: Answer) -> Tester:
    return lambda instance, samples: TesterVerdict(Answer(answer), {"stage": "constant"})


@dataclass
class MaxCutDecision:
    value: bool
    w: int | None
    votes: list[str]
    reason: str = "tester"

    def __bool__(self) -> bool:
        return self.value


def maxcut_via_tester(
    H: Multigraph,
    k: int,
    tester: Tester,
    trials: int = 1,
    params: InstanceParams | None = None,
    beta: float = -1.0,
    samples: int = 1,
    seed: int = 0,
    gadget: GadgetInstance | None = None,
    allow_port_reuse: bool = False,
) -> MaxCutDecision:
    """Decide whether ``H`` has a cut of size at least ``k`` with a model-pair tester.

    With ``w = N^2 - k`` the hub cut is the unique maximum exactly when no
    such cut exists, and the tester then sees close models and says YES;
    the decision is the negation of the majority answer.
    """
    N = H.n
    if k <= 0:
        return MaxCutDecision(True, None, [], "every graph has a cut of size 0")
    if k > N * N:
        return MaxCutDecision(False, None, [], "k exceeds N^2, more than any simple N-vertex graph has edges")
    w = N * N - k
    if params is None:
        params = desk_parameters(N, w, beta)
    votes = []
    for trial in range(trials):
        inst = build_testing_instance(H, w, params, beta, child_seed(seed, "trial", trial), gadget, allow_port_reuse)
        draws = sample_M_star_batch(inst, samples, child_seed(seed, "samples", trial))
        votes.append(tester(inst, draws).answer.value)
    no_votes = sum(v == Answer.NO.value for v in votes)
    return MaxCutDecision(2 * no_votes > trials, w, votes)


# ---------------------------------------------------------------- exact regime check

@dataclass
class BoundCheck:
    name: str
    lhs: float
    relation: str
    rhs: float
    holds: bool
    slack: str
    asserted: bool


@dataclass
class RegimeReport:
    regime: CutRegime
    eps_M: float
    eps_Mstar: float
    tv: float
    tv_sampler: float
    mu_M_pair: float
    mu_Mstar_pair: float
    hypotheses: dict[str, bool]
    checks: list[BoundCheck]
    vertices: int
    d: int

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks if c.asserted)


@dataclass
class _Histograms:
    """Exact configuration counts keyed by (agreements in M, agreements in M*, pure-phase flag)."""

    counts: dict[tuple[int, int, bool], int]
    plus: tuple[int, int]
    minus: tuple[int, int]


def _agreement_counts(G: Multigraph, idx: np.ndarray) -> np.ndarray:
    us, vs, ms = G.edge_arrays()
    out = np.zeros(idx.shape[0], dtype=np.int32)
    for u, v, m in zip(us.tolist(), vs.tolist(), ms.tolist()):
        out += m * (1 - (((idx >> u) ^ (idx >> v)) & 1)).astype(np.int32)
    return out


def _histograms(inst: TestingInstance) -> _Histograms:
    top_a = inst.M_graph.total_multiplicity + 1
    top_b = inst.Mstar_graph.total_multiplicity + 1
    acc = np.zeros(top_a * top_b * 2, dtype=np.int64)
    for idx in index_chunks(inst.n):
        a = _agreement_counts(inst.M_graph, idx).astype(np.int64)
        b = _agreement_counts(inst.Mstar_graph, idx).astype(np.int64)
        good = np.all(phase_codes(inst.layout, idx) != 0, axis=1).astype(np.int64)
        acc += np.bincount((a * top_b + b) * 2 + good, minlength=acc.size)
    counts = {}
    for key in np.nonzero(acc)[0].tolist():
        ab, good = divmod(key, 2)
        a, b = divmod(ab, top_b)
        counts[(a, b, bool(good))] = int(acc[key])

    def pair(i):
        x = np.array([i], dtype=np.int64)
        return int(_agreement_counts(inst.M_graph, x)[0]), int(_agreement_counts(inst.Mstar_graph, x)[0])

    return _Histograms(counts, pair(inst.sigma_plus()), pair(inst.sigma_minus()))


def tv_regime_check(
    H: Multigraph,
    w: int,
    params: InstanceParams,
    beta: float,
    seed: int = 0,
    gadget: GadgetInstance | None = None,
    allow_port_reuse: bool = True,
    precision: int = 120,
    limit: int = 24,
) -> RegimeReport:
    """Exact check of the closeness and separation bounds on a tiny instance.

    Every configuration is enumerated once and bucketed by its number of
    agreeing edges in both models; with a homogeneous ``beta`` the weights
    are powers of ``e^beta``, so all quantities follow from integer counts
    evaluated in high-precision arithmetic.
    """
    import mpmath

    if beta >= 0:
        raise InvalidParams("the reduction uses an antiferromagnetic beta < 0")
    inst = build_testing_instance(H, w, params, beta, seed, gadget, allow_port_reuse)
    if inst.n > limit:
        raise TooLarge(f"instance has {inst.n} vertices, exact check limited to {limit}")
    hist = _histograms(inst)
    regime = cut_regime(H, w)
    N, d, ell = H.n, params.d, params.ell
    with mpmath.workdps(precision):
        x = mpmath.exp(mpmath.mpf(beta))
        Z_M = Z_S = Zg_M = Zg_S = mpmath.mpf(0)
        for (a, b, good), c in hist.counts.items():
            Z_M += c * x**a
            Z_S += c * x**b
            if good:
                Zg_M += c * x**a
                Zg_S += c * x**b
        tv = mpmath.mpf(0)
        for (a, b, _), c in hist.counts.items():
            tv += c * abs(x**a / Z_M - x**b / Z_S)
        tv /= 2
        eps_M = 1 - Zg_M / Z_M
        eps_S = 1 - Zg_S / Z_S
        eps = max(eps_M, eps_S)
        mu_M0 = (x ** hist.plus[0] + x ** hist.minus[0]) / Z_M
        mu_S_plus, mu_S_minus = x ** hist.plus[1] / Z_S, x ** hist.minus[1] / Z_S
        mu_S0 = mu_S_plus + mu_S_minus
        tv_alg = (abs(mu_S_plus - mpmath.mpf(1) / 2) + abs(mu_S_minus - mpmath.mpf(1) / 2) + (1 - mu_S0)) / 2
        e2 = mpmath.exp(-2 * abs(mpmath.mpf(beta)) * d)

        hyp = {
            "main": abs(beta) * (ell - d) >= N,
            "two_point": abs(beta) * (ell * N - d) >= N,
        }
        checks: list[BoundCheck] = []

        def add(name, lhs, rel, rhs, asserted):
            if rel == "<=":
                holds, slack = lhs <= rhs, rhs - lhs
            elif rel == ">=":
                holds, slack = lhs >= rhs, lhs - rhs
            else:
                holds, slack = lhs > rhs, lhs - rhs
            checks.append(BoundCheck(name, float(lhs), rel, float(rhs), bool(holds), mpmath.nstr(slack, 12), asserted))

        add("two-point mass of M*", mu_S0, ">=", 1 - eps_S - e2, hyp["two_point"])
        add("two-point sampler TV", tv_alg, "<=", eps_S + e2, hyp["two_point"])
        if regime is CutRegime.UNIQUE:
            add("two-point mass of M", mu_M0, ">=", 1 - eps_M - e2, hyp["main"])
            add("TV when the hub cut is the unique maximum", tv, "<=", 2 * (eps + e2), hyp["main"])
        else:
            add("two-point mass of M at most one half", mu_M0, "<=", mpmath.mpf(1) / 2, hyp["main"])
            add("TV when the hub cut is not the unique maximum", tv, ">", mpmath.mpf(1) / 2 - eps - e2,
                hyp["main"] and hyp["two_point"])
        if regime is CutRegime.LARGER:
            add("two-point mass of M when a larger cut exists", mu_M0, "<=", e2, hyp["main"])
            add("TV when a strictly larger cut exists", tv, ">=", 1 - eps - 2 * e2,
                hyp["main"] and hyp["two_point"])
        return RegimeReport(regime, float(eps_M), float(eps_S), float(tv), float(tv_alg), float(mu_M0),
                            float(mu_S0), hyp, checks, inst.n, d)


def micro_gadget(kind: str = "K33") -> GadgetInstance:
    """Hand-built 6-vertex gadgets with every vertex a port: ``K33`` or ``C6``."""
    if kind == "K33":
        edges = [(a, 3 + b) for a in range(3) for b in range(3)]
    elif kind == "C6":
        edges = [(0, 3), (3, 1), (1, 4), (4, 2), (2, 5), (5, 0)]
    else:
        raise InvalidParams(f"unknown micro gadget {kind!r}")
    return GadgetInstance(Multigraph.from_edges(6, edges), 3, tuple(range(6)), 0, variant=f"micro-{kind}")
