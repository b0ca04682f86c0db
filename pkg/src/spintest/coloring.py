"""Proper colorings: exact counting, the clique gadget and the testing instances.

Colors are ``0..q-1`` in memory and ``1..q`` in text form.  Counts are
Python integers throughout since they overflow 64 bits immediately.

Instance layout (pre-gadget level).  For ``q >= 4`` the ``k`` copies of
``H`` come first (copy ``i`` at offset ``i*N``), followed by ``J``, a
complete ``(q-3)``-partite graph whose cluster ``c`` occupies
``kN + c*ell .. kN + (c+1)*ell - 1``.  For ``q = 3`` each copy is the
``4N+2`` vertex graph from :func:`tilde_graph` and ``J`` is an
independent set of ``ell`` vertices joined to both interfaces of every
copy.  After gadget expansion logical vertex ``v`` owns the block
``v*size .. (v+1)*size - 1``.
"""
from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    BudgetExceeded,
    ImproperColoring,
    InvalidMode,
    InvalidParams,
    NoProperColoring,
    NotBipartite,
    NotConnected,
    PortExhaustion,
)
from .graph import Multigraph
from .rng import py_stream

MODE_HIGH = "q>=4"
MODE_THREE = "q=3"
MODES = (MODE_HIGH, MODE_THREE)
DEFAULT_NODE_BUDGET = 10**8


# ---------------------------------------------------------------- integer formulas

def critical_degree(q: int) -> int:
    """``q + ceil(sqrt(q - 3/4) - 1/2)``, computed in exact integers."""
    if q < 3:
        raise InvalidParams("critical degree needs q >= 3")
    k = 0
    while (2 * k + 1) ** 2 < 4 * q - 3:
        k += 1
    return q + k


def default_port_count(q: int) -> int:
    """Port-set size ``t = ceil(sqrt(q - 3/4) + 1/2)`` of the gadget."""
    if q < 3:
        raise InvalidParams("port count needs q >= 3")
    k = 1
    while (2 * k - 1) ** 2 < 4 * q - 3:
        k += 1
    return k


def z3_complete_bipartite(n1: int, n2: int) -> int:
    """Number of proper 3-colorings of ``K_{n1,n2}``."""
    return 3 * (2**n1 + 2**n2 - 2)


# ---------------------------------------------------------------- counting

@dataclass(frozen=True, eq=False)
class ColoringModel:
    """Uniform distribution over proper ``q``-colorings of a simple graph."""

    graph: Multigraph
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise InvalidParams("need q >= 2")
        if any(m > 1 for m in self.graph.edges.values()):
            raise InvalidParams("coloring models need a simple graph")


def is_proper(G: Multigraph, colors) -> bool:
    c = np.asarray(colors)
    if c.shape != (G.n,):
        return False
    u, v, _ = G.edge_arrays()
    return bool(np.all(c[u] != c[v]))


def _search_order(G: Multigraph, pinned: Mapping[int, int]) -> list[int]:
    """Pinned vertices, then highest degree first with ties broken toward already placed neighbors."""
    deg = G.degrees()
    order = sorted(pinned)
    placed = set(order)
    links = np.zeros(G.n, dtype=np.int64)
    for v in order:
        for u in G.neighbors(v):
            links[u] += 1
    while len(order) < G.n:
        best = max((v for v in range(G.n) if v not in placed), key=lambda v: (links[v], deg[v], -v))
        order.append(best)
        placed.add(best)
        for u in G.neighbors(best):
            links[u] += 1
    return order


class _Search:
    """Backtracking over a fixed vertex order, checking earlier neighbors only."""

    def __init__(self, G: Multigraph, q: int, pinned: Mapping[int, int], budget: int):
        for v, c in pinned.items():
            if not (0 <= v < G.n and 0 <= c < q):
                raise InvalidParams(f"pin {v} -> {c} is outside the graph or the palette")
        self.q = q
        self.order = _search_order(G, pinned)
        pos = {v: i for i, v in enumerate(self.order)}
        self.earlier = [tuple(u for u in G.neighbors(v) if pos[u] < i) for i, v in enumerate(self.order)]
        self.choices = [(pinned[v],) if v in pinned else tuple(range(q)) for v in self.order]
        self.budget = budget
        self.n = G.n

    def _candidates(self, i: int, colors: list[int]) -> list[int]:
        used = {colors[u] for u in self.earlier[i]}
        return [c for c in self.choices[i] if c not in used]

    def count(self, first_color: int) -> tuple[int, int]:
        colors = [-1] * self.n
        nodes = 0
        order = self.order

        def rec(i: int) -> int:
            nonlocal nodes
            if i == len(order):
                return 1
            total = 0
            for c in self._candidates(i, colors):
                nodes += 1
                if nodes > self.budget:
                    raise BudgetExceeded(f"backtracking exceeded {self.budget} nodes")
                colors[order[i]] = c
                total += rec(i + 1)
            colors[order[i]] = -1
            return total

        colors[order[0]] = first_color
        return rec(1), nodes

    def enumerate(self) -> Iterator[tuple[int, ...]]:
        colors = [-1] * self.n
        order = self.order
        nodes = 0

        def rec(i: int):
            nonlocal nodes
            if i == len(order):
                yield tuple(colors)
                return
            for c in self._candidates(i, colors):
                nodes += 1
                if nodes > self.budget:
                    raise BudgetExceeded(f"backtracking exceeded {self.budget} nodes")
                colors[order[i]] = c
                yield from rec(i + 1)
            colors[order[i]] = -1

        if self.n == 0:
            yield ()
            return
        yield from rec(0)


def count_colorings(
    G: Multigraph,
    q: int,
    restriction: Mapping[int, int] | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> int:
    """Exact number of proper ``q``-colorings, optionally with pinned vertices.

    The search splits on the color of the first vertex; branches run in
    parallel when ``workers > 1`` and their node counts are summed before
    the budget check, so the outcome never depends on ``workers``.
    """
    pinned = dict(restriction or {})
    if G.n == 0:
        return 1
    search = _Search(G, q, pinned, budget)
    firsts = search.choices[0]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(search.count, firsts))
    else:
        parts = [search.count(c) for c in firsts]
    if sum(nodes for _, nodes in parts) > budget:
        raise BudgetExceeded(f"backtracking exceeded {budget} nodes")
    return sum(c for c, _ in parts)


def enumerate_colorings(
    G: Multigraph, q: int, restriction: Mapping[int, int] | None = None, budget: int = DEFAULT_NODE_BUDGET
) -> Iterator[tuple[int, ...]]:
    """All proper colorings in a fixed deterministic order."""
    return _Search(G, q, dict(restriction or {}), budget).enumerate()


def uniform_coloring_exact(G: Multigraph, q: int, seed: int = 0, budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """Exactly uniform proper coloring: a uniform big-integer rank into the enumeration."""
    total = count_colorings(G, q, budget=budget)
    if total == 0:
        raise NoProperColoring(f"graph has no proper {q}-coloring")
    r = py_stream(seed, "uniform-coloring").randrange(total)
    return np.array(next(itertools.islice(enumerate_colorings(G, q, budget=budget), r, None)), dtype=np.int16)


def uniform_colorings_exact(G: Multigraph, q: int, count: int, seed: int = 0, budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """``count`` i.i.d. exactly uniform colorings; enumerates once."""
    table = np.array(list(enumerate_colorings(G, q, budget=budget)), dtype=np.int16).reshape(-1, G.n)
    if table.shape[0] == 0:
        raise NoProperColoring(f"graph has no proper {q}-coloring")
    rng = py_stream(seed, "uniform-coloring")
    return table[[rng.randrange(table.shape[0]) for _ in range(count)]]


def format_coloring(colors, q: int | None = None) -> str:
    """Digit string over ``1..q``; space separated when ``q`` (or, if omitted, a color) exceeds 9."""
    vals = [int(c) + 1 for c in colors]
    top = q if q is not None else max(vals, default=0)
    if top > 9:
        return " ".join(map(str, vals))
    return "".join(map(str, vals))


def parse_coloring(text: str, q: int | None = None) -> np.ndarray:
    """Inverse of :func:`format_coloring`; pass ``q`` to read a single-color string for ``q > 9``."""
    text = text.strip()
    spaced = " " in text or (q is not None and q > 9)
    parts = text.split() if spaced else list(text)
    return np.array([int(p) - 1 for p in parts], dtype=np.int16)


# ---------------------------------------------------------------- gadget

@dataclass(frozen=True, eq=False)
class ColoringGadget:
    """``m`` cliques of size ``q-1`` each followed by its port set of size ``t``."""

    graph: Multigraph
    m: int
    q: int
    t: int
    cliques: tuple[tuple[int, ...], ...]
    port_sets: tuple[tuple[int, ...], ...]

    @property
    def ports(self) -> tuple[int, ...]:
        return tuple(v for s in self.port_sets for v in s)

    @property
    def size(self) -> int:
        return self.graph.n


def clique_blocks(size: int, t: int) -> list[range]:
    """Contiguous near-equal blocks of ``range(size)``, larger blocks first."""
    base, extra = divmod(size, t)
    out, start = [], 0
    for j in range(t):
        width = base + (1 if j < extra else 0)
        out.append(range(start, start + width))
        start += width
    return out


def build_gadget_coloring(m: int, q: int, t: int) -> ColoringGadget:
    """Gadget on ``m(q-1+t)`` vertices whose ports share one color in every proper coloring.

    Clique ``C_i`` is complete to its port set ``I_i``; for ``i >= 1`` the
    ``j``-th port of ``I_{i-1}`` is complete to the ``j``-th block of ``C_i``.
    """
    if m < 1 or not (1 <= t < q):
        raise InvalidParams(f"need m >= 1 and 1 <= t < q, got m={m}, q={q}, t={t}")
    stride = q - 1 + t
    cliques = tuple(tuple(range(i * stride, i * stride + q - 1)) for i in range(m))
    port_sets = tuple(tuple(range(i * stride + q - 1, (i + 1) * stride)) for i in range(m))
    edges = []
    blocks = clique_blocks(q - 1, t)
    for i in range(m):
        C, I = cliques[i], port_sets[i]
        edges += itertools.combinations(C, 2)
        edges += [(u, v) for u in C for v in I]
        if i > 0:
            for j, block in enumerate(blocks):
                edges += [(port_sets[i - 1][j], C[x]) for x in block]
    return ColoringGadget(Multigraph.from_edges(m * stride, edges), m, q, t, cliques, port_sets)


# ---------------------------------------------------------------- instances

def tilde_graph(H: Multigraph) -> tuple[Multigraph, int, int]:
    """Graph on ``4N+2`` vertices with interfaces ``s, t``.

    Vertex ``v`` of ``H`` keeps its label; the triangle of ``v`` is
    ``a_v, b_v, c_v = N+3v, N+3v+1, N+3v+2`` with ``v ~ a_v``,
    ``s ~ b_v`` and ``t ~ c_v``; ``s = 4N`` and ``t = 4N+1``.
    """
    N = H.n
    s, t = 4 * N, 4 * N + 1
    edges = list(H.edges)
    for v in range(N):
        a, b, c = N + 3 * v, N + 3 * v + 1, N + 3 * v + 2
        edges += [(a, b), (b, c), (a, c), (v, a), (s, b), (t, c)]
    return Multigraph.from_edges(4 * N + 2, edges), s, t


def complete_bipartite_like(H: Multigraph) -> Multigraph:
    """Complete bipartite graph on the vertex bipartition of ``H``."""
    sides = H.bipartition()
    if sides is None:
        raise NotBipartite("graph is not bipartite")
    U, W = sides
    return Multigraph.from_edges(H.n, [(u, w) for u in U for w in W])


def _pre_graph(base: Multigraph, k: int, ell: int, q: int, mode: str):
    """Pre-gadget graph, the offset of every copy, ``J`` and the interfaces."""
    N = base.n
    edges = []
    if mode == MODE_HIGH:
        size = N
        offsets = [i * N for i in range(k)]
        for off in offsets:
            edges += [(u + off, v + off) for u, v in base.edges]
        j0 = k * N
        clusters = [list(range(j0 + c * ell, j0 + (c + 1) * ell)) for c in range(q - 3)]
        J = [v for c in clusters for v in c]
        for a, b in itertools.combinations(range(q - 3), 2):
            edges += [(u, v) for u in clusters[a] for v in clusters[b]]
        edges += [(h, j) for h in range(k * N) for j in J]
        return Multigraph.from_edges(j0 + len(J), edges), offsets, tuple(J), ()
    tilde, s, t = tilde_graph(base)
    size = tilde.n
    offsets = [i * size for i in range(k)]
    interfaces = []
    for off in offsets:
        edges += [(u + off, v + off) for u, v in tilde.edges]
        interfaces.append((s + off, t + off))
    J = tuple(range(k * size, k * size + ell))
    edges += [(x, j) for st in interfaces for x in st for j in J]
    return Multigraph.from_edges(k * size + ell, edges), offsets, J, tuple(interfaces)


@dataclass(frozen=True, eq=False)
class ColoringInstance:
    mode: str
    q: int
    k: int
    ell: int
    H: Multigraph
    B: Multigraph
    sides: tuple[tuple[int, ...], tuple[int, ...]]
    pre_graph: Multigraph
    pre_star: Multigraph
    copy_offsets: tuple[int, ...]
    J: tuple[int, ...]
    interfaces: tuple[tuple[int, int], ...]
    gadget: ColoringGadget | None
    graph: Multigraph
    star_graph: Multigraph
    connectors: tuple[tuple[int, int, int, int], ...] = ()

    @property
    def N(self) -> int:
        return self.H.n

    @property
    def logical_n(self) -> int:
        return self.pre_graph.n

    @property
    def expanded(self) -> bool:
        return self.gadget is not None

    @property
    def n(self) -> int:
        return self.graph.n

    def J_clusters(self) -> list[tuple[int, ...]]:
        if self.mode == MODE_THREE:
            return [self.J]
        return [self.J[c * self.ell:(c + 1) * self.ell] for c in range(self.q - 3)]

    def gadget_block(self, v: int) -> range:
        size = self.gadget.size
        return range(v * size, (v + 1) * size)

    def ports_of(self, v: int) -> tuple[int, ...]:
        off = v * self.gadget.size
        return tuple(off + p for p in self.gadget.ports)

    def sidecar(self) -> dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "k": self.k,
            "ell": self.ell,
            "N": self.N,
            "m": self.gadget.m if self.gadget else None,
            "t": self.gadget.t if self.gadget else None,
            "logical_vertices": self.logical_n,
            "vertices": self.n,
            "copy_offsets": list(self.copy_offsets),
            "J": list(self.J),
            "interfaces": [list(x) for x in self.interfaces],
            "gadget_size": self.gadget.size if self.gadget else 1,
        }


def resolve_mode(q: int, mode: str | None) -> str:
    if mode is None:
        mode = MODE_THREE if q == 3 else MODE_HIGH
    if mode not in MODES:
        raise InvalidMode(f"unknown mode {mode!r}; choose from {MODES}")
    if (mode == MODE_THREE) != (q == 3) or q < 3:
        raise InvalidMode(f"mode {mode} does not fit q={q}")
    return mode


def build_instance(
    H: Multigraph,
    k: int,
    ell: int,
    q: int,
    mode: str | None = None,
    expand: bool = True,
    gadget_m: int | None = None,
    gadget_t: int | None = None,
) -> ColoringInstance:
    """Build the pair of testing instances for ``H`` and its complete bipartite hull ``B``.

    With ``expand`` every logical vertex becomes a copy of the gadget.
    Logical edges of the ``B`` instance are processed in lexicographic
    order and each takes the first free port on both ends; an edge also
    present in the ``H`` instance reuses the same pair of ports, so the
    ``H`` graph is a subgraph of the ``B`` graph.  ``gadget_m`` and
    ``gadget_t`` override the default gadget size for small fixtures.
    """
    mode = resolve_mode(q, mode)
    if k < 1 or ell < 2:
        raise InvalidParams("need k >= 1 and ell >= 2")
    if H.n < 2 or not H.is_connected():
        raise NotConnected("H must be connected with at least two vertices")
    sides = H.bipartition()
    if sides is None:
        raise NotBipartite("H must be bipartite")
    B = complete_bipartite_like(H)
    pre, offsets, J, inter = _pre_graph(H, k, ell, q, mode)
    pre_star, _, _, _ = _pre_graph(B, k, ell, q, mode)
    if not expand:
        return ColoringInstance(mode, q, k, ell, H, B, sides, pre, pre_star, tuple(offsets), J, inter, None, pre, pre_star)

    m = gadget_m if gadget_m is not None else pre.n
    t = gadget_t if gadget_t is not None else default_port_count(q)
    gadget = build_gadget_coloring(m, q, t)
    if pre_star.max_degree() > len(gadget.ports):
        raise PortExhaustion(f"gadget has {len(gadget.ports)} ports, a logical vertex needs {pre_star.max_degree()}")
    size = gadget.size
    base_edges = [(u + v * size, w + v * size) for v in range(pre.n) for u, w in gadget.graph.edges]
    used = [0] * pre.n
    connectors = []
    for u, v in pre_star.edges:
        pu = u * size + gadget.ports[used[u]]
        pv = v * size + gadget.ports[used[v]]
        used[u] += 1
        used[v] += 1
        connectors.append((u, v, pu, pv))
    star_edges = base_edges + [(pu, pv) for _, _, pu, pv in connectors]
    edges = base_edges + [(pu, pv) for u, v, pu, pv in connectors if (u, v) in pre.edges]
    n = pre.n * size
    return ColoringInstance(
        mode, q, k, ell, H, B, sides, pre, pre_star, tuple(offsets), J, inter, gadget,
        Multigraph.from_edges(n, edges), Multigraph.from_edges(n, star_edges), tuple(connectors),
    )


def phase_vector(inst: ColoringInstance, colors, star: bool = False) -> np.ndarray:
    """Common port color of every gadget; a proper coloring of the pre-gadget graph."""
    G = inst.star_graph if star else inst.graph
    c = np.asarray(colors)
    if not is_proper(G, c):
        raise ImproperColoring("input is not a proper coloring of the instance graph")
    if not inst.expanded:
        return c.copy()
    out = np.empty(inst.logical_n, dtype=c.dtype)
    for v in range(inst.logical_n):
        phase = np.unique(c[list(inst.ports_of(v))])
        # Cannot fail for a proper coloring: the gadget forces one port color.
        assert phase.size == 1, f"gadget {v} has non-monochromatic ports"
        out[v] = phase[0]
    return out


# ---------------------------------------------------------------- counts and sampling

def omega_counts(H: Multigraph, k: int, ell: int, q: int, mode: str | None = None, z3: int | None = None) -> tuple[int, int]:
    """Sizes of the two coloring classes of the pre-gadget graph, split by colors used on ``J``."""
    mode = resolve_mode(q, mode)
    Z = count_colorings(H, 3) if z3 is None else z3
    if mode == MODE_HIGH:
        a = math.factorial(q) * Z**k // 6
        b = (q - 3) * math.factorial(q) * (2**ell - 2) * 2**k // 4
        return a, b
    N = H.n
    return 3 * 2 ** (k * (N + 1)) * (Z + 2) ** k, 3 * (2**ell - 2) * 2 ** (k * (N + 1))


def classify_colorings(inst: ColoringInstance, star: bool = False, budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, int]:
    """Brute-force class sizes on the pre-gadget graph by the number of colors on ``J``."""
    G = inst.pre_star if star else inst.pre_graph
    few = inst.q - 3 if inst.mode == MODE_HIGH else 1
    J = list(inst.J)
    a = b = 0
    for col in enumerate_colorings(G, inst.q, budget=budget):
        used = len({col[j] for j in J})
        if used == few:
            a += 1
        elif used == few + 1:
            b += 1
        else:
            raise AssertionError(f"J uses {used} colors")
    return a, b


def _two_color(rng: random.Random, U, W, pair, out) -> None:
    x, y = (pair[0], pair[1]) if rng.getrandbits(1) else (pair[1], pair[0])
    for u in U:
        out[u] = x
    for w in W:
        out[w] = y


def _three_color_complete_bipartite(rng: random.Random, U, W, palette, out) -> None:
    """Uniform proper coloring of the complete bipartite graph on ``U, W`` from a 3-color palette."""
    n1, n2 = len(U), len(W)
    r = rng.randrange(z3_complete_bipartite(n1, n2))
    if r < 3 * 2**n2:
        mono, side, pattern = U, W, r % 2**n2
        c = palette[r // 2**n2]
    else:
        r -= 3 * 2**n2
        mono, side = W, U
        c = palette[r // (2**n1 - 2)]
        pattern = r % (2**n1 - 2) + 1
    rest = [x for x in palette if x != c]
    for v in mono:
        out[v] = c
    for i, v in enumerate(side):
        out[v] = rest[(pattern >> i) & 1]


def _complete_triangle(rng: random.Random, cv: int, cs: int, ct: int) -> tuple[int, int, int]:
    options = [p for p in itertools.permutations(range(3)) if p[0] != cv and p[1] != cs and p[2] != ct]
    return options[rng.randrange(len(options))]


def sample_pre_star(inst: ColoringInstance, rng: random.Random) -> np.ndarray:
    """Uniform proper coloring of the pre-gadget ``B`` graph, built class by class."""
    q, k, ell, N = inst.q, inst.k, inst.ell, inst.N
    U, W = inst.sides
    out = [-1] * inst.logical_n
    z3b = z3_complete_bipartite(len(U), len(W))
    a, b = omega_counts(inst.B, k, ell, q, inst.mode, z3=z3b)
    in_a = rng.randrange(a + b) < a
    if inst.mode == MODE_HIGH:
        perm = list(range(q))
        rng.shuffle(perm)
        clusters = inst.J_clusters()
        if in_a:
            for c, cl in enumerate(clusters):
                for j in cl:
                    out[j] = perm[c]
            for off in inst.copy_offsets:
                _three_color_complete_bipartite(rng, [u + off for u in U], [w + off for w in W], perm[q - 3:], out)
        else:
            bi = rng.randrange(q - 3)
            x, y = perm[0], perm[1]
            singles = iter(perm[2:q - 2])
            pattern = rng.randrange(2**ell - 2) + 1
            for c, cl in enumerate(clusters):
                if c == bi:
                    for i, j in enumerate(cl):
                        out[j] = x if (pattern >> i) & 1 else y
                else:
                    col = next(singles)
                    for j in cl:
                        out[j] = col
            for off in inst.copy_offsets:
                _two_color(rng, [u + off for u in U], [w + off for w in W], perm[q - 2:], out)
        return np.array(out, dtype=np.int16)

    eq_w = 2 ** (N + 1)
    neq_w = 2**N * z3b
    if in_a:
        jc = rng.randrange(3)
        for j in inst.J:
            out[j] = jc
        x, y = [c for c in range(3) if c != jc]
        pairs = [((x, x), eq_w), ((y, y), eq_w), ((x, y), neq_w), ((y, x), neq_w)]
    else:
        ic = rng.randrange(3)
        x, y = [c for c in range(3) if c != ic]
        pattern = rng.randrange(2**ell - 2) + 1
        for i, j in enumerate(inst.J):
            out[j] = x if (pattern >> i) & 1 else y
        pairs = [((ic, ic), 1)]
    total = sum(w for _, w in pairs)
    for off, (s, t) in zip(inst.copy_offsets, inst.interfaces):
        r = rng.randrange(total)
        for (cs, ct), w in pairs:
            if r < w:
                break
            r -= w
        out[s], out[t] = cs, ct
        Us, Ws = [u + off for u in U], [w + off for w in W]
        if cs == ct:
            _two_color(rng, Us, Ws, [c for c in range(3) if c != cs], out)
        else:
            _three_color_complete_bipartite(rng, Us, Ws, [0, 1, 2], out)
        for v in range(N):
            tri = _complete_triangle(rng, out[off + v], cs, ct)
            for i, c in enumerate(tri):
                out[off + N + 3 * v + i] = c
    return np.array(out, dtype=np.int16)


def fill_gadgets(inst: ColoringInstance, phases, rng: random.Random) -> np.ndarray:
    """Uniform coloring of the expanded graph given each gadget's phase."""
    g = inst.gadget
    out = np.empty(inst.n, dtype=np.int16)
    for v, phase in enumerate(phases):
        off = v * g.size
        out[[off + p for p in g.ports]] = phase
        rest = [c for c in range(inst.q) if c != phase]
        for clique in g.cliques:
            rng.shuffle(rest)
            out[[off + x for x in clique]] = rest
    return out


def sample_G_star(inst: ColoringInstance, seed: int = 0, count: int | None = None) -> np.ndarray:
    """Exactly uniform proper colorings of the ``B`` graph (expanded or not).

    Returns one coloring, or a ``(count, n)`` array when ``count`` is given.
    """
    rng = py_stream(seed, "gstar")

    def one() -> np.ndarray:
        phases = sample_pre_star(inst, rng)
        return fill_gadgets(inst, phases, rng) if inst.expanded else phases

    if count is None:
        return one()
    return np.array([one() for _ in range(count)], dtype=np.int16).reshape(count, inst.n)
