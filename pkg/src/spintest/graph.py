"""Multigraphs, cuts, exact max cut, expansion scans and quotient graphs.

Edges are kept as a canonical ``(u, v) -> multiplicity`` mapping with
``u < v``; parallel edges are never materialized one by one.
"""
from __future__ import annotations

import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import EmptyPortSet, InvalidCut, InvalidPartition, TooLarge

DEFAULT_ENUM_VERTICES = 24
DEFAULT_SUBSET_BUDGET = 1 << 24
_CHUNK = 1 << 20


def _canonical(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Undirected multigraph on vertices ``0..n-1``."""

    n: int
    edges: Mapping[tuple[int, int], int]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        clean: dict[tuple[int, int], int] = {}
        for (u, v), mult in self.edges.items():
            u, v, mult = int(u), int(v), int(mult)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if mult < 1:
                raise ValueError(f"edge ({u}, {v}) has multiplicity {mult}")
            key = _canonical(u, v)
            clean[key] = clean.get(key, 0) + mult
        object.__setattr__(self, "edges", MappingProxyType(dict(sorted(clean.items()))))
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have one entry per vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels=None) -> "Multigraph":
        """Build from ``(u, v)`` or ``(u, v, mult)`` items; repeated pairs add up."""
        acc: dict[tuple[int, int], int] = {}
        for item in edges:
            u, v = int(item[0]), int(item[1])
            mult = int(item[2]) if len(item) > 2 else 1
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = _canonical(u, v)
            acc[key] = acc.get(key, 0) + mult
        return cls(n, acc, labels)

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.n == other.n and dict(self.edges) == dict(other.edges)

    def __hash__(self):
        return hash((self.n, tuple(self.edges.items())))

    def __repr__(self):
        return f"Multigraph(n={self.n}, pairs={len(self.edges)}, mass={self.total_multiplicity})"

    @cached_property
    def _arrays(self):
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        pairs = np.array(list(self.edges.keys()), dtype=np.int64)
        mults = np.fromiter(self.edges.values(), dtype=np.int64, count=len(self.edges))
        return pairs[:, 0].copy(), pairs[:, 1].copy(), mults

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Endpoint and multiplicity arrays in canonical pair order."""
        return self._arrays

    @property
    def total_multiplicity(self) -> int:
        return int(sum(self.edges.values()))

    @cached_property
    def _degrees(self) -> np.ndarray:
        us, vs, ms = self._arrays
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, us, ms)
        np.add.at(deg, vs, ms)
        return deg

    def degrees(self) -> np.ndarray:
        return self._degrees.copy()

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    def max_degree(self) -> int:
        return int(self._degrees.max()) if self.n else 0

    @cached_property
    def _adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adjacency_lists[v]

    def multiplicity(self, u: int, v: int) -> int:
        return self.edges.get(_canonical(u, v), 0)

    def adjacency(self, dtype=np.float64) -> np.ndarray:
        """Dense multiplicity-weighted adjacency matrix."""
        a = np.zeros((self.n, self.n), dtype=dtype)
        us, vs, ms = self._arrays
        a[us, vs] = ms
        a[vs, us] = ms
        return a

    def simple(self) -> "Multigraph":
        """Same vertex set with every multiplicity reduced to one."""
        return Multigraph(self.n, {k: 1 for k in self.edges}, self.labels)

    def subgraph_edges(self, keep) -> "Multigraph":
        return Multigraph(self.n, {k: m for k, m in self.edges.items() if keep(*k)}, self.labels)

    def shifted(self, offset: int) -> dict[tuple[int, int], int]:
        return {(u + offset, v + offset): m for (u, v), m in self.edges.items()}

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def bipartition(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Sides of a proper 2-coloring (side of vertex 0 first), or None if not bipartite."""
        side = [-1] * self.n
        for root in range(self.n):
            if side[root] >= 0:
                continue
            side[root] = 0
            stack = [root]
            while stack:
                x = stack.pop()
                for y in self.neighbors(x):
                    if side[y] < 0:
                        side[y] = 1 - side[x]
                        stack.append(y)
                    elif side[y] == side[x]:
                        return None
        a = tuple(v for v in range(self.n) if side[v] == 0)
        b = tuple(v for v in range(self.n) if side[v] == 1)
        return a, b


def disjoint_union(graphs: Iterable[Multigraph]) -> tuple[Multigraph, list[int]]:
    """Union of graphs with shifted labels; returns the graph and each offset."""
    edges: dict[tuple[int, int], int] = {}
    offsets = []
    n = 0
    for g in graphs:
        offsets.append(n)
        edges.update(g.shifted(n))
        n += g.n
    return Multigraph(n, edges), offsets


# ---------------------------------------------------------------- named graphs

def cycle_graph(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Multigraph:
    return Multigraph.from_edges(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Multigraph:
    return Multigraph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def empty_graph(n: int) -> Multigraph:
    return Multigraph(n, {})


def petersen_graph() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Multigraph.from_edges(10, outer + spokes + inner)


NAMED_GRAPHS = {
    "K2": lambda: complete_graph(2),
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "P3": lambda: path_graph(3),
    "P4": lambda: path_graph(4),
    "P5": lambda: path_graph(5),
    "C4": lambda: cycle_graph(4),
    "C5": lambda: cycle_graph(5),
    "C6": lambda: cycle_graph(6),
    "K22": lambda: complete_bipartite(2, 2),
    "K23": lambda: complete_bipartite(2, 3),
    "K33": lambda: complete_bipartite(3, 3),
    "petersen": petersen_graph,
}


# ---------------------------------------------------------------- cuts

def _as_side(G: Multigraph, S) -> frozenset[int]:
    side = frozenset(int(v) for v in S)
    if any(v < 0 or v >= G.n for v in side):
        raise InvalidCut("cut side contains a vertex outside the graph")
    return side


def cut_size(G: Multigraph, S) -> int:
    """Total multiplicity of edges with exactly one endpoint in ``S``."""
    side = _as_side(G, S)
    if not side or len(side) == G.n:
        raise InvalidCut("cut side must be a nonempty proper subset of V")
    return sum(m for (u, v), m in G.edges.items() if (u in side) != (v in side))


def _mask_cut_values(G: Multigraph, masks: np.ndarray) -> np.ndarray:
    us, vs, ms = G.edge_arrays()
    out = np.zeros(masks.shape[0], dtype=np.int64)
    for u, v, m in zip(us.tolist(), vs.tolist(), ms.tolist()):
        out += (((masks >> u) ^ (masks >> v)) & 1) * m
    return out


def _lex_smallest_mask(masks: np.ndarray) -> int:
    """Among bitmask sets, the one whose sorted element list is lexicographically smallest."""
    cands = np.unique(masks)
    prefix = 0
    while True:
        if np.any(cands == prefix):
            return int(prefix)
        rest = cands & ~np.int64(prefix)
        low = rest & -rest
        best = low.min()
        cands = cands[low == best]
        prefix |= int(best)


def max_cut_exact(G: Multigraph, limit: int = DEFAULT_ENUM_VERTICES, workers: int = 1) -> tuple[int, frozenset[int]]:
    """Maximum cut by enumerating every bipartition with vertex 0 on the witness side.

    Ties go to the lexicographically smallest witness set.
    """
    if G.n > limit:
        raise TooLarge(f"max cut enumeration limited to {limit} vertices, got {G.n}")
    if G.n < 2:
        raise InvalidCut("a graph with fewer than two vertices has no cut")
    total = 1 << (G.n - 1)
    full_rest = total - 1  # all other vertices on the witness side means S = V

    def scan(start: int):
        stop = min(start + _CHUNK, total)
        rest = np.arange(start, stop, dtype=np.int64)
        rest = rest[rest != full_rest]
        masks = (rest << 1) | 1
        vals = _mask_cut_values(G, masks)
        if vals.size == 0:
            return -1, []
        best = int(vals.max())
        return best, masks[vals == best]

    starts = range(0, total, _CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(scan, starts))
    else:
        parts = [scan(s) for s in starts]
    best = max(p[0] for p in parts)
    winners = np.concatenate([p[1] for p in parts if p[0] == best])
    mask = _lex_smallest_mask(winners)
    return best, frozenset(v for v in range(G.n) if (mask >> v) & 1)


class ExpansionResult(NamedTuple):
    ratio: Fraction
    argmin: tuple[int, ...]


def _subset_count(n: int, max_size: int) -> int:
    return sum(math.comb(n, k) for k in range(1, max_size + 1))


def expansion_min(
    G: Multigraph,
    max_size: int,
    port_set=None,
    budget: int = DEFAULT_SUBSET_BUDGET,
    batch: int = 1 << 16,
) -> ExpansionResult:
    """Exact ``min |E(S, V-S)| / denom`` over ``0 < |S| <= max_size``.

    ``denom`` is ``|S|``, or ``|P & S|`` when a port set ``P`` is given, in
    which case only sets meeting ``P`` are scanned.  Ties go to the
    lexicographically smallest sorted ``S``.
    """
    max_size = min(int(max_size), G.n)
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    ports = None
    if port_set is not None:
        ports = np.zeros(G.n, dtype=np.int64)
        plist = sorted(set(int(v) for v in port_set))
        if not plist:
            raise EmptyPortSet("port variant requested with an empty port set")
        ports[plist] = 1
    count = _subset_count(G.n, max_size)
    if count > budget:
        raise TooLarge(f"{count} candidate subsets exceed the budget of {budget}")

    adj = G.adjacency(dtype=np.int64)
    deg = adj.sum(axis=1)
    best_val = math.inf
    best_sets: list[tuple[int, ...]] = []
    for k in range(1, max_size + 1):
        combos = itertools.combinations(range(G.n), k)
        while True:
            block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, batch)), dtype=np.int64)
            if block.size == 0:
                break
            block = block.reshape(-1, k)
            inner = np.zeros(block.shape[0], dtype=np.int64)
            for i, j in itertools.combinations(range(k), 2):
                inner += adj[block[:, i], block[:, j]]
            cut = deg[block].sum(axis=1) - 2 * inner
            denom = np.full(block.shape[0], k) if ports is None else ports[block].sum(axis=1)
            ok = denom > 0
            if not ok.any():
                continue
            ratio = np.full(block.shape[0], np.inf)
            ratio[ok] = cut[ok] / denom[ok]
            low = ratio.min()
            if low < best_val - 1e-9:
                best_val = low
                best_sets = []
            if low <= best_val + 1e-9:
                hits = np.nonzero(ratio <= best_val + 1e-9)[0]
                best_sets.extend((tuple(block[h].tolist()), int(cut[h]), int(denom[h])) for h in hits)
    if not best_sets:
        raise EmptyPortSet("no candidate subset meets the port set")
    exact = min(Fraction(c, d) for _, c, d in best_sets)
    argmin = min(s for s, c, d in best_sets if Fraction(c, d) == exact)
    return ExpansionResult(exact, argmin)


def vertex_boundary(G: Multigraph, S) -> frozenset[int]:
    """Vertices outside ``S`` with at least one neighbor in ``S``."""
    side = set(int(v) for v in S)
    return frozenset(y for x in side for y in G.neighbors(x) if y not in side)


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class VertexPartition:
    """Partition of ``0..n-1``; classes are stored sorted and ordered by smallest member."""

    classes: tuple[tuple[int, ...], ...]
    n: int = field(default=-1)

    def __post_init__(self):
        classes = tuple(sorted(tuple(sorted(int(v) for v in c)) for c in self.classes))
        seen: set[int] = set()
        for c in classes:
            if not c:
                raise InvalidPartition("partition has an empty class")
            for v in c:
                if v in seen:
                    raise InvalidPartition(f"vertex {v} appears in two classes")
                seen.add(v)
        n = len(seen) if self.n < 0 else self.n
        if seen != set(range(n)):
            raise InvalidPartition("classes do not cover the vertex set exactly")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "n", n)

    @classmethod
    def singletons(cls, n: int) -> "VertexPartition":
        return cls(tuple((v,) for v in range(n)), n)

    @classmethod
    def from_labels(cls, labels) -> "VertexPartition":
        groups: dict = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, []).append(v)
        return cls(tuple(groups.values()), len(labels))

    def __len__(self):
        return len(self.classes)

    def class_index(self) -> np.ndarray:
        """Array mapping each vertex to the index of its class."""
        idx = np.empty(self.n, dtype=np.int64)
        for i, c in enumerate(self.classes):
            idx[list(c)] = i
        return idx


def quotient_graph(G: Multigraph, P: VertexPartition):
    """Collapse each class to one vertex, keeping cross-class edges with multiplicity.

    Returns the quotient graph and a map from each quotient pair to the
    ``(u, v, mult)`` original edges it stands for.
    """
    if P.n != G.n:
        raise InvalidPartition(f"partition covers {P.n} vertices, graph has {G.n}")
    cls = P.class_index()
    edges: dict[tuple[int, int], int] = {}
    provenance: dict[tuple[int, int], list] = {}
    for (u, v), m in G.edges.items():
        a, b = int(cls[u]), int(cls[v])
        if a == b:
            continue
        key = _canonical(a, b)
        edges[key] = edges.get(key, 0) + m
        provenance.setdefault(key, []).append((u, v, m))
    edge_map = {k: tuple(v) for k, v in sorted(provenance.items())}
    return Multigraph(len(P), edges), edge_map


# ---------------------------------------------------------------- text format

def format_graph(G: Multigraph, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    buf.write(f"n {G.n}\n")
    for (u, v), m in G.edges.items():
        buf.write(f"e {u} {v} {m}\n")
    return buf.getvalue()


def parse_graph(text: str) -> tuple[Multigraph, dict[str, list[str]]]:
    """Parse the line format; unknown directives are returned as extras."""
    n = None
    edges = []
    extras: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "n":
            if n is not None or len(rest) != 1:
                raise ValueError(f"line {lineno}: malformed header")
            n = int(rest[0])
        elif head == "e":
            if len(rest) not in (2, 3):
                raise ValueError(f"line {lineno}: edge lines are 'e u v mult'")
            edges.append(tuple(int(x) for x in rest))
        else:
            extras[head] = rest
    if n is None:
        raise ValueError("missing 'n <int>' header")
    return Multigraph.from_edges(n, edges), extras


def read_graph(path) -> Multigraph:
    with open(path) as fh:
        return parse_graph(fh.read())[0]


def write_graph(G: Multigraph, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(G, comment))
