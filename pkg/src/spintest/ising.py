"""Zero-field Ising models: log-weights, exact enumeration, Glauber sampling, phases.

A configuration is an n-bit integer whose bit ``i`` is set when vertex ``i``
carries spin ``+``.  As arrays, spins are ``int8`` values in ``{+1, -1}``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import LayoutMismatch, MismatchedSupport, NonFerromagneticWarning, TooLarge
from .graph import Multigraph
from .rng import stream

DEFAULT_ENUM_VERTICES = 24
MAX_DEFAULT_SWEEPS = 10**6
_CHUNK = 1 << 18


@dataclass(frozen=True, eq=False)
class IsingModel:
    """A multigraph with an inverse temperature on every edge pair.

    The coupling of a pair is ``beta * multiplicity``.
    """

    graph: Multigraph
    beta: Mapping[tuple[int, int], float]

    def __post_init__(self):
        beta = {tuple(sorted((int(u), int(v)))): float(b) for (u, v), b in self.beta.items()}
        if set(beta) != set(self.graph.edges):
            raise ValueError("beta must be defined on exactly the edge pairs of the graph")
        object.__setattr__(self, "beta", MappingProxyType({k: beta[k] for k in self.graph.edges}))

    @classmethod
    def homogeneous(cls, graph: Multigraph, beta: float) -> "IsingModel":
        return cls(graph, {k: float(beta) for k in graph.edges})

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def couplings(self) -> np.ndarray:
        _, _, mults = self.graph.edge_arrays()
        return np.fromiter(self.beta.values(), dtype=np.float64, count=len(self.beta)) * mults

    @property
    def is_ferromagnetic(self) -> bool:
        return all(b > 0 for b in self.beta.values())

    @property
    def is_antiferromagnetic(self) -> bool:
        return all(b < 0 for b in self.beta.values())

    @property
    def beta_max(self) -> float:
        return max((abs(b) for b in self.beta.values()), default=0.0)


# ---------------------------------------------------------------- configurations

def spins_to_index(spins) -> int:
    s = np.asarray(spins)
    return int(sum(1 << i for i, x in enumerate(s.tolist()) if x > 0))


def index_to_spins(index: int, n: int) -> np.ndarray:
    bits = (np.int64(index) >> np.arange(n, dtype=np.int64)) & 1 if n <= 62 else np.array(
        [(int(index) >> i) & 1 for i in range(n)], dtype=np.int64)
    return np.where(bits == 1, 1, -1).astype(np.int8)


def indices_to_spins(indices: np.ndarray, n: int) -> np.ndarray:
    bits = (np.asarray(indices, dtype=np.int64)[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def spins_to_indices(spins: np.ndarray) -> np.ndarray:
    s = np.asarray(spins)
    return ((s > 0).astype(np.int64) << np.arange(s.shape[1], dtype=np.int64)).sum(axis=1)


def format_spins(spins) -> str:
    return "".join("+" if x > 0 else "-" for x in np.asarray(spins).tolist())


def parse_spins(text: str) -> np.ndarray:
    text = text.strip()
    if any(c not in "+-" for c in text):
        raise ValueError(f"spin strings use only '+' and '-': {text!r}")
    return np.array([1 if c == "+" else -1 for c in text], dtype=np.int8)


def _as_spins(sigma, n: int) -> np.ndarray:
    if isinstance(sigma, (int, np.integer)):
        return index_to_spins(int(sigma), n)
    if isinstance(sigma, str):
        sigma = parse_spins(sigma)
    s = np.asarray(sigma)
    if s.shape != (n,):
        raise LayoutMismatch(f"configuration has shape {s.shape}, model has {n} vertices")
    return s


# ---------------------------------------------------------------- weights

def weight(M: IsingModel, sigma) -> float:
    """Log-weight: sum of ``beta * mult`` over pairs whose endpoints agree."""
    s = _as_spins(sigma, M.n)
    us, vs, _ = M.graph.edge_arrays()
    return float(np.sum(M.couplings[s[us] == s[vs]]))


def log_weights(M: IsingModel, indices: np.ndarray) -> np.ndarray:
    """Vectorized log-weights for an array of configuration indices."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros(idx.shape[0], dtype=np.float64)
    us, vs, _ = M.graph.edge_arrays()
    for u, v, j in zip(us.tolist(), vs.tolist(), M.couplings.tolist()):
        out += j * (1 - (((idx >> u) ^ (idx >> v)) & 1))
    return out


def _check_size(n: int, limit: int) -> None:
    if n > limit:
        raise TooLarge(f"exact enumeration limited to {limit} vertices, got {n}")


def index_chunks(n: int, chunk: int = _CHUNK):
    total = 1 << n
    for start in range(0, total, chunk):
        yield np.arange(start, min(start + chunk, total), dtype=np.int64)


class LogSumExp:
    """Streaming log-sum-exp accumulator."""

    def __init__(self):
        self.peak = -math.inf
        self.scaled = 0.0

    def add(self, values: np.ndarray) -> None:
        if values.size == 0:
            return
        top = float(values.max())
        if top == -math.inf:
            return
        if top > self.peak:
            self.scaled *= math.exp(self.peak - top) if self.peak > -math.inf else 0.0
            self.peak = top
        self.scaled += float(np.exp(values - self.peak).sum())

    @property
    def value(self) -> float:
        return self.peak + math.log(self.scaled) if self.scaled > 0 else -math.inf


Restriction = Callable[[np.ndarray], np.ndarray] | Iterable[int] | None


def partition_function(M: IsingModel, restriction: Restriction = None, limit: int = DEFAULT_ENUM_VERTICES) -> float:
    """Log partition function, optionally restricted to a set of configurations.

    ``restriction`` is either a vectorized predicate taking an index array
    and returning a boolean mask, or an explicit collection of indices.
    """
    if restriction is not None and not callable(restriction):
        idx = np.unique(np.fromiter((int(i) for i in restriction), dtype=np.int64))
        if idx.size == 0:
            return -math.inf
        if idx.max() >= (1 << M.n) or idx.min() < 0:
            raise LayoutMismatch("restriction index outside the configuration space")
        acc = LogSumExp()
        acc.add(log_weights(M, idx))
        return acc.value
    _check_size(M.n, limit)
    acc = LogSumExp()
    for idx in index_chunks(M.n):
        lw = log_weights(M, idx)
        if restriction is not None:
            lw = lw[np.asarray(restriction(idx), dtype=bool)]
        acc.add(lw)
    return acc.value


def log_distribution(M: IsingModel, limit: int = DEFAULT_ENUM_VERTICES) -> np.ndarray:
    _check_size(M.n, limit)
    lw = log_weights(M, np.arange(1 << M.n, dtype=np.int64))
    top = lw.max()
    return lw - (top + math.log(np.exp(lw - top).sum()))


def exact_distribution(M: IsingModel, limit: int = DEFAULT_ENUM_VERTICES) -> np.ndarray:
    """Probability of every configuration, indexed by configuration integer."""
    p = np.exp(log_distribution(M, limit))
    return p / p.sum()


def tv_distance(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise MismatchedSupport(f"tables have shapes {p.shape} and {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def tv_between(M1: IsingModel, M2: IsingModel, limit: int = DEFAULT_ENUM_VERTICES) -> float:
    """Exact TV distance between two models on the same vertex set, streamed over chunks."""
    if M1.n != M2.n:
        raise MismatchedSupport("models have different vertex counts")
    _check_size(M1.n, limit)
    z1, z2 = partition_function(M1, limit=limit), partition_function(M2, limit=limit)
    total = 0.0
    for idx in index_chunks(M1.n):
        total += float(np.abs(np.exp(log_weights(M1, idx) - z1) - np.exp(log_weights(M2, idx) - z2)).sum())
    return 0.5 * total


def write_distribution_csv(p: np.ndarray, fh) -> None:
    fh.write("index,probability\n")
    for i, x in enumerate(p.tolist()):
        fh.write(f"{i},{x:.17g}\n")


# ---------------------------------------------------------------- Glauber dynamics

def default_sweeps(M: IsingModel) -> int:
    d_max = M.graph.max_degree()
    exponent = 2.0 * M.beta_max * d_max
    if exponent > math.log(MAX_DEFAULT_SWEEPS):
        return MAX_DEFAULT_SWEEPS
    return min(MAX_DEFAULT_SWEEPS, M.n * math.ceil(math.exp(exponent)))


@dataclass(frozen=True)
class _LocalFields:
    nbrs: tuple[np.ndarray, ...]
    coupl: tuple[np.ndarray, ...]


def _local_fields(M: IsingModel) -> _LocalFields:
    nbrs: list[list[int]] = [[] for _ in range(M.n)]
    coupl: list[list[float]] = [[] for _ in range(M.n)]
    us, vs, _ = M.graph.edge_arrays()
    for u, v, j in zip(us.tolist(), vs.tolist(), M.couplings.tolist()):
        nbrs[u].append(v)
        coupl[u].append(j)
        nbrs[v].append(u)
        coupl[v].append(j)
    return _LocalFields(tuple(np.array(x, dtype=np.int64) for x in nbrs),
                        tuple(np.array(x, dtype=np.float64) for x in coupl))


def glauber_samples(M: IsingModel, count: int, sweeps: int | None = None, seed: int = 0) -> np.ndarray:
    """``count`` independent heat-bath chains run in lockstep; returns a (count, n) spin array.

    Each chain starts from a uniform configuration and performs ``sweeps``
    passes over the vertices in index order.  The flip probability of
    vertex ``v`` is ``P(+) = 1 / (1 + exp(-h_v))`` with local field
    ``h_v = sum_w J_vw * s_w``.
    """
    if not M.is_ferromagnetic and M.graph.edges:
        warnings.warn("Glauber dynamics run on a non-ferromagnetic model", NonFerromagneticWarning, stacklevel=2)
    if sweeps is None:
        sweeps = default_sweeps(M)
    rng = stream(seed, "glauber")
    state = np.where(rng.random((count, M.n)) < 0.5, 1, -1).astype(np.int8)
    fields = _local_fields(M)
    for _ in range(int(sweeps)):
        draws = rng.random((count, M.n))
        for v in range(M.n):
            h = state[:, fields.nbrs[v]] @ fields.coupl[v] if fields.nbrs[v].size else np.zeros(count)
            state[:, v] = np.where(draws[:, v] < 0.5 * (1.0 + np.tanh(0.5 * h)), 1, -1)
    return state


def glauber_sample(M: IsingModel, sweeps: int | None = None, seed: int = 0) -> np.ndarray:
    """One heat-bath chain; deterministic given ``seed``."""
    return glauber_samples(M, 1, sweeps, seed)[0]


# ---------------------------------------------------------------- phases

class Phase(enum.IntEnum):
    MINUS = -1
    BAD = 0
    PLUS = 1


@dataclass(frozen=True)
class PhaseLayout:
    """Left and right vertex sets of each embedded gadget copy."""

    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise LayoutMismatch("left and right lists differ in length")
        seen: set[int] = set()
        for part in (*self.left, *self.right):
            for x in part:
                if x in seen or not 0 <= x < self.n:
                    raise LayoutMismatch(f"vertex {x} repeated or out of range")
                seen.add(x)
        if len(seen) != self.n:
            raise LayoutMismatch("layout does not cover every vertex")

    @property
    def size(self) -> int:
        return len(self.left)

    def masks(self) -> tuple[list[int], list[int]]:
        lm = [sum(1 << x for x in part) for part in self.left]
        rm = [sum(1 << x for x in part) for part in self.right]
        return lm, rm

    def config(self, plus: Iterable[int]) -> int:
        """Index of the configuration with gadgets in ``plus`` in the plus phase, the rest minus."""
        plus = set(plus)
        lm, rm = self.masks()
        return sum(lm[v] if v in plus else rm[v] for v in range(self.size))


def classify_phases(layout: PhaseLayout, sigma) -> tuple[Phase, ...]:
    s = _as_spins(sigma, layout.n)
    out = []
    for left, right in zip(layout.left, layout.right):
        ls, rs = s[list(left)], s[list(right)]
        if np.all(ls > 0) and np.all(rs < 0):
            out.append(Phase.PLUS)
        elif np.all(ls < 0) and np.all(rs > 0):
            out.append(Phase.MINUS)
        else:
            out.append(Phase.BAD)
    return tuple(out)


def phase_codes(layout: PhaseLayout, indices: np.ndarray) -> np.ndarray:
    """Vectorized phases for configuration indices: array (len, gadgets) of +1/-1/0."""
    if layout.n > 62:
        raise TooLarge("index-based phase codes need at most 62 vertices")
    idx = np.asarray(indices, dtype=np.int64)
    lm, rm = layout.masks()
    codes = np.zeros((idx.shape[0], layout.size), dtype=np.int8)
    for v, (a, b) in enumerate(zip(lm, rm)):
        la, rb = idx & a, idx & b
        codes[(la == a) & (rb == 0), v] = 1
        codes[(la == 0) & (rb == b), v] = -1
    return codes


def good_predicate(layout: PhaseLayout) -> Callable[[np.ndarray], np.ndarray]:
    """Predicate for configurations where every gadget is in a pure phase."""
    return lambda idx: np.all(phase_codes(layout, idx) != 0, axis=1)
