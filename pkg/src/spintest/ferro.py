"""Identity testing for ferromagnetic Ising models.

The tester first merges vertices that always agree in the hidden samples,
rejects when the visible model disagrees with that merge or carries a
very strong coupling across it, and otherwise compares pairwise spin
correlations of the quotient model with the empirical ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import EmptySamples, InsufficientSamples, NotFerromagnetic
from .graph import Multigraph, VertexPartition, quotient_graph
from .ising import IsingModel, exact_distribution, glauber_samples, index_chunks, log_weights, partition_function
from .rng import stream
from .verdict import Answer, TesterVerdict

# Constant of the correlation threshold; see scripts/calibrate_ddk.py.
DDK_C = 1.0
# Correlation test refuses to run below ceil(DDK_MIN_SAMPLES / eps^2) samples.
DDK_MIN_SAMPLES = 100
EXACT_CORRELATION_LIMIT = 24

Sampler = Callable[[IsingModel, int, int], np.ndarray]


def _as_samples(samples) -> np.ndarray:
    s = np.asarray(samples)
    if s.ndim != 2 or s.shape[0] == 0:
        raise EmptySamples("need a nonempty (L, n) array of spins")
    return s


def refine_partition(samples) -> VertexPartition:
    """Coarsest partition whose classes are monochromatic in every sample.

    Two vertices share a class exactly when their spin columns are equal.
    """
    cols = np.ascontiguousarray(_as_samples(samples).T)
    seen: dict[bytes, int] = {}
    labels = [seen.setdefault(col.tobytes(), len(seen)) for col in cols]
    return VertexPartition.from_labels(labels)


def empirical_event_probability(samples, P: VertexPartition) -> float:
    """Fraction of samples in which every class of ``P`` is monochromatic."""
    s = _as_samples(samples)
    ok = np.ones(s.shape[0], dtype=bool)
    for c in P.classes:
        if len(c) > 1:
            block = s[:, list(c)]
            ok &= np.all(block == block[:, :1], axis=1)
    return float(ok.mean())


def project_samples(samples, P: VertexPartition) -> np.ndarray:
    """Quotient configurations read off the first vertex of each class."""
    s = _as_samples(samples)
    return s[:, [c[0] for c in P.classes]]


@dataclass(frozen=True, eq=False)
class QuotientModel:
    graph: Multigraph
    beta: Mapping[tuple[int, int], float]
    edge_map: Mapping[tuple[int, int], tuple]
    partition: VertexPartition

    @property
    def model(self) -> IsingModel:
        return IsingModel(self.graph, self.beta)

    @property
    def beta_max(self) -> float:
        """Largest total coupling between two classes."""
        m = self.model
        return float(m.couplings.max()) if m.couplings.size else 0.0


def quotient_model(M: IsingModel, P: VertexPartition) -> QuotientModel:
    """Ising model on the quotient graph; every original cross-class edge keeps its beta.

    When a quotient pair stands for edges with different inverse
    temperatures, its stored beta is their multiplicity-weighted mean so
    the pair coupling equals the sum of the original couplings.
    """
    G_P, edge_map = quotient_graph(M.graph, P)
    beta = {}
    for key, originals in edge_map.items():
        total = sum(M.beta[(u, v)] * m for u, v, m in originals)
        beta[key] = total / G_P.edges[key]
    return QuotientModel(G_P, MappingProxyType(beta), MappingProxyType(edge_map), P)


def intra_class_log_weight(M: IsingModel, P: VertexPartition) -> float:
    """Log-weight contributed by edges inside classes of a monochromatic configuration."""
    cls = P.class_index()
    return float(sum(M.beta[(u, v)] * m for (u, v), m in M.graph.edges.items() if cls[u] == cls[v]))


def exact_correlations(M: IsingModel) -> np.ndarray:
    """Exact ``E[X_u X_v]`` matrix by enumeration."""
    n = M.n
    z = partition_function(M)
    out = np.zeros((n, n))
    for idx in index_chunks(n):
        p = np.exp(log_weights(M, idx) - z)
        spins = 2.0 * ((idx[:, None] >> np.arange(n)) & 1) - 1.0
        out += spins.T @ (spins * p[:, None])
    return out


def estimated_correlations(M: IsingModel, chains: int = 4000, sweeps: int | None = None, seed: int = 0):
    """Glauber estimate of the correlation matrix with its Monte-Carlo standard error."""
    s = glauber_samples(M, chains, sweeps, seed).astype(np.float64)
    est = s.T @ s / chains
    err = np.sqrt(np.clip(1 - est**2, 0, None) / chains)
    return est, err


def ddk_threshold(n_classes: int, L: int, beta_max: float, C: float = DDK_C) -> float:
    return C * math.sqrt(math.log(max(n_classes, 2) * L) / L) * (1.0 + beta_max)


def ddk_min_samples(eps: float) -> int:
    return math.ceil(DDK_MIN_SAMPLES / eps**2)


def ddk_covariance_test(
    QM: QuotientModel | IsingModel,
    samples,
    eps: float,
    C: float = DDK_C,
    model_corr: np.ndarray | None = None,
    seed: int = 0,
) -> TesterVerdict:
    """YES iff every empirical pair correlation is within the threshold of the model's."""
    model = QM.model if isinstance(QM, QuotientModel) else QM
    s = _as_samples(samples).astype(np.float64)
    L, n = s.shape
    floor = ddk_min_samples(eps)
    if L < floor:
        raise InsufficientSamples(f"{L} samples, correlation test needs at least {floor} at eps={eps}")
    stderr = None
    if model_corr is None:
        if n <= EXACT_CORRELATION_LIMIT:
            model_corr = exact_correlations(model)
        else:
            model_corr, err = estimated_correlations(model, seed=seed)
            stderr = float(err.max())
    beta_max = float(model.couplings.max()) if model.couplings.size else 0.0
    t = ddk_threshold(n, L, beta_max, C)
    diag = {"stage": "ddk", "threshold": t, "samples": L, "classes": n, "model_stderr": stderr}
    if n < 2:
        diag.update(max_deviation=0.0, pair=None, margin=t)
        return TesterVerdict(Answer.YES, diag)
    dev = np.abs(s.T @ s / L - model_corr)
    np.fill_diagonal(dev, -1.0)
    flat = int(np.argmax(dev))
    u, v = divmod(flat, n)
    worst = float(dev[u, v])
    diag.update(max_deviation=worst, pair=[min(u, v), max(u, v)], margin=t - worst)
    return TesterVerdict(Answer.YES if worst <= t else Answer.NO, diag)


def lemma_floor(n: int, eps: float) -> int:
    """Minimum hidden-sample count ``800 n^2 / eps^2``."""
    return math.ceil(800 * n * n / eps**2)


def heavy_threshold(n: int, L: int) -> float:
    return math.log(20 * n * n * L)


def exact_sampler(M: IsingModel) -> Sampler:
    """Sampler drawing i.i.d. configurations from the exact distribution of ``M``."""
    table = exact_distribution(M)

    def draw(model: IsingModel, count: int, seed: int) -> np.ndarray:
        idx = stream(seed, "exact-sampler").choice(table.size, size=count, p=table)
        return (2 * ((idx[:, None] >> np.arange(M.n)) & 1) - 1).astype(np.int8)

    return draw


def glauber_sampler(sweeps: int | None = None) -> Sampler:
    return lambda model, count, seed: glauber_samples(model, count, sweeps, seed)


def ferro_identity_test(
    M: IsingModel,
    samples,
    eps: float,
    sampler: Sampler | None = None,
    sampler_budget: int | None = None,
    seed: int = 0,
    C: float = DDK_C,
    enforce_floor: bool = True,
) -> TesterVerdict:
    """Decide whether ``samples`` come from the ferromagnetic model ``M``.

    Steps: refine a partition from the hidden samples; draw as many samples
    from ``M`` (Glauber with ``sampler_budget`` sweeps unless a sampler is
    given); reject if those samples respect the partition with frequency at
    most ``1 - eps/4``; reject if an edge between classes has
    ``beta >= ln(20 n^2 L)``; otherwise run the correlation test on the
    quotient model at accuracy ``eps/2``.
    """
    s = _as_samples(samples)
    if not M.is_ferromagnetic:
        raise NotFerromagnetic("the tester needs every beta to be positive")
    L, n = s.shape
    if n != M.n:
        raise EmptySamples(f"samples have {n} spins, model has {M.n} vertices")
    floor = lemma_floor(n, eps)
    if enforce_floor and L < floor:
        raise InsufficientSamples(f"{L} samples, at least {floor} needed at n={n}, eps={eps}")
    P = refine_partition(s)
    draw = sampler or glauber_sampler(sampler_budget)
    own = draw(M, L, seed)
    mu = empirical_event_probability(own, P)
    diag = {"classes": len(P), "samples": L, "event_probability": mu}
    if mu <= 1 - eps / 4:
        return TesterVerdict(Answer.NO, {**diag, "stage": "partition"})
    thr = heavy_threshold(n, L)
    cls = P.class_index()
    heavy = [[u, v] for (u, v), b in M.beta.items() if cls[u] != cls[v] and b >= thr]
    if heavy:
        return TesterVerdict(Answer.NO, {**diag, "stage": "heavy-edge", "heavy_threshold": thr, "heavy_edges": heavy})
    verdict = ddk_covariance_test(quotient_model(M, P), project_samples(s, P), eps / 2, C, seed=seed)
    verdict.diagnostics.update(diag, heavy_threshold=thr)
    return verdict
