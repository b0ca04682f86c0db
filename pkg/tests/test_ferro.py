import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spintest.errors import EmptySamples, InsufficientSamples, NotFerromagnetic
from spintest.ferro import (
    QuotientModel,
    ddk_covariance_test,
    ddk_min_samples,
    empirical_event_probability,
    estimated_correlations,
    exact_correlations,
    exact_sampler,
    ferro_identity_test,
    heavy_threshold,
    intra_class_log_weight,
    lemma_floor,
    project_samples,
    quotient_model,
    refine_partition,
)
from spintest.graph import VertexPartition, complete_graph, cycle_graph, path_graph
from spintest.ising import IsingModel, exact_distribution, index_to_spins, weight
from spintest.verdict import Answer
from strategies import multigraphs, spin_samples


@st.composite
def ferro_models(draw, max_n=6):
    G = draw(multigraphs(max_n=max_n))
    return IsingModel(G, {k: draw(st.floats(0.05, 3)) for k in G.edges})


class TestRefinement:
    def test_all_plus(self):
        assert refine_partition(np.ones((5, 4))).classes == ((0, 1, 2, 3),)

    def test_single_split(self):
        assert refine_partition([[1, -1, 1]]).classes == ((0, 2), (1,))

    def test_full_separation(self):
        n = 4
        samples = np.array([index_to_spins(i, n) for i in range(1 << n)])
        assert refine_partition(samples).classes == tuple((v,) for v in range(n))

    def test_empty(self):
        with pytest.raises(EmptySamples):
            refine_partition(np.zeros((0, 3)))

    @given(spin_samples())
    def test_coarsest_consistent(self, samples):
        s = np.array(samples)
        P = refine_partition(s)
        assert empirical_event_probability(s, P) == 1.0
        reps = [c[0] for c in P.classes]
        for i, a in enumerate(reps):
            for b in reps[i + 1:]:
                assert np.any(s[:, a] != s[:, b])

    @given(spin_samples())
    def test_order_independent(self, samples):
        s = np.array(samples)
        assert refine_partition(s) == refine_partition(s[::-1])


class TestEventProbability:
    def test_singletons(self):
        assert empirical_event_probability([[1, -1], [-1, 1]], VertexPartition.singletons(2)) == 1.0

    def test_half(self):
        assert empirical_event_probability([[1, 1], [1, -1]], VertexPartition(((0, 1),))) == 0.5


class TestQuotient:
    @given(ferro_models(max_n=8), st.data())
    def test_weight_consistency(self, M, data):
        labels = data.draw(st.lists(st.integers(0, 2), min_size=M.n, max_size=M.n))
        P = VertexPartition.from_labels(labels)
        QM = quotient_model(M, P)
        const = intra_class_log_weight(M, P)
        for code in range(1 << len(P)):
            sp = index_to_spins(code, len(P))
            sigma = np.empty(M.n, dtype=np.int8)
            for c, x in zip(P.classes, sp):
                sigma[list(c)] = x
            assert weight(M, sigma) == pytest.approx(weight(QM.model, sp) + const, abs=1e-9)

    @given(ferro_models(max_n=8), st.data())
    def test_conditional_law_is_quotient_law(self, M, data):
        labels = data.draw(st.lists(st.integers(0, 2), min_size=M.n, max_size=M.n))
        P = VertexPartition.from_labels(labels)
        p = exact_distribution(M)
        allowed = []
        for code in range(1 << len(P)):
            sp = index_to_spins(code, len(P))
            idx = sum(1 << v for c, x in zip(P.classes, sp) if x > 0 for v in c)
            allowed.append(idx)
        cond = p[allowed] / p[allowed].sum()
        assert np.allclose(cond, exact_distribution(quotient_model(M, P).model), atol=1e-12)

    def test_beta_mean_keeps_pair_coupling(self):
        M = IsingModel(path_graph(3), {(0, 1): 1.0, (1, 2): 3.0})
        QM = quotient_model(M, VertexPartition(((0, 2), (1,))))
        assert isinstance(QM, QuotientModel)
        assert QM.model.couplings.tolist() == [4.0]
        assert QM.beta_max == 4.0


class TestHeavyEdges:
    @pytest.mark.parametrize("G", [complete_graph(2), path_graph(3), complete_graph(3), cycle_graph(6)],
                             ids=["K2", "P3", "K3", "C6"])
    @pytest.mark.parametrize("beta", [0.5, 2.0, 6.0])
    def test_disagreement_bound(self, G, beta):
        M = IsingModel.homogeneous(G, beta)
        p = exact_distribution(M)
        idx = np.arange(p.size)
        for u, v in G.edges:
            disagree = p[((idx >> u) ^ (idx >> v)) & 1 == 1].sum()
            assert disagree <= 1 / (math.exp(beta) + 1) + 1e-15

    def test_threshold_formula(self):
        assert heavy_threshold(2, 100) == pytest.approx(math.log(20 * 4 * 100))


class TestDDK:
    def _rate(self, visible, hidden, eps, L, expected, trials=100):
        draw = exact_sampler(hidden)
        corr = exact_correlations(visible)
        hits = sum(ddk_covariance_test(visible, draw(hidden, L, seed), eps, model_corr=corr).answer is expected
                   for seed in range(trials))
        return hits / trials

    def test_same_model_says_yes(self):
        M = IsingModel.homogeneous(cycle_graph(6), 0.7)
        assert self._rate(M, M, 0.25, 10_000, Answer.YES) >= 0.9

    def test_doubled_beta_says_no(self):
        visible = IsingModel.homogeneous(complete_graph(2), 1.0)
        hidden = IsingModel.homogeneous(complete_graph(2), 2.0)
        assert self._rate(visible, hidden, 0.25, 10_000, Answer.NO) >= 0.9

    def test_floor(self):
        M = IsingModel.homogeneous(complete_graph(2), 1.0)
        with pytest.raises(InsufficientSamples):
            ddk_covariance_test(M, np.ones((50, 2)), 0.01)
        assert ddk_min_samples(0.5) == 400

    def test_diagnostics(self):
        M = IsingModel.homogeneous(complete_graph(2), 1.0)
        v = ddk_covariance_test(M, exact_sampler(M)(M, 2000, 0), 0.5)
        assert v.diagnostics["pair"] == [0, 1]
        assert v.diagnostics["margin"] == pytest.approx(v.diagnostics["threshold"] - v.diagnostics["max_deviation"])

    def test_estimated_correlations_close_to_exact(self):
        M = IsingModel.homogeneous(cycle_graph(5), 0.5)
        est, err = estimated_correlations(M, chains=4000, sweeps=50, seed=1)
        assert np.all(np.abs(est - exact_correlations(M)) <= 5 * err + 1e-9)


class TestIdentityTester:
    K2 = IsingModel.homogeneous(complete_graph(2), 1.0)

    def test_rejects_antiferro(self):
        M = IsingModel.homogeneous(complete_graph(2), -1.0)
        with pytest.raises(NotFerromagnetic):
            ferro_identity_test(M, np.ones((10, 2)), 0.5, enforce_floor=False)

    def test_floor_enforced(self):
        with pytest.raises(InsufficientSamples):
            ferro_identity_test(self.K2, np.ones((10, 2)), 0.5)
        assert lemma_floor(2, 0.5) == 12_800

    def test_shape_mismatch(self):
        with pytest.raises(EmptySamples):
            ferro_identity_test(self.K2, np.ones((10, 3)), 0.5, enforce_floor=False)

    def test_heavy_edge_stage(self):
        visible = IsingModel.homogeneous(complete_graph(2), 20.0)
        hidden = exact_sampler(self.K2)(self.K2, lemma_floor(2, 0.25), 3)
        v = ferro_identity_test(visible, hidden, 0.25, sampler=exact_sampler(visible), seed=4)
        assert v.answer is Answer.NO and v.diagnostics["stage"] == "heavy-edge"
        assert v.diagnostics["heavy_threshold"] < 20

    def test_partition_stage(self):
        hidden_model = IsingModel.homogeneous(complete_graph(2), 30.0)
        hidden = exact_sampler(hidden_model)(hidden_model, lemma_floor(2, 0.25), 3)
        v = ferro_identity_test(self.K2, hidden, 0.25, sampler=exact_sampler(self.K2), seed=4)
        assert v.answer is Answer.NO and v.diagnostics["stage"] == "partition"

    def test_equal_models_reach_correlation_stage(self):
        samples = exact_sampler(self.K2)(self.K2, lemma_floor(2, 0.5), 5)
        v = ferro_identity_test(self.K2, samples, 0.5, sampler=exact_sampler(self.K2), seed=6)
        assert v.answer is Answer.YES and v.diagnostics["stage"] == "ddk"

    def test_projection_uses_class_representatives(self):
        s = np.array([[1, 1, -1], [-1, -1, 1]])
        P = refine_partition(s)
        assert project_samples(s, P).tolist() == [[1, -1], [-1, 1]]

    def test_default_sampler_is_glauber(self):
        samples = exact_sampler(self.K2)(self.K2, 2000, 5)
        v = ferro_identity_test(self.K2, samples, 0.5, sampler_budget=20, seed=1, enforce_floor=False)
        assert v.answer in (Answer.YES, Answer.NO)
        assert "event_probability" in v.diagnostics
