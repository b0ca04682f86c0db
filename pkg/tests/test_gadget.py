import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spintest.errors import InvalidParams, NotRegular
from spintest.gadget import (
    VARIANTS,
    GadgetInstance,
    IsingGadgetParams,
    sample_gadget,
    sampled_edge_expansion,
    spectral_gap,
    union_of_matchings,
    variant_chi_square,
    variant_frequency_table,
    verify_gadget,
)
from spintest.graph import Multigraph, complete_bipartite


@st.composite
def gadget_params(draw, max_m=12):
    m = draw(st.integers(1, max_m))
    p = draw(st.integers(0, m))
    d_in = draw(st.integers(1, 4))
    d_out = draw(st.integers(max(0, 3 - d_in), 3))
    return IsingGadgetParams(m, p, d_in, d_out)


class TestParams:
    @pytest.mark.parametrize("args", [(2, 3, 2, 1), (3, 1, 0, 3), (3, 1, 1, 1), (3, -1, 2, 1)])
    def test_invalid(self, args):
        with pytest.raises(InvalidParams):
            IsingGadgetParams(*args)

    def test_unknown_variant(self):
        with pytest.raises(InvalidParams):
            sample_gadget(IsingGadgetParams(3, 1, 2, 1), "other")


class TestSample:
    def test_all_matchings_coincide_for_m1(self):
        g = sample_gadget(IsingGadgetParams(1, 0, 3, 0), seed=5)
        assert dict(g.graph.edges) == {(0, 1): 1}
        assert g.raw.edges[(0, 1)] == 3

    @pytest.mark.parametrize("seed", range(20))
    def test_small_degree_bounds(self, seed):
        g = sample_gadget(IsingGadgetParams(3, 1, 2, 1), seed=seed)
        deg = g.graph.degrees()
        assert all(deg[p] <= 2 for p in g.ports)
        assert deg.max() <= 3

    def test_degree_bounds_over_many_seeds(self):
        for seed in range(1000):
            m = 5 + seed % 46
            params = IsingGadgetParams(m, seed % (m + 1), 2, 2)
            rep = verify_gadget(sample_gadget(params, seed=seed), params)
            assert rep.ok, (seed, rep)

    @given(gadget_params(), st.sampled_from(VARIANTS), st.integers(0, 2**63 - 1))
    def test_invariants_every_variant(self, params, variant, seed):
        if variant != "direct" and params.d_out < 1:
            return
        g = sample_gadget(params, variant, seed)
        rep = verify_gadget(g, params)
        assert rep.ok
        assert g.graph.n == 2 * params.m

    def test_all_ports_skips_out_matchings(self):
        params = IsingGadgetParams(6, 6, 2, 2)
        g = sample_gadget(params, seed=3)
        assert g.graph.max_degree() <= 2
        assert g.raw.total_multiplicity == 2 * 6

    @given(st.integers(0, 10**9))
    def test_deterministic_serialization(self, seed):
        params = IsingGadgetParams(8, 2, 2, 1)
        a, b = sample_gadget(params, seed=seed), sample_gadget(params, seed=seed)
        assert a.serialize() == b.serialize()
        back = GadgetInstance.parse(a.serialize())
        assert back.graph == a.graph and back.ports == a.ports and back.seed == seed

    @pytest.mark.slow
    def test_variants_share_one_distribution(self):
        tables = variant_frequency_table(IsingGadgetParams(3, 1, 2, 1), 100_000, seed=0)
        assert len({frozenset(t) for t in tables.values()}) == 1
        _, p = variant_chi_square(tables)
        assert p > 0.01


class TestVerify:
    def test_overloaded_port_fails(self):
        params = IsingGadgetParams(3, 1, 2, 1)
        G = Multigraph.from_edges(6, [(0, 3), (0, 4), (0, 5), (1, 4), (2, 5)])
        rep = verify_gadget(GadgetInstance(G, 3, (0, 3), 0), params)
        assert not rep.degree_ok and rep.port_degree_max == 3

    def test_non_bipartite_fails(self):
        G = Multigraph.from_edges(4, [(0, 1), (0, 2)])
        rep = verify_gadget(GadgetInstance(G, 2, (0, 2), 0), IsingGadgetParams(2, 1, 2, 1))
        assert not rep.bipartite

    def test_multiplicity_of_five_matchings(self):
        small = 0
        for seed in range(1000):
            params = IsingGadgetParams(100, 0, 5, 0)
            rep = verify_gadget(sample_gadget(params, seed=seed), params)
            small += rep.max_multiplicity <= 3
        assert small >= 990


class TestSpectral:
    @pytest.mark.parametrize("m", [2, 4, 9])
    def test_single_matching(self, m):
        assert spectral_gap(union_of_matchings(m, 1, 0)) == pytest.approx(1.0, abs=1e-8)

    def test_single_edge_has_only_plus_minus_one(self):
        assert spectral_gap(union_of_matchings(1, 1, 0)) == pytest.approx(-1.0, abs=1e-8)

    def test_k22(self):
        assert spectral_gap(complete_bipartite(2, 2)) == pytest.approx(0.0, abs=1e-8)

    def test_not_regular(self):
        with pytest.raises(NotRegular):
            spectral_gap(Multigraph.from_edges(3, [(0, 1), (1, 2)]))

    def test_union_is_regular_bipartite(self):
        g = union_of_matchings(30, 3, 1)
        assert set(g.degrees().tolist()) == {3}
        lam = np.linalg.eigvalsh(g.adjacency())
        assert np.allclose(np.sort(lam), np.sort(-lam), atol=1e-8)

    def test_random_union_near_ramanujan(self):
        gaps = [spectral_gap(union_of_matchings(200, 3, s)) for s in range(10)]
        assert np.mean(np.array(gaps) < 2 * math.sqrt(2) + 0.1) >= 0.5

    def test_sampled_expansion_is_upper_estimate(self):
        g = union_of_matchings(8, 3, 2)
        est = sampled_edge_expansion(g, 8, 300, 0)
        from spintest.graph import expansion_min
        assert est >= float(expansion_min(g, 8).ratio) - 1e-12
