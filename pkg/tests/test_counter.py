import math
import stat
import sys
import warnings
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spintest.coloring import build_instance, count_colorings, z3_complete_bipartite
from spintest.counter import (
    CounterConfig,
    ExecTester,
    choose_k_ell,
    closed_form_tv,
    count_3colorings_via_tester,
    default_rounds,
    enumeration_tv,
    exact_oracle_tester,
    r_round_tester,
    resolve_tester,
)
from spintest.errors import InvalidParams, NotBipartite
from spintest.graph import complete_bipartite, complete_graph, cycle_graph, path_graph
from spintest.verdict import Answer


def _psi(q, k, ell):
    return (q - 3) ** (1 / k) * 2 ** (1 + ell / k)


class TestChooseKEll:
    def test_exact_threshold(self):
        c = choose_k_ell(5, 4, 1.0, 8)
        assert (c.k, c.ell) == (5, 10)
        assert 2**c.log2_psi == pytest.approx(8)

    def test_rounded_up(self):
        c = choose_k_ell(5, 4, 1.0, 9)
        assert c.ell == 11
        assert _psi(4, 5, 11) == pytest.approx(2**3.2)
        assert 0.5 * _psi(4, 5, 11) <= 9 <= _psi(4, 5, 11)

    def test_clamped(self):
        with pytest.warns(UserWarning, match="clamped"):
            c = choose_k_ell(2, 5, 1.0, 1)
        assert c.ell == 2 and c.clamped

    @given(st.integers(2, 12), st.integers(4, 8), st.sampled_from([0.25, 0.5, 1.0]), st.integers(2, 5000))
    def test_least_ell_in_window(self, N, q, eps, Z):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            c = choose_k_ell(N, q, eps, Z)
        k = math.ceil(N / eps)
        assert c.k == k
        if c.clamped:
            assert (q - 3) * 2 ** (k + 2) >= Z**k
            return
        # least ell with (q-3) 2^(k+ell) >= Z^k, in exact integers
        assert (q - 3) * 2 ** (k + c.ell) >= Z**k
        assert (q - 3) * 2 ** (k + c.ell - 1) < Z**k

    @given(st.integers(2, 12), st.sampled_from([0.25, 0.5, 1.0]), st.integers(1, 5000))
    def test_three_color_target(self, N, eps, Z):
        c = choose_k_ell(N, 3, eps, Z)
        assert 2**c.ell >= (Z + 2) ** c.k > 2 ** (c.ell - 1)

    def test_invalid(self):
        with pytest.raises(InvalidParams):
            choose_k_ell(3, 4, 0.5, 0)


class TestConfig:
    @pytest.mark.parametrize("N,delta", [(2, 0.2), (5, 0.1), (30, 0.01)])
    def test_default_rounds_odd(self, N, delta):
        R = CounterConfig(delta=delta).rounds_for(N)
        assert R % 2 == 1 and R == 48 * math.ceil(math.log(2 * N / delta)) + 1 == default_rounds(N, delta)

    @pytest.mark.parametrize("kw", [dict(rounds=4), dict(epsilon=0), dict(delta=1), dict(level="mid"),
                                    dict(samples_per_round=0)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidParams):
            CounterConfig(**kw)

    def test_unknown_tester(self):
        with pytest.raises(InvalidParams):
            resolve_tester("maybe")


P4 = path_graph(4)


class TestRoundTester:
    def test_constant_yes(self):
        cfg = CounterConfig(tester="yes", rounds=5)
        assert r_round_tester(cfg, P4, 20).answer is Answer.YES

    def test_coin_is_deterministic(self):
        cfg = CounterConfig(tester="coin", rounds=289)
        a, b = r_round_tester(cfg, P4, 20, seed=4), r_round_tester(cfg, P4, 20, seed=4)
        assert a.to_dict() == b.to_dict()
        assert 0 < a.yes < 289

    def test_oracle_says_no_far_below(self):
        # Z3(P4) = 24 and Z3(C4) = 18, so every guess below 18 is far below.
        cfg = CounterConfig(tester="oracle", epsilon=0.5, rounds=3)
        nos = sum(r_round_tester(cfg, P4, 5, seed=s).answer is Answer.NO for s in range(100))
        assert nos >= 95

    def test_oracle_cannot_separate_complete_bipartite_input(self):
        # K2 is its own complete bipartite hull, so both instances coincide and TV is 0.
        inst = build_instance(complete_graph(2), 2, 2, 4, expand=False)
        assert closed_form_tv(inst) == 0
        assert exact_oracle_tester(inst).answer is Answer.YES

    def test_errors_fail_closed(self):
        def broken(inst, samples, eps, seed):
            raise RuntimeError("boom")

        res = r_round_tester(CounterConfig(tester=broken, rounds=3), P4, 20)
        assert res.answer is Answer.NO and len(res.errors) == 3

    def test_sample_budget_warning(self):
        with pytest.warns(UserWarning, match="exceeds"):
            res = r_round_tester(CounterConfig(tester="yes", rounds=1, samples_per_round=2), P4, 20)
        assert res.warning

    def test_parallel_rounds_match(self):
        one = r_round_tester(CounterConfig(tester="coin", rounds=31), P4, 20, seed=2)
        many = r_round_tester(CounterConfig(tester="coin", rounds=31, workers=4), P4, 20, seed=2)
        assert one.to_dict() == many.to_dict()


@pytest.fixture
def script(tmp_path):
    def make(body):
        path = tmp_path / "tester.py"
        path.write_text(f"#!{sys.executable}\nimport sys\n{body}\n")
        path.chmod(path.stat().st_mode | stat.S_IEXEC)
        return str(path)
    return make


class TestExecTester:
    def test_reads_files(self, script):
        path = script("g, s, e = sys.argv[1:]\n"
                      "lines = open(s).read().split()\n"
                      "print('YES' if open(g).read().rstrip().endswith('q 4') and lines else 'NO')")
        res = r_round_tester(CounterConfig(tester=f"exec:{path}", rounds=3), P4, 20)
        assert res.answer is Answer.YES and res.yes == 3

    def test_bad_output_counts_as_no(self, script):
        path = script("print('perhaps')")
        res = r_round_tester(CounterConfig(tester=ExecTester(path), rounds=1), P4, 20)
        assert res.answer is Answer.NO and "RuntimeError" in res.errors[0]

    def test_nonzero_exit(self, script):
        path = script("print('YES'); sys.exit(3)")
        inst = build_instance(P4, 1, 2, 4, expand=False)
        with pytest.raises(RuntimeError, match="exited 3"):
            ExecTester(path)(inst, [[0, 1, 0, 1]], 0.3, 0)


class TestOracle:
    @pytest.mark.parametrize("H", [complete_graph(2), path_graph(3), P4], ids=["K2", "P3", "P4"])
    @pytest.mark.parametrize("q,k,ell", [(4, 1, 2), (4, 2, 3), (5, 1, 2), (3, 1, 2), (3, 1, 3)])
    def test_closed_form_matches_enumeration(self, H, q, k, ell):
        inst = build_instance(H, k, ell, q, expand=False)
        assert closed_form_tv(inst) == enumeration_tv(inst)

    def test_far_below_and_far_above(self):
        low = build_instance(P4, *_ke(4, 0.5, 5), 4, expand=False)
        high = build_instance(P4, *_ke(4, 0.5, 81), 4, expand=False)
        assert closed_form_tv(low) > Fraction(1, 3)
        assert exact_oracle_tester(low).answer is Answer.NO
        assert closed_form_tv(high) < Fraction(1, 3)
        assert exact_oracle_tester(high).answer is Answer.YES

    @pytest.mark.parametrize("H", [P4, path_graph(5), cycle_graph(6), complete_bipartite(2, 3)],
                             ids=["P4", "P5", "C6", "K23"])
    @pytest.mark.parametrize("q", [3, 4])
    def test_single_sign_change(self, H, q):
        U, W = H.bipartition()
        answers = []
        for Z in range(z3_complete_bipartite(len(U), len(W)), 3**H.n + 1):
            inst = build_instance(H, *_ke(q, 0.5, Z, H.n), q, expand=False)
            answers.append(exact_oracle_tester(inst).answer is Answer.YES)
        flips = sum(a != b for a, b in zip(answers, answers[1:]))
        assert flips <= 1 and answers[-1]


def _ke(q, eps, Z, N=4):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        c = choose_k_ell(N, q, eps, Z)
    return c.k, c.ell


class TestBinarySearch:
    def test_tiny_epsilon_enumerates(self):
        res = count_3colorings_via_tester(complete_graph(2), epsilon=2**-2, delta=0.2)
        assert res.exact and res.estimate == 6 and res.calls == 0

    def test_constant_yes_stops_at_lower_end(self):
        res = count_3colorings_via_tester(P4, cfg=CounterConfig(tester="yes", rounds=1))
        assert res.estimate == 18 and res.calls == 1

    def test_constant_no_stops_at_upper_end(self):
        res = count_3colorings_via_tester(P4, cfg=CounterConfig(tester="no", rounds=1))
        assert res.estimate == 81 and res.calls == 2

    @pytest.mark.parametrize("H", [path_graph(5), cycle_graph(6), complete_bipartite(2, 4), path_graph(7)],
                             ids=["P5", "C6", "K24", "P7"])
    def test_call_count(self, H):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = count_3colorings_via_tester(H, cfg=CounterConfig(tester="coin", rounds=3, epsilon=0.9))
        assert res.calls <= 2 + math.ceil(math.log2(3**H.n))
        assert res.calls <= 2 * H.n

    def test_oracle_sandwich(self):
        cfg = CounterConfig(tester="oracle", epsilon=0.5, delta=0.2, rounds=3, seed=1)
        res = count_3colorings_via_tester(P4, cfg=cfg)
        assert (1 - 0.5) * res.estimate <= count_colorings(P4, 3) <= 1.5 * res.estimate
        assert [r.Zhat for r in res.trace][:2] == [18, 81]

    def test_rejects_odd_cycle(self):
        with pytest.raises(NotBipartite):
            count_3colorings_via_tester(cycle_graph(5), cfg=CounterConfig(tester="yes", rounds=1))

    def test_report_round_trip(self):
        res = count_3colorings_via_tester(P4, cfg=CounterConfig(tester="no", rounds=1))
        d = res.to_dict()
        assert d["calls"] == len(d["trace"]) == 2 and d["trace"][0]["answer"] == "NO"


@given(st.integers(1, 60), st.data())
def test_bridge_inequality(N, data):
    eps = data.draw(st.floats(2 ** (-N / 4), 1, exclude_max=True))
    Z = data.draw(st.integers(math.ceil(2 ** (N / 2)), 10**12))
    assert 2**-eps * (Z - 1) >= (1 - eps) * Z
