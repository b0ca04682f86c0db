import json
import math

import pytest

from spintest.cli import main
from spintest.report import Check, RunReport, render_report


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


class TestExitCodes:
    def test_success(self, capsys):
        code, rep = run_json(capsys, "coloring", "count", "--graph", "C5", "--q", "3")
        assert code == 0 and rep["ok"]
        assert rep["results"]["count"] == 30

    @pytest.mark.parametrize("argv", [
        ["frobnicate"],
        ["coloring", "count", "--graph", "no-such-graph", "--q", "3"],
        ["coloring", "count", "--q", "3"],
        ["test", "ferro", "--graph", "K2", "--beta", "-1", "--epsilon", "0.5", "--count", "10", "--no-floor"],
    ], ids=["verb", "graph", "missing-flag", "antiferro"])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err

    def test_failed_expectation(self, capsys):
        argv = ["test", "ferro", "--graph", "K2", "--beta", "1", "--epsilon", "0.5", "--sampler", "exact",
                "--hidden-beta", "1", "--count", "12800", "--seed", "3"]
        ok, rep = run_json(capsys, *argv, "--expect", "YES")
        bad, _ = run_json(capsys, *argv, "--expect", "NO")
        assert ok == 0 and rep["results"]["answer"] == "YES"
        assert bad == 1


class TestCommands:
    def test_gadget_sample(self, capsys, tmp_path):
        path = tmp_path / "g.txt"
        code, rep = run_json(capsys, "gadget", "sample", "--m", "3", "--p", "1", "--din", "2", "--dout", "1",
                             "--seed", "7", "--file", str(path))
        assert code == 0 and path.exists()
        assert {c["name"] for c in rep["checks"]} == {"degree bounds", "bipartite", "port counts"}
        code, rep = run_json(capsys, "gadget", "verify", str(path), "--din", "2", "--dout", "1")
        assert code == 0

    def test_verify_suite(self, capsys):
        code, rep = run_json(capsys, "verify", "coloring-lemmas")
        assert code == 0 and rep["checks"] and all(c["status"] != "FAIL" for c in rep["checks"])

    def test_ising_partition(self, capsys):
        code, rep = run_json(capsys, "ising", "partition", "--graph", "K2", "--beta", "0")
        assert code == 0
        assert rep["results"]["log_Z"] == pytest.approx(math.log(4))

    def test_text_format(self, capsys):
        code, out, _ = run(capsys, "coloring", "count", "--graph", "K3", "--q", "3", "--format", "text")
        assert code == 0 and out.rstrip().endswith("OK") and "count: 6" in out

    def test_warnings_are_reported(self, capsys):
        code, rep = run_json(capsys, "count", "colorings", "--graph", "P4", "--tester", "yes", "--rounds", "1",
                             "--samples-per-round", "4")
        assert code == 0 and any("exceeds" in w for w in rep["warnings"])


class TestDeterminism:
    def test_byte_identical(self, tmp_path):
        out = tmp_path / "a.json"
        argv = ["coloring", "sample", "--graph", "P3", "--q", "4", "--k", "1", "--ell", "2", "--count", "3",
                "--seed", "5", "--no-expand", "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first
        assert "timing" not in json.loads(first)

    def test_timing_opt_in(self, capsys):
        _, rep = run_json(capsys, "coloring", "count", "--graph", "K2", "--q", "3", "--timing")
        assert rep["timing"]["seconds"] >= 0


class TestConfig:
    def test_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"q": 4, "seed": 9}))
        _, rep = run_json(capsys, "coloring", "count", "--graph", "K3", "--q", "3", "--config", str(cfg))
        assert rep["config"]["q"] == 3 and rep["config"]["seed"] == 9
        assert rep["results"]["count"] == 6
        _, rep = run_json(capsys, "coloring", "count", "--graph", "K3", "--q", "3", "--seed", "1", "--config", str(cfg))
        assert rep["config"]["seed"] == 1


class TestReport:
    def test_empty_skeleton(self):
        d = json.loads(render_report(RunReport()))
        assert d == {"artifacts": [], "checks": [], "command": [], "config": {}, "ok": True, "results": {},
                     "seeds": {}, "warnings": []}

    def test_round_trip(self):
        rep = RunReport(command=["x"])
        rep.add("a", True, 1, 1)
        rep.add("b", False, 2, asserted=False)
        d = json.loads(render_report(rep))
        assert d["ok"] and [c["status"] for c in d["checks"]] == ["PASS", "REPORT"]
        rebuilt = RunReport(**{k: v for k, v in d.items() if k != "ok"})
        rebuilt.checks = [Check(**{k: v for k, v in c.items() if k != "status"}) for c in d["checks"]]
        assert render_report(rebuilt) == render_report(rep)

    def test_failing_check(self):
        rep = RunReport()
        rep.add("c", False)
        assert not rep.ok and render_report(rep, "text").rstrip().endswith("FAILED")
