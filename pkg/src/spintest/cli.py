"""Command-line entry point.

Exit codes: 0 on success, 1 when a reported check fails, 2 on usage
errors.  Reports go to stdout or ``--out``; JSON output has sorted keys
and carries no timing unless ``--timing`` is given, so identical inputs
give byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from .errors import SpinTestError
from .report import RunReport, emit_report


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def load_graph(spec: str):
    """A named graph (``K2``, ``C4``, ``petersen``...) or a graph file."""
    from .graph import NAMED_GRAPHS, read_graph

    if spec in NAMED_GRAPHS:
        return NAMED_GRAPHS[spec]()
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"{spec!r} is neither a named graph ({', '.join(NAMED_GRAPHS)}) nor a file")
    return read_graph(path)


def _ising_model(args):
    from .ising import IsingModel

    return IsingModel.homogeneous(load_graph(args.graph), args.beta)


# ---------------------------------------------------------------- gadget

def cmd_gadget_sample(args, report: RunReport):
    from .gadget import IsingGadgetParams, sample_gadget, verify_gadget

    params = IsingGadgetParams(args.m, args.p, args.din, args.dout)
    g = sample_gadget(params, args.variant, args.seed)
    Path(args.file).write_text(g.serialize())
    report.artifacts.append(args.file)
    rep = verify_gadget(g, params)
    report.add("degree bounds", rep.degree_ok, {"port": rep.port_degree_max, "nonport": rep.nonport_degree_max})
    report.add("bipartite", rep.bipartite, rep.bipartite)
    report.add("port counts", rep.port_counts_ok, [rep.left_ports, rep.right_ports], params.p)
    report.results["max_multiplicity"] = rep.max_multiplicity
    report.results["edges"] = len(g.graph.edges)


def cmd_gadget_verify(args, report: RunReport):
    from .gadget import GadgetInstance, IsingGadgetParams, verify_gadget

    g = GadgetInstance.parse(Path(args.file).read_text())
    params = IsingGadgetParams(g.m, args.p if args.p is not None else len(g.left_ports), args.din, args.dout)
    rep = verify_gadget(g, params)
    report.add("degree bounds", rep.degree_ok, {"port": rep.port_degree_max, "nonport": rep.nonport_degree_max})
    report.add("bipartite", rep.bipartite, rep.bipartite)
    report.add("port counts", rep.port_counts_ok, [rep.left_ports, rep.right_ports], params.p)


# ---------------------------------------------------------------- ising

def cmd_ising_partition(args, report: RunReport):
    from .ising import partition_function

    report.results["log_Z"] = partition_function(_ising_model(args))


def cmd_ising_sample(args, report: RunReport):
    from .ising import format_spins, glauber_samples

    s = glauber_samples(_ising_model(args), args.count, args.sweeps, args.seed)
    report.results["samples"] = [format_spins(x) for x in s]
    report.results["mean_spin"] = float(s.mean())


def cmd_ising_distribution(args, report: RunReport):
    from .ising import exact_distribution, write_distribution_csv

    p = exact_distribution(_ising_model(args))
    if args.csv:
        with open(args.csv, "w") as fh:
            write_distribution_csv(p, fh)
        report.artifacts.append(args.csv)
    report.results["states"] = int(p.size)
    report.add("normalized", abs(p.sum() - 1) < 1e-12, float(p.sum()), 1.0)


# ---------------------------------------------------------------- reduction

def _instance_params(args):
    from .reduction import InstanceParams

    return InstanceParams(args.m, args.p, args.din, args.dout, args.ell)


def _micro(args):
    from .reduction import micro_gadget

    return micro_gadget(args.micro) if args.micro else None


def cmd_reduce_build(args, report: RunReport):
    from .graph import write_graph
    from .reduction import build_testing_instance, check_conditions

    H = load_graph(args.graph)
    params = _instance_params(args)
    report.results["conditions"] = check_conditions(H.n, args.w, params)
    inst = build_testing_instance(H, args.w, params, args.beta, args.seed, _micro(args), args.port_reuse)
    stem = args.file
    write_graph(inst.M_graph, f"{stem}.M.graph")
    write_graph(inst.Mstar_graph, f"{stem}.Mstar.graph")
    Path(f"{stem}.json").write_text(json.dumps(inst.sidecar(), sort_keys=True, indent=2) + "\n")
    report.artifacts += [f"{stem}.M.graph", f"{stem}.Mstar.graph", f"{stem}.json"]
    report.results["vertices"] = inst.n
    report.results["max_degree"] = int(inst.M_graph.max_degree())


def cmd_reduce_tlc(args, report: RunReport):
    from .reduction import cut_regime, two_large_cuts_criterion, two_large_cuts_enumeration

    H = load_graph(args.graph)
    crit = two_large_cuts_criterion(H, args.w)
    enum_ = two_large_cuts_enumeration(H, args.w)
    report.add("criterion agrees with enumeration", crit == enum_, crit, enum_)
    report.results["two_large_cuts"] = crit
    report.results["regime"] = cut_regime(H, args.w).value


def cmd_reduce_maxcut(args, report: RunReport):
    from .graph import max_cut_exact
    from .reduction import exact_tv_tester, maxcut_via_tester, phase_oracle_tester

    H = load_graph(args.graph)
    tester = {"exact": exact_tv_tester, "phase": phase_oracle_tester}[args.tester]
    params = _instance_params(args) if args.ell is not None else None
    d = maxcut_via_tester(H, args.k, tester, args.trials, params, args.beta, args.samples, args.seed,
                          _micro(args), args.port_reuse)
    report.results.update(decision=bool(d), w=d.w, votes=d.votes, reason=d.reason)
    if H.n <= 24:
        truth = max_cut_exact(H, workers=args.workers)[0] >= args.k
        report.add("decision matches exact max cut", bool(d) == truth, bool(d), truth)


# ---------------------------------------------------------------- ferro

def cmd_test_ferro(args, report: RunReport):
    from .ferro import exact_sampler, ferro_identity_test, glauber_sampler, lemma_floor
    from .ising import IsingModel, parse_spins

    visible = _ising_model(args)
    if args.samples_file:
        lines = [ln for ln in Path(args.samples_file).read_text().splitlines() if ln.strip()]
        samples = np.array([parse_spins(ln) for ln in lines])
    else:
        hidden = IsingModel.homogeneous(load_graph(args.hidden_graph or args.graph),
                                        args.hidden_beta if args.hidden_beta is not None else args.beta)
        count = args.count or lemma_floor(visible.n, args.epsilon)
        draw = exact_sampler(hidden) if args.sampler == "exact" else glauber_sampler(args.sweeps)
        samples = draw(hidden, count, args.seed)
    sampler = exact_sampler(visible) if args.sampler == "exact" else glauber_sampler(args.sweeps)
    v = ferro_identity_test(visible, samples, args.epsilon, sampler=sampler, seed=args.seed + 1,
                            enforce_floor=not args.no_floor)
    report.results["answer"] = v.answer.value
    report.results["diagnostics"] = v.diagnostics
    if args.expect:
        report.add("answer matches expectation", v.answer.value == args.expect, v.answer.value, args.expect)


# ---------------------------------------------------------------- coloring

def cmd_coloring_count(args, report: RunReport):
    from .coloring import count_colorings

    report.results["count"] = count_colorings(load_graph(args.graph), args.q, budget=args.budget, workers=args.workers)


def _coloring_instance(args):
    from .coloring import build_instance

    return build_instance(load_graph(args.graph), args.k, args.ell, args.q, None, not args.no_expand,
                          args.gadget_m, args.gadget_t)


def cmd_coloring_instance(args, report: RunReport):
    from .graph import write_graph

    inst = _coloring_instance(args)
    stem = args.file
    write_graph(inst.graph, f"{stem}.G.graph")
    write_graph(inst.star_graph, f"{stem}.Gstar.graph")
    Path(f"{stem}.json").write_text(json.dumps(inst.sidecar(), sort_keys=True, indent=2) + "\n")
    report.artifacts += [f"{stem}.G.graph", f"{stem}.Gstar.graph", f"{stem}.json"]
    subset = set(inst.graph.edges) <= set(inst.star_graph.edges)
    report.add("G is a subgraph of G*", subset, subset, True)
    report.results.update(vertices=inst.n, max_degree=int(inst.star_graph.max_degree()))


def cmd_coloring_sample(args, report: RunReport):
    from .coloring import format_coloring, is_proper, sample_G_star

    inst = _coloring_instance(args)
    samples = sample_G_star(inst, args.seed, count=args.count)
    proper = all(is_proper(inst.star_graph, s) for s in samples)
    report.add("samples are proper colorings of G*", proper, proper, True)
    report.results["samples"] = [format_coloring(s, inst.q) for s in samples]


def cmd_count_colorings(args, report: RunReport):
    from .coloring import count_colorings
    from .counter import CounterConfig, count_3colorings_via_tester

    H = load_graph(args.graph)
    cfg = CounterConfig(epsilon=args.epsilon, delta=args.delta, q=args.q, tester=args.tester,
                        samples_per_round=args.samples_per_round, rounds=args.rounds, level=args.level,
                        seed=args.seed, workers=args.workers, timeout=args.timeout)
    res = count_3colorings_via_tester(H, cfg=cfg)
    report.results.update(res.to_dict())
    report.warnings += sorted({r.warning for r in res.trace if r.warning})
    if H.n <= 16:
        Z = count_colorings(H, 3)
        ok = (1 - args.epsilon) * res.estimate <= Z <= (1 + args.epsilon) * res.estimate
        report.add("estimate within (1 +- eps)", ok, res.estimate, Z)


# ---------------------------------------------------------------- verify

def cmd_verify(args, report: RunReport):
    from .suites import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        SUITES[name](report)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    from .suites import SUITES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="report path (default stdout)")
    common.add_argument("--config", default=None, help="JSON file of flag defaults")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    p = _Parser(prog="spintest", description="Identity-testing reductions for spin systems and colorings.")
    verbs = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def leaf(group, name, func, **kw):
        sp = group.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func)
        return sp

    gadget = verbs.add_parser("gadget").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = leaf(gadget, "sample", cmd_gadget_sample)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--din", type=int, required=True)
    sp.add_argument("--dout", type=int, required=True)
    sp.add_argument("--variant", default="direct")
    sp.add_argument("--file", default="gadget.txt")
    sp = leaf(gadget, "verify", cmd_gadget_verify)
    sp.add_argument("file")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--din", type=int, required=True)
    sp.add_argument("--dout", type=int, required=True)

    ising = verbs.add_parser("ising").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("partition", cmd_ising_partition), ("sample", cmd_ising_sample),
                       ("distribution", cmd_ising_distribution)):
        sp = leaf(ising, name, func)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--beta", type=float, required=True)
        if name == "sample":
            sp.add_argument("--count", type=int, default=1)
            sp.add_argument("--sweeps", type=int, default=None)
        if name == "distribution":
            sp.add_argument("--csv", default=None)

    reduce_ = verbs.add_parser("reduce").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("build", cmd_reduce_build), ("tlc", cmd_reduce_tlc), ("maxcut", cmd_reduce_maxcut)):
        sp = leaf(reduce_, name, func)
        sp.add_argument("--graph", required=True)
        if name == "tlc":
            sp.add_argument("--w", type=int, required=True)
            continue
        sp.add_argument("--m", type=int, default=3)
        sp.add_argument("--p", type=int, default=3)
        sp.add_argument("--din", type=int, default=3)
        sp.add_argument("--dout", type=int, default=1)
        sp.add_argument("--ell", type=int, default=None if name == "maxcut" else 3)
        sp.add_argument("--beta", type=float, default=-4.0 if name == "build" else -1.0)
        sp.add_argument("--micro", choices=("K33", "C6"), default=None)
        sp.add_argument("--port-reuse", action="store_true")
        if name == "build":
            sp.add_argument("--w", type=int, required=True)
            sp.add_argument("--file", default="instance")
        else:
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--tester", choices=("exact", "phase"), default="phase")
            sp.add_argument("--trials", type=int, default=1)
            sp.add_argument("--samples", type=int, default=1)

    test = verbs.add_parser("test").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = leaf(test, "ferro", cmd_test_ferro)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--samples-file", default=None)
    sp.add_argument("--hidden-graph", default=None)
    sp.add_argument("--hidden-beta", type=float, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--sampler", choices=("glauber", "exact"), default="glauber")
    sp.add_argument("--sweeps", type=int, default=None)
    sp.add_argument("--no-floor", action="store_true", help="allow fewer samples than the guarantee needs")
    sp.add_argument("--expect", choices=("YES", "NO"), default=None)

    coloring = verbs.add_parser("coloring").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = leaf(coloring, "count", cmd_coloring_count)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--budget", type=int, default=10**8)
    for name, func in (("instance", cmd_coloring_instance), ("sample", cmd_coloring_sample)):
        sp = leaf(coloring, name, func)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--ell", type=int, required=True)
        sp.add_argument("--no-expand", action="store_true")
        sp.add_argument("--gadget-m", type=int, default=None)
        sp.add_argument("--gadget-t", type=int, default=None)
        if name == "instance":
            sp.add_argument("--file", default="coloring")
        else:
            sp.add_argument("--count", type=int, default=1)

    count = verbs.add_parser("count").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = leaf(count, "colorings", cmd_count_colorings)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--q", type=int, default=4, help="instance construction: 3 or >= 4")
    sp.add_argument("--epsilon", type=float, default=0.5)
    sp.add_argument("--delta", type=float, default=0.2)
    sp.add_argument("--tester", default="oracle", help="oracle | yes | no | coin | exec:<path>")
    sp.add_argument("--level", choices=("pre", "full"), default="pre")
    sp.add_argument("--rounds", type=int, default=None)
    sp.add_argument("--samples-per-round", type=int, default=1)
    sp.add_argument("--timeout", type=float, default=60.0)

    sp = leaf(verbs, "verify", cmd_verify)
    sp.add_argument("suite", choices=sorted(SUITES) + ["all"])
    return p


def _explicit_dests(parser: argparse.ArgumentParser, argv: list[str]) -> set[str]:
    """Destinations of options that appear literally on the command line."""
    given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
    found = set()
    stack = [parser]
    while stack:
        p = stack.pop()
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())
            elif given & set(action.option_strings):
                found.add(action.dest)
    return found


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            config = json.loads(Path(args.config).read_text())
            explicit = _explicit_dests(parser, argv)
            for key, value in config.items():
                dest = key.replace("-", "_")
                if hasattr(args, dest) and dest not in explicit:
                    setattr(args, dest, value)
    except UsageError as exc:
        print(f"spintest: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)

    skip = {"func", "verb", "action", "out", "format", "config", "timing"}
    report = RunReport(
        command=["spintest", *argv],
        config={k: v for k, v in sorted(vars(args).items()) if k not in skip},
        seeds={"seed": args.seed},
    )
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            args.func(args, report)
        report.warnings += [str(w.message) for w in caught if str(w.message) not in report.warnings]
    except UsageError as exc:
        print(f"spintest: error: {exc}", file=sys.stderr)
        return 2
    except (SpinTestError, ValueError, FileNotFoundError) as exc:
        print(f"spintest: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        report.timing = {"seconds": time.perf_counter() - start}
    emit_report(report, args.format, args.out)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
