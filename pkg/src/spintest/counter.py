"""Approximate counting of 3-colorings from any identity tester.

For a guess ``Z`` the driver builds the coloring instance whose two
classes are balanced around ``Z``, hands the tester the ``H`` graph plus
fresh samples from the ``B`` graph, repeats ``R`` times and takes the
majority.  A binary search over ``[Z3(B), 3^N]`` then pins down ``Z3(H)``.

Testers are callables ``tester(instance, samples, eps, seed)`` returning an
:class:`Answer`, a :class:`TesterVerdict` or the strings ``"YES"``/``"NO"``.
"""
from __future__ import annotations

import math
import subprocess
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .coloring import (
    ColoringInstance,
    build_instance,
    count_colorings,
    enumerate_colorings,
    format_coloring,
    omega_counts,
    resolve_mode,
    sample_G_star,
    z3_complete_bipartite,
)
from .errors import InvalidParams, NotBipartite, NotConnected
from .graph import Multigraph, format_graph
from .rng import child_seed, py_stream
from .verdict import Answer, TesterVerdict

Tester = Callable[[ColoringInstance, np.ndarray, float, int], object]
ORACLE_THRESHOLD = Fraction(1, 3)
LEVELS = ("pre", "full")


def default_rounds(N: int, delta: float) -> int:
    return 48 * math.ceil(math.log(2 * N / delta)) + 1


@dataclass
class CounterConfig:
    epsilon: float = 0.5
    delta: float = 0.2
    q: int = 4
    mode: str | None = None
    tester: str | Tester = "oracle"
    samples_per_round: int = 1
    rounds: int | None = None
    level: str = "pre"
    tester_eps: float = 1 / 3
    seed: int = 0
    workers: int = 1
    timeout: float = 60.0

    def __post_init__(self):
        if not (0 < self.epsilon <= 1 and 0 < self.delta < 1):
            raise InvalidParams("need epsilon in (0, 1] and delta in (0, 1)")
        if self.rounds is not None and (self.rounds < 1 or self.rounds % 2 == 0):
            raise InvalidParams("rounds must be a positive odd integer")
        if self.level not in LEVELS:
            raise InvalidParams(f"level must be one of {LEVELS}")
        if self.samples_per_round < 1:
            raise InvalidParams("need at least one sample per round")
        resolve_mode(self.q, self.mode)

    def rounds_for(self, N: int) -> int:
        return self.rounds if self.rounds is not None else default_rounds(N, self.delta)


# ---------------------------------------------------------------- parameter choice

@dataclass(frozen=True)
class KEll:
    k: int
    ell: int
    log2_psi: float
    clamped: bool = False
    warning: str | None = None


def choose_k_ell(N: int, q: int, eps: float, Zhat: int) -> KEll:
    """``k = ceil(N/eps)`` and the smallest ``ell >= 2`` whose threshold reaches ``Zhat``.

    For ``q >= 4`` the threshold is ``psi = (q-3)^(1/k) 2^(1 + ell/k)``, so
    the choice is the least ``ell`` with ``(q-3) 2^(k+ell) >= Zhat^k``,
    which lands in ``2^(-1/k) psi < Zhat <= psi``.  For ``q = 3`` the
    threshold is ``2^(ell/k) - 2``.
    """
    if Zhat < 1 or not (0 < eps <= 1):
        raise InvalidParams("need Zhat >= 1 and eps in (0, 1]")
    k = math.ceil(N / eps)
    if q >= 4:
        target = -(-(Zhat**k) // (q - 3))
        ell = (target - 1).bit_length() - k
        log2_psi = math.log2(q - 3) / k + 1
    else:
        ell = ((Zhat + 2) ** k - 1).bit_length()
        log2_psi = 0.0
    if ell < 2:
        msg = f"ell window for Zhat={Zhat} lies below 2; clamped to 2"
        warnings.warn(msg, stacklevel=2)
        return KEll(k, 2, log2_psi + 2 / k, True, msg)
    return KEll(k, ell, log2_psi + ell / k)


# ---------------------------------------------------------------- testers

@lru_cache(maxsize=256)
def _z3_cached(n: int, edges: tuple) -> int:
    return count_colorings(Multigraph(n, dict(edges)), 3)


def z3(H: Multigraph) -> int:
    return _z3_cached(H.n, tuple(H.edges.items()))


def closed_form_tv(inst: ColoringInstance) -> Fraction:
    """Exact TV between the uniform colorings of the ``H`` and ``B`` instances.

    Every coloring of the ``B`` graph colors the ``H`` graph too, and the
    ``b`` classes coincide, so ``TV = (a_H - a_B) / (a_H + b_H)``.
    """
    U, W = inst.sides
    aH, bH = omega_counts(inst.H, inst.k, inst.ell, inst.q, inst.mode, z3=z3(inst.H))
    aB, _ = omega_counts(inst.B, inst.k, inst.ell, inst.q, inst.mode, z3=z3_complete_bipartite(len(U), len(W)))
    return Fraction(aH - aB, aH + bH)


def enumeration_tv(inst: ColoringInstance, budget: int = 10**8) -> Fraction:
    """The same TV by listing both pre-gadget coloring sets."""
    G = set(enumerate_colorings(inst.pre_graph, inst.q, budget=budget))
    S = set(enumerate_colorings(inst.pre_star, inst.q, budget=budget))
    pG, pS = Fraction(1, len(G)), Fraction(1, len(S))
    total = sum(abs((pG if x in G else 0) - (pS if x in S else 0)) for x in G | S)
    return total / 2


def exact_oracle_tester(inst: ColoringInstance, samples=None, eps: float | None = None, seed: int = 0) -> TesterVerdict:
    """Reference tester: YES iff the exact TV is at most 1/3; samples are ignored."""
    tv = closed_form_tv(inst)
    answer = Answer.YES if tv <= ORACLE_THRESHOLD else Answer.NO
    return TesterVerdict(answer, {"tv": float(tv), "tv_exact": f"{tv.numerator}/{tv.denominator}"})


def constant_tester(answer: Answer) -> Tester:
    return lambda inst, samples, eps, seed: TesterVerdict(answer, {"constant": answer.value})


def coin_tester(inst, samples, eps, seed) -> TesterVerdict:
    return TesterVerdict(Answer.YES if py_stream(seed, "coin").random() < 0.5 else Answer.NO, {})


@dataclass
class ExecTester:
    """External tester run as ``path INSTANCE SAMPLES EPS``; must print YES or NO."""

    path: str
    timeout: float = 60.0

    def __call__(self, inst, samples, eps, seed) -> TesterVerdict:
        with tempfile.TemporaryDirectory() as tmp:
            gfile = Path(tmp) / "instance.graph"
            sfile = Path(tmp) / "samples.txt"
            gfile.write_text(format_graph(inst.graph) + f"q {inst.q}\n")
            sfile.write_text("".join(format_coloring(s, inst.q) + "\n" for s in np.atleast_2d(samples)))
            proc = subprocess.run(
                [self.path, str(gfile), str(sfile), repr(eps)],
                capture_output=True, text=True, timeout=self.timeout, check=False,
            )
        words = proc.stdout.split()
        if proc.returncode != 0 or not words or words[0] not in ("YES", "NO"):
            raise RuntimeError(f"tester exited {proc.returncode} with output {proc.stdout[:80]!r}")
        return TesterVerdict(Answer(words[0]), {"returncode": proc.returncode})


def resolve_tester(spec, timeout: float = 60.0) -> Tester:
    if callable(spec):
        return spec
    if spec == "oracle":
        return exact_oracle_tester
    if spec in ("yes", "no"):
        return constant_tester(Answer(spec.upper()))
    if spec == "coin":
        return coin_tester
    if isinstance(spec, str) and spec.startswith("exec:"):
        return ExecTester(spec[5:], timeout)
    raise InvalidParams(f"unknown tester {spec!r}")


def _as_answer(out) -> Answer:
    if isinstance(out, TesterVerdict):
        return out.answer
    if isinstance(out, Answer):
        return out
    return Answer(str(out).strip().upper())


# ---------------------------------------------------------------- driver

@dataclass
class RoundResult:
    answer: Answer
    Zhat: int
    k: int
    ell: int
    yes: int
    no: int
    errors: list[str] = field(default_factory=list)
    warning: str | None = None

    def to_dict(self) -> dict:
        return {
            "answer": self.answer.value, "Zhat": self.Zhat, "k": self.k, "ell": self.ell,
            "yes": self.yes, "no": self.no, "errors": self.errors, "warning": self.warning,
        }


def r_round_tester(cfg: CounterConfig, H: Multigraph, Zhat: int, seed: int = 0) -> RoundResult:
    """Majority answer of ``R`` tester runs, each on its own ``L`` fresh samples.

    Tester exceptions count as NO and are recorded.  At level ``pre`` the
    tester sees the instance before gadget expansion, which carries the same
    TV since every phase vector has a fiber of equal size.
    """
    N = H.n
    choice = choose_k_ell(N, cfg.q, cfg.epsilon, Zhat)
    inst = build_instance(H, choice.k, choice.ell, cfg.q, cfg.mode, expand=cfg.level == "full")
    R, L = cfg.rounds_for(N), cfg.samples_per_round
    warning = choice.warning
    if L > 2 ** (N - 4):
        warning = f"{L} samples per round exceeds 2^(N-4)"
        warnings.warn(warning, stacklevel=2)
    samples = sample_G_star(inst, child_seed(seed, "samples"), count=R * L)
    tester = resolve_tester(cfg.tester, cfg.timeout)

    def run(r: int):
        try:
            return _as_answer(tester(inst, samples[r * L:(r + 1) * L], cfg.tester_eps, child_seed(seed, "round", r))), None
        except Exception as exc:  # fail closed
            return Answer.NO, f"round {r}: {type(exc).__name__}: {exc}"

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run, range(R)))
    else:
        results = [run(r) for r in range(R)]
    yes = sum(a is Answer.YES for a, _ in results)
    errors = [e for _, e in results if e]
    answer = Answer.YES if 2 * yes > R else Answer.NO
    return RoundResult(answer, Zhat, choice.k, choice.ell, yes, R - yes, errors, warning)


@dataclass
class CountResult:
    estimate: int
    exact: bool
    calls: int
    trace: list[RoundResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate, "exact_fallback": self.exact, "calls": self.calls,
            "trace": [r.to_dict() for r in self.trace],
        }


def count_3colorings_via_tester(
    H: Multigraph, epsilon: float | None = None, delta: float | None = None, cfg: CounterConfig | None = None
) -> CountResult:
    """Binary search for ``Z3(H)`` over ``[Z3(B), 3^N]`` driven by the R-round tester.

    Below ``eps < 2^(-N/4)`` the count is exact enumeration instead.
    """
    cfg = cfg or CounterConfig()
    if epsilon is not None or delta is not None:
        cfg = CounterConfig(**{**cfg.__dict__, "epsilon": epsilon or cfg.epsilon, "delta": delta or cfg.delta})
    if H.n < 2 or not H.is_connected():
        raise NotConnected("H must be connected with at least two vertices")
    sides = H.bipartition()
    if sides is None:
        raise NotBipartite("H must be bipartite")
    N = H.n
    if cfg.epsilon < 2 ** (-N / 4):
        return CountResult(count_colorings(H, 3), True, 0)

    trace: list[RoundResult] = []

    def ask(Z: int) -> Answer:
        res = r_round_tester(cfg, H, Z, child_seed(cfg.seed, "call", len(trace)))
        trace.append(res)
        return res.answer

    lo, hi = z3_complete_bipartite(len(sides[0]), len(sides[1])), 3**N
    if ask(lo) is Answer.YES:
        return CountResult(lo, False, len(trace), trace)
    if ask(hi) is Answer.NO:
        return CountResult(hi, False, len(trace), trace)
    while True:
        mid = (lo + hi) // 2
        if ask(mid) is Answer.YES:
            hi = mid
        else:
            lo = mid
        if hi - lo == 1:
            return CountResult(hi, False, len(trace), trace)
