"""End-to-end construction of an AP-free r-coloring of Z/N.

Split r = a + 3b, pick b + 1 distinct primes, color Z/p_0^t_0 with a colors,
then b times blow the current coloring up by Z/p_i^t' carrying a sparsified
3-coloring (4 colors incl. the digit set).  The final product is flattened to
Z/N by the CRT and verified once more.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constructions import (
    BlowupParams,
    ConstructionFailed,
    blowup,
    mt_coloring,
    sparsify_coloring,
)
from .groups import CRTMap, Group, cyclic, product
from .planner import (
    FeasibilityReport,
    as_fraction,
    check_gcol,
    check_synth,
    decompose,
    exponent_t,
    primes_in_window,
)
from .progressions import Coloring, find_mono_ap

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


class NotEnoughPrimes(PipelineError):
    def __init__(self, needed: int, found: list[int], window):
        lo, hi = window
        super().__init__(
            f"need {needed} distinct primes in ({lo}, {hi}], found {found or 'none'}; "
            "widen it with a window override (forced mode)"
        )
        self.needed = needed
        self.found = found


class Infeasible(PipelineError):
    def __init__(self, message: str, reports: list[FeasibilityReport]):
        super().__init__(message)
        self.reports = reports


@dataclass
class PipelinePlan:
    k: int
    r: int
    eps: Fraction
    a: int
    b: int
    primes: list[int]
    t0: int
    t_prime: int
    window: tuple[Fraction, Fraction]
    reports: list[FeasibilityReport] = field(default_factory=list)

    @property
    def moduli(self) -> list[int]:
        return [self.primes[0] ** self.t0] + [p**self.t_prime for p in self.primes[1:]]

    @property
    def N(self) -> int:
        return math.prod(self.moduli)

    @property
    def Q(self) -> int:
        # workhorse hypothesis: every non-identity element has order >= (1 - eps) k
        return math.ceil((1 - self.eps) * self.k)

    @property
    def feasible(self) -> bool:
        return all(rep.cond2 and rep.cond3 for rep in self.reports)


def plan_pipeline(k: int, r: int, eps=Fraction(1, 20), window=None) -> PipelinePlan:
    if k < 3:
        raise ValueError("k must be >= 3")
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 10):
        raise ValueError("eps must lie in (0, 1/10)")
    a, b = decompose(r)
    win = (Fraction(window[0]), Fraction(window[1])) if window else ((1 - eps) * k, Fraction(k))
    found = primes_in_window(k, eps, win)
    if len(found) < b + 1:
        raise NotEnoughPrimes(b + 1, found, win)
    primes = sorted(found, reverse=True)[: b + 1]
    t0 = exponent_t(k, a, eps)
    t_prime = exponent_t(k, 3, eps)
    plan = PipelinePlan(k, r, eps, a, b, primes, t0, t_prime, win)
    order = plan.moduli[0]
    min_order = cyclic(order).min_order
    for i, (p, q) in enumerate(zip(primes[1:], plan.moduli[1:]), 1):
        order *= q
        rep = check_synth(p, t_prime, plan.Q, k, order, h1_min_order=min_order, r=a + 3 * (i - 1), eps=eps)
        rep.gcol_ok = check_gcol(q, 3, k, p)[0]
        plan.reports.append(rep)
        min_order = min(min_order, p)
    return plan


@dataclass
class PipelineResult:
    plan: PipelinePlan
    coloring: Coloring  # on Z/N
    product_coloring: Coloring
    attempts: int
    resamples: list[int]
    mode: str
    seed: int | None

    @property
    def N(self) -> int:
        return self.coloring.group.order

    def params_text(self) -> str:
        plan = self.plan
        lo, hi = plan.window
        parts = [
            f"epsilon={plan.eps}",
            f"mode={self.mode}",
            f"window=({lo},{hi}]",
            f"a={plan.a}",
            f"b={plan.b}",
            "primes=" + ",".join(map(str, plan.primes)),
            "exponents=" + ",".join(map(str, [plan.t0] + [plan.t_prime] * plan.b)),
            "moduli=" + ",".join(map(str, plan.moduli)),
            "resamples=" + ",".join(map(str, self.resamples)),
        ]
        for i, rep in enumerate(plan.reports, 1):
            parts.append(f"stage{i}:[{rep.to_line()}]")
        return " ".join(parts)


def build_pipeline(
    k: int,
    r: int,
    eps=Fraction(1, 20),
    seed: int | None = 0,
    mode: str = "forced",
    window=None,
    retry_cap: int = 100,
    resample_cap: int = 100_000,
    repair_sweeps: int = 50,
) -> PipelineResult:
    """Run the whole construction; raises on infeasibility or exhausted retries."""
    if mode not in ("strict", "forced"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "strict" and window is not None:
        raise ValueError("strict mode uses the (1 - eps) k window; overrides need forced mode")
    plan = plan_pipeline(k, r, eps, window)
    if mode == "strict" and not plan.feasible:
        raise Infeasible("blow-up hypotheses fail; rerun in forced mode to let the verifier decide", plan.reports)
    if plan.t0 < 1 or (plan.b and plan.t_prime < 1):
        raise PipelineError(f"exponent formula gives t0={plan.t0}, t'={plan.t_prime}; k is too small")

    seeds = np.random.SeedSequence(seed).spawn(2 * plan.b + 1)
    H = cyclic(plan.moduli[0])
    base = mt_coloring(H, plan.a, k, seed=np.random.default_rng(seeds[0]), resample_cap=resample_cap)
    G, C = H, base.coloring
    resamples = [base.resamples]
    attempts = 0
    evidence = [C.digest()]
    for i in range(1, plan.b + 1):
        Hi = cyclic(plan.moduli[i])
        stage = mt_coloring(Hi, 3, k, seed=np.random.default_rng(seeds[2 * i - 1]), resample_cap=resample_cap)
        resamples.append(stage.resamples)
        C2 = sparsify_coloring(stage.coloring, k).coloring
        rep = plan.reports[i - 1]
        rep.cond1 = True
        rep.evidence = (evidence[-1], stage.coloring.digest())
        params = BlowupParams(
            r1=C.palette_size,
            r2=1,
            r3=3,
            seed=np.random.default_rng(seeds[2 * i]),
            retry_cap=retry_cap,
            Q=plan.Q,
            repair_sweeps=repair_sweeps,
        )
        res = blowup(C, C2, params, k)
        attempts += res.attempts
        G, C = product(G, Hi), res.coloring
        evidence.append(C.digest())
        log.info("stage %d: %s colored with %d colors after %d attempts", i, G, C.palette_size, res.attempts)
    flat = flatten_coloring(C)
    if find_mono_ap(flat, k) is not None:
        raise AssertionError("flattened coloring failed verification")
    return PipelineResult(plan, flat, C, max(attempts, 1), resamples, mode, seed)


def flatten_coloring(C: Coloring) -> Coloring:
    """Transport a coloring of a coprime product to Z/N along the CRT map."""
    G: Group = C.group
    if G.rank == 1:
        return C
    crt = CRTMap(G)
    flat = np.empty(G.order, dtype=np.int64)
    flat[crt.index_permutation().astype(np.int64)] = C.as_array()
    return Coloring(crt.cyclic_group, C.palette_size, flat)

