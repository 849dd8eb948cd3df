"""Exact feasibility arithmetic for the blow-up construction.

Every inequality is decided with Python integers or Fractions.  The only
floating-point step is the exponent formula, and its floor is confirmed with
integer powers whenever the float lands near an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .groups import INF, is_prime

FLOOR_GUARD = 1e-9


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def parse_window(text: str) -> tuple[Fraction, Fraction]:
    """``"lo:hi"`` -> half-open window (lo, hi]."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"window must look like lo:hi, got {text!r}")
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise ValueError(f"empty window {text!r}")
    return lo, hi


def sieve(n: int) -> list[int]:
    if n < 2:
        return []
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).tolist()


def primes_in_window(k: int, eps=Fraction(1, 20), override: tuple | None = None) -> list[int]:
    """Primes p with (1 - eps) k < p <= k, or lo < p <= hi for an override window."""
    if override is None:
        lo, hi = (1 - as_fraction(eps)) * k, Fraction(k)
    else:
        lo, hi = (as_fraction(v) for v in override)
    return [p for p in sieve(math.floor(hi)) if p > lo]


def decompose(r: int) -> tuple[int, int]:
    """Write r = a + 3b with a in {2, 3, 4}."""
    if r < 2:
        raise ValueError("r must be >= 2")
    b = (r - 2) // 3
    return r - 3 * b, b


def exponent_t(k: int, r: int, eps=Fraction(1, 20)) -> int:
    """floor(k (1 - 2 eps) log r / log k)."""
    if k < 3 or r < 2:
        raise ValueError("need k >= 3 and r >= 2")
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 10):
        raise ValueError("eps must lie in (0, 1/10)")
    x = k * float(1 - 2 * eps) * math.log(r) / math.log(k)
    t = math.floor(x)
    n = round(x)
    if abs(x - n) < FLOOR_GUARD:
        # t <= x  <=>  k^t <= r^((1-2eps) k); raise both sides to the denominator
        e = (1 - 2 * eps) * k
        t = n if k ** (n * e.denominator) <= r ** e.numerator else n - 1
    return t


def delta_exact(p: int, t: int) -> Fraction:
    """1 - (1 - 1/p)^t, the share of Z/p^t outside the digit set."""
    if p < 2 or t < 1:
        raise ValueError("need p >= 2 and t >= 1")
    q = p**t
    return Fraction(q - (p - 1) ** t, q)


@dataclass
class FeasibilityReport:
    k: int
    p: int
    t: int
    Q: int
    order_G: int
    delta: Fraction
    cond1: bool | None
    cond2: bool | None
    cond3: bool
    gcol_ok: bool | None = None
    r: int | None = None
    eps: Fraction | None = None
    margins: dict = field(default_factory=dict)
    evidence: tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return min(self.Q, self.k)

    @property
    def passed(self) -> bool:
        return bool(self.cond1) and bool(self.cond2) and self.cond3

    def items(self) -> list[tuple[str, str]]:
        fmt = lambda v: "unknown" if v is None else str(v).lower() if isinstance(v, bool) else str(v)
        rows = [
            ("k", self.k),
            ("r", self.r),
            ("eps", self.eps),
            ("p", self.p),
            ("t", self.t),
            ("Q", self.Q),
            ("m", self.m),
            ("order_G", self.order_G),
            ("delta", self.delta),
            ("cond1", self.cond1),
            ("cond2", self.cond2),
            ("cond3", self.cond3),
            ("gcol_ok", self.gcol_ok),
        ]
        rows += [(f"margin_{name}", v) for name, v in self.margins.items()]
        if self.evidence:
            rows.append(("evidence", ",".join(self.evidence)))
        return [(name, fmt(v)) for name, v in rows if v is not None or name.startswith("cond")]

    def to_text(self) -> str:
        return "\n".join(f"{name}: {v}" for name, v in self.items())

    def to_line(self) -> str:
        return " ".join(f"{name}={v}" for name, v in self.items())


def synth_cond3(p: int, t: int, m: int, order_G: int) -> tuple[bool, int]:
    """delta^-m >= |G|^2 as (p^t)^m >= |G|^2 (p^t - (p-1)^t)^m; returns (verdict, slack)."""
    q = p**t
    lhs = q**m
    rhs = order_G**2 * (q - (p - 1) ** t) ** m
    return lhs >= rhs, lhs - rhs


def check_synth(
    p: int,
    t: int,
    Q: int,
    k: int,
    order_G: int,
    h1_min_order: int | float | None = None,
    kappa_claim: bool | None = None,
    evidence: Iterable[str] = (),
    r: int | None = None,
    eps=None,
) -> FeasibilityReport:
    """Evaluate the three hypotheses of the H1 x Z/p^t blow-up step.

    Condition (1) is the caller's claim (backed by digests of verified
    colorings); (2) compares the minimum element order of H1 to Q; (3) is
    decided exactly.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if t < 1:
        raise ValueError("t must be >= 1 (delta would be 0)")
    if Q < 1 or k < 1 or order_G < 1:
        raise ValueError("Q, k and |G| must be positive")
    m = min(Q, k)
    ok3, slack3 = synth_cond3(p, t, m, order_G)
    margins = {"cond3": slack3}
    cond2 = None
    if h1_min_order is not None:
        cond2 = h1_min_order >= Q
        if h1_min_order != INF:
            margins["cond2"] = h1_min_order - Q
    return FeasibilityReport(
        k=k,
        p=p,
        t=t,
        Q=Q,
        order_G=order_G,
        delta=delta_exact(p, t),
        cond1=kappa_claim,
        cond2=cond2,
        cond3=ok3,
        r=r,
        eps=None if eps is None else as_fraction(eps),
        margins=margins,
        evidence=tuple(evidence),
    )


def check_gcol(order_G: int, r: int, k: int, min_order) -> tuple[bool, int]:
    """Erdos-Lovasz group hypothesis: min order >= k and 4 k^2 |G| <= r^(k-1).

    The trivial group has no non-trivial APs, so it passes unconditionally.
    """
    if r < 2 or k < 3:
        raise ValueError("need r >= 2 and k >= 3")
    margin = r ** (k - 1) - 4 * k * k * order_G
    if order_G == 1:
        return True, margin
    return (min_order >= k and margin >= 0), margin


@dataclass(frozen=True)
class BoundRow:
    r: int
    k: int
    a: int
    b: int
    erdos_lovasz: Fraction
    base: int

    @property
    def beats(self) -> bool:
        return self.base > self.r

    @property
    def blowup_bound(self) -> int:
        return self.base**self.k


def bound_table(r: int, ks: Iterable[int]) -> list[BoundRow]:
    """Per k: the r^(k-1)/4k baseline next to the a 3^b exponential base."""
    a, b = decompose(r)
    return [BoundRow(r, k, a, b, Fraction(r ** (k - 1), 4 * k), a * 3**b) for k in ks]
