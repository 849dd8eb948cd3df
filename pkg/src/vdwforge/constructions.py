"""Constructive ingredients: digit sets, resampling colorings, fiber unions,
sparsified colorings and the randomized product blow-up.

Every coloring leaving this module has been passed through ``find_mono_ap``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .groups import Group, cyclic, is_prime, product, smallest_prime_factor
from .progressions import APWitness, Coloring, find_mono_ap, is_k_ap_free
from .planner import delta_exact

log = logging.getLogger(__name__)

EAGER_CHECK_LIMIT = 4096
REPAIR_ROW_LIMIT = 20_000_000


class ConstructionFailed(RuntimeError):
    """A Las Vegas loop ran out of attempts; carries the last witness."""

    def __init__(self, message: str, attempts: int, witness: APWitness | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.witness = witness


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# -- Erdos-Turan digit sets ---------------------------------------------


def erdos_turan_set(p: int, t: int) -> frozenset[int]:
    """Residues mod p^t whose t base-p digits are all nonzero.

    Built by A_1 = {1..p-1}, A_{s+1} = A_1 + p A_s; the result is p-AP-free
    and has (p-1)^t elements.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if t < 1:
        raise ValueError("t must be >= 1")
    base = range(1, p)
    A = list(base)
    for _ in range(t - 1):
        A = [a + p * b for a in base for b in A]
    return frozenset(A)


# -- resampling coloring ------------------------------------------------


@dataclass(frozen=True)
class MTResult:
    coloring: Coloring
    resamples: int


def mt_coloring(
    G: Group,
    r: int,
    k: int,
    seed=None,
    resample_cap: int = 100_000,
    initial: Coloring | None = None,
) -> MTResult:
    """Resample the first monochromatic k-AP until none is left.

    Starts from a uniform random coloring (or ``initial``), then repeatedly
    recolors every element of the canonical first witness uniformly at
    random.  Raises ConstructionFailed once ``resample_cap`` is spent.
    """
    if r < 1 or k < 2:
        raise ValueError("need r >= 1 and k >= 2")
    rng = as_rng(seed)
    if initial is not None:
        if initial.group != G or initial.palette_size != r:
            raise ValueError("initial coloring does not match (G, r)")
        colors = np.asarray(initial.colors, dtype=np.int64)
    else:
        colors = rng.integers(1, r + 1, size=G.order)
    witness = None
    for n in range(resample_cap + 1):
        c = Coloring(G, r, colors)
        witness = find_mono_ap(c, k)
        if witness is None:
            return MTResult(c, n)
        if n == resample_cap:
            break
        idx = list(witness.elements)
        colors[idx] = rng.integers(1, r + 1, size=len(idx))
    raise ConstructionFailed(
        f"no {k}-AP-free {r}-coloring of {G} after {resample_cap} resamples", resample_cap, witness
    )


# -- fiber unions -------------------------------------------------------


def fiber_union(
    H1: Group,
    H2: Group,
    S,
    fibers: Mapping[int, object],
    k: int | None = None,
) -> tuple[Group, frozenset[int]]:
    """A = {(x, y) : x in S, y in Y_x} inside H1 x H2, as canonical indices.

    Fibers missing from the mapping are empty.  When ``k`` is given and the
    groups are small, the k-AP-freeness of S and every Y_x is checked first.
    """
    S = frozenset(int(s) for s in S)
    extra = set(fibers) - S
    if extra:
        raise ValueError(f"fiber keys {sorted(extra)} are not in S")
    if k is not None and H1.order * H2.order <= EAGER_CHECK_LIMIT:
        if not is_k_ap_free(H1, S, k):
            raise ValueError(f"S is not {k}-AP-free in {H1}")
        for x, Y in fibers.items():
            if not is_k_ap_free(H2, Y, k):
                raise ValueError(f"fiber over {x} is not {k}-AP-free in {H2}")
    n2 = H2.order
    A = frozenset(x * n2 + int(y) for x, Y in fibers.items() for y in Y)
    return product(H1, H2), A


# -- sparsification -----------------------------------------------------


@dataclass(frozen=True)
class Sparsified:
    coloring: Coloring
    delta: Fraction
    heavy: frozenset[int]
    p: int
    t: int


def prime_power(n: int) -> tuple[int, int]:
    p = smallest_prime_factor(n)
    t = 0
    while n % p == 0:
        n //= p
        t += 1
    if n != 1:
        raise ValueError("not a prime power")
    return p, t


def sparsify_coloring(c2: Coloring, k: int) -> Sparsified:
    """Give the digit set its own color 1 and shift c2 up by one elsewhere."""
    H2 = c2.group
    if H2.rank != 1:
        raise ValueError("sparsification needs a cyclic group Z/p^t")
    try:
        p, t = prime_power(H2.order)
    except ValueError:
        raise ValueError(f"order {H2.order} is not a prime power") from None
    if p > k:
        raise ValueError(f"p = {p} exceeds k = {k}; the digit set is only p-AP-free")
    w = find_mono_ap(c2, k)
    if w is not None:
        raise ValueError(f"input coloring has a monochromatic {k}-AP: {w}")
    S = erdos_turan_set(p, t)
    colors = [1 if y in S else 1 + c for y, c in enumerate(c2.colors)]
    out = Coloring(H2, c2.palette_size + 1, colors)
    if find_mono_ap(out, k) is not None:
        raise AssertionError("sparsified coloring failed verification")
    return Sparsified(out, delta_exact(p, t), S, p, t)


# -- blow-up ------------------------------------------------------------


@dataclass(frozen=True)
class BlowupParams:
    r1: int
    r2: int
    r3: int
    seed: int | np.random.Generator | None = 0
    retry_cap: int = 100
    Q: int | None = None
    repair_sweeps: int = 50

    def __post_init__(self):
        if self.r1 < 1 or self.r2 < 1 or self.r3 < 0:
            raise ValueError("need r1 >= 1, r2 >= 1, r3 >= 0")
        if self.retry_cap < 1:
            raise ValueError("retry_cap must be >= 1")

    @property
    def palette_size(self) -> int:
        return self.r1 * self.r2 + self.r3


@dataclass(frozen=True)
class BlowupResult:
    coloring: Coloring
    attempts: int
    shifts: tuple[int, ...]


def blowup_coloring(C1: Coloring, C2: Coloring, r2: int, shifts) -> Coloring:
    """The product coloring for a fixed shift y_x per x in H1.

    (x, y) gets the pair (C1(x), C2(y - y_x)) flattened to (i-1) r2 + j when
    C2(y - y_x) <= r2, and r1 r2 + (C2(y - y_x) - r2) otherwise.
    """
    H1, H2 = C1.group, C2.group
    r1 = C1.palette_size
    r3 = C2.palette_size - r2
    if r3 < 0:
        raise ValueError("r2 exceeds the palette of C2")
    shifts = np.asarray(shifts, dtype=np.int64)
    if shifts.shape != (H1.order,):
        raise ValueError("need one shift per element of H1")
    c1 = np.asarray(C1.colors, dtype=np.int64)
    c2 = np.asarray(C2.colors, dtype=np.int64)
    sub = H2.sub_table()  # sub[y, s] = y - s
    shifted = c2[sub[:, shifts].T]  # (|H1|, |H2|): C2(y - y_x)
    paired = (c1[:, None] - 1) * r2 + shifted
    colors = np.where(shifted <= r2, paired, r1 * r2 + shifted - r2)
    return Coloring(product(H1, H2), r1 * r2 + r3, colors.ravel())


class _ShiftRepair:
    """Greedy coordinate descent on the shift vector.

    The only APs that can be monochromatic in a blow-up coloring are those
    whose difference has a nonzero H1 part and whose cells all land in one
    overflow class of C2.  Precomputing those APs as (fiber, H2 cell) arrays
    lets each fiber's shift be re-chosen to minimise the bad count.
    """

    def __init__(self, H1: Group, H2: Group, c2: np.ndarray, r2: int, k: int):
        self.n1, self.n2 = H1.order, H2.order
        self.c2 = c2
        self.r2 = r2
        self.k = k
        self.sub = H2.sub_table()
        G = product(H1, H2)
        n = G.order
        coords = G.coord_array(np.arange(n))
        moduli = np.asarray(G.factors, dtype=np.int64)
        # d and -d describe the same AP sets; keep the one with the smaller index
        neg = G.index_array((-coords) % moduli)
        d_idx = np.flatnonzero((np.arange(n) // self.n2 != 0) & (np.arange(n) <= neg))
        d_coords = coords[d_idx]
        fib, cell = [], []
        for i in range(k):
            pos = (coords[:, None, :] + i * d_coords[None, :, :]) % moduli
            flat = G.index_array(pos.reshape(-1, G.rank))
            fib.append(flat // self.n2)
            cell.append(flat % self.n2)
        self.fib = np.stack(fib, axis=1).astype(np.int32)
        self.cell = np.stack(cell, axis=1).astype(np.int32)
        self.rows_by_fiber = [np.flatnonzero((self.fib == x).any(axis=1)) for x in range(self.n1)]

    @staticmethod
    def rows_needed(H1: Group, H2: Group, k: int) -> int:
        n = H1.order * H2.order
        return n * (n - H2.order) * k // 2

    def _bad(self, colors: np.ndarray) -> np.ndarray:
        first = colors[..., :1]
        return ((colors == first).all(axis=-1)) & (first[..., 0] > self.r2)

    def cost(self, shifts: np.ndarray) -> int:
        colors = self.c2[self.sub[self.cell, shifts[self.fib]]]
        return int(self._bad(colors).sum())

    def repair(self, shifts: np.ndarray, rng: np.random.Generator, sweeps: int) -> np.ndarray:
        shifts = shifts.copy()
        cost = self.cost(shifts)
        candidates = np.arange(self.n2)
        for _ in range(sweeps):
            if cost == 0:
                break
            improved = False
            for x in rng.permutation(self.n1):
                rows = self.rows_by_fiber[x]
                if rows.size == 0:
                    continue
                fib = self.fib[rows]
                cell = self.cell[rows]
                mine = fib == x
                colors = self.c2[self.sub[cell, shifts[fib]]]
                # a row can only turn bad if its cells off fiber x already agree
                anchor = colors[np.arange(len(rows)), np.argmax(~mine, axis=1)]
                live = ((colors == anchor[:, None]) | mine).all(axis=1) & (anchor > self.r2)
                cell, mine, anchor = cell[live], mine[live], anchor[live]
                # (candidates, rows, k): colors seen when fiber x takes each shift
                trial = self.c2[self.sub[cell[None], candidates[:, None, None]]]
                bad = ((trial == anchor[None, :, None]) | ~mine[None]).all(axis=-1).sum(axis=1)
                current = bad[shifts[x]]
                best = bad.min()
                if best < current:
                    choices = np.flatnonzero(bad == best)
                    shifts[x] = choices[rng.integers(len(choices))]
                    cost -= int(current - best)
                    improved = True
            if not improved:
                break
        return shifts


def blowup(C1: Coloring, C2: Coloring, params: BlowupParams, k: int) -> BlowupResult:
    """Randomized blow-up of C1 on H1 and C2 on H2 to H1 x H2.

    Each attempt draws fresh independent uniform shifts, then (unless
    ``repair_sweeps`` is 0) greedily re-chooses single shifts to clear
    monochromatic APs.  The verifier is the only judge of success.
    """
    if C1.palette_size != params.r1:
        raise ValueError(f"C1 has {C1.palette_size} colors, params say r1 = {params.r1}")
    if C2.palette_size != params.r2 + params.r3:
        raise ValueError(f"C2 has {C2.palette_size} colors, params say r2 + r3 = {params.r2 + params.r3}")
    for name, c in (("C1", C1), ("C2", C2)):
        w = find_mono_ap(c, k)
        if w is not None:
            raise ValueError(f"{name} has a monochromatic {k}-AP: {w}")
    H1, H2 = C1.group, C2.group
    rng = as_rng(params.seed)
    repairer = None
    if params.repair_sweeps > 0 and _ShiftRepair.rows_needed(H1, H2, k) <= REPAIR_ROW_LIMIT:
        repairer = _ShiftRepair(H1, H2, np.asarray(C2.colors, dtype=np.int64), params.r2, k)
    witness = None
    for attempt in range(1, params.retry_cap + 1):
        shifts = rng.integers(0, H2.order, size=H1.order)
        if repairer is not None:
            shifts = repairer.repair(shifts, rng, params.repair_sweeps)
        c = blowup_coloring(C1, C2, params.r2, shifts)
        witness = find_mono_ap(c, k)
        log.debug("blowup attempt %d: %s", attempt, "ok" if witness is None else witness)
        if witness is None:
            return BlowupResult(c, attempt, tuple(int(s) for s in shifts))
    raise ConstructionFailed(
        f"blow-up of {H1} by {H2} failed after {params.retry_cap} attempts", params.retry_cap, witness
    )
