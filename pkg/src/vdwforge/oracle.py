"""Brute-force ground truth at desk scale.

Interval mode ([N], integer differences, no wraparound) and group mode
(Z/N or products, wraparound, APs as sets) are separate code paths.
Searches are depth-first with incremental pruning and a node budget; a
blown budget yields an indeterminate result, never a negative answer.
"""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Sequence

from .groups import Group, cyclic
from .progressions import Coloring, find_mono_ap, make_ap

DEFAULT_BUDGET = 50_000_000


class BudgetExceeded(Exception):
    pass


@dataclass
class SearchResult:
    target: str
    value: int | None  # exact value, or None when truncated
    lower_bound: int
    witness: tuple[int, ...] | None
    nodes: int
    seconds: float
    status: str = "exact"  # exact | bound | indeterminate

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    def __str__(self) -> str:
        if self.exact:
            return f"{self.target} = {self.value}"
        if self.status == "bound":
            return f"{self.target} >= {self.lower_bound}"
        return f"{self.target}: indeterminate (budget exhausted)"


# -- interval mode -------------------------------------------------------


def interval_mono_ap(colors: Sequence[int], k: int) -> tuple[int, int] | None:
    """First (start, d) with colors[start + i d] constant for i < k, positions 1-based."""
    n = len(colors)
    for d in range(1, n):
        for s in range(n - (k - 1) * d):
            c = colors[s]
            if all(colors[s + i * d] == c for i in range(1, k)):
                return s + 1, d
    return None


class _IntervalSearch:
    """DFS over colorings of 1..limit, colors introduced in order of first use."""

    def __init__(self, k: int, r: int, limit: int, budget: int):
        self.k, self.r, self.limit, self.budget = k, r, limit, budget
        # for position n (0-based): bitmasks of the k-1 earlier members of each AP ending at n
        self.tails = [
            [sum(1 << (n - i * d) for i in range(1, k)) for d in range(1, n // (k - 1) + 1)]
            for n in range(limit)
        ]
        self.masks = [0] * r
        self.colors = [0] * limit
        self.nodes = 0
        self.best = 0
        self.best_colors: list[int] = []

    def run(self):
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * self.limit + 100))
        return self._dfs(0, 0)

    def _dfs(self, n: int, used: int) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded
        if n > self.best:
            self.best = n
            self.best_colors = self.colors[:n]
        if n == self.limit:
            return True
        tails = self.tails[n]
        for c in range(min(used + 1, self.r)):
            m = self.masks[c]
            if any(m & t == t for t in tails):
                continue
            self.masks[c] = m | (1 << n)
            self.colors[n] = c + 1
            if self._dfs(n + 1, max(used, c + 1)):
                return True
            self.masks[c] = m
        return False


def vdw(k: int, r: int, n_limit: int = 200, budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Smallest N <= n_limit such that every r-coloring of [N] has a mono k-AP.

    One exhaustive DFS finds the longest prefix [n] admitting a valid coloring;
    w(k; r) is that length plus one.  Breaking color symmetry (a new color may
    only be the next unused one) also fixes the first element's color.
    """
    if k < 3 or r < 2:
        raise ValueError("need k >= 3 and r >= 2")
    t = time.perf_counter()
    search = _IntervalSearch(k, r, n_limit, budget)
    target = f"w({k};{r})"
    try:
        reached_limit = search.run()
    except BudgetExceeded:
        return SearchResult(target, None, search.best + 1, tuple(search.best_colors), search.nodes,
                            time.perf_counter() - t, "indeterminate")
    if reached_limit:
        return SearchResult(target, None, n_limit + 1, tuple(search.best_colors), search.nodes,
                            time.perf_counter() - t, "bound")
    return SearchResult(target, search.best + 1, search.best + 1, tuple(search.best_colors),
                        search.nodes, time.perf_counter() - t)


# -- group mode ------------------------------------------------------------


def _group_aps(G: Group, k: int) -> list[list[int]]:
    """For each canonical index n: masks of the other members of every
    non-trivial k-AP whose largest member is n."""
    seen = set()
    by_top: list[list[int]] = [[] for _ in range(G.order)]
    elements = list(G.elements())
    for d in elements[1:]:
        for x in elements:
            _, P = make_ap(G, x, d, k)
            idx = frozenset(G.index(g) for g in P)
            if idx in seen:
                continue
            seen.add(idx)
            top = max(idx)
            by_top[top].append(sum(1 << i for i in idx if i != top))
    return by_top


def exists_coloring(G: Group, r: int, k: int, budget: int = DEFAULT_BUDGET) -> Coloring | None:
    """An r-coloring of G with every class k-AP-free, or None if none exists.

    Raises BudgetExceeded when the node budget runs out first.
    """
    return _search_group(G, r, k, budget)[0]


def _search_group(G: Group, r: int, k: int, budget: int) -> tuple[Coloring | None, int]:
    if r < 1 or k < 2:
        raise ValueError("need r >= 1 and k >= 2")
    n = G.order
    by_top = _group_aps(G, k)
    masks = [0] * r
    colors = [0] * n
    nodes = 0
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n + 100))

    def dfs(i: int, used: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded
        if i == n:
            return True
        aps = by_top[i]
        for c in range(min(used + 1, r)):
            m = masks[c]
            if any(m & a == a for a in aps):
                continue
            masks[c] = m | (1 << i)
            colors[i] = c + 1
            if dfs(i + 1, max(used, c + 1)):
                return True
            masks[c] = m
        return False

    if not dfs(0, 0):
        return None, nodes
    c = Coloring(G, r, colors)
    if find_mono_ap(c, k, mode="naive") is not None:
        raise AssertionError("search produced an invalid coloring")
    return c, nodes


def kappa_cyclic(N: int, r: int, k_limit: int = 12, budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Least k <= k_limit such that Z/N has an r-coloring with k-AP-free classes."""
    G = cyclic(N)
    target = f"kappa(Z/{N};{r})"
    t = time.perf_counter()
    nodes = 0
    for k in range(2, k_limit + 1):
        try:
            c, used = _search_group(G, r, k, budget)
            nodes += used
        except BudgetExceeded:
            return SearchResult(target, None, k, None, nodes, time.perf_counter() - t, "indeterminate")
        if c is not None:
            return SearchResult(target, k, k, c.colors, nodes, time.perf_counter() - t)
    return SearchResult(target, None, k_limit + 1, None, nodes, time.perf_counter() - t, "bound")


def restrict_to_interval(c: Coloring) -> list[int]:
    """Colors of residues 1..N, i.e. the induced coloring of the interval [N]."""
    N = c.group.order
    return [c.colors[n % N] for n in range(1, N + 1)]


def vdw_table(pairs, n_limit: int = 200, budget: int = DEFAULT_BUDGET) -> list[SearchResult]:
    return [vdw(k, r, n_limit, budget) for k, r in pairs]


def format_table(results: list[SearchResult]) -> str:
    lines = []
    for res in results:
        lines.append(f"{res}  nodes={res.nodes} time={res.seconds:.2f}s")
    return "\n".join(lines)

