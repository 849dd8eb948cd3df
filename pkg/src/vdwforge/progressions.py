"""Arithmetic progressions in finite abelian groups and the mono-AP verifier.

Sets and colorings are indexed by the group's canonical enumeration, so for
Z/N the index of an element is just its residue.

Two verifiers are provided.  ``naive`` walks (color, d, x) over element
tuples and is the reference.  ``fast`` packs each color class of Z/N into a
Python int and, for every difference d <= N/2, ANDs together rotated copies
of the mask, doubling the covered AP length each step.  Products of pairwise
coprime factors are routed through the CRT isomorphism first; anything else
falls back to the naive walk.
"""
from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import CRTMap, Element, ElementLike, Group, NotCoprimeError


@dataclass(frozen=True)
class APWitness:
    start: Element
    diff: Element
    k: int
    elements: tuple[int, ...]  # canonical indices, sorted
    color: int | None = None

    def __str__(self) -> str:
        fmt = lambda g: str(g[0]) if len(g) == 1 else str(g)
        head = f"x={fmt(self.start)} d={fmt(self.diff)} k={self.k}"
        if self.color is not None:
            head += f" color={self.color}"
        return head + " elements=" + " ".join(map(str, self.elements))


@dataclass(frozen=True)
class Coloring:
    group: Group
    palette_size: int
    colors: tuple[int, ...]

    def __post_init__(self):
        colors = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        if len(colors) != self.group.order:
            raise ValueError(
                f"coloring has {len(colors)} entries, group {self.group} has order {self.group.order}"
            )
        if self.palette_size < 1:
            raise ValueError("palette size must be >= 1")
        bad = [c for c in colors if not 1 <= c <= self.palette_size]
        if bad:
            raise ValueError(f"color {bad[0]} outside [1, {self.palette_size}]")

    def __getitem__(self, g: ElementLike) -> int:
        if isinstance(g, (int, np.integer)) and self.group.rank == 1:
            return self.colors[int(g) % self.group.order]
        return self.colors[self.group.index(g)]

    def color_class(self, color: int) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.colors) if c == color)

    def classes(self) -> list[frozenset[int]]:
        return [self.color_class(c) for c in range(1, self.palette_size + 1)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.int64)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.group.factors, self.palette_size)).encode())
        h.update(self.as_array().astype("<i8").tobytes())
        return h.hexdigest()[:16]


def make_ap(G: Group, x: ElementLike, d: ElementLike, k: int) -> tuple[list[Element], frozenset[Element]]:
    """Return the sequence x, x+d, ..., x+(k-1)d and its set of distinct values."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x, d = G.coerce(x), G.coerce(d)
    seq = []
    g = x
    for _ in range(k):
        seq.append(g)
        g = G.add(g, d)
    return seq, frozenset(seq)


def _ap_indices(G: Group, x: Element, d: Element, k: int) -> tuple[int, ...]:
    seq, _ = make_ap(G, x, d, k)
    return tuple(sorted({G.index(g) for g in seq}))


def _nonzero_elements(G: Group):
    it = G.elements()
    next(it)  # identity comes first in the canonical order
    return it


def find_ap_in_set(G: Group, S: Iterable[int], k: int) -> APWitness | None:
    """First (d, x) in canonical order with {x + i d : i < k} inside S, d != 0."""
    if k < 2:
        raise ValueError("k must be >= 2")
    S = frozenset(int(s) for s in S)
    if not S:
        return None
    members = [G.element(i) for i in sorted(S)]
    for d in _nonzero_elements(G):
        for x in members:
            g = x
            for _ in range(k - 1):
                g = G.add(g, d)
                if G.index(g) not in S:
                    break
            else:
                return APWitness(x, d, k, _ap_indices(G, x, d, k))
    return None


def is_k_ap_free(G: Group, S: Iterable[int], k: int) -> bool:
    return find_ap_in_set(G, S, k) is None


# -- verifiers ---------------------------------------------------------


def _naive(c: Coloring, k: int) -> APWitness | None:
    G = c.group
    colors = c.colors
    if G.rank == 1:
        N = G.order
        for color in range(1, c.palette_size + 1):
            xs = [x for x in range(N) if colors[x] == color]
            for d in range(1, N):
                for x in xs:
                    for i in range(1, k):
                        if colors[(x + i * d) % N] != color:
                            break
                    else:
                        return APWitness((x,), (d,), k, _ap_indices(G, (x,), (d,), k), color)
        return None
    for color in range(1, c.palette_size + 1):
        members = [G.element(i) for i, col in enumerate(colors) if col == color]
        for d in _nonzero_elements(G):
            for x in members:
                g = x
                for _ in range(k - 1):
                    g = G.add(g, d)
                    if colors[G.index(g)] != color:
                        break
                else:
                    return APWitness(x, d, k, _ap_indices(G, x, d, k), color)
    return None


def color_masks(colors: Sequence[int] | np.ndarray, palette_size: int) -> list[int]:
    """Packed membership bitmask per color (bit i set iff colors[i] == color)."""
    arr = np.asarray(colors)
    return [
        int.from_bytes(np.packbits(arr == c, bitorder="little").tobytes(), "little")
        for c in range(1, palette_size + 1)
    ]


def _scan(masks: list[int], N: int, k: int, d_lo: int, d_hi: int) -> tuple[int, int, int] | None:
    """Lowest (color, d, x) with d in [d_lo, d_hi) whose k-AP lies in one mask."""
    full = (1 << N) - 1
    # doubling schedule: T_L covers positions 0..L-1; finish with T_m & rot(T_m, (k-m) d)
    top = 1
    while 2 * top <= k:
        top *= 2
    for color, M in enumerate(masks, 1):
        if not M:
            continue
        for d in range(d_lo, d_hi):
            T = M
            L = 1
            while L < top:
                s = L * d % N
                T &= (T >> s) | ((T << (N - s)) & full)
                if not T:
                    break
                L *= 2
            if T and top < k:
                s = (k - top) * d % N
                T &= (T >> s) | ((T << (N - s)) & full)
            if T:
                return color, d, (T & -T).bit_length() - 1
    return None


def _scan_chunk(args):
    return _scan(*args)


def default_workers() -> int:
    env = os.environ.get("VDWFORGE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _fast_cyclic(colors: Sequence[int], palette_size: int, N: int, k: int, workers: int):
    if N < 2:
        return None
    masks = color_masks(colors, palette_size)
    # {x + i d} with d and -d give the same sets, so d <= N/2 suffices
    d_max = N // 2 + 1
    if workers <= 1 or N < 4096:
        return _scan(masks, N, k, 1, d_max)
    bounds = np.linspace(1, d_max, workers * 4 + 1).astype(int)
    jobs = [(masks, N, k, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        hits = [h for h in pool.map(_scan_chunk, jobs) if h is not None]
    # each chunk reports its own first hit; the global first is the minimum
    return min(hits) if hits else None


def find_mono_ap(c: Coloring, k: int, mode: str = "fast", workers: int | None = None) -> APWitness | None:
    """Return a monochromatic non-trivial k-AP of ``c`` or None.

    The witness is the lowest (color, d, x) in canonical order; both modes
    return the same witness on cyclic groups.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if mode == "naive":
        return _naive(c, k)
    if mode != "fast":
        raise ValueError(f"unknown mode {mode!r}")
    workers = default_workers() if workers is None else workers
    G = c.group
    if G.rank == 1:
        hit = _fast_cyclic(c.colors, c.palette_size, G.order, k, workers)
        if hit is None:
            return None
        color, d, x = hit
        return APWitness((x,), (d,), k, _ap_indices(G, (x,), (d,), k), color)
    try:
        crt = CRTMap(G)
    except NotCoprimeError:
        return _naive(c, k)
    flat = np.empty(G.order, dtype=np.int64)
    flat[crt.index_permutation().astype(np.int64)] = c.as_array()
    hit = _fast_cyclic(flat, c.palette_size, G.order, k, workers)
    if hit is None:
        return None
    color, d, x = hit
    start, diff = crt.from_cyclic(x), crt.from_cyclic(d)
    return APWitness(start, diff, k, _ap_indices(G, start, diff, k), color)


def is_valid_coloring(c: Coloring, k: int, mode: str = "fast") -> bool:
    return find_mono_ap(c, k, mode) is None
