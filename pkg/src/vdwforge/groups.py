"""Finite abelian groups presented as products of cyclic factors.

Elements are tuples of residues, one per factor.  Every group also has a
canonical enumeration (mixed radix, first factor most significant) so that
sets and colorings can be stored as flat arrays indexed by position.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import combinations, product as iproduct
from typing import Iterator, Sequence, Union

import numpy as np

INF = math.inf

Element = tuple[int, ...]
ElementLike = Union[int, Sequence[int]]


class NotCoprimeError(ValueError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"factors {pair[0]} and {pair[1]} are not coprime")
        self.pair = pair


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError("n must be at least 2")
    if n % 2 == 0:
        return 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return d
        d += 2
    return n


def is_prime(n: int) -> bool:
    return n >= 2 and smallest_prime_factor(n) == n


@dataclass(frozen=True)
class Group:
    """Direct product Z/N_1 x ... x Z/N_m, compared by its factor sequence."""

    factors: tuple[int, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors:
            raise ValueError("a group needs at least one factor")
        if any(n < 1 for n in factors):
            raise ValueError(f"cyclic factors must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)
        strides = []
        s = 1
        for n in reversed(factors):
            strides.append(s)
            s *= n
        object.__setattr__(self, "_strides", tuple(reversed(strides)))

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @cached_property
    def min_order(self) -> int | float:
        """Smallest order of a non-identity element (INF for the trivial group)."""
        primes = [smallest_prime_factor(n) for n in self.factors if n > 1]
        return min(primes) if primes else INF

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def is_cyclic_presentation(self) -> bool:
        return len(self.factors) == 1

    @property
    def identity(self) -> Element:
        return (0,) * len(self.factors)

    def __len__(self) -> int:
        return self.order

    def __str__(self) -> str:
        return " x ".join(f"Z/{n}" for n in self.factors)

    # -- elements -------------------------------------------------------

    def coerce(self, g: ElementLike) -> Element:
        if isinstance(g, (int, np.integer)):
            if len(self.factors) != 1:
                raise ValueError(f"bare integer given for {self}")
            return (int(g) % self.factors[0],)
        g = tuple(int(c) for c in g)
        if len(g) != len(self.factors):
            raise ValueError(
                f"element {g} has {len(g)} coordinates, {self} has {len(self.factors)} factors"
            )
        return tuple(c % n for c, n in zip(g, self.factors))

    def contains(self, g: Sequence[int]) -> bool:
        return len(g) == len(self.factors) and all(0 <= c < n for c, n in zip(g, self.factors))

    def add(self, a: ElementLike, b: ElementLike) -> Element:
        a, b = self.coerce(a), self.coerce(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factors))

    def neg(self, a: ElementLike) -> Element:
        a = self.coerce(a)
        return tuple(-x % n for x, n in zip(a, self.factors))

    def sub(self, a: ElementLike, b: ElementLike) -> Element:
        return self.add(a, self.neg(b))

    def scalar_mul(self, i: int, d: ElementLike) -> Element:
        if i < 0:
            raise ValueError("scalar must be non-negative")
        d = self.coerce(d)
        return tuple(i * x % n for x, n in zip(d, self.factors))

    def element_order(self, g: ElementLike) -> int:
        g = self.coerce(g)
        return reduce(math.lcm, (n // math.gcd(x, n) for x, n in zip(g, self.factors)), 1)

    def index(self, g: ElementLike) -> int:
        """Position of ``g`` in the canonical enumeration."""
        g = self.coerce(g)
        return sum(c * s for c, s in zip(g, self._strides))

    def element(self, idx: int) -> Element:
        if not 0 <= idx < self.order:
            raise IndexError(f"index {idx} out of range for {self}")
        return tuple((idx // s) % n for s, n in zip(self._strides, self.factors))

    def elements(self) -> Iterator[Element]:
        return iproduct(*(range(n) for n in self.factors))

    def index_array(self, coords: np.ndarray) -> np.ndarray:
        """Vectorised ``index`` over an (m, rank) array of reduced coordinates."""
        return coords @ np.asarray(self._strides, dtype=np.int64)

    def coord_array(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return np.stack([(idx // s) % n for s, n in zip(self._strides, self.factors)], axis=-1)

    def sub_table(self) -> np.ndarray:
        """table[a, b] = index(element(a) - element(b))."""
        c = self.coord_array(np.arange(self.order))
        n = np.asarray(self.factors, dtype=np.int64)
        diff = (c[:, None, :] - c[None, :, :]) % n
        return diff @ np.asarray(self._strides, dtype=np.int64)

    # -- subgroups ------------------------------------------------------

    def _block_range(self, block) -> range:
        if isinstance(block, slice):
            start, stop, step = block.indices(len(self.factors))
            if step != 1:
                raise ValueError("block must be contiguous")
            block = range(start, stop)
        elif isinstance(block, int):
            block = range(block, block + 1)
        if not isinstance(block, range) or block.step != 1:
            raise ValueError("block must be a contiguous range of factor indices")
        if not block or block.start < 0 or block.stop > len(self.factors):
            raise IndexError(f"block {block} out of range for {len(self.factors)} factors")
        return block

    def subproduct(self, block) -> Group:
        block = self._block_range(block)
        return Group(self.factors[block.start:block.stop])


def cyclic(n: int) -> Group:
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    return Group((n,))


TRIVIAL = cyclic(1)


def product(g1: Group, g2: Group) -> Group:
    return Group(g1.factors + g2.factors)


def element_arith(G: Group, op: str, *args):
    """Dispatch ``add``/``neg``/``sub``/``scalar_mul`` by name."""
    if op == "add":
        return G.add(*args)
    if op == "neg":
        return G.neg(*args)
    if op == "sub":
        return G.sub(*args)
    if op == "scalar_mul":
        return G.scalar_mul(*args)
    raise ValueError(f"unknown operation {op!r}")


def project(G: Group, g: ElementLike, block) -> Element:
    """Coordinate projection onto the sub-product ``G.factors[block]``."""
    block = G._block_range(block)
    return G.coerce(g)[block.start:block.stop]


class CRTMap:
    """Isomorphism between a product of pairwise coprime cyclic groups and Z/N."""

    def __init__(self, group: Group):
        for a, b in combinations(group.factors, 2):
            if math.gcd(a, b) != 1:
                raise NotCoprimeError((a, b))
        self.group = group
        self.modulus = group.order
        # fold the two-factor CRT left to right: idempotent e_i = 1 mod N_i, 0 mod the rest
        coeffs = [1]
        m = group.factors[0]
        for n in group.factors[1:]:
            lift_old = n * pow(n, -1, m) % (m * n)
            coeffs = [c * lift_old % (m * n) for c in coeffs]
            coeffs.append(m * pow(m, -1, n) % (m * n))
            m *= n
        self.coeffs = tuple(coeffs)

    @property
    def cyclic_group(self) -> Group:
        return cyclic(self.modulus)

    def to_cyclic(self, g: ElementLike) -> int:
        g = self.group.coerce(g)
        return sum(c * e for c, e in zip(g, self.coeffs)) % self.modulus

    def from_cyclic(self, n: int) -> Element:
        return tuple(n % f for f in self.group.factors)

    def to_cyclic_array(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=object if self.modulus > 2**31 else np.int64)
        out = np.zeros(coords.shape[:-1], dtype=coords.dtype)
        for i, e in enumerate(self.coeffs):
            out = (out + coords[..., i] * e) % self.modulus
        return out

    def from_cyclic_array(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n)
        return np.stack([n % f for f in self.group.factors], axis=-1)

    def index_permutation(self) -> np.ndarray:
        """perm[i] = residue of the i-th canonical element of the product."""
        coords = self.group.coord_array(np.arange(self.group.order))
        return self.to_cyclic_array(coords)


def crt_flatten(G: Group) -> CRTMap:
    return CRTMap(G)
