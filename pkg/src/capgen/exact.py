"""Exact counting and uniform sampling of linear extensions of 2^N minus {bottom, top}.

The states of the dynamic programme are order ideals (down-sets) of the node
poset. An ideal is stored as a Python ``int`` with one bit per subset mask;
bit 0 (the empty set) is always set so that singletons become addable
without special cases. The number of ideals is small (166 at n=4, 7579 at
n=5, about 7.8 million at n=6), so exhaustive tables are cheap up to n=5 and
counting stays feasible at n=6 by keeping one level of the lattice of ideals
in memory at a time.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from .lattice import (
    LatticeError,
    check_n,
    full_mask,
    is_node,
    n_nodes,
    popcount,
)

MAX_COUNT_N = 6
MAX_TABLE_N = 5
MAX_ENUM_N = 3


class ResourceLimitError(RuntimeError):
    """Raised when an exact computation would exceed its supported size."""


class _Shifts:
    """Precomputed bitmaps turning the addability test into word operations."""

    def __init__(self, n: int):
        size = 1 << n
        self.n = n
        self.proper = ((1 << size) - 1) & ~1 & ~(1 << (size - 1))
        self.empty = 1
        self.full_ideal = self.proper | 1
        self.terms = []
        for i in range(n):
            lacks_i = 0
            for s in range(size):
                if not (s >> i) & 1:
                    lacks_i |= 1 << s
            # multiplying by 2**(2**i) shifts bit S to bit S | {i}
            self.terms.append((lacks_i, 1 << (1 << i)))

    def addable(self, ideal: int) -> int:
        """Bitmap of the nodes that are minimal in the complement of ``ideal``."""
        a = ~ideal & self.proper
        for lacks_i, shift in self.terms:
            a &= ((ideal & lacks_i) * shift) | lacks_i
        return a


def _bits(x: int):
    while x:
        low = x & -x
        yield low
        x ^= low


def _count_levelwise(n: int) -> int:
    sh = _Shifts(n)
    level = {sh.empty: 1}
    for _ in range(n_nodes(n)):
        nxt: dict[int, int] = {}
        get = nxt.get
        for ideal, c in level.items():
            for low in _bits(sh.addable(ideal)):
                key = ideal | low
                nxt[key] = get(key, 0) + c
        level = nxt
    return level[sh.full_ideal]


@lru_cache(maxsize=None)
def count_extensions(n: int) -> int:
    """Number of linear extensions e(2^N), exact for 1 <= n <= 6."""
    n = check_n(n)
    if n > MAX_COUNT_N:
        raise ResourceLimitError(f"exact counting is supported for n <= {MAX_COUNT_N}")
    if n <= MAX_TABLE_N:
        return ideal_table(n).total
    return _count_levelwise(n)


class IdealTable:
    """Counts of chains from the empty ideal up to each ideal, and from it to the top.

    ``down(D)`` is the number of linear extensions of the subposet D itself;
    ``up[D]`` the number of ways to complete D into a linear extension of the
    whole poset. Keys are ideal bitmaps (bit S set iff S is in D, plus bit 0).
    """

    def __init__(self, n: int, allow_n6: bool = False):
        n = check_n(n)
        if n > MAX_TABLE_N and not (n == 6 and allow_n6):
            raise ResourceLimitError(f"ideal tables are supported for n <= {MAX_TABLE_N}")
        self.n = n
        self._sh = _Shifts(n)
        p = n_nodes(n)
        levels: list[dict[int, int]] = [{self._sh.empty: 1}]
        for _ in range(p):
            nxt: dict[int, int] = {}
            for ideal, c in levels[-1].items():
                for low in _bits(self._sh.addable(ideal)):
                    key = ideal | low
                    nxt[key] = nxt.get(key, 0) + c
            levels.append(nxt)
        self.levels = levels
        up: dict[int, int] = {self._sh.full_ideal: 1}
        for lvl in reversed(levels[:-1]):
            for ideal in lvl:
                up[ideal] = sum(up[ideal | low] for low in _bits(self._sh.addable(ideal)))
        self.up = up
        self.total = levels[-1][self._sh.full_ideal]

    @property
    def empty_ideal(self) -> int:
        return self._sh.empty

    @property
    def full_ideal(self) -> int:
        return self._sh.full_ideal

    def __len__(self) -> int:
        return sum(len(lvl) for lvl in self.levels)

    def down(self, ideal: int) -> int:
        """Linear extensions of the subposet formed by ``ideal`` itself."""
        return self.levels[popcount(ideal) - 1][ideal]

    def addable(self, ideal: int) -> list[int]:
        """Nodes (as subset masks) that may come next after ``ideal``."""
        return [low.bit_length() - 1 for low in _bits(self._sh.addable(ideal))]

    def ideal_of(self, nodes) -> int:
        ideal = self._sh.empty
        for s in nodes:
            ideal |= 1 << s
        return ideal

    def extensions_after(self, ideal: int) -> int:
        """Extensions of the poset with the nodes of ``ideal`` removed."""
        return self.up[ideal]

    def first_node_probability(self, s: int) -> Fraction:
        """Probability that a uniform extension starts with node ``s``."""
        ideal = self._sh.empty | (1 << s)
        return Fraction(self.up.get(ideal, 0), self.total)


@lru_cache(maxsize=None)
def ideal_table(n: int, allow_n6: bool = False) -> IdealTable:
    """Cached :class:`IdealTable`; n=6 costs several GB and needs ``allow_n6``."""
    return IdealTable(n, allow_n6=allow_n6)


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large ``bound``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound < (1 << 62):
        return int(rng.integers(0, bound))
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    drop = nbytes * 8 - nbits
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "little") >> drop
        if r < bound:
            return r


def sample_extension_exact(n: int, rng: np.random.Generator, allow_n6: bool = False) -> list[int]:
    """Draw a linear extension uniformly at random.

    Successive minimal elements m are chosen with probability
    e(P minus m) / e(P), computed exactly from the ideal table.
    """
    n = check_n(n)
    if n > MAX_TABLE_N and not (n == 6 and allow_n6):
        raise ResourceLimitError(
            f"exact sampling is supported for n <= {MAX_TABLE_N} (n=6 needs allow_n6=True)"
        )
    table = ideal_table(n, allow_n6=allow_n6)
    ideal = table.empty_ideal
    order = []
    up = table.up
    for _ in range(n_nodes(n)):
        r = _randbelow(rng, up[ideal])
        for s in table.addable(ideal):
            w = up[ideal | (1 << s)]
            if r < w:
                break
            r -= w
        order.append(s)
        ideal |= 1 << s
    return order


def rank_frequencies(n: int, s: int) -> list[int]:
    """``out[k-1]`` = number of linear extensions placing node ``s`` at rank k."""
    n = check_n(n)
    if n > MAX_TABLE_N:
        raise ResourceLimitError(f"rank frequencies are supported for n <= {MAX_TABLE_N}")
    if not is_node(s, n):
        raise LatticeError(f"{s} is not a node for n={n}")
    table = ideal_table(n)
    bit = 1 << s
    out = []
    sh = table._sh
    for lvl in table.levels[:-1]:
        acc = 0
        for ideal, c in lvl.items():
            if sh.addable(ideal) & bit:
                acc += c * table.up[ideal | bit]
        out.append(acc)
    return out


def enumerate_extensions(n: int) -> list[tuple[int, ...]]:
    """All linear extensions by brute force over permutations (n <= 3 only)."""
    n = check_n(n)
    if n > MAX_ENUM_N:
        raise ResourceLimitError(f"explicit enumeration is supported for n <= {MAX_ENUM_N}")
    nodes = list(range(1, full_mask(n)))
    out = []
    for perm in permutations(nodes):
        seen = 0
        ok = True
        for s in perm:
            # every strict subset must already be placed
            sub = (s - 1) & s
            while sub:
                if not (seen >> sub) & 1:
                    ok = False
                    break
                sub = (sub - 1) & s
            if not ok:
                break
            seen |= 1 << s
        if ok:
            out.append(perm)
    return out


__all__ = [
    "IdealTable",
    "ResourceLimitError",
    "count_extensions",
    "enumerate_extensions",
    "ideal_table",
    "rank_frequencies",
    "sample_extension_exact",
]
