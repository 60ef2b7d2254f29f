"""Bitmask arithmetic over the Boolean lattice 2^N without its bottom and top.

A subset S of N = {1, ..., n} is an ``int`` whose bit ``i`` is set iff element
``i + 1`` belongs to S. Poset nodes are the masks ``1 .. 2**n - 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_N = 16


class LatticeError(ValueError):
    """Raised on invalid subsets, ground-set sizes or poset states."""


def check_n(n: int, max_n: int = MAX_N) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise LatticeError(f"n must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= max_n:
        raise LatticeError(f"n must lie in [1, {max_n}], got {n}")
    return n


def full_mask(n: int) -> int:
    return (1 << n) - 1


def n_nodes(n: int) -> int:
    """Number of nonempty proper subsets, ``2**n - 2``."""
    return (1 << n) - 2


def popcount(s: int) -> int:
    return int(s).bit_count()


def is_node(s: int, n: int) -> bool:
    return 0 < s < full_mask(n)


def complement(s: int, n: int) -> int:
    """Return N minus S."""
    if not 0 <= s <= full_mask(n):
        raise LatticeError(f"mask {s} out of range for n={n}")
    return full_mask(n) ^ s


def elements(s: int) -> list[int]:
    """1-based elements of S in increasing order."""
    out = []
    i = 1
    while s:
        if s & 1:
            out.append(i)
        s >>= 1
        i += 1
    return out


def from_elements(items: Iterable[int]) -> int:
    s = 0
    for i in items:
        if i < 1:
            raise LatticeError(f"elements are 1-based, got {i}")
        s |= 1 << (i - 1)
    return s


def parse_subset(text: str) -> int:
    """Parse the compact digit notation ("134" -> {1, 3, 4}); n <= 9 only.

    Braces and commas are tolerated, so "{1,3,4}" works as well.
    """
    if any(not (c.isdigit() or c in "{}, ") for c in text):
        raise LatticeError(f"cannot parse subset {text!r}")
    digits = [c for c in text if c.isdigit()]
    if not digits:
        raise LatticeError(f"cannot parse subset {text!r}")
    return from_elements(int(c) for c in digits)


def format_subset(s: int) -> str:
    if s == 0:
        return "{}"
    items = elements(s)
    if items[-1] <= 9:
        return "".join(str(i) for i in items)
    return "{" + ",".join(str(i) for i in items) + "}"


def iter_bits(s: int) -> Iterator[int]:
    """Yield the single-bit masks of S."""
    while s:
        low = s & -s
        yield low
        s ^= low


def nodes_by_cardinality(n: int) -> list[list[int]]:
    """``out[c]`` lists the masks of cardinality c in ascending order, c = 0..n."""
    out: list[list[int]] = [[] for _ in range(n + 1)]
    for s in range(1 << n):
        out[popcount(s)].append(s)
    return out


def canonical_extension(n: int) -> list[int]:
    """Nodes sorted by cardinality, then mask value."""
    return sorted(range(1, full_mask(n)), key=lambda s: (popcount(s), s))


@dataclass
class PosetState:
    """Mutable set of remaining nodes H, organised by cardinality layers."""

    n: int
    present: list[bool] = field(repr=False)
    layer_counts: list[int]

    @classmethod
    def full(cls, n: int) -> "PosetState":
        n = check_n(n)
        size = 1 << n
        present = [0 < s < size - 1 for s in range(size)]
        counts = [0] * (n + 1)
        for s in range(1, size - 1):
            counts[popcount(s)] += 1
        return cls(n, present, counts)

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[int]) -> "PosetState":
        n = check_n(n)
        state = cls(n, [False] * (1 << n), [0] * (n + 1))
        for s in nodes:
            state.add(s)
        return state

    def __contains__(self, s: int) -> bool:
        return 0 <= s < len(self.present) and self.present[s]

    def __len__(self) -> int:
        return sum(self.layer_counts)

    def nodes(self) -> list[int]:
        return [s for s, p in enumerate(self.present) if p]

    def layer(self, c: int) -> list[int]:
        if not 0 <= c <= self.n:
            return []
        return [s for s in range(len(self.present)) if self.present[s] and popcount(s) == c]

    def add(self, s: int) -> None:
        if not is_node(s, self.n):
            raise LatticeError(f"{s} is not a node for n={self.n}")
        if not self.present[s]:
            self.present[s] = True
            self.layer_counts[popcount(s)] += 1

    def remove(self, s: int) -> None:
        if s not in self:
            raise LatticeError(f"node {format_subset(s)} is not present")
        self.present[s] = False
        self.layer_counts[popcount(s)] -= 1

    def copy(self) -> "PosetState":
        return PosetState(self.n, list(self.present), list(self.layer_counts))

    def complemented(self) -> "PosetState":
        """The dual state {N minus S : S in H}; bottom layers become top layers."""
        full = full_mask(self.n)
        present = [self.present[full ^ s] for s in range(full + 1)]
        return PosetState(self.n, present, self.layer_counts[::-1])

    def occupied_cardinalities(self) -> list[int]:
        return [c for c, k in enumerate(self.layer_counts) if k > 0]

    def top_cardinality(self) -> int:
        occ = self.occupied_cardinalities()
        if not occ:
            raise LatticeError("empty poset state")
        return occ[-1]

    def bottom_cardinality(self) -> int:
        occ = self.occupied_cardinalities()
        if not occ:
            raise LatticeError("empty poset state")
        return occ[0]

    def is_contiguous(self) -> bool:
        occ = self.occupied_cardinalities()
        return not occ or occ[-1] - occ[0] + 1 == len(occ)


def present_predecessors(state: PosetState, y: int) -> set[int]:
    """Present supersets of y with exactly one more element."""
    if y not in state:
        raise LatticeError(f"node {format_subset(y)} is not present")
    free = full_mask(state.n) ^ y
    return {y | b for b in iter_bits(free) if (y | b) in state}


def present_successors(state: PosetState, x: int) -> set[int]:
    """Present subsets of x with exactly one element fewer."""
    if x not in state:
        raise LatticeError(f"node {format_subset(x)} is not present")
    return {x ^ b for b in iter_bits(x) if (x ^ b) in state}


def height(state: PosetState) -> int:
    """Number of nonempty cardinality layers."""
    occ = state.occupied_cardinalities()
    if not occ:
        raise LatticeError("height of an empty poset state is undefined")
    return len(occ)


@dataclass(frozen=True)
class Check:
    """Boolean verdict carrying the first violation found, if any."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_extension(order: Sequence[int], n: int | None = None) -> Check:
    """Check that ``order`` lists every node once and never puts a set after a superset.

    ``n`` is inferred from the length when omitted.
    """
    order = [int(s) for s in order]
    p = len(order)
    if n is None:
        n = (p + 2).bit_length() - 1
        if (1 << n) - 2 != p:
            return Check(False, f"length {p} is not 2**n - 2 for any n")
    elif p != n_nodes(n):
        return Check(False, f"expected {n_nodes(n)} nodes, got {p}")
    full = full_mask(n)
    pos = [-1] * (full + 1)
    for i, s in enumerate(order):
        if not 0 < s < full:
            return Check(False, f"position {i}: {s} is not a node for n={n}")
        if pos[s] >= 0:
            return Check(False, f"position {i}: {format_subset(s)} repeated")
        pos[s] = i
    # covering pairs suffice: inclusion is generated by adding one element
    for s in order:
        for b in iter_bits(s):
            t = s ^ b
            if t and pos[t] > pos[s]:
                return Check(
                    False,
                    f"{format_subset(t)} at position {pos[t]} comes after its superset "
                    f"{format_subset(s)} at position {pos[s]}",
                )
    return Check(True)


def validate_extensions(orders: np.ndarray, n: int) -> np.ndarray:
    """Vectorised validity flags for a batch of extensions, shape (count, 2**n - 2)."""
    orders = np.asarray(orders, dtype=np.int64)
    if orders.ndim != 2 or orders.shape[1] != n_nodes(n):
        raise LatticeError(f"expected shape (count, {n_nodes(n)}), got {orders.shape}")
    count, p = orders.shape
    full = full_mask(n)
    ok = np.all((orders > 0) & (orders < full), axis=1)
    safe = np.where((orders > 0) & (orders < full), orders, 0)
    pos = np.full((count, full + 1), -1, dtype=np.int64)
    rows = np.arange(count)[:, None]
    pos[rows, safe] = np.arange(p)[None, :]
    # each node occupies exactly one slot iff all positions were written
    ok &= np.all(pos[:, 1:full] >= 0, axis=1)
    masks = np.arange(1, full)
    for i in range(n):
        bit = 1 << i
        has = masks[(masks & bit) != 0]
        sub = has ^ bit
        has, sub = has[sub != 0], sub[sub != 0]
        ok &= np.all(pos[:, sub] < pos[:, has], axis=1)
    return ok
