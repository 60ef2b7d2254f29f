"""Capacities (monotone set functions) stored as dense vectors indexed by subset mask."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lattice import Check, LatticeError, check_n, format_subset, full_mask, n_nodes


@dataclass(frozen=True, eq=False)
class Capacity:
    """``values[S]`` is mu(S) for every mask S in ``0 .. 2**n - 1``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        n = check_n(self.n)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << n,):
            raise LatticeError(f"expected {1 << n} values for n={n}, got shape {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", values)

    def __getitem__(self, s: int) -> float:
        return float(self.values[s])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Capacity):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    @classmethod
    def minimal(cls, n: int) -> "Capacity":
        v = np.zeros(1 << n)
        v[-1] = 1.0
        return cls(n, v)

    @classmethod
    def maximal(cls, n: int) -> "Capacity":
        v = np.ones(1 << n)
        v[0] = 0.0
        return cls(n, v)

    @classmethod
    def additive_uniform(cls, n: int) -> "Capacity":
        """mu(S) = |S| / n."""
        sizes = np.array([bin(s).count("1") for s in range(1 << n)], dtype=np.float64)
        return cls(n, sizes / n)


def capacity_values_from_extension(order: Sequence[int], n: int, rng: np.random.Generator) -> np.ndarray:
    """Dense value vector for ``order`` using 2**n - 2 sorted uniform draws."""
    p = n_nodes(n)
    z = np.sort(rng.random(p))
    values = np.empty(1 << n)
    values[0] = 0.0
    values[-1] = 1.0
    values[np.asarray(order, dtype=np.int64)] = z
    return values


def capacity_from_extension(order: Sequence[int], rng: np.random.Generator, n: int | None = None) -> Capacity:
    """Uniform point of the simplex attached to the linear extension ``order``.

    The i-th smallest of 2**n - 2 independent uniforms is assigned to the i-th
    node of the extension.
    """
    if n is None:
        n = (len(order) + 2).bit_length() - 1
    n = check_n(n)
    if len(order) != n_nodes(n):
        raise LatticeError(f"extension of length {len(order)} does not match n={n}")
    return Capacity(n, capacity_values_from_extension(order, n, rng))


def _covering_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    lows, highs = [], []
    for s in range(1 << n):
        free = full_mask(n) ^ s
        while free:
            b = free & -free
            lows.append(s)
            highs.append(s | b)
            free ^= b
    return np.array(lows, dtype=np.int64), np.array(highs, dtype=np.int64)


def validate_capacity(c: Capacity | np.ndarray, n: int | None = None) -> Check:
    """Exact (tolerance-free) check of normalisation, range and monotonicity."""
    if isinstance(c, Capacity):
        n, values = c.n, c.values
    else:
        values = np.asarray(c, dtype=np.float64)
        if n is None:
            n = len(values).bit_length() - 1
    if values.shape != (1 << n,):
        return Check(False, f"expected {1 << n} values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        return Check(False, "non-finite value")
    if values[0] != 0.0:
        return Check(False, f"mu(empty) = {values[0]!r}, expected 0")
    if values[-1] != 1.0:
        return Check(False, f"mu(N) = {values[-1]!r}, expected 1")
    bad = np.flatnonzero((values < 0.0) | (values > 1.0))
    if bad.size:
        s = int(bad[0])
        return Check(False, f"mu({format_subset(s)}) = {values[s]!r} outside [0, 1]")
    lo, hi = _covering_pairs(n)
    viol = np.flatnonzero(values[lo] > values[hi])
    if viol.size:
        a, b = int(lo[viol[0]]), int(hi[viol[0]])
        return Check(
            False,
            f"mu({format_subset(a)}) = {values[a]!r} > mu({format_subset(b)}) = {values[b]!r}",
        )
    return Check(True)


def validate_capacities(values: np.ndarray, n: int) -> np.ndarray:
    """Row-wise validity flags for a batch of value vectors, shape (count, 2**n)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 1 << n:
        raise LatticeError(f"expected shape (count, {1 << n}), got {values.shape}")
    lo, hi = _covering_pairs(n)
    ok = (values[:, 0] == 0.0) & (values[:, -1] == 1.0)
    ok &= np.all(np.isfinite(values) & (values >= 0.0) & (values <= 1.0), axis=1)
    ok &= np.all(values[:, lo] <= values[:, hi], axis=1)
    return ok


def conjugate(c: Capacity) -> Capacity:
    """The conjugate capacity S -> 1 - mu(N minus S)."""
    # mask order reversed is exactly S -> N minus S
    values = 1.0 - c.values[::-1]
    return Capacity(c.n, values)
