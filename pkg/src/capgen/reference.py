"""Baseline generators: the adjacent-transposition Markov chain and the random node generator."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .lattice import canonical_extension, check_n, n_nodes
from .rng import GRID


@dataclass(frozen=True)
class MarkovConfig:
    """Chain length per sample; ``steps=None`` means (2**n - 2) ** 3."""

    steps: int | None = None
    lazy: bool = True

    def __post_init__(self):
        if self.steps is not None and self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    def steps_for(self, n: int) -> int:
        return self.steps if self.steps is not None else n_nodes(n) ** 3


@numba.njit(cache=True)
def _markov_kernel(order, steps, lazy, rng):
    p = order.shape[0]
    span = 2 * (p - 1) if lazy else p - 1
    for _ in range(steps):
        i = rng.integers(0, span)
        # lazy chain: draws in [p - 1, 2(p - 1)) are self-loops
        if i >= p - 1:
            continue
        a = order[i]
        b = order[i + 1]
        c = a & b
        if c != a and c != b:
            order[i] = b
            order[i + 1] = a


@lru_cache(maxsize=None)
def _canonical_array(n: int) -> np.ndarray:
    a = np.array(canonical_extension(n), dtype=np.int64)
    a.flags.writeable = False
    return a


def generate_markov(n: int, cfg: MarkovConfig | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Run the chain from the canonical extension and return the final state.

    Each step proposes swapping a uniformly chosen adjacent pair, accepted iff
    the two subsets are incomparable. The chain is symmetric, so its
    stationary law is uniform on linear extensions.
    """
    n = check_n(n)
    if n < 2:
        raise ValueError("the Markov chain needs n >= 2")
    cfg = cfg or MarkovConfig()
    if rng is None:
        raise ValueError("rng is required")
    order = _canonical_array(n).copy()
    _markov_kernel(order, cfg.steps_for(n), cfg.lazy, rng)
    return order


def markov_step(order: np.ndarray, i: int) -> bool:
    """Deterministic single proposal at position ``i``; returns whether it was accepted."""
    a, b = int(order[i]), int(order[i + 1])
    c = a & b
    if c != a and c != b:
        order[i], order[i + 1] = b, a
        return True
    return False


@numba.njit(cache=True)
def _random_node_kernel(n, rng, values, visit):
    size = 1 << n
    full = size - 1
    p = size - 2
    assigned = np.zeros(size, dtype=np.bool_)
    for s in range(size):
        values[s] = 0.0
    values[full] = 1.0
    for i in range(p):
        visit[i] = i + 1
    for i in range(p - 1, 0, -1):
        j = rng.integers(0, i + 1)
        t = visit[i]
        visit[i] = visit[j]
        visit[j] = t
    for i in range(p):
        s = visit[i]
        lo = 0.0
        sub = (s - 1) & s
        while sub:
            if assigned[sub] and values[sub] > lo:
                lo = values[sub]
            sub = (sub - 1) & s
        hi = 1.0
        comp = full ^ s
        ext = (comp - 1) & comp
        while True:
            sup = s | ext
            if sup != full and assigned[sup] and values[sup] < hi:
                hi = values[sup]
            if ext == 0:
                break
            ext = (ext - 1) & comp
        v = lo + (hi - lo) * rng.random()
        # keep values on the 2**-53 grid so conjugation is exact
        v = np.round(v / GRID) * GRID
        if v < lo:
            v = lo
        if v > hi:
            v = hi
        values[s] = v
        assigned[s] = True


def generate_random_node(n: int, rng: np.random.Generator) -> np.ndarray:
    """Capacity values from the random node generator (biased baseline).

    Subsets are visited in a uniformly random order; each value is drawn
    uniformly between the largest assigned subset value and the smallest
    assigned superset value.
    """
    n = check_n(n)
    values = np.empty(1 << n)
    visit = np.empty(max(n_nodes(n), 1), dtype=np.int64)
    _random_node_kernel(n, rng, values, visit)
    return values
