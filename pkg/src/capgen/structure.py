"""Structural properties of two-layer views and their classification.

These are the combinatorial conditions under which the 2-layer selection
weights are exact: profiles n_x, regularity, balancedness and closure under
intersection, plus the classification of closed views into the only two
shapes they can take.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from .lattice import LatticeError, format_subset, full_mask, popcount
from .twolayer import TwoLayerView


class ConsistencyError(AssertionError):
    """A closed view that fits neither situation; this would contradict the classification."""


@dataclass(frozen=True)
class NxProfile:
    """``counts[r]`` = successors of x having exactly r predecessors; ``counts[0]`` = lower nodes not below x."""

    counts: tuple[int, ...]

    def __getitem__(self, r: int) -> int:
        return self.counts[r] if 0 <= r < len(self.counts) else 0

    def as_dict(self) -> dict[int, int]:
        return {r: c for r, c in enumerate(self.counts) if c}


def _check_top(view: TwoLayerView) -> None:
    if view.orientation != "top":
        raise ValueError("structure analysis expects a view in top orientation")


def nx_profile(view: TwoLayerView, x: int) -> NxProfile:
    if x not in view.succs:
        raise LatticeError(f"{format_subset(x)} is not in the upper layer")
    counts = [0] * (view.h + 1)
    counts[0] = view.k - len(view.succs[x])
    for y in view.succs[x]:
        counts[len(view.preds[y])] += 1
    return NxProfile(tuple(counts))


def is_regular(view: TwoLayerView) -> bool:
    if not view.upper:
        raise LatticeError("empty view")
    profiles = {nx_profile(view, x) for x in view.upper}
    return len(profiles) == 1


def is_balanced(view: TwoLayerView) -> bool:
    return len({len(view.succs[x]) for x in view.upper}) <= 1


def intersection_violation(view: TwoLayerView) -> tuple[int, int] | None:
    """First pair of upper nodes whose intersection is not a lower node, if any."""
    _check_top(view)
    lower = set(view.lower)
    for a, b in combinations(view.upper, 2):
        if a & b not in lower:
            return a, b
    return None


def is_closed_under_intersection(view: TwoLayerView) -> bool:
    return intersection_violation(view) is None


def max_common_successors(view: TwoLayerView) -> int:
    """Largest |succ(x) & succ(x')| over pairs of upper nodes (0 if h < 2)."""
    best = 0
    for a, b in combinations(view.upper, 2):
        best = max(best, len(set(view.succs[a]) & set(view.succs[b])))
    return best


SituationTag = Literal["Situation1-Case1", "Situation1-Case2", "Situation2", "NotClosed"]


@dataclass(frozen=True)
class SituationClass:
    """Classification result.

    ``witness`` holds the offending pair for NotClosed, the common lower node
    S for Situation2, the doubly covered lower nodes for Situation1-Case2 and
    the single upper node for Situation1-Case1. ``support`` is the union of
    the upper nodes.
    """

    tag: SituationTag
    witness: tuple[int, ...]
    support: int

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "witness": [format_subset(s) for s in self.witness],
            "support": format_subset(self.support),
        }


def classify_situation(view: TwoLayerView) -> SituationClass:
    """Classify a top view, verifying every structural claim that comes with the class.

    Raises :class:`ConsistencyError` if a closed view has none of the expected
    shapes.
    """
    _check_top(view)
    if not view.upper:
        raise LatticeError("empty view")
    if view.lower and popcount(view.lower[0]) != view.ell - 1:
        raise ValueError("classification needs adjacent layers")
    support = 0
    for x in view.upper:
        support |= x
    bad = intersection_violation(view)
    if bad is not None:
        return SituationClass("NotClosed", bad, support)
    h, ell, n_prime = view.h, view.ell, popcount(support)
    if h == 1:
        return SituationClass("Situation1-Case1", (view.upper[0],), support)
    npred = {y: len(view.preds[y]) for y in view.lower}
    top = max(npred.values(), default=0)

    if top <= 2:
        doubles = tuple(y for y in view.lower if npred[y] == 2)
        if ell != n_prime - 1:
            raise ConsistencyError(f"Situation 1 with h={h} but l={ell} != n'-1={n_prime - 1}: {view.describe()}")
        if len(doubles) != h * (h - 1) // 2:
            raise ConsistencyError(
                f"Situation 1 with {len(doubles)} doubly covered nodes, expected {h * (h - 1) // 2}: {view.describe()}"
            )
        return SituationClass("Situation1-Case2", doubles, support)

    hubs = [y for y in view.lower if npred[y] == h]
    if h < 3 or len(hubs) != 1 or top != h:
        raise ConsistencyError(f"closed view fits neither situation: {view.describe()}")
    s = hubs[0]
    if h != n_prime - ell + 1 or not ell < n_prime - 1:
        raise ConsistencyError(f"Situation 2 with h={h}, l={ell}, n'={n_prime}: {view.describe()}")
    if sorted(view.upper) != sorted(s | (1 << i) for i in range(support.bit_length()) if (support ^ s) >> i & 1):
        raise ConsistencyError(f"upper layer is not S + {{i}} for S={format_subset(s)}: {view.describe()}")
    if any(npred[y] > 1 for y in view.lower if y != s):
        raise ConsistencyError(f"Situation 2 with a second multiply covered node: {view.describe()}")
    return SituationClass("Situation2", (s,), support)


def analyze(view: TwoLayerView) -> dict:
    """Profiles, flags and class of a view as a JSON-ready dict."""
    d = {
        "upper": [format_subset(x) for x in view.upper],
        "lower": [format_subset(y) for y in view.lower],
        "h": view.h,
        "k": view.k,
        "isolated": [format_subset(y) for y in view.isolated],
        "profiles": {format_subset(x): nx_profile(view, x).as_dict() for x in view.upper},
        "regular": is_regular(view),
        "balanced": is_balanced(view),
        "closed_under_intersection": is_closed_under_intersection(view),
    }
    if view.orientation == "top" and (not view.lower or popcount(view.lower[0]) == view.ell - 1):
        d["situation"] = classify_situation(view).to_dict()
    return d


def random_view(rng: np.random.Generator, n: int | None = None, max_nodes: int | None = None) -> TwoLayerView:
    """A random two-layer view of the Boolean lattice.

    Draws n in 3..6 (unless given) and l in 2..n-1, then keeps each l-set and
    each (l-1)-set independently with probability 1/2. Draws with an empty
    upper layer, or more than ``max_nodes`` nodes, are rejected.
    """
    while True:
        m = int(rng.integers(3, 7)) if n is None else n
        if m < 3:
            raise ValueError("random views need n >= 3")
        ell = int(rng.integers(2, m))
        upper = [s for s in range(1, full_mask(m)) if popcount(s) == ell and rng.random() < 0.5]
        lower = [s for s in range(1, full_mask(m)) if popcount(s) == ell - 1 and rng.random() < 0.5]
        if not upper:
            continue
        if max_nodes is not None and len(upper) + len(lower) > max_nodes:
            continue
        return TwoLayerView(m, upper, lower)


def full_top_view(n: int, ell: int) -> TwoLayerView:
    """All l-sets over all (l-1)-sets."""
    nodes = range(1, full_mask(n))
    return TwoLayerView(n, [s for s in nodes if popcount(s) == ell], [s for s in nodes if popcount(s) == ell - 1])


def binomial_profile(n: int, ell: int) -> NxProfile:
    """Profile of any upper node of :func:`full_top_view`."""
    k = math.comb(n, ell - 1)
    counts = [0] * (math.comb(n, ell) + 1)
    counts[0] = k - ell
    counts[n - ell + 1] = ell
    return NxProfile(tuple(counts))
