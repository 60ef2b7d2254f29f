"""The 2-layer approximation sampler of linear extensions of the Boolean lattice.

Maximal elements are drawn from the two top layers of the remaining poset H and
minimal elements from the two bottom layers, with the probabilities a node
would have of ending (starting) a uniform linear extension of that two-layer
window. Bottom windows are handled by complementing H, which turns them into
top windows.

Two implementations share one RNG protocol: :func:`generate_twolayer` is the
readable reference built on :class:`PosetState` and :class:`TwoLayerView`, and
:func:`sample_extension` runs the same algorithm in a jitted kernel. Given the
same generator state both consume identical draws and return identical
extensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal

import numba
import numpy as np

from .lattice import (
    LatticeError,
    PosetState,
    check_n,
    format_subset,
    full_mask,
    height,
    iter_bits,
    n_nodes,
    popcount,
)

Orientation = Literal["top", "bottom"]

# log(m!) for m = 0 .. 2**17; shared by both implementations so that their
# floating-point weights agree bit for bit
LOG_FACTORIAL = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, 1 << 17, dtype=np.float64)))))

NORMALIZATION_TOL = 1e-12
MAX_EXACT_CORE = 20


class GenerationError(RuntimeError):
    """Internal invariant of the sampler violated."""


@dataclass
class TwoLayerView:
    """Two adjacent nonempty layers of a poset of subsets, in view coordinates.

    The lower layer is the next occupied cardinality below the upper one;
    normally that is one less, but removals can empty an intermediate class.
    For ``orientation == "bottom"`` every mask is the complement of the node it
    stands for, so that the minimal layer of H appears as the upper layer here.
    """

    n: int
    upper: list[int]
    lower: list[int]
    orientation: Orientation = "top"
    preds: dict[int, list[int]] = field(default_factory=dict, repr=False)
    succs: dict[int, list[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.upper = sorted(self.upper)
        self.lower = sorted(self.lower)
        if self.upper:
            ell = popcount(self.upper[0])
            if any(popcount(x) != ell for x in self.upper):
                raise LatticeError("upper layer mixes cardinalities")
            if self.lower:
                low = popcount(self.lower[0])
                if low >= ell or any(popcount(y) != low for y in self.lower):
                    raise LatticeError("lower layer must be one cardinality class below the upper layer")
        elif self.lower:
            raise LatticeError("a view with lower nodes needs at least one upper node")
        # strict containment; across a cardinality gap this is no longer a cover
        self.preds = {y: [x for x in self.upper if x & y == y] for y in self.lower}
        self.succs = {x: [y for y in self.lower if x & y == y] for x in self.upper}

    @classmethod
    def from_state(cls, state: PosetState, orientation: Orientation = "top") -> "TwoLayerView":
        """The two top (or bottom) layers of ``state``."""
        if orientation == "bottom":
            state = state.complemented()
        elif orientation != "top":
            raise ValueError(f"unknown orientation {orientation!r}")
        occ = state.occupied_cardinalities()
        lower = state.layer(occ[-2]) if len(occ) > 1 else []
        return cls(state.n, state.layer(occ[-1]), lower, orientation)

    @property
    def h(self) -> int:
        return len(self.upper)

    @property
    def k(self) -> int:
        return len(self.lower)

    @property
    def ell(self) -> int:
        return popcount(self.upper[0])

    @property
    def isolated(self) -> list[int]:
        return [y for y in self.lower if not self.preds[y]]

    def to_node(self, x: int) -> int:
        """Translate a view mask back to the poset node it represents."""
        return full_mask(self.n) ^ x if self.orientation == "bottom" else x

    def without(self, nodes) -> "TwoLayerView":
        drop = set(nodes)
        return TwoLayerView(
            self.n,
            [x for x in self.upper if x not in drop],
            [y for y in self.lower if y not in drop],
            self.orientation,
        )

    def __len__(self) -> int:
        return self.h + self.k

    def describe(self) -> str:
        fmt = lambda xs: ", ".join(format_subset(x) for x in xs)  # noqa: E731
        return (
            f"TwoLayerView[h={self.h}, k={self.k}, |I|={len(self.isolated)}]"
            f"(upper: {fmt(self.upper)}; lower: {fmt(self.lower)})"
        )


def _require_upper(view: TwoLayerView, x: int) -> None:
    if x not in view.succs:
        raise LatticeError(f"{format_subset(x)} is not in the upper layer")


def newly_isolated_count(view: TwoLayerView, x: int) -> int:
    """Successors of x whose only predecessor is x (they become isolated once x goes)."""
    _require_upper(view, x)
    return sum(1 for y in view.succs[x] if len(view.preds[y]) == 1)


def _rising(start: int, count: int) -> int:
    """(start + 1) * (start + 2) * ... * (start + count)."""
    return math.prod(range(start + 1, start + count + 1))


def _count_poset(nodes: list[int], covers: dict[int, list[int]]) -> int:
    """Linear extensions of a small poset via memoised removal of maximal elements.

    ``covers[v]`` lists the elements directly below v.
    """
    index = {v: i for i, v in enumerate(nodes)}
    below = [0] * len(nodes)
    above = [0] * len(nodes)
    for v, lows in covers.items():
        for u in lows:
            below[index[v]] |= 1 << index[u]
            above[index[u]] |= 1 << index[v]

    @lru_cache(maxsize=None)
    def count(rem: int) -> int:
        if rem & (rem - 1) == 0:
            return 1
        total = 0
        r = rem
        while r:
            b = r & -r
            i = b.bit_length() - 1
            if not above[i] & rem:
                total += count(rem ^ b)
            r ^= b
        return total

    return count((1 << len(nodes)) - 1)


@dataclass(frozen=True)
class ExtensionCount:
    value: int
    method: Literal["exact", "formula"]


def two_layer_extension_count(view: TwoLayerView, exact: bool | None = None) -> ExtensionCount:
    """e(view), splitting off isolated nodes with the insertion product.

    The de-isolated core is counted exactly when it has at most 20 nodes (or
    when ``exact=True``); otherwise the core is peeled one upper node at a time
    with e = h * e(view minus x), which is exact for regular views.
    """
    iso = view.isolated
    core = view.without(iso)
    core_size = len(core)
    if exact is None:
        exact = core_size <= MAX_EXACT_CORE
    elif exact and core_size > MAX_EXACT_CORE:
        raise ValueError(f"exact count requested for a core of {core_size} > {MAX_EXACT_CORE} nodes")
    h, k = view.h, view.k
    factor = _rising(k - len(iso) + h, len(iso))
    if exact:
        core_count = _count_poset(core.upper + core.lower, core.succs)
        return ExtensionCount(core_count * factor, "exact")
    return ExtensionCount(_formula_count(core) * factor, "formula")


def _formula_count(view: TwoLayerView) -> int:
    if view.h == 0:
        return math.factorial(view.k)
    iso = view.isolated
    if iso:
        core = view.without(iso)
        return _formula_count(core) * _rising(view.k - len(iso) + view.h, len(iso))
    if view.h == 1:
        # the lone upper node comes after all of its successors
        return math.factorial(view.k)
    x = view.upper[0]
    return view.h * _formula_count(view.without([x]))


@dataclass(frozen=True)
class SelectionWeights:
    """Weights of the maximal elements of a two-layer view.

    ``candidates`` lists upper nodes then isolated lower nodes (view
    coordinates, ascending). ``weights`` are exact rationals; ``log_weights``
    are the floating-point values the samplers actually use.
    """

    candidates: tuple[int, ...]
    weights: tuple[Fraction, ...]
    log_weights: tuple[float, ...]
    h: int
    k: int
    n_isolated: int

    @property
    def normalization(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def exact_probabilities(self) -> tuple[Fraction, ...]:
        z = self.normalization
        return tuple(w / z for w in self.weights)

    @property
    def probabilities(self) -> np.ndarray:
        lw = np.array(self.log_weights)
        p = np.exp(lw - lw.max())
        return p / p.sum()

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.candidates, self.exact_probabilities))


def _log_rising(start: int, count: int) -> float:
    return LOG_FACTORIAL[start + count] - LOG_FACTORIAL[start]


def selection_weights(view: TwoLayerView) -> SelectionWeights:
    """Weights of upper nodes and isolated lower nodes as candidates for the last position.

    Upper node x: A(x) / h with A(x) = prod_{i=1..|I'(x)|} (h - 1 + k - |I'(x)| + i),
    where I'(x) = I plus the nodes isolated by removing x. Isolated node:
    B = prod_{i=1..|I''|} (h - 1 + k - |I'| + i) * prod_{i=1..|I|-1} (h + k - |I| + i),
    evaluated at the smallest upper node. For regular views these are the exact
    probabilities of ending a uniform linear extension of the view.
    """
    h, k = view.h, view.k
    if h == 0:
        raise LatticeError("empty view has no candidates")
    iso = view.isolated
    n_iso = len(iso)
    weights: list[Fraction] = []
    logs: list[float] = []
    for x in view.upper:
        i_prime = n_iso + newly_isolated_count(view, x)
        base = h - 1 + k - i_prime
        weights.append(Fraction(_rising(base, i_prime), h))
        logs.append(_log_rising(base, i_prime) - math.log(h))
    if n_iso:
        x_hat = view.upper[0]
        s_hat = newly_isolated_count(view, x_hat)
        i_prime = n_iso + s_hat
        base = h - 1 + k - i_prime
        b = _rising(base, s_hat) * _rising(h + k - n_iso, n_iso - 1)
        lb = _log_rising(base, s_hat) + _log_rising(h + k - n_iso, n_iso - 1)
        weights.extend([Fraction(b)] * n_iso)
        logs.extend([lb] * n_iso)
    return SelectionWeights(
        tuple(view.upper) + tuple(iso), tuple(weights), tuple(logs), h, k, n_iso
    )


def _draw(log_weights, u: float) -> int:
    """Index picked by the uniform ``u`` under normalised ``exp(log_weights)``."""
    m = max(log_weights)
    ps = [math.exp(lw - m) for lw in log_weights]
    total = 0.0
    for p in ps:
        total += p
    norm = 0.0
    for p in ps:
        norm += p / total
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise GenerationError(f"selection probabilities sum to {norm!r}")
    target = u * total
    acc = 0.0
    for i, p in enumerate(ps):
        acc += p
        if target < acc:
            return i
    return len(ps) - 1


@dataclass
class Step:
    """One selection made by :func:`generate_twolayer`, as passed to a chooser."""

    phase: int
    orientation: Orientation | None
    candidates: list[int]
    probabilities: list[float]
    weights: SelectionWeights | None


Chooser = Callable[[Step], int]


def generate_twolayer(
    n: int,
    rng: np.random.Generator | None = None,
    chooser: Chooser | None = None,
    trace: list[Step] | None = None,
) -> list[int]:
    """Reference implementation of the 2-layer sampler.

    ``chooser`` (test hook) receives each :class:`Step` with candidates given as
    poset nodes and returns the node to take, replacing the random draw; ``rng``
    may then be omitted. Steps are appended to ``trace`` when given.
    """
    n = check_n(n)
    if chooser is None and rng is None:
        raise ValueError("need an rng or a chooser")
    state = PosetState.full(n)
    lmin: list[int] = []
    lmax: list[int] = []

    def take(phase: int, orientation: Orientation) -> int:
        view = TwoLayerView.from_state(state, orientation)
        w = selection_weights(view)
        nodes = [view.to_node(x) for x in w.candidates]
        step = Step(phase, orientation, nodes, list(w.probabilities), w)
        if trace is not None:
            trace.append(step)
        if chooser is not None:
            node = chooser(step)
            if node not in nodes:
                raise GenerationError(f"chooser returned {format_subset(node)}, not a candidate")
        else:
            node = nodes[_draw(w.log_weights, rng.random())]
        state.remove(node)
        return node

    if len(state):
        while height(state) > 2:
            lmax.append(take(1, "top"))
            lmin.append(take(1, "bottom"))
        while len(state) and height(state) == 2:
            upper_c, lower_c = state.occupied_cardinalities()[::-1]
            if state.layer_counts[upper_c] <= state.layer_counts[lower_c]:
                lmax.append(take(2, "top"))
            else:
                lmin.append(take(2, "bottom"))
        rest = state.nodes()
        while rest:
            m = len(rest)
            step = Step(3, None, list(rest), [1.0 / m] * m, None)
            if trace is not None:
                trace.append(step)
            if chooser is not None:
                node = chooser(step)
                j = rest.index(node)
            else:
                j = int(rng.integers(0, m))
            lmin.append(rest.pop(j))
    return lmin + lmax[::-1]


# ---------------------------------------------------------------------------
# jitted kernel
#
# ``up[s]`` counts the present covers of node s (supersets with one more
# element) and ``down[s]`` the present subsets with one element fewer; both
# are maintained on removal. In view coordinates with ``flip`` the roles swap.


@lru_cache(maxsize=None)
def layer_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Masks sorted by (cardinality, value) and the offset of each cardinality."""
    masks = np.array(sorted(range(1 << n), key=lambda s: (popcount(s), s)), dtype=np.int64)
    offsets = np.zeros(n + 2, dtype=np.int64)
    for s in range(1 << n):
        offsets[popcount(s) + 1] += 1
    return masks, np.cumsum(offsets)


@numba.njit(cache=True, inline="always")
def _view_count(counts, n, flip, c):
    return counts[c] if flip == 0 else counts[n - c]


@numba.njit(cache=True)
def _npred_gap(present, flip, y, ell, masks, offsets):
    """Present supersets of view mask y among the view masks of cardinality ``ell``."""
    c = 0
    for j in range(offsets[ell], offsets[ell + 1]):
        x = masks[j]
        if x & y == y and present[x ^ flip]:
            c += 1
    return c


@numba.njit(cache=True)
def _select(present, up, down, counts, n, flip, masks, offsets, logfact, rng, cand, logw):
    """Draw a maximal element of the two top layers of the (possibly complemented) state."""
    ell = n
    while _view_count(counts, n, flip, ell) == 0:
        ell -= 1
    lo_card = ell - 1
    while lo_card >= 0 and _view_count(counts, n, flip, lo_card) == 0:
        lo_card -= 1
    adjacent = lo_card == ell - 1
    h = _view_count(counts, n, flip, ell)
    k = 0
    n_iso = 0
    if lo_card >= 0:
        k = _view_count(counts, n, flip, lo_card)
        for j in range(offsets[lo_card], offsets[lo_card + 1]):
            y = masks[j]
            if not present[y ^ flip]:
                continue
            if adjacent:
                npred = up[y] if flip == 0 else down[y ^ flip]
            else:
                npred = _npred_gap(present, flip, y, ell, masks, offsets)
            if npred == 0:
                n_iso += 1
    nc = 0
    s_hat = -1
    for j in range(offsets[ell], offsets[ell + 1]):
        x = masks[j]
        if not present[x ^ flip]:
            continue
        s = 0
        if adjacent:
            sub = x
            while sub:
                b = sub & -sub
                y = x ^ b
                if present[y ^ flip] and (up[y] if flip == 0 else down[y ^ flip]) == 1:
                    s += 1
                sub ^= b
        elif lo_card >= 0:
            for jj in range(offsets[lo_card], offsets[lo_card + 1]):
                y = masks[jj]
                if x & y == y and present[y ^ flip]:
                    if _npred_gap(present, flip, y, ell, masks, offsets) == 1:
                        s += 1
        if s_hat < 0:
            s_hat = s
        i_prime = n_iso + s
        base = h - 1 + k - i_prime
        cand[nc] = x
        logw[nc] = (logfact[base + i_prime] - logfact[base]) - np.log(h)
        nc += 1
    if n_iso > 0:
        i_prime = n_iso + s_hat
        base = h - 1 + k - i_prime
        b0 = h + k - n_iso
        lb = (logfact[base + s_hat] - logfact[base]) + (logfact[b0 + n_iso - 1] - logfact[b0])
        for j in range(offsets[lo_card], offsets[lo_card + 1]):
            y = masks[j]
            if not present[y ^ flip]:
                continue
            if adjacent:
                npred = up[y] if flip == 0 else down[y ^ flip]
            else:
                npred = _npred_gap(present, flip, y, ell, masks, offsets)
            if npred == 0:
                cand[nc] = y
                logw[nc] = lb
                nc += 1
    m = logw[0]
    for i in range(1, nc):
        if logw[i] > m:
            m = logw[i]
    total = 0.0
    for i in range(nc):
        logw[i] = np.exp(logw[i] - m)
        total += logw[i]
    norm = 0.0
    for i in range(nc):
        norm += logw[i] / total
    if abs(norm - 1.0) > 1e-12:
        raise AssertionError("selection probabilities do not sum to one")
    target = rng.random() * total
    acc = 0.0
    pick = nc - 1
    for i in range(nc):
        acc += logw[i]
        if target < acc:
            pick = i
            break
    return cand[pick] ^ flip


@numba.njit(cache=True)
def _remove(present, up, down, counts, n, node):
    present[node] = False
    full = (1 << n) - 1
    c = 0
    sub = node
    while sub:
        b = sub & -sub
        up[node ^ b] -= 1
        sub ^= b
        c += 1
    sup = full ^ node
    while sup:
        b = sup & -sup
        down[node | b] -= 1
        sup ^= b
    counts[c] -= 1


@numba.njit(cache=True)
def _height(counts, n):
    occupied = 0
    for c in range(n + 1):
        if counts[c] > 0:
            occupied += 1
    return occupied


@numba.njit(cache=True)
def _twolayer_kernel(n, masks, offsets, logfact, rng, out):
    size = 1 << n
    full = size - 1
    p = size - 2
    present = np.zeros(size, dtype=np.bool_)
    up = np.zeros(size, dtype=np.int64)
    down = np.zeros(size, dtype=np.int64)
    counts = np.zeros(n + 1, dtype=np.int64)
    for s in range(1, full):
        present[s] = True
    for s in range(size):
        c = 0
        t = s
        while t:
            t &= t - 1
            c += 1
        # covers that are nodes: exclude N above and the empty set below
        up[s] = n - c - (1 if c == n - 1 else 0)
        down[s] = c - (1 if c == 1 else 0)
    for j in range(1, n):
        counts[j] = offsets[j + 1] - offsets[j]
    cand = np.empty(size, dtype=np.int64)
    logw = np.empty(size, dtype=np.float64)
    lmax = np.empty(max(p, 1), dtype=np.int64)
    n_min = 0
    n_max = 0
    while _height(counts, n) > 2:
        node = _select(present, up, down, counts, n, 0, masks, offsets, logfact, rng, cand, logw)
        _remove(present, up, down, counts, n, node)
        lmax[n_max] = node
        n_max += 1
        node = _select(present, up, down, counts, n, full, masks, offsets, logfact, rng, cand, logw)
        _remove(present, up, down, counts, n, node)
        out[n_min] = node
        n_min += 1
    while _height(counts, n) == 2:
        top = n
        while counts[top] == 0:
            top -= 1
        below = top - 1
        while counts[below] == 0:
            below -= 1
        if counts[top] <= counts[below]:
            node = _select(present, up, down, counts, n, 0, masks, offsets, logfact, rng, cand, logw)
            lmax[n_max] = node
            n_max += 1
        else:
            node = _select(present, up, down, counts, n, full, masks, offsets, logfact, rng, cand, logw)
            out[n_min] = node
            n_min += 1
        _remove(present, up, down, counts, n, node)
    rest = 0
    for s in range(1, full):
        if present[s]:
            cand[rest] = s
            rest += 1
    while rest > 0:
        j = rng.integers(0, rest)
        out[n_min] = cand[j]
        n_min += 1
        for i in range(j, rest - 1):
            cand[i] = cand[i + 1]
        rest -= 1
    for i in range(n_max):
        out[n_min + i] = lmax[n_max - 1 - i]


def sample_extension(n: int, rng: np.random.Generator) -> np.ndarray:
    """One linear extension from the 2-layer sampler (jitted)."""
    n = check_n(n)
    masks, offsets = layer_table(n)
    out = np.empty(n_nodes(n), dtype=np.int64)
    _twolayer_kernel(n, masks, offsets, LOG_FACTORIAL, rng, out)
    return out


def exact_distribution(n: int) -> dict[tuple[int, ...], Fraction]:
    """Exact output distribution of the 2-layer sampler, by branching over every choice.

    Probabilities use the exact rational weights, so this is the ideal
    sampler's law rather than that of its floating-point rendering. Practical
    for n <= 3 only.
    """
    n = check_n(n)
    if n > 3:
        raise ValueError("exhaustive path enumeration is limited to n <= 3")
    dist: dict[tuple[int, ...], Fraction] = {}

    def explore(prefix: list[int], prob: Fraction) -> None:
        replay = iter(prefix)
        pending: list[tuple[list[int], list[Fraction]]] = []

        class _Branch(Exception):
            pass

        def chooser(step: Step) -> int:
            try:
                return next(replay)
            except StopIteration:
                if step.weights is not None:
                    probs = list(step.weights.exact_probabilities)
                else:
                    probs = [Fraction(1, len(step.candidates))] * len(step.candidates)
                pending.append((step.candidates, probs))
                raise _Branch

        try:
            ext = generate_twolayer(n, chooser=chooser)
        except _Branch:
            cands, probs = pending[0]
            for node, q in zip(cands, probs):
                explore(prefix + [node], prob * q)
            return
        key = tuple(ext)
        dist[key] = dist.get(key, Fraction(0)) + prob

    explore([], Fraction(1))
    return dist
