"""Uniformity diagnostics for samples of capacities.

Samples are passed around as 2-D arrays of shape (count, 2**n) whose columns
are indexed by subset mask, or as lists of :class:`Capacity`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .capacity import Capacity
from .generators import GENERATORS, generate_batch
from .exact import MAX_TABLE_N, ResourceLimitError, count_extensions, rank_frequencies
from .lattice import LatticeError, check_n, format_subset, full_mask, n_nodes, popcount

DEFAULT_BINS = 50
KL_EPSILON = 1e-10
MIN_SYMMETRY_SAMPLES = 1000


class EvaluationError(ValueError):
    pass


def as_sample_matrix(samples) -> tuple[np.ndarray, int]:
    """Normalise a list of capacities or a value matrix to (matrix, n)."""
    if isinstance(samples, np.ndarray):
        values = np.asarray(samples, dtype=np.float64)
        if values.ndim != 2:
            raise EvaluationError(f"expected a 2-D sample matrix, got shape {values.shape}")
        if values.shape[0] == 0:
            raise EvaluationError("no samples")
        n = values.shape[1].bit_length() - 1
        if values.shape[1] != 1 << n:
            raise EvaluationError(f"{values.shape[1]} columns is not a power of two")
        return values, n
    samples = list(samples)
    if not samples:
        raise EvaluationError("no samples")
    ns = {c.n for c in samples}
    if len(ns) != 1:
        raise EvaluationError(f"samples mix ground set sizes {sorted(ns)}")
    return np.stack([c.values for c in samples]), ns.pop()


# -- order statistics and exact marginals -------------------------------------


def order_stat_cdf(k: int, m: int, alpha):
    """CDF of the k-th smallest of m i.i.d. Uniform[0,1] variables, i.e. Beta(k, m-k+1)."""
    if m < 1 or not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    a = np.asarray(alpha, dtype=np.float64)
    if np.any((a < 0.0) | (a > 1.0)) or np.any(np.isnan(a)):
        raise ValueError("alpha must lie in [0, 1]")
    out = special.betainc(k, m - k + 1, a)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _rank_table(n: int, s: int) -> tuple[int, ...]:
    return tuple(rank_frequencies(n, s))


def _check_exact_n(n: int) -> int:
    n = check_n(n)
    if n > MAX_TABLE_N:
        raise ResourceLimitError(f"exact marginals are available for n <= {MAX_TABLE_N}")
    return n


def _check_node(n: int, s: int) -> None:
    if not 0 < s < full_mask(n):
        raise LatticeError(f"{s} is not a nonempty proper subset for n={n}")


def exact_marginal_cdf(n: int, s: int, alpha):
    """P(mu(S) <= alpha) for mu uniform on the capacity polytope.

    Mixture over ranks k of the k-th order statistic of 2**n - 2 uniforms,
    weighted by the fraction of linear extensions that place S at rank k.
    """
    n = _check_exact_n(n)
    _check_node(n, s)
    freqs = _rank_table(n, s)
    m = n_nodes(n)
    total = count_extensions(n)
    a = np.asarray(alpha, dtype=np.float64)
    acc = np.zeros_like(a)
    for k, f in enumerate(freqs, start=1):
        if f:
            acc = acc + (f / total) * order_stat_cdf(k, m, a)
    return float(acc) if acc.ndim == 0 else acc


# -- centroids -----------------------------------------------------------------


@dataclass(frozen=True)
class CentroidReport:
    """Centroid coordinates keyed by subset mask, optionally scored against a reference."""

    n: int
    coordinates: dict[int, float]
    squared_error: float | None = None
    exact: dict[int, Fraction] | None = field(default=None, repr=False)

    def vector(self) -> np.ndarray:
        return np.array([self.coordinates[s] for s in range(1, full_mask(self.n))])

    def by_cardinality(self) -> dict[int, list[float]]:
        out: dict[int, list[float]] = {}
        for s, v in self.coordinates.items():
            out.setdefault(popcount(s), []).append(v)
        return out

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "coordinates": {format_subset(s): v for s, v in sorted(self.coordinates.items())},
        }
        if self.squared_error is not None:
            d["squared_error"] = self.squared_error
        return d


@lru_cache(maxsize=None)
def exact_centroid_fractions(n: int) -> dict[int, Fraction]:
    """Exact rational centroid: the vertex of rank k has coordinate k / (p + 1)."""
    n = _check_exact_n(n)
    p = n_nodes(n)
    total = count_extensions(n)
    out = {}
    for s in range(1, full_mask(n)):
        weighted = sum(k * f for k, f in enumerate(_rank_table(n, s), start=1))
        out[s] = Fraction(weighted, total * (p + 1))
    return out


def exact_centroid(n: int) -> CentroidReport:
    fr = exact_centroid_fractions(n)
    return CentroidReport(n, {s: float(v) for s, v in fr.items()}, None, dict(fr))


def empirical_centroid(samples, reference: CentroidReport | None = None) -> CentroidReport:
    """Coordinate-wise mean; with a reference, also the sum of squared deviations from it."""
    values, n = as_sample_matrix(samples)
    mean = values.mean(axis=0)
    coords = {s: float(mean[s]) for s in range(1, full_mask(n))}
    err = None
    if reference is not None:
        if reference.n != n:
            raise EvaluationError(f"reference is for n={reference.n}, samples have n={n}")
        err = float(sum((coords[s] - reference.coordinates[s]) ** 2 for s in coords))
    return CentroidReport(n, coords, err)


# -- histograms and KL ---------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    bins: int
    edges: np.ndarray
    mass: np.ndarray
    sample_count: int | None  # None for exact (model) histograms

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if len(self.mass) != self.bins or len(self.edges) != self.bins + 1:
            raise ValueError("edges/mass do not match the bin count")
        if abs(float(np.sum(self.mass)) - 1.0) > 1e-12:
            raise ValueError(f"histogram mass sums to {float(np.sum(self.mass))!r}")


def _edges(bins: int) -> np.ndarray:
    if bins < 2:
        raise ValueError("bins must be >= 2")
    return np.linspace(0.0, 1.0, bins + 1)


def histogram(samples, s: int, bins: int = DEFAULT_BINS) -> Histogram:
    """Equal-width histogram of mu(S) over [0, 1]; the last bin is closed on the right."""
    edges = _edges(bins)
    values, n = as_sample_matrix(samples)
    _check_node(n, s)
    counts, _ = np.histogram(values[:, s], bins=edges)
    return Histogram(bins, edges, counts / counts.sum(), int(values.shape[0]))


def exact_histogram(n: int, s: int, bins: int = DEFAULT_BINS) -> Histogram:
    """Bin probabilities of the exact marginal of mu(S)."""
    edges = _edges(bins)
    cdf = exact_marginal_cdf(n, s, edges)
    mass = np.diff(cdf)
    mass = np.clip(mass, 0.0, None)
    return Histogram(bins, edges, mass / mass.sum(), None)


def kl_divergence(p: Histogram, q: Histogram, eps: float = KL_EPSILON) -> float:
    """D(p || q) in nats after adding ``eps`` to every bin and renormalising."""
    if p.bins != q.bins or not np.array_equal(p.edges, q.edges):
        raise ValueError("histograms have different bin layouts")
    a = p.mass + eps
    b = q.mass + eps
    a = a / a.sum()
    b = b / b.sum()
    return max(float(np.sum(a * np.log(a / b))), 0.0)


def kl_table(samples, bins: int = DEFAULT_BINS, eps: float = KL_EPSILON) -> dict[int, float]:
    """KL(exact || empirical) for every nonempty proper subset."""
    values, n = as_sample_matrix(samples)
    _check_exact_n(n)
    return {
        s: kl_divergence(exact_histogram(n, s, bins), histogram(values, s, bins), eps)
        for s in range(1, full_mask(n))
    }


def kl_by_cardinality(table: dict[int, float]) -> dict[int, float]:
    """Mean KL over the subsets of each cardinality."""
    groups: dict[int, list[float]] = {}
    for s, v in table.items():
        groups.setdefault(popcount(s), []).append(v)
    return {c: float(np.mean(vs)) for c, vs in sorted(groups.items())}


# -- symmetry ------------------------------------------------------------------


def ks_distance(x: np.ndarray, y: np.ndarray) -> float:
    return float(stats.ks_2samp(x, y).statistic)


@dataclass(frozen=True)
class Metric:
    """One row of a report: what was measured, on which subset, and whether it passed."""

    name: str
    subset: int | None
    value: float
    threshold: float | None = None
    passed: bool | None = None

    def to_dict(self) -> dict:
        return {
            "metric": self.name,
            "subset": None if self.subset is None else format_subset(self.subset),
            "value": self.value,
            "threshold": self.threshold,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class SymmetryReport:
    """Two-sample KS distances probing the distributional symmetries of uniform capacities.

    ``cardinality[c]`` is the largest distance between marginals of two
    subsets of size c; ``complement[S]`` compares mu(S) with 1 - mu(N minus S).
    """

    n: int
    sample_count: int
    threshold: float
    cardinality: dict[int, float]
    complement: dict[int, float]

    @property
    def max_distance(self) -> float:
        return max([*self.cardinality.values(), *self.complement.values(), 0.0])

    @property
    def passed(self) -> bool:
        return self.max_distance < self.threshold

    def metrics(self) -> list[Metric]:
        out = []
        for c, v in self.cardinality.items():
            ok = v < self.threshold
            out.append(Metric(f"ks_same_cardinality_{c}", None, v, self.threshold, ok))
        for s, v in self.complement.items():
            out.append(Metric("ks_conjugate", s, v, self.threshold, v < self.threshold))
        return out


def symmetry_report(samples, threshold: float = 0.02) -> SymmetryReport:
    values, n = as_sample_matrix(samples)
    count = values.shape[0]
    if count < MIN_SYMMETRY_SAMPLES:
        raise EvaluationError(f"symmetry report needs >= {MIN_SYMMETRY_SAMPLES} samples, got {count}")
    full = full_mask(n)
    columns = {s: np.sort(values[:, s]) for s in range(1, full)}
    card = {}
    for c in range(1, n):
        group = [s for s in columns if popcount(s) == c]
        worst = 0.0
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                worst = max(worst, ks_distance(columns[a], columns[b]))
        card[c] = worst
    comp = {s: ks_distance(columns[s], 1.0 - columns[full ^ s]) for s in columns}
    return SymmetryReport(n, count, threshold, card, comp)


# -- timing --------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    count: int
    wall_seconds: float

    @property
    def per_sample_seconds(self) -> float:
        return self.wall_seconds / self.count

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "count": self.count,
            "wall_seconds": self.wall_seconds,
            "per_sample_seconds": self.per_sample_seconds,
        }


def bench(
    methods: Sequence[str],
    n: int,
    count: int,
    seed: int | None = None,
    markov_steps: int | None = None,
    run: Callable[[str, int, int], object] | None = None,
) -> list[BenchRow]:
    """Time the generation of ``count`` capacities by each method, one after another.

    A one-sample warm-up call precedes each timing so that compilation is not
    counted. ``run(method, n, count)`` replaces the registered generators.
    """
    if count < 1:
        raise EvaluationError("count must be >= 1")
    if not methods:
        raise EvaluationError("no methods to benchmark")
    if run is None:
        unknown = [m for m in methods if m not in GENERATORS]
        if unknown:
            raise EvaluationError(f"unknown generator(s): {', '.join(unknown)}")
        kw = {"markov_steps": markov_steps}
        if seed is not None:
            kw["seed"] = seed
        run = lambda m, n, c: generate_batch(m, n, c, **kw)  # noqa: E731
    rows = []
    for m in methods:
        run(m, n, 1)
        t0 = time.perf_counter()
        run(m, n, count)
        rows.append(BenchRow(m, n, count, time.perf_counter() - t0))
    return rows
