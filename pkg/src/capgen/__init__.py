"""Uniform and near-uniform random generation of capacities (fuzzy measures).

Subsets of the ground set {1, ..., n} are bitmasks: bit i stands for element
i + 1. A capacity is a vector of 2**n values indexed by mask.
"""

__version__ = "0.1.0"

from .capacity import Capacity, capacity_from_extension, conjugate, validate_capacity
from .evaluation import (
    CentroidReport,
    Histogram,
    SymmetryReport,
    bench,
    empirical_centroid,
    exact_centroid,
    exact_marginal_cdf,
    histogram,
    kl_divergence,
    order_stat_cdf,
    symmetry_report,
)
from .exact import count_extensions, rank_frequencies, sample_extension_exact
from .generators import GENERATORS, generate_batch, sample_capacity
from .lattice import PosetState, canonical_extension, format_subset, parse_subset, validate_extension
from .reference import MarkovConfig, generate_markov, generate_random_node
from .structure import classify_situation, is_balanced, is_closed_under_intersection, is_regular, nx_profile
from .twolayer import TwoLayerView, generate_twolayer, sample_extension, selection_weights

__all__ = [
    "Capacity",
    "CentroidReport",
    "GENERATORS",
    "Histogram",
    "MarkovConfig",
    "PosetState",
    "SymmetryReport",
    "TwoLayerView",
    "bench",
    "canonical_extension",
    "capacity_from_extension",
    "classify_situation",
    "conjugate",
    "count_extensions",
    "empirical_centroid",
    "exact_centroid",
    "exact_marginal_cdf",
    "format_subset",
    "generate_batch",
    "generate_markov",
    "generate_random_node",
    "generate_twolayer",
    "histogram",
    "is_balanced",
    "is_closed_under_intersection",
    "is_regular",
    "kl_divergence",
    "nx_profile",
    "order_stat_cdf",
    "parse_subset",
    "rank_frequencies",
    "sample_capacity",
    "sample_extension",
    "sample_extension_exact",
    "selection_weights",
    "symmetry_report",
    "validate_capacity",
    "validate_extension",
]
