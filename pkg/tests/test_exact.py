from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from capgen.exact import (
    ResourceLimitError,
    count_extensions,
    enumerate_extensions,
    ideal_table,
    rank_frequencies,
    sample_extension_exact,
)
from capgen.lattice import parse_subset, validate_extension

# number of linear extensions of the subset lattice minus top and bottom
KNOWN_COUNTS = {1: 1, 2: 2, 3: 48, 4: 1680384, 5: 14807804035657359360}


@pytest.mark.parametrize("n", sorted(KNOWN_COUNTS))
def test_counts(n):
    assert count_extensions(n) == KNOWN_COUNTS[n]


def test_count_rejects_large_n():
    with pytest.raises(ResourceLimitError):
        count_extensions(7)


def test_table_size_and_totals():
    t = ideal_table(4)
    # Dedekind number M(4) = 168 down-sets of the full lattice, minus the empty and full ones
    assert len(t) == 166
    assert t.down(t.full_ideal) == t.total == t.up[t.empty_ideal]


def test_first_node_probabilities_are_symmetric():
    t = ideal_table(4)
    probs = [t.first_node_probability(1 << i) for i in range(4)]
    assert probs == [Fraction(1, 4)] * 4
    assert t.first_node_probability(parse_subset("12")) == 0


def test_rank_frequencies_n3():
    assert rank_frequencies(3, parse_subset("1")) == [16, 16, 12, 4, 0, 0]
    assert rank_frequencies(3, parse_subset("12")) == [0, 0, 4, 12, 16, 16]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rank_frequencies_sum_to_count(n):
    for s in range(1, (1 << n) - 1):
        assert sum(rank_frequencies(n, s)) == count_extensions(n)


def test_enumeration_matches_count():
    assert len(enumerate_extensions(3)) == 48
    with pytest.raises(ResourceLimitError):
        enumerate_extensions(4)


def test_sampler_outputs_valid_extensions():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 4, 5):
        for _ in range(20):
            assert validate_extension(sample_extension_exact(n, rng), n)


def test_sampler_uniform_at_n3():
    rng = np.random.default_rng(11)
    counts = Counter(tuple(sample_extension_exact(3, rng)) for _ in range(9600))
    assert len(counts) == 48
    obs = [counts[e] for e in enumerate_extensions(3)]
    assert stats.chisquare(obs).pvalue > 0.001
