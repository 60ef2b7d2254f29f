from collections import Counter

import numpy as np
import pytest

from capgen.capacity import validate_capacity
from capgen.lattice import canonical_extension, parse_subset, validate_extension
from capgen.reference import MarkovConfig, generate_markov, generate_random_node, markov_step
from capgen.rng import sample_stream


def test_config_defaults_and_validation():
    assert MarkovConfig().steps_for(3) == 216
    assert MarkovConfig(10).steps_for(5) == 10
    with pytest.raises(ValueError):
        MarkovConfig(0)


def test_comparable_swap_rejected():
    order = np.array([1, 2, 3, 4, 5, 6])  # 1, 2, 12, 3, 13, 23
    assert not markov_step(order, 1)  # 2 below 12
    assert not markov_step(order, 3)  # 3 below 13
    assert list(order) == [1, 2, 3, 4, 5, 6]
    assert markov_step(order, 2)  # 12 and 3 are incomparable
    assert validate_extension(order, 3)


def test_incomparable_swap_accepted():
    order = np.array(canonical_extension(3))
    assert markov_step(order, 0)
    assert validate_extension(order, 3)


def test_chain_keeps_validity():
    for n in (2, 3, 4, 5):
        for i in range(30):
            order = generate_markov(n, MarkovConfig(50 * i + 1), sample_stream(3, i))
            assert validate_extension(order, n)


def test_two_state_chain_balanced():
    rng = np.random.default_rng(0)
    c = Counter(tuple(generate_markov(2, MarkovConfig(25), rng)) for _ in range(4000))
    assert set(c) == {(1, 2), (2, 1)}
    assert abs(c[(1, 2)] / 4000 - 0.5) < 0.04


def test_markov_needs_n2():
    with pytest.raises(ValueError):
        generate_markov(1, rng=np.random.default_rng(0))


def test_transition_matrix_symmetric_at_n3():
    # single-step transition counts between extensions; symmetric kernel => symmetric counts
    rng = np.random.default_rng(4)
    order = np.array(canonical_extension(3))
    counts = Counter()
    for _ in range(200_000):
        before = tuple(order)
        i = int(rng.integers(0, 2 * (len(order) - 1)))
        if i < len(order) - 1:
            markov_step(order, i)
        after = tuple(order)
        if before != after:
            counts[(before, after)] += 1
    for (a, b), c in counts.items():
        back = counts[(b, a)]
        assert abs(c - back) <= 5 * np.sqrt(c + back) + 5


def test_random_node_valid_and_on_grid():
    for n in (1, 2, 3, 4, 6):
        for i in range(30):
            v = generate_random_node(n, sample_stream(8, i))
            assert validate_capacity(v, n)
            assert np.array_equal(1.0 - (1.0 - v), v)


def test_random_node_antichain_marginals_uniform():
    vals = np.array([generate_random_node(2, sample_stream(1, i)) for i in range(4000)])
    for s in (1, 2):
        assert abs(vals[:, s].mean() - 0.5) < 0.02
        assert abs(vals[:, s].var() - 1 / 12) < 0.01
    assert parse_subset("12") == 3 and np.all(vals[:, 3] == 1.0)
