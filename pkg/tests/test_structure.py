import numpy as np
import pytest

from capgen.lattice import LatticeError, parse_subset
from capgen.structure import (
    ConsistencyError,
    analyze,
    binomial_profile,
    classify_situation,
    full_top_view,
    is_balanced,
    is_closed_under_intersection,
    is_regular,
    max_common_successors,
    nx_profile,
    random_view,
)
from capgen.twolayer import TwoLayerView


def view(upper, lower, n=5):
    return TwoLayerView(n, [parse_subset(s) for s in upper.split()], [parse_subset(s) for s in lower.split()])


COUNTEREXAMPLE = ("123 124", "23 24")


def test_profiles():
    v = view(*COUNTEREXAMPLE, n=4)
    assert nx_profile(v, parse_subset("123")).as_dict() == {0: 1, 1: 1}
    full = full_top_view(4, 3)
    for x in full.upper:
        assert nx_profile(full, x).as_dict() == {0: 3, 2: 3}
        assert nx_profile(full, x) == binomial_profile(4, 3)
    assert nx_profile(view("12", "1"), parse_subset("12")).as_dict() == {1: 1}
    with pytest.raises(LatticeError):
        nx_profile(v, parse_subset("23"))


def test_profile_counts_every_lower_node_once():
    rng = np.random.default_rng(2)
    for _ in range(200):
        v = random_view(rng)
        for x in v.upper:
            assert sum(nx_profile(v, x).counts) == v.k


def test_counterexample_regular_not_closed():
    v = view(*COUNTEREXAMPLE, n=4)
    assert is_regular(v) and is_balanced(v)
    assert not is_closed_under_intersection(v)
    c = classify_situation(v)
    assert c.tag == "NotClosed" and c.witness == (parse_subset("123"), parse_subset("124"))


def test_irregular_unbalanced():
    v = view("123 145", "12 13 14")
    assert not is_regular(v) and not is_balanced(v)


def test_single_upper_node():
    v = view("123", "12")
    assert is_balanced(v) and is_regular(v) and is_closed_under_intersection(v)
    assert classify_situation(v).tag == "Situation1-Case1"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_full_top_layers(n):
    v = full_top_view(n, n - 1)
    assert is_regular(v) and is_closed_under_intersection(v)
    c = classify_situation(v)
    h = v.h
    assert c.tag == "Situation1-Case2" and len(c.witness) == h * (h - 1) // 2


@pytest.mark.parametrize("n,ell", [(4, 2), (5, 2), (5, 3), (6, 4)])
def test_full_layers_below_the_top_are_regular(n, ell):
    assert is_regular(full_top_view(n, ell))


def test_situation_two():
    # S = 1, N' = 1234: upper {12, 13, 14}, lower {1} plus singly covered nodes
    v = view("12 13 14", "1 2 3")
    c = classify_situation(v)
    assert c.tag == "Situation2" and c.witness == (parse_subset("1"),)
    assert c.support == parse_subset("1234")


def test_classification_requires_top_adjacent_layers():
    with pytest.raises(ValueError):
        classify_situation(view("123", "1"))
    bottom = TwoLayerView(3, [parse_subset("12")], [parse_subset("1")], orientation="bottom")
    with pytest.raises(ValueError):
        classify_situation(bottom)


def test_common_successor_bound_on_random_views():
    rng = np.random.default_rng(3)
    for _ in range(300):
        assert max_common_successors(random_view(rng)) <= 1


def test_consistency_error_is_assertion():
    assert issubclass(ConsistencyError, AssertionError)


def test_analyze_dict():
    d = analyze(view(*COUNTEREXAMPLE, n=4))
    assert d["regular"] and not d["closed_under_intersection"]
    assert d["situation"]["tag"] == "NotClosed"
    assert d["profiles"]["123"] == {0: 1, 1: 1}


def test_random_view_bounds():
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = random_view(rng, max_nodes=10)
        assert 3 <= v.n <= 6 and 1 <= v.h and len(v) <= 10
        assert all(v.ell - 1 == bin(y).count("1") for y in v.lower)
