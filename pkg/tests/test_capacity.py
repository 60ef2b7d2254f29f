import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capgen.capacity import (
    Capacity,
    capacity_from_extension,
    capacity_values_from_extension,
    conjugate,
    validate_capacities,
    validate_capacity,
)
from capgen.lattice import LatticeError, canonical_extension
from capgen.reference import generate_random_node
from capgen.rng import sample_stream, snap_to_grid


class FixedDraws:
    def __init__(self, values):
        self.values = np.asarray(values)

    def random(self, size):
        assert size == len(self.values)
        return self.values.copy()


def test_sort_and_assign():
    c = capacity_from_extension([1, 2], FixedDraws([0.7, 0.2]))
    assert c[1] == 0.2 and c[2] == 0.7 and c[0] == 0.0 and c[3] == 1.0


def test_monotone_along_extension():
    rng = np.random.default_rng(0)
    order = canonical_extension(4)
    v = capacity_values_from_extension(order, 4, rng)
    assert np.all(np.diff(v[order]) >= 0)
    assert validate_capacity(Capacity(4, v))


def test_boundary_capacities_valid():
    for n in (1, 2, 5):
        assert validate_capacity(Capacity.minimal(n))
        assert validate_capacity(Capacity.maximal(n))
        assert validate_capacity(Capacity.additive_uniform(n))


def test_range_violation_detected():
    chk = validate_capacity(np.array([0.0, 0.5, 1.1, 1.0]))
    assert not chk and "outside" in chk.reason


def test_monotonicity_violation_detected():
    chk = validate_capacity(np.array([0.0, 0.5, 0.2, 0.4, 0.3, 0.6, 0.7, 1.0]))
    assert not chk


def test_batch_validation_matches_single():
    rng = np.random.default_rng(5)
    rows = rng.random((200, 8))
    rows[:, 0], rows[:, -1] = 0.0, 1.0
    rows[:5] = Capacity.additive_uniform(3).values
    flags = validate_capacities(rows, 3)
    assert list(flags) == [bool(validate_capacity(r, 3)) for r in rows]


def test_capacity_shape_checked():
    with pytest.raises(LatticeError):
        Capacity(2, np.zeros(5))


def test_capacity_immutable_and_hashable():
    c = Capacity.additive_uniform(3)
    with pytest.raises(ValueError):
        c.values[1] = 0.5
    assert hash(c) == hash(Capacity.additive_uniform(3))


def test_conjugation_examples():
    assert conjugate(Capacity.minimal(3)) == Capacity.maximal(3)
    assert conjugate(Capacity.additive_uniform(4)) == Capacity.additive_uniform(4)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([2, 3, 4, 5]))
def test_conjugation_involution_bitwise(seed, n):
    rng = np.random.default_rng(seed)
    c = capacity_from_extension(canonical_extension(n), rng, n)
    cc = conjugate(c)
    assert validate_capacity(cc)
    assert conjugate(cc) == c
    r = Capacity(n, generate_random_node(n, sample_stream(seed, 0)))
    assert conjugate(conjugate(r)) == r


@given(st.floats(min_value=0.0, max_value=1.0))
def test_grid_snap_makes_complement_exact(x):
    y = snap_to_grid(x)
    assert 1.0 - (1.0 - y) == y
