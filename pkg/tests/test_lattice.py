from itertools import permutations

import numpy as np
import pytest

from capgen.exact import enumerate_extensions
from capgen.lattice import (
    LatticeError,
    PosetState,
    canonical_extension,
    complement,
    format_subset,
    height,
    parse_subset,
    present_predecessors,
    present_successors,
    validate_extension,
    validate_extensions,
)


def test_subset_round_trip():
    for s in range(1, 64):
        assert parse_subset(format_subset(s)) == s
    assert parse_subset("134") == 0b1101
    assert complement(parse_subset("13"), 4) == parse_subset("24")


def test_parse_rejects_garbage():
    with pytest.raises(LatticeError):
        parse_subset("1a")


def test_canonical_extension_is_valid():
    for n in range(1, 8):
        order = canonical_extension(n)
        assert len(order) == (1 << n) - 2
        assert validate_extension(order, n)


def test_validate_extension_reports_first_violation():
    order = [3, 1, 2, 4, 5, 6]
    chk = validate_extension(order, 3)
    assert not chk
    assert chk.reason == "2 at position 2 comes after its superset 12 at position 0"


def test_validate_rejects_wrong_content():
    assert not validate_extension([1, 1], 2)
    assert not validate_extension([1, 2, 3], 2)


def test_validate_agrees_with_brute_force_at_n3():
    valid = set(enumerate_extensions(3))
    assert len(valid) == 48
    perms = list(permutations(range(1, 7)))
    flags = validate_extensions(np.array(perms), 3)
    for perm, flag in zip(perms, flags):
        assert bool(validate_extension(perm, 3)) == (perm in valid) == bool(flag)


def test_state_layers_and_covers():
    st = PosetState.full(3)
    assert height(st) == 2
    assert present_predecessors(st, parse_subset("1")) == {parse_subset("12"), parse_subset("13")}
    st.remove(parse_subset("12"))
    assert present_predecessors(st, parse_subset("1")) == {parse_subset("13")}
    assert present_successors(st, parse_subset("13")) == {parse_subset("1"), parse_subset("3")}
    comp = st.complemented()
    assert parse_subset("3") not in comp and parse_subset("12") in comp


def test_removed_node_has_no_covers():
    st = PosetState.full(3)
    st.remove(1)
    with pytest.raises(LatticeError):
        present_predecessors(st, 1)
