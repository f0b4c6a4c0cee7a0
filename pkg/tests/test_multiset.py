import pytest
from hypothesis import given
from hypothesis import strategies as st

from celx.multiset import Multiset, sub_multisets, sum_multisets

small = st.lists(st.integers(0, 4), max_size=8).map(Multiset)


def test_counts_and_sorted_items():
    m = Multiset("bab")
    assert m.count("b") == 2 and m["a"] == 1 and m["z"] == 0
    assert m.items() == (("a", 1), ("b", 2))
    assert list(m) == ["a", "b", "b"]
    assert len(m) == 3


def test_mapping_constructor_rejects_negative():
    with pytest.raises(ValueError):
        Multiset({"a": -1})
    assert Multiset({"a": 0}) == Multiset()


def test_difference_requires_containment():
    assert Multiset("aab") - Multiset("a") == Multiset("ab")
    with pytest.raises(ValueError):
        Multiset("a") - Multiset("aa")


def test_sub_multisets_enumerates_all():
    subs = list(sub_multisets(Multiset("aab")))
    assert len(subs) == 6 and len(set(subs)) == 6


@given(small, small)
def test_union_then_difference(a, b):
    assert (a + b) - b == a
    assert a <= a + b
    assert len(a + b) == len(a) + len(b)


@given(st.lists(small, max_size=4))
def test_sum_matches_fold(parts):
    total = Multiset()
    for p in parts:
        total = total + p
    assert sum_multisets(parts) == total


@given(small, small)
def test_equal_multisets_hash_alike(a, b):
    if sorted(a) == sorted(b):
        assert a == b and hash(a) == hash(b)
