from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbodylab.lattice import (
    DimensionError,
    Ordering,
    WeightVector,
    a_compare,
    box_array,
    enumerate_box,
    split_range,
)


def test_a_compare_examples():
    assert a_compare(WeightVector.of(100, 141), (1, 0), (0, 1)) == Ordering.LESS
    assert a_compare(WeightVector.of(Fraction(1, 3), 2), (3, 7), (3, 7)) == Ordering.EQUAL
    # inner products tie at 2, broken lexicographically
    assert a_compare(WeightVector.of(1, 1), (2, 0), (1, 1)) == Ordering.GREATER


def test_a_compare_dimension_mismatch():
    with pytest.raises(DimensionError):
        a_compare(WeightVector.of(1, 1), (1, 0, 0), (0, 1))


def test_enumerate_box_examples():
    assert len(list(enumerate_box((0, 0), (2, 3)))) == 6
    assert list(enumerate_box((0,), (0,))) == []
    assert len(list(enumerate_box((0, 0, 0), (5, 5, 5)))) == 125
    assert list(enumerate_box((3, 0), (1, 2))) == []


def test_box_array_matches_stream():
    pts = [tuple(r) for r in box_array((-1, 2), (2, 4)).tolist()]
    assert pts == list(enumerate_box((-1, 2), (2, 4)))


def test_split_range_covers():
    parts = split_range(-3, 10, 4)
    assert parts[0][0] == -3 and parts[-1][1] == 10
    assert all(a[1] == b[0] for a, b in zip(parts, parts[1:]))


weights = st.lists(st.fractions(min_value=Fraction(1, 10), max_value=10), min_size=1, max_size=4)


@st.composite
def triples(draw):
    a = draw(weights)
    d = len(a)
    pt = st.tuples(*[st.integers(-20, 20)] * d)
    return WeightVector(tuple(a)), draw(pt), draw(pt), draw(pt)


@settings(max_examples=300, deadline=None)
@given(triples())
def test_a_compare_total_order(t):
    a, u, v, w = t
    uv, vu = a_compare(a, u, v), a_compare(a, v, u)
    assert uv == -vu
    assert (uv == Ordering.EQUAL) == (u == v)
    if uv == Ordering.LESS and a_compare(a, v, w) == Ordering.LESS:
        assert a_compare(a, u, w) == Ordering.LESS


@settings(max_examples=200, deadline=None)
@given(triples())
def test_a_compare_translation_invariant(t):
    a, u, v, s = t
    shifted = a_compare(a, tuple(x + y for x, y in zip(u, s)), tuple(x + y for x, y in zip(v, s)))
    assert shifted == a_compare(a, u, v)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=3))
def test_enumerate_box_count(sides):
    lo = tuple(a for a, _ in sides)
    hi = tuple(b for _, b in sides)
    expect = 1
    for a, b in sides:
        expect *= max(0, b - a)
    assert len(list(enumerate_box(lo, hi))) == expect
