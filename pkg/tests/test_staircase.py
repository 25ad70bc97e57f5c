import itertools
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pbodylab import staircase

corner_lists = st.integers(1, 3).flatmap(
    lambda d: st.lists(st.tuples(*[st.integers(0, 6)] * d), min_size=1, max_size=7))


@settings(max_examples=80, deadline=None)
@given(corner_lists)
def test_column_thresholds_brute_force(gens):
    d = len(gens[0])
    hi = (7,) * (d - 1)
    M = staircase.column_thresholds(np.array(gens), hi, 99)
    for x in itertools.product(*[range(h) for h in hi]):
        cands = [g[-1] for g in gens if all(a <= b for a, b in zip(g[:-1], x))]
        assert M[x] == min(cands + [99])


@settings(max_examples=60, deadline=None)
@given(corner_lists)
def test_staircase_volume_is_colength_with_pure_powers(gens):
    d = len(gens[0])
    full = gens + [tuple(7 if i == k else 0 for i in range(d)) for k in range(d)]
    assert staircase.staircase_volume(full, (7,) * d) == oracles.orthant_colength(full, d)


@settings(max_examples=60, deadline=None)
@given(corner_lists, st.fractions(min_value=1, max_value=12))
def test_union_volume_paths_agree(gens, alpha):
    d = len(gens[0])
    a = [Fraction(1)] + [Fraction(k + 2, k + 1) for k in range(d - 1)]
    corners = [tuple(Fraction(x, 2) for x in g) for g in gens]
    by_ie = staircase.union_volume_below(corners, a, alpha)
    hi = tuple(alpha / w for w in a)
    gap = sum((staircase.box_halfspace_volume(lo, up, a, alpha)
               for lo, up in staircase.complement_boxes(corners, hi)), Fraction(0))
    assert by_ie == staircase.orthant_volume_below(a, alpha) - gap


def test_union_many_corners_exact():
    for q in (4, 32, 1024):
        corners = [(Fraction(k, q), Fraction(q - k, q)) for k in range(q + 1)]
        v = staircase.union_volume_below(corners, [1, 1], 2)
        assert v == Fraction(3, 2) - Fraction(1, 2 * q)


def test_complement_boxes_disjoint_cover():
    gens = [(3, 0, 1), (1, 1, 1), (0, 2, 0), (2, 2, 2), (0, 0, 3)]
    boxes = staircase.complement_boxes(gens, (4, 4, 4))
    cells = set()
    for lo, up in boxes:
        for u in itertools.product(*[range(a, b) for a, b in zip(lo, up)]):
            assert u not in cells
            cells.add(u)
    expect = {u for u in itertools.product(range(4), repeat=3) if not oracles.in_orthant_ideal(u, gens)}
    assert cells == expect


def test_box_halfspace_volume_unit_square():
    assert staircase.box_halfspace_volume((0, 0), (1, 1), [1, 1], 1) == Fraction(1, 2)
    assert staircase.box_halfspace_volume((0, 0), (1, 1), [1, 1], 3) == 1
