import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from pbodylab.cones import cone_from_generators, is_pointed
from pbodylab.lattice import enumerate_box
from pbodylab.semigroups import (
    NotInSemigroup,
    NotStandard,
    PSystem,
    SemigroupIdeal,
    corner_system,
    degree_system,
    frobenius_system,
    full_system,
    ideal_membership,
    make_standard_semigroup,
    minimalize,
    regular_semigroup,
    semigroup_membership,
    validate_p_system,
)

A1 = [(1, 0), (1, 1), (1, 2)]


def test_standard_examples():
    assert make_standard_semigroup([(1, 0), (0, 1)]).is_regular
    S = make_standard_semigroup([(2,), (3,)])
    assert not S.is_normal
    with pytest.raises(NotStandard) as exc:
        make_standard_semigroup([(2,)])
    assert "Z^d" in exc.value.reason


def test_not_standard_reasons():
    with pytest.raises(NotStandard, match="not pointed"):
        make_standard_semigroup([(1, 0), (-1, 0), (0, 1)])
    with pytest.raises(NotStandard, match="full-dimensional"):
        make_standard_semigroup([(1, 1), (2, 2)])
    with pytest.raises(NotStandard, match="Z\\^d"):
        make_standard_semigroup([(2, 0), (0, 1)])


def test_membership_examples():
    assert semigroup_membership(regular_semigroup(2), (3, 5))
    A = make_standard_semigroup(A1)
    assert not semigroup_membership(A, (1, 3))
    assert semigroup_membership(A, (3, 5))
    S = make_standard_semigroup([(2,), (3,)])
    assert not semigroup_membership(S, (1,))
    assert semigroup_membership(S, (5,))
    assert [n for n in range(12) if semigroup_membership(S, (n,))] == [0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]


def test_non_normal_2d_membership_matches_search():
    gens = [(1, 0), (1, 2), (1, 3)]  # misses (1, 1) and others
    S = make_standard_semigroup(gens)
    assert not S.is_normal
    for u in enumerate_box((0, 0), (6, 19)):
        assert S.contains(u) == oracles.semigroup_member(gens, u), u


def test_ideal_membership_examples():
    N2 = regular_semigroup(2)
    T = SemigroupIdeal(N2, [(1, 1)])
    assert ideal_membership(T, (2, 3))
    assert not ideal_membership(T, (0, 5))
    A = make_standard_semigroup(A1)
    assert not ideal_membership(SemigroupIdeal(A, [(1, 0)]), (2, 4))


def test_minimalize_examples():
    N2 = regular_semigroup(2)
    assert minimalize(N2, [(2, 0), (2, 1)]) == [(2, 0)]
    assert minimalize(N2, [(1, 0), (0, 1), (1, 1)]) == [(0, 1), (1, 0)]
    A = make_standard_semigroup(A1)
    assert minimalize(A, [(1, 0), (2, 4)]) == [(1, 0), (2, 4)]
    with pytest.raises(NotInSemigroup):
        minimalize(A, [(0, 1)])


def test_validate_examples():
    N2 = regular_semigroup(2)
    m = SemigroupIdeal(N2, [(1, 0), (0, 1)])
    assert validate_p_system(frobenius_system(m, 2), 6).ok
    A = make_standard_semigroup(A1)
    assert validate_p_system(frobenius_system(SemigroupIdeal(A, A1), 3), 4).ok
    assert validate_p_system(degree_system(N2, 2), 6).ok
    bad = validate_p_system(degree_system(N2, 2, lambda q: q * q), 4)
    assert not bad.ok
    v = bad.violation
    # p * generator must be the reported witness, and it must really be missing
    assert v.witness == tuple(2 * x for x in v.generator)
    q = 2 ** v.e
    assert sum(v.generator) >= q * q and sum(v.witness) < (2 * q) ** 2
    with pytest.raises(ValueError):
        validate_p_system(full_system(N2, 2), 0)


def test_psystem_requires_prime():
    with pytest.raises(ValueError):
        PSystem(regular_semigroup(1), 4, lambda e: [(e,)])


def test_psystem_caches():
    calls = []

    def rule(e):
        calls.append(e)
        return [(2 ** e, 0), (0, 2 ** e)]

    T = PSystem(regular_semigroup(2), 2, rule)
    assert T.ideal(3) is T.ideal(3)
    assert calls == [3]


semigroups = st.sampled_from([[(1, 0), (0, 1)], A1, [(1, 0), (1, 2), (1, 3)], [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
                              [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1)]])


@settings(max_examples=60, deadline=None)
@given(semigroups, st.randoms(use_true_random=False))
def test_ideal_property(gens, rnd):
    S = make_standard_semigroup(gens)
    elems = [tuple(sum(c * g[i] for c, g in zip(cs, S.generators)) for i in range(S.dim))
             for cs in itertools.product(range(3), repeat=len(S.generators))]
    tgens = rnd.sample(elems, min(3, len(elems)))
    T = SemigroupIdeal(S, tgens)
    for t in T.generators:
        for s in rnd.sample(elems, 5):
            assert ideal_membership(T, tuple(a + b for a, b in zip(t, s)))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda d: st.lists(st.tuples(*[st.integers(0, 6)] * d), min_size=1, max_size=6)))
def test_minimalize_idempotent_and_membership_preserving(gens):
    d = len(gens[0])
    S = regular_semigroup(d)
    mins = minimalize(S, gens)
    assert minimalize(S, mins) == mins
    for u in enumerate_box((0,) * d, (8,) * d):
        assert oracles.in_orthant_ideal(u, gens) == oracles.in_orthant_ideal(u, mins)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 4), st.integers(0, 4)), min_size=1, max_size=3, unique=True))
def test_make_standard_matches_difference_oracle(gens):
    cone = cone_from_generators(gens)
    assume(cone.full_dimensional and is_pointed(cone))
    # differences of S-elements are exactly the integer combinations of gens;
    # entries <= 4 bound the inverse, so box points need coefficients within 16
    diffs = {tuple(sum(c * g[i] for c, g in zip(cs, gens)) for i in range(2))
             for cs in itertools.product(range(-20, 21), repeat=len(gens))}
    covers = all(u in diffs for u in enumerate_box((-2, -2), (3, 3)))
    try:
        make_standard_semigroup(gens)
        accepted = True
    except NotStandard:
        accepted = False
    assert accepted == covers


def test_corner_system_is_p_system():
    N2 = regular_semigroup(2)
    from fractions import Fraction
    T = corner_system(N2, 2, [(Fraction(1, 3), 0), (0, Fraction(1, 2))])
    assert validate_p_system(T, 8).ok
    assert T.ideal(3).generators == ((0, 4), (3, 0))


def test_membership_thread_safe():
    from concurrent.futures import ThreadPoolExecutor
    gens = [(1, 0), (1, 2), (1, 3)]
    pts = list(enumerate_box((0, 0), (10, 31)))
    ref = [oracles.semigroup_member(gens, u) for u in pts]
    S = make_standard_semigroup(gens)
    with ThreadPoolExecutor(8) as ex:
        got = list(ex.map(S.contains, pts))
    assert got == ref
