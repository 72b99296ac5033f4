from __future__ import annotations

from hypothesis import given, settings, strategies as st

from grpdyn.grpset import GrpSet

WINDOW = range(-60, 60)


@st.composite
def grpsets(draw):
    lo = draw(st.integers(-8, 4))
    hi = lo + draw(st.integers(0, 8))
    mid = draw(st.sets(st.integers(lo, hi), max_size=6))
    lp = draw(st.integers(1, 4))
    rp = draw(st.integers(1, 4))
    lres = draw(st.sets(st.integers(0, lp - 1), max_size=lp))
    rres = draw(st.sets(st.integers(0, rp - 1), max_size=rp))
    return GrpSet(lo, hi, mid, lp, lres, rp, rres)


def members(g):
    return {n for n in WINDOW if n in g}


def test_basic_constructors():
    assert GrpSet.coset(0, 2) == GrpSet.from_func(lambda n: n % 2 == 0, 0, 0, 2, 2)
    assert GrpSet.finite([1, 5]).elements() == [1, 5]
    assert GrpSet.empty().is_empty()
    assert GrpSet.all().is_all()
    assert 7 in GrpSet.ray(3, 2) and 1 not in GrpSet.ray(3, 2)
    assert GrpSet.interval(-2, 2).elements() == [-2, -1, 0, 1, 2]


def test_syndetic_and_bounds():
    assert GrpSet.coset(1, 3).is_syndetic()
    assert not GrpSet.ray(0, 1).is_syndetic()
    assert GrpSet.ray(0, 1).bounded_below()
    assert not GrpSet.ray(0, 1).bounded_above()
    assert GrpSet.finite([4]).is_finite()


@settings(max_examples=200, deadline=None)
@given(grpsets(), grpsets())
def test_boolean_ops_match_membership(a, b):
    assert members(a | b) == members(a) | members(b)
    assert members(a & b) == members(a) & members(b)
    assert members(a - b) == members(a) - members(b)
    assert members(a ^ b) == members(a) ^ members(b)
    assert members(a.complement()) == set(WINDOW) - members(a)


@settings(max_examples=200, deadline=None)
@given(grpsets(), grpsets())
def test_lattice_laws(a, b):
    assert a | b == b | a
    assert a & b == b & a
    assert (a | b).complement() == a.complement() & b.complement()
    assert a.complement().complement() == a
    assert (a & b).issubset(a)
    assert a.issubset(a | b)


@settings(max_examples=150, deadline=None)
@given(grpsets(), st.integers(-10, 10))
def test_shift_and_neg(a, k):
    assert {n for n in range(-40, 40) if n in a.shift(k)} == {n + k for n in range(-50, 50) if n in a} & set(range(-40, 40))
    assert {n for n in range(-40, 40) if n in a.neg()} == {n for n in range(-40, 40) if -n in a}
    assert a.neg().neg() == a


@settings(max_examples=80, deadline=None)
@given(grpsets(), grpsets())
def test_sumset_against_window(a, b):
    s = a + b
    # every sum of small members lies in the sumset
    for x in range(-15, 15):
        if x in a:
            for y in range(-15, 15):
                if y in b:
                    assert x + y in s
    if a.is_empty() or b.is_empty():
        assert s.is_empty()


@settings(max_examples=100, deadline=None)
@given(grpsets())
def test_json_round_trip(a):
    assert GrpSet.from_json(a.to_json()) == a
