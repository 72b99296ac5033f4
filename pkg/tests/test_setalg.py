from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grpdyn.grpset import GrpSet
from grpdyn.setalg import (
    AmbientMismatch,
    Cell,
    LineSet,
    MalformedCell,
    Point,
    R,
    SetExpr,
    irrational_between,
    parse_point,
    rational_between,
)

FLAVORS = ["full", "rat", "irr"]
SAMPLES = [Point(Fraction(k, 4)) for k in range(-14, 15)] + \
    [Point(Fraction(k, 4), Fraction(1, 16)) for k in range(-14, 15)] + [Point(0, 1), Point(0, -1)]


@st.composite
def cells(draw):
    lo = Fraction(draw(st.integers(-6, 6)), 2)
    hi = lo + Fraction(draw(st.integers(0, 6)), 2)
    lc = draw(st.booleans())
    hc = draw(st.booleans())
    if lo == hi:
        lc = hc = True
    return Cell(Point(lo), Point(hi), lc, hc, draw(st.sampled_from(FLAVORS)))


@st.composite
def line_sets(draw):
    out = SetExpr.empty()
    for c in draw(st.lists(cells(), max_size=3)):
        out = out | SetExpr.from_cells([c])
    if draw(st.booleans()):
        out = out | R(lo=Point(4))
    return out


def members(a):
    return {p for p in SAMPLES if a.contains(p)}


def test_point_arithmetic_and_order():
    s = Point(0, 1)
    assert Point(1) < s < Point(Fraction(3, 2))
    assert (s + s) == Point(0, 2)
    assert not s.is_rational and Point(3).is_rational
    assert -s < Point(0)


def test_parse_point_forms():
    assert parse_point("1/2") == Point(Fraction(1, 2))
    assert parse_point("sqrt2") == Point(0, 1)
    assert parse_point("1-2*sqrt2") == Point(1, -2)
    assert parse_point(3) == Point(3)


def test_between_helpers():
    lo, hi = Point(0), Point(0, 1)
    q = rational_between(lo, hi)
    assert lo < Point(q) < hi
    r = irrational_between(lo, hi)
    assert lo < r < hi and not r.is_rational


def test_malformed_cells_rejected():
    with pytest.raises(MalformedCell):
        Cell(Point(2), Point(1))
    with pytest.raises(MalformedCell):
        Cell(Point(1), Point(1), True, False)
    with pytest.raises(MalformedCell):
        Cell(Point(0), Point(1), flavor="odd")


def test_interval_topology():
    a = R(0, 1, True, False)
    assert a.closure() == R(0, 1, True, True)
    assert a.interior() == R(0, 1)
    assert a.is_bounded() and not a.is_compact()
    assert a.closure().is_compact()


def test_dense_flavors():
    rat = R(0, 1, flavor="rat")
    assert rat.closure() == R(0, 1, True, True)
    assert rat.interior().is_empty()
    assert (rat | R(0, 1, flavor="irr")) == R(0, 1)


def test_points_counting():
    pts = SetExpr.points([Point(1), Point(2)])
    assert pts.count_upto() == 2
    assert pts.isolated() == pts
    assert pts.accumulation().is_empty()


def test_kind_mismatch_raises():
    strip = SetExpr.product(GrpSet.all(), LineSet.full())
    with pytest.raises(AmbientMismatch):
        strip | SetExpr.universe("line")


@settings(max_examples=200, deadline=None)
@given(line_sets(), line_sets())
def test_boolean_ops_pointwise(a, b):
    assert members(a | b) == members(a) | members(b)
    assert members(a & b) == members(a) & members(b)
    assert members(a - b) == members(a) - members(b)
    assert members(a.complement()) == set(SAMPLES) - members(a)


@settings(max_examples=200, deadline=None)
@given(line_sets(), line_sets())
def test_boolean_laws(a, b):
    assert a | b == b | a
    assert (a & b).complement() == a.complement() | b.complement()
    assert a.complement().complement() == a
    assert (a - b).issubset(a)
    assert a.intersects(b) == (not (a & b).is_empty())


@settings(max_examples=200, deadline=None)
@given(line_sets())
def test_closure_interior_laws(a):
    c = a.closure()
    i = a.interior()
    assert a.issubset(c) and i.issubset(a)
    assert c.closure() == c
    assert i.interior() == i
    assert a.complement().closure() == i.complement()


@settings(max_examples=100, deadline=None)
@given(line_sets())
def test_json_round_trip(a):
    assert SetExpr.from_json(a.to_json()) == a


@settings(max_examples=100, deadline=None)
@given(line_sets(), line_sets(), st.integers(-3, 3), st.integers(-3, 3))
def test_strip_layers_behave_pointwise(a, b, h, k):
    ga, gb = GrpSet.coset(0, 2), GrpSet.ray(0, 1)
    x = SetExpr.product(ga, a.as_line())
    y = SetExpr.product(gb, b.as_line())
    u = x | y
    for n in (h, k):
        for p in SAMPLES[::5]:
            got = u.contains((p, n))
            want = (n in ga and a.contains(p)) or (n in gb and b.contains(p))
            assert got == want
