from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from grpdyn.oracle import (
    FiniteInstance,
    HybridAction,
    HybridGroupoid,
    InvalidInstance,
    PredicateNotApplicable,
    Topo,
    ZPattern,
    canonical_action,
    gen_instance,
    oracle_eval,
    read_replay,
    write_replay,
)

WIN = range(-20, 21)


@st.composite
def patterns(draw):
    p = draw(st.integers(1, 5))
    res = draw(st.sets(st.integers(0, p - 1), max_size=p))
    exc = draw(st.sets(st.integers(-8, 8), max_size=4))
    return ZPattern(p, res, exc)


def win(z, lo=-20, hi=20):
    return {n for n in range(lo, hi + 1) if n in z}


@settings(max_examples=200, deadline=None)
@given(patterns(), patterns())
def test_pattern_boolean_ops(a, b):
    assert win(a | b) == win(a) | win(b)
    assert win(a & b) == win(a) & win(b)
    assert win(a - b) == win(a) - win(b)
    assert win(a.complement()) == set(WIN) - win(a)
    assert a.issubset(b) == (win(a, -60, 60) <= win(b, -60, 60))


@settings(max_examples=150, deadline=None)
@given(patterns(), patterns())
def test_pattern_sumset_brute_force(a, b):
    big_a = win(a, -70, 70)
    big_b = win(b, -70, 70)
    brute = {n for n in WIN if any((n - x) in big_b for x in big_a)}
    assert win(a + b) == brute


@settings(max_examples=100, deadline=None)
@given(patterns(), st.integers(-9, 9))
def test_pattern_shift_neg_json(a, k):
    assert win(a.shift(k)) == {n for n in WIN if n - k in a}
    assert win(a.neg()) == {n for n in WIN if -n in a}
    assert ZPattern.from_json(json.loads(json.dumps(a.to_json()))) == a


def test_pattern_constructors():
    assert ZPattern.coset(1, 2) == ZPattern.residues(2, [1])
    assert ZPattern.finite([3, 4]).elements() == [3, 4]
    assert ZPattern.all().complement().is_empty()
    assert not ZPattern.coset(0, 2).is_finite()


def pair_groupoid(n):
    pts = list(range(n))
    return HybridGroupoid(Topo.discrete(pts), {(x, y): ZPattern.finite([0]) for x in pts for y in pts})


def test_pair_groupoid_recurrence_is_product():
    act = canonical_action(pair_groupoid(3))
    m, n = {0, 1}, {2}
    rec = act.recurrence_set(m, n)
    assert set(rec) == {(x, y) for x in n for y in m}
    assert all(v == ZPattern.finite([0]) for v in rec.values())


def test_trivial_groupoid_fixes_everything():
    pts = [0, 1, 2]
    g = HybridGroupoid(Topo.discrete(pts), {(x, x): ZPattern.finite([0]) for x in pts})
    act = canonical_action(g)
    assert act.class_set("fix") == frozenset(pts)
    with pytest.raises(PredicateNotApplicable):
        act.class_set("rec")


def test_even_integers_syndetic_in_integer_fiber():
    g = HybridGroupoid(Topo.discrete([0]), {(0, 0): ZPattern.all()})
    act = canonical_action(g)
    ok, k = act.syndetic({(0, 0): ZPattern.coset(0, 2)}, 0)
    assert ok and k
    ok, _ = act.syndetic({(0, 0): ZPattern.finite([0, 1])}, 0)
    assert not ok


def test_invalid_groupoids_rejected():
    with pytest.raises(InvalidInstance):
        HybridGroupoid(Topo.discrete([0]), {})
    with pytest.raises(InvalidInstance):
        HybridGroupoid(Topo.discrete([0, 1]), {(0, 0): ZPattern.finite([0]), (1, 1): ZPattern.finite([0]),
                                               (0, 1): ZPattern.finite([1])})


def test_preorder_topology():
    t = Topo.from_pairs([0, 1], [(0, 1)])
    assert not t.hausdorff
    assert Topo.discrete([0, 1]).hausdorff
    assert t.closure({0}) != t.closure({1})


def test_generation_is_deterministic():
    a = json.dumps(gen_instance(11).to_json(), sort_keys=True)
    b = json.dumps(gen_instance(11).to_json(), sort_keys=True)
    assert a == b
    assert a != json.dumps(gen_instance(12).to_json(), sort_keys=True)


@pytest.mark.parametrize("seed", range(25))
def test_generated_instances_round_trip(seed):
    inst = gen_instance(seed)
    back = FiniteInstance.from_json(json.loads(json.dumps(inst.to_json())))
    assert oracle_eval(back, {"op": "profile"}) == oracle_eval(inst, {"op": "profile"})
    assert oracle_eval(back, {"op": "mixing"}) == oracle_eval(inst, {"op": "mixing"})


@pytest.mark.parametrize("seed", range(25))
def test_generated_orbits_partition(seed):
    act = gen_instance(seed).action
    orbs = act.orbits()
    assert frozenset().union(*orbs) == frozenset(act.points)
    assert sum(len(o) for o in orbs) == len(act.points)
    for o in orbs:
        assert act.is_invariant(o)


def test_replay_round_trip(tmp_path):
    inst = gen_instance(5)
    path = tmp_path / "r.json"
    write_replay(str(path), inst, {"op": "profile"}, {"oracle": 1})
    back, pred, answers, kind = read_replay(str(path))
    assert pred == {"op": "profile"} and answers == {"oracle": 1} and kind == "disagreement"
    assert isinstance(back.action, HybridAction)
    assert oracle_eval(back, pred) == oracle_eval(inst, pred)
