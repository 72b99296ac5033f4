from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grpdyn import catalog
from grpdyn.crosscheck import (
    NotEncodable,
    cross_check,
    encodable_params,
    from_symbolic,
    gen_instance,
    grp_to_pattern,
    named_instances,
    pattern_to_grp,
    same_labels,
    to_symbolic,
)
from grpdyn.grpset import GrpSet
from grpdyn.dynamics import GroupoidAction, full_report, transitivity_profile
from grpdyn.groupoid import Space, UnrepresentableArrowSet, build_equivalence, pair_groupoid
from grpdyn.morphism import check_homomorphism, rho_factor, transfer_audit
from grpdyn.setalg import Point, R, SetExpr
from grpdyn.verdict import FAILS, HOLDS, UNKNOWN

REQUIRED = [n for n in catalog.names() if catalog.get(n).required]


@pytest.mark.parametrize("name", REQUIRED)
def test_fixture_matches_expected(name):
    res = catalog.get(name).verify()
    bad = [c for c in res["checks"] if c["result"] != "match"]
    assert not bad, bad


def test_unknown_fixture_name():
    with pytest.raises(catalog.UnknownFixture):
        catalog.get("no_such_fixture")


def test_unrepresentable_fixture_is_flagged():
    skipped = [n for n in catalog.names() if not catalog.get(n).representable]
    for n in skipped:
        with pytest.raises(UnrepresentableArrowSet):
            catalog.catalog_load(n)


def test_tutosh_saturation_and_openness():
    act, _ = catalog.catalog_load("tutosh")
    sat = act.saturate(R(Point(Fraction(-1, 2)), Point(Fraction(1, 2))))
    assert sat == R(Point(-1), Point(1), True, True)
    v = act.open_groupoid()
    assert v.status == FAILS and v.label == "NotOpen"


def test_valioso_recurrent_transitivity_fails():
    act, _ = catalog.catalog_load("valioso")
    prof = transitivity_profile(act)
    assert prof["prop_iii_recurrent_transitivity"].status == FAILS
    assert prof["weakly_pointwise_transitive"].status == HOLDS
    u, v = R(Point(2)), R(hi=Point(-2))
    assert act.recurrence_set(u, v).is_empty()


def test_maidevreme_point_classes():
    act, _ = catalog.catalog_load("maidevreme")
    flags = act.classify_point(Point(0))
    assert flags["periodic"].status == HOLDS
    assert flags["almost_periodic"].status == HOLDS


def test_full_report_has_no_unknown_on_open_fixtures():
    for name in ("bor1", "dr_cycle"):
        act, _ = catalog.catalog_load(name)
        rep = full_report(act)
        assert rep.unknowns() == []
        assert rep.to_markdown().startswith("# ")


def test_pair_groupoid_on_points_is_transitive():
    pts = SetExpr.points([Point(k) for k in range(3)])
    act = GroupoidAction(pair_groupoid(Space(pts)), name="pair3")
    prof = transitivity_profile(act)
    assert prof["transitive"].status == HOLDS
    rec = act.recurrence_set(SetExpr.points([Point(0)]), SetExpr.points([Point(2)]))
    assert not rec.is_empty()


def test_anchor_is_a_homomorphism():
    act, _ = catalog.catalog_load("maidevreme")
    f = rho_factor(act)
    assert check_homomorphism(f).status == HOLDS
    audit = transfer_audit(f).to_json()["profile"]
    assert all(v["status"] != FAILS for v in audit.values())


def test_grp_pattern_conversion():
    for g in (GrpSet.coset(1, 3), GrpSet.finite([0, 4]), GrpSet.all(), GrpSet.empty()):
        z = grp_to_pattern(g)
        assert same_labels(g, z)
        assert pattern_to_grp(z) == g


def test_infinite_carrier_not_encodable():
    act, _ = catalog.catalog_load("tutosh")
    with pytest.raises(NotEncodable):
        from_symbolic(act)


@pytest.mark.parametrize("name", sorted(named_instances()))
def test_named_instances_agree_with_oracle(name):
    rep = cross_check(named_instances()[name])
    assert rep.disagreements == []
    assert rep.unknown == 0


def test_finite_equivalence_is_not_transitive():
    grid = SetExpr.points([Point(k) for k in range(-2, 3)])
    block = SetExpr.points([Point(k) for k in (-1, 0, 1)])
    act = GroupoidAction(build_equivalence(Space(grid), [block]), name="grid")
    assert transitivity_profile(act)["transitive"].status == FAILS


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_encodings_agree(seed):
    enc = to_symbolic(gen_instance(seed, encodable_params()))
    rep = cross_check(enc, seed=seed)
    assert rep.disagreements == []
    assert all(r["symbolic"] != UNKNOWN for r in rep.rows)
