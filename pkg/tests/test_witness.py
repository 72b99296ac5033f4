from __future__ import annotations

import pytest

from grpdyn import catalog
from grpdyn.dynamics import transitivity_profile
from grpdyn.oracle import gen_instance
from grpdyn.suites import brute_recurrence
from grpdyn.witness import (
    fixture_witness_report,
    oracle_fails,
    recheck_oracle,
    recheck_symbolic,
    symbolic_fails,
)


def test_fixture_witnesses_all_verify():
    rows = fixture_witness_report()
    assert rows
    bad = [r for r in rows if not r["verified"]]
    assert bad == []


@pytest.mark.parametrize("seed", range(40))
def test_oracle_witnesses_verify(seed):
    inst = gen_instance(seed)
    for key, w in oracle_fails(inst):
        ok, why = recheck_oracle(inst, key, w)
        assert ok, (key, why)


def test_tampered_orbit_witness_rejected():
    for seed in range(60):
        inst = gen_instance(seed)
        for key, w in oracle_fails(inst):
            if key == "transitive":
                bad = {"orbits": [w["orbits"][0], w["orbits"][0]]}
                ok, why = recheck_oracle(inst, key, bad)
                assert not ok and why
                return
    pytest.fail("no transitivity witness generated")


def test_tampered_weak_mixing_witness_rejected():
    for seed in range(60):
        inst = gen_instance(seed)
        for key, w in oracle_fails(inst):
            if key == "mixing.weak":
                pts = {tuple(p) for p in w["U"]}
                if not brute_recurrence(inst.action, pts, pts):
                    continue
                bad = dict(w, U2=w["U"], V2=w["U"], V=w["U"])
                ok, _ = recheck_oracle(inst, key, bad)
                assert not ok
                return
    pytest.fail("no weak mixing witness generated")


def test_missing_witness_rejected():
    assert recheck_oracle(gen_instance(0), "transitive", None) == (False, "no witness")


def test_valioso_symbolic_witness():
    act, _ = catalog.catalog_load("valioso")
    v = transitivity_profile(act)["prop_iii_recurrent_transitivity"]
    ok, why = recheck_symbolic(act, "prop_iii_recurrent_transitivity", v)
    assert ok, why


@pytest.mark.parametrize("name", ["tutosh", "maidevreme", "valioso", "bor1", "zuvertaj"])
def test_symbolic_fails_recheck(name):
    act, _ = catalog.catalog_load(name)
    for key, v in symbolic_fails(act):
        ok, why = recheck_symbolic(act, key, v)
        assert ok, (key, why)
