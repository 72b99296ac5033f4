from __future__ import annotations

import json

from grpdyn import suites
from grpdyn.oracle import gen_instance


def dump(doc):
    return json.dumps(doc, sort_keys=True)


def test_case_seeds_are_distinct():
    seen = {suites.case_seed(s, fam, i) for s in range(3) for fam in suites.FAMILIES for i in range(50)}
    assert len(seen) == 3 * len(suites.FAMILIES) * 50


def test_brute_recurrence_matches_action():
    for seed in range(30):
        act = gen_instance(seed).action
        pts = sorted(act.points, key=repr)
        m, n = set(pts[: 2]), set(pts[-2:])
        assert suites.brute_recurrence(act, m, n) == act.recurrence_set(m, n)


def test_identity_suite_small():
    rep = suites.identity_suite(seed=1, cases=20, symbolic_cases=4)
    assert rep["violations"] == 0
    assert all(row["evaluated"] > 0 for row in rep["checks"].values())


def test_theorem_suite_small():
    rep = suites.theorem_suite(seed=1, cases=5, fixtures=False)
    assert rep["violations"] == 0
    assert set(rep["theorems"]) == set(suites.THEOREMS)
    assert all(row["hausdorff"] >= 5 for row in rep["theorems"].values())


def test_single_theorem_selection():
    name = sorted(suites.THEOREMS)[0]
    rep = suites.theorem_suite(seed=2, cases=3, theorems=[name], fixtures=False)
    assert list(rep["theorems"]) == [name]


def test_fixture_theorems():
    rep = suites.fixture_theorems()
    assert rep["violations"] == 0
    assert rep["checks"]


def test_cross_check_suite_small():
    rep = suites.cross_check_suite(seed=3, cases=20)
    assert rep["disagreements"] == []
    assert rep["unknown_rate"] <= 0.10


def test_suites_are_repeatable():
    a = dump(suites.identity_suite(seed=4, cases=10, symbolic_cases=3))
    b = dump(suites.identity_suite(seed=4, cases=10, symbolic_cases=3))
    assert a == b


def test_violation_replay_files(tmp_path):
    rep = suites.theorem_suite(seed=5, cases=3, fixtures=False, replay_dir=str(tmp_path))
    # no violations means nothing to replay
    assert rep["violations"] == 0
    assert list(tmp_path.iterdir()) == []
