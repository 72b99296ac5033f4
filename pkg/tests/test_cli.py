from __future__ import annotations

import json

import pytest

from grpdyn import cli
from grpdyn.oracle import gen_instance, oracle_eval, write_replay


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def as_json(text):
    return json.loads(text)


def test_catalog_list(capsys):
    rc, out, _ = run(capsys, "catalog", "list")
    assert rc == 0
    names = [f["name"] for f in as_json(out)["fixtures"]]
    assert "tutosh" in names and "valioso" in names


def test_catalog_verify_subset(capsys):
    rc, out, _ = run(capsys, "catalog", "verify", "tutosh", "maidevreme")
    assert rc == 0
    summary = as_json(out)["summary"]
    assert summary["mismatch"] == 0 and summary["unknown"] == 0


def test_unknown_fixture_is_usage_error(capsys):
    rc, _, err = run(capsys, "catalog", "show", "nope")
    assert rc == 2 and "unknown fixture" in err


def test_bad_subcommand(capsys):
    rc, _, _ = run(capsys, "bogus")
    assert rc == 2


def test_classify_point(capsys):
    rc, out, _ = run(capsys, "classify", "catalog:maidevreme", "--point", "0")
    assert rc == 0
    flags = as_json(out)["flags"]
    for k in ("periodic", "weakly_periodic", "almost_periodic"):
        assert flags[k]["status"] == "Holds"


def test_point_outside_carrier(capsys):
    rc, _, err = run(capsys, "classify", "catalog:maidevreme", "--point", "1@3")
    assert rc == 2 and "outside" in err


def test_check_recurrent_transitivity_witness(capsys):
    rc, out, _ = run(capsys, "check", "catalog:valioso", "--property", "recurrent-transitivity")
    assert rc == 0
    doc = as_json(out)
    assert doc["status"] == "Fails" and doc["witness_verified"]
    u = doc["witness"]["U"]["cells"][0]
    v = doc["witness"]["V"]["cells"][0]
    assert (u["lo"], u["hi"]) == ("2", "inf")
    assert (v["lo"], v["hi"]) == ("-inf", "-2")


def test_check_open_label(capsys):
    rc, out, _ = run(capsys, "check", "catalog:tutosh", "--property", "open")
    assert rc == 0
    doc = as_json(out)
    assert doc["status"] == "Fails" and doc["label"] == "NotOpen"


def test_unknown_only_exit_code(capsys):
    rc, out, _ = run(capsys, "check", "catalog:tutosh", "--property", "prop-i")
    assert rc == 3
    assert as_json(out)["status"] == "Unknown"


def test_markdown_report(capsys, monkeypatch):
    monkeypatch.setenv("GD_COLOR", "0")
    rc, out, _ = run(capsys, "report", "catalog:bor1", "--format", "md")
    assert rc == 0
    assert out.startswith("# report catalog:bor1")
    assert "\x1b[" not in out


def test_oracle_instance_from_file(capsys, tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(gen_instance(3).to_json()))
    rc, out, _ = run(capsys, "report", "--input", str(path))
    assert rc == 0
    assert "classes" in as_json(out)


def test_schema_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"x": 1}')
    rc, _, err = run(capsys, "report", "--input", str(path))
    assert rc == 2 and "schema" in err


@pytest.mark.parametrize("stale", [False, True])
def test_replay(capsys, tmp_path, stale):
    inst = gen_instance(4)
    pred = {"op": "profile"}
    answer = oracle_eval(inst, pred)
    if stale:
        answer = {k: "Holds" if v == "Fails" else "Fails" for k, v in answer.items()}
    path = tmp_path / "case.json"
    write_replay(str(path), inst, pred, {"oracle": answer})
    rc, out, _ = run(capsys, "replay", str(path))
    assert as_json(out)["reproduced"] is stale
    assert rc == (1 if stale else 0)


def test_cross_check_small(capsys):
    rc, out, _ = run(capsys, "cross-check", "--cases", "5", "--seed", "2")
    assert rc == 0
    doc = as_json(out)
    assert doc["disagreements"] == [] and doc["unknown_rate"] <= 0.10


def test_verify_theorems_small_is_stable(capsys):
    args = ("verify-theorems", "--cases", "3", "--seed", "7", "--suite", "identities")
    rc1, out1, _ = run(capsys, *args)
    rc2, out2, _ = run(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2
