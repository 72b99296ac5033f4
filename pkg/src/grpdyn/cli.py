"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 usage or schema error, 3 only Unknown answers.
Output is canonical (sorted keys, no timings) so identical arguments give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import catalog, oracle as O, suites, witness as W
from .dynamics import (GroupoidAction, full_report, is_minimal, is_semisimple, mixing_profile,
                       transitivity_profile)
from .groupoid import BlockGroupoid
from .setalg import SetExpr
from .verdict import FAILS, HOLDS, UNKNOWN, Verdict

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


# property names accepted by `check`, mapped to profile keys
PROPERTIES = {
    "transitive": "transitive",
    "pointwise-transitive": "pointwise_transitive",
    "weakly-pointwise-transitive": "weakly_pointwise_transitive",
    "prop-i": "prop_i",
    "prop-i-prime": "prop_i_prime",
    "prop-ii": "prop_ii",
    "recurrent-transitivity": "prop_iii_recurrent_transitivity",
    "prop-iii": "prop_iii_recurrent_transitivity",
    "topological-transitivity": "prop_iv_topological_transitivity",
    "prop-iv": "prop_iv_topological_transitivity",
    "open": "is_open",
    "strongly-noncompact": "strongly_noncompact",
    "weak-mixing": "mixing.weak",
    "strong-mixing": "mixing.strong",
    "semisimple": "semisimple",
    "minimal": "minimal",
}
ORACLE_KEYS = {"prop_iii_recurrent_transitivity": "prop_iii", "prop_iv_topological_transitivity": "prop_iv"}


# ---------------------------------------------------------------------------
# output


def _color(word: str) -> str:
    if os.environ.get("GD_COLOR", "0") != "1":
        return word
    code = {HOLDS: "32", FAILS: "31", UNKNOWN: "33", "match": "32", "mismatch": "31", "unknown": "33"}.get(word)
    return f"\x1b[{code}m{word}\x1b[0m" if code else word


def _compact(obj):
    """Serialized sets become their interval notation in Markdown output."""
    if isinstance(obj, dict):
        if "dim" in obj and ("cells" in obj or "layers" in obj):
            try:
                return repr(SetExpr.from_json(obj))
            except (KeyError, ValueError, TypeError):
                pass
        return {k: _compact(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_compact(v) for v in obj]
    return obj


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _md(obj, depth: int = 0) -> list[str]:
    pad = "  " * depth
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}- **{k}**:")
                lines += _md(v, depth + 1)
            else:
                lines.append(f"{pad}- **{k}**: {_color(str(v)) if isinstance(v, str) else json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if _flat(v):
                lines.append(f"{pad}- {json.dumps(v)}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines += _md(v, depth + 1)
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return lines


def emit(doc: dict, fmt: str, title: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        out.write(f"# {title}\n\n" + "\n".join(_md(_compact(doc))) + "\n")


# ---------------------------------------------------------------------------
# targets


class Target:
    """A symbolic action (with its fixture, if any) or an oracle instance."""

    def __init__(self, name: str, action=None, instance: Optional[O.FiniteInstance] = None, fixture=None):
        self.name = name
        self.action = action
        self.instance = instance
        self.fixture = fixture

    @property
    def symbolic(self) -> bool:
        return self.action is not None


def load_instance_json(d: dict, name: str, strict: bool = False) -> Target:
    """Symbolic instances: {"groupoid": ..., "action": {"rule", "sigma", "perm"}} or a bare groupoid.
    Oracle instances: {"action": {"groupoid", "sigma", "table", ...}, "meta": ...}."""
    try:
        if isinstance(d.get("action"), dict) and "table" in d["action"]:
            return Target(name, instance=O.FiniteInstance.from_json(d))
        gd = d["groupoid"] if "groupoid" in d else d
        g = BlockGroupoid.from_json(gd)
        spec = d.get("action", {})
        sigma = SetExpr.from_json(spec["sigma"]) if "sigma" in spec else None
        act = GroupoidAction(g, sigma, spec.get("rule", "canonical"), spec.get("perm"), name=name)
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as e:
        raise UsageError(f"schema error in {name}: {type(e).__name__}: {e}") from None
    if strict:
        act.sigma.strict = True
        g.base.strict = True
    return Target(name, action=act)


def resolve(target: Optional[str], input_path: Optional[str], strict: bool = False) -> Target:
    if input_path:
        try:
            with open(input_path) as fh:
                d = json.load(fh)
        except OSError as e:
            raise UsageError(f"cannot read {input_path}: {e}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"schema error in {input_path}: {e}") from None
        return load_instance_json(d, os.path.basename(input_path), strict)
    if not target:
        raise UsageError("give a target (catalog:NAME) or --input FILE")
    if target.startswith("catalog:"):
        name = target.split(":", 1)[1]
        try:
            fx = catalog.get(name)
        except catalog.UnknownFixture:
            raise UsageError(f"unknown fixture {name}") from None
        if not fx.representable:
            raise UsageError(f"fixture {name} is not representable: {fx.summary}")
        act = fx.context()["action"]
        if strict:
            act.sigma.strict = True
        return Target(target, action=act, fixture=fx)
    return resolve(None, target, strict)


def parse_point(text: str, act):
    """`x` for line carriers, `x@h` (h an integer or `inf`) for layered carriers."""
    try:
        if "@" in text:
            x, h = text.split("@", 1)
            p = W.parse_sym_point([x, "inf" if h == "inf" else int(h)])
        else:
            p = W.parse_sym_point(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad point {text!r}: {e}") from None
    if act.carrier.kind != "line" and not isinstance(p, tuple):
        raise UsageError("layered carrier: give the point as x@h")
    if not act.contains(p):
        raise UsageError(f"point {text} is outside the carrier")
    return p


# ---------------------------------------------------------------------------
# commands


def _status_exit(statuses) -> int:
    return EXIT_UNKNOWN if UNKNOWN in statuses else EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        doc = {"fixtures": [{"name": n, "summary": catalog.get(n).summary,
                             "representable": catalog.get(n).representable} for n in catalog.names()]}
        emit(doc, args.format, "catalog")
        return EXIT_OK
    if args.action == "show":
        if not args.names:
            raise UsageError("catalog show needs a fixture name")
        try:
            doc = {"fixtures": [catalog.get(n).describe() for n in args.names]}
        except catalog.UnknownFixture as e:
            raise UsageError(f"unknown fixture {e}") from None
        emit(doc, args.format, "catalog")
        return EXIT_OK
    try:
        res = catalog.verify(args.names or None)
    except catalog.UnknownFixture as e:
        raise UsageError(f"unknown fixture {e}") from None
    emit(res, args.format, "catalog verify")
    s = res["summary"]
    if s["mismatch"]:
        return EXIT_FAIL
    return EXIT_UNKNOWN if s["unknown"] else EXIT_OK


def _expected_status(fx, key: str) -> Optional[str]:
    if fx is None:
        return None
    for c in fx.checks:
        if c.mode == "status" and c.key == key:
            return c.expected
    return None


def cmd_classify(args) -> int:
    t = resolve(args.target, args.input, args.strict_carrier)
    if not t.symbolic:
        if args.point is None:
            raise UsageError("--point is required")
        p = O._pt_parse(json.loads(args.point) if args.point.startswith("[") else args.point)
        if p not in t.instance.action.points:
            raise UsageError(f"point {args.point} is outside the instance")
        flags = O.oracle_eval(t.instance, {"op": "flags", "point": O._pt_json(p)})
        doc = {"target": t.name, "point": O._pt_json(p), "world": "oracle",
               "flags": {k: (None if v is None else (HOLDS if v else FAILS)) for k, v in flags.items()}}
        emit(doc, args.format, "classify")
        return EXIT_OK
    act = t.action
    if args.point is None:
        raise UsageError("--point is required")
    p = parse_point(args.point, act)
    flags = act.classify_point(p)
    doc = {"target": t.name, "point": args.point, "world": "symbolic",
           "flags": {k: v.to_json() for k, v in flags.items()}}
    mism = []
    if t.fixture is not None:
        for c in t.fixture.checks:
            if c.mode == "status" and c.key.startswith(f"point{args.point}."):
                flag = c.key.split(".", 1)[1]
                if flag in flags and flags[flag].status != UNKNOWN and flags[flag].status != c.expected:
                    mism.append({"flag": flag, "expected": c.expected, "actual": flags[flag].status})
        doc["expected_mismatches"] = mism
    emit(doc, args.format, "classify")
    if mism:
        return EXIT_FAIL
    return _status_exit({v.status for v in flags.values()})


def _symbolic_verdict(act, key: str) -> Verdict:
    if key == "is_open":
        return act.open_groupoid()
    if key == "strongly_noncompact":
        return Verdict.of(act.strongly_noncompact())
    if key.startswith("mixing."):
        return mixing_profile(act)[key.split(".", 1)[1]]
    if key == "semisimple":
        return is_semisimple(act)
    if key == "minimal":
        return is_minimal(act, act.carrier)
    return transitivity_profile(act)[key]


def cmd_check(args) -> int:
    if args.property not in PROPERTIES:
        raise UsageError(f"unknown property {args.property}; choose from {', '.join(sorted(PROPERTIES))}")
    key = PROPERTIES[args.property]
    t = resolve(args.target, args.input, args.strict_carrier)
    if not t.symbolic:
        return _check_oracle(t, key, args)
    act = t.action
    v = _symbolic_verdict(act, key)
    doc = {"target": t.name, "property": args.property, "key": key, "status": v.status}
    if v.label:
        doc["label"] = v.label
    if v.status == FAILS:
        hint = t.fixture.hints.get(key) if t.fixture is not None else None
        if hint is not None:
            ok, why = W.recheck_hint(act, key, hint)
            if ok:
                doc["witness"] = {k: s.to_json() for k, s in sorted(hint.items())}
                doc["witness_source"] = "fixture"
                doc["witness_verified"] = True
            else:
                doc["hint_rejected"] = why
        if "witness" not in doc:
            ok, why = W.recheck_symbolic(act, key, v)
            doc["witness"] = v.witness
            doc["witness_source"] = "computed"
            doc["witness_verified"] = ok
            if not ok:
                doc["witness_problem"] = why
    elif v.witness is not None:
        doc["witness"] = v.witness
    if v.status == UNKNOWN and v.witness:
        doc["reason"] = v.witness
    exp = _expected_status(t.fixture, key)
    if exp is not None:
        doc["expected"] = exp
    emit(doc, args.format, "check")
    if v.status == FAILS and not doc.get("witness_verified"):
        return EXIT_FAIL
    if exp is not None and v.status not in (UNKNOWN, exp):
        return EXIT_FAIL
    return EXIT_UNKNOWN if v.status == UNKNOWN else EXIT_OK


def _check_oracle(t: Target, key: str, args) -> int:
    act = t.instance.action
    k = ORACLE_KEYS.get(key, key)
    if k == "is_open":
        w = act.groupoid.open_witness()
        res = {"status": HOLDS if w is None else FAILS, **({"witness": w} if w else {})}
    elif k == "strongly_noncompact":
        res = {"status": HOLDS if act.snc() else FAILS}
    elif k.startswith("mixing."):
        res = act.mixing()[k.split(".", 1)[1]]
    elif k == "semisimple":
        res = {"status": HOLDS if act.is_semisimple() else FAILS}
    elif k == "minimal":
        res = {"status": HOLDS if act.is_minimal() else FAILS}
    else:
        res = act.profile()[k]
    doc = {"target": t.name, "property": args.property, "key": key, "world": "oracle", **res}
    if res["status"] == FAILS and "witness" in res:
        ok, why = W.recheck_oracle(t.instance, k.split(".", 1)[-1] if k.startswith("mixing.") else k,
                                   res["witness"])
        doc["witness_verified"] = ok
        if not ok:
            doc["witness_problem"] = why
    emit(doc, args.format, "check")
    return EXIT_FAIL if doc.get("witness_verified") is False else EXIT_OK


def cmd_report(args) -> int:
    t = resolve(args.target, args.input, args.strict_carrier)
    if not t.symbolic:
        act = t.instance.action
        doc = {"target": t.name, "world": "oracle", "flags": t.instance.flags(),
               "profile": {k: v["status"] for k, v in act.profile().items()},
               "mixing": {k: v["status"] for k, v in act.mixing().items()},
               "classes": {k: O._set_json(act.class_set(k)) for k in ("fix", "per", "wper", "alper")
                           + (("rec", "nw") if act.snc() else ())},
               "minimal_sets": sorted(O._set_json(m) for m in act.minimal_sets())}
        emit(doc, args.format, f"report {t.name}")
        return EXIT_OK
    rep = full_report(t.action)
    doc = {"target": t.name, **rep.to_json()}
    unknown = rep.unknowns()
    if unknown:
        doc["unknown"] = unknown
    emit(doc, args.format, f"report {t.name}")
    return EXIT_UNKNOWN if unknown else EXIT_OK


def cmd_verify_theorems(args) -> int:
    doc = {"seed": args.seed, "cases": args.cases}
    which = args.suite
    bad = 0
    if which in ("all", "identities"):
        r = suites.identity_suite(args.seed, args.cases)
        doc["identities"] = r
        bad += r["violations"]
    if which in ("all", "theorems", "witnesses"):
        th = suites.theorem_suite(args.seed, args.cases, replay_dir=args.replay_dir)
        if which in ("all", "theorems"):
            doc["theorems"] = th
            bad += th["violations"]
        if which in ("all", "witnesses"):
            w = suites.witness_suite(args.seed, args.cases, theorem_report=th)
            doc["witnesses"] = w
            bad += len(w["unverified"])
    doc["violations"] = bad
    emit(doc, args.format, "verify-theorems")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_cross_check(args) -> int:
    r = suites.cross_check_suite(args.seed, args.cases, replay_dir=args.replay_dir)
    emit(r, args.format, "cross-check")
    if r["disagreements"]:
        return EXIT_FAIL
    return EXIT_UNKNOWN if r["unknown"] else EXIT_OK


def cmd_replay(args) -> int:
    path = args.replay or args.file
    if not path:
        raise UsageError("replay needs a file")
    try:
        inst, pred, answers, kind = O.read_replay(path)
    except (OSError, KeyError, ValueError) as e:
        raise UsageError(f"cannot read replay file {path}: {e}") from None
    doc = {"file": os.path.basename(path), "kind": kind, "predicate": pred, "recorded": answers}
    if pred.get("op") == "theorem":
        res = suites.evaluate_theorem(pred["name"], inst)
        reproduced = res is not None and not res[0]
        doc["now"] = None if res is None else {"holds": res[0], "detail": res[1]}
    elif pred.get("op") == "cross_check":
        from .crosscheck import cross_check, to_symbolic
        rep = cross_check(to_symbolic(inst), seed=pred.get("seed", 0))
        reproduced = bool(rep.disagreements)
        doc["now"] = {"disagreements": rep.disagreements}
    else:
        try:
            doc["now"] = O.oracle_eval(inst, pred)
        except (O.PredicateNotApplicable, ValueError, KeyError) as e:
            raise UsageError(f"replay predicate: {e}") from None
        reproduced = "oracle" in answers and answers.get("oracle") != doc["now"]
    doc["reproduced"] = reproduced
    emit(doc, args.format, "replay")
    return EXIT_FAIL if reproduced else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "md"], default="json")
    common.add_argument("--input", help="instance JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=100)
    common.add_argument("--strict-carrier", action="store_true", help="reject sets leaving the carrier")
    common.add_argument("--replay", help="replay file to read, or directory for new replay files")

    p = argparse.ArgumentParser(prog="grpdyn", description="Decide dynamical properties of groupoid actions.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list, show or verify the fixture catalog")
    c.add_argument("action", choices=["list", "show", "verify"])
    c.add_argument("names", nargs="*")
    c.set_defaults(func=cmd_catalog)

    c = sub.add_parser("classify", parents=[common], help="point classes at one point")
    c.add_argument("target", nargs="?")
    c.add_argument("--point")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("check", parents=[common], help="decide one property, with a witness on failure")
    c.add_argument("target", nargs="?")
    c.add_argument("--property", required=True)
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("report", parents=[common], help="full verdict report of an instance")
    c.add_argument("target", nargs="?")
    c.set_defaults(func=cmd_report)

    c = sub.add_parser("verify-theorems", parents=[common], help="randomized identity and theorem suites")
    c.add_argument("--suite", choices=["all", "identities", "theorems", "witnesses"], default="all")
    c.set_defaults(func=cmd_verify_theorems)

    c = sub.add_parser("cross-check", parents=[common], help="symbolic deciders against the oracle")
    c.set_defaults(func=cmd_cross_check)

    c = sub.add_parser("replay", parents=[common], help="re-run a recorded failure")
    c.add_argument("file", nargs="?")
    c.set_defaults(func=cmd_replay)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    # --replay names an output directory for the suites and an input file for `replay`
    args.replay_dir = args.replay if args.command in ("verify-theorems", "cross-check") else None
    try:
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except Exception as e:  # schema problems surface as library errors
        from .setalg import OutsideCarrier
        if isinstance(e, (OutsideCarrier,)):
            sys.stderr.write(f"error: outside carrier: {e}\n")
            return EXIT_USAGE
        raise


if __name__ == "__main__":
    sys.exit(main())
