"""Named fixtures with their expected verdicts.

Each fixture builds a small context (the main action plus any auxiliary
objects) and lists checks.  A check computes a value, compares it with the
stored expectation and reports ``match``, ``mismatch`` or ``unknown``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Any, Callable, Optional

from .grpset import GrpSet
from .groupoid import (ALL, EMPTY, ZERO, ArrowSet, FiniteMap, build_equivalence, deaconu_renault,
                       global_translation_rec, is_open_groupoid, pair_groupoid, partial_translation_rec,
                       partial_z_action_groupoid, product_with_group, pullback, wide_subgroupoid)
from .dynamics import GroupoidAction, _pj, transitivity_profile
from .morphism import rho_factor, transfer_audit
from .setalg import LineSet, Point, R, SetExpr, Space
from .verdict import FAILS, HOLDS, UNKNOWN, Verdict


class UnknownFixture(KeyError):
    pass


def _js(v):
    if isinstance(v, SetExpr):
        return v.to_json()
    if isinstance(v, Verdict):
        return v.to_json()
    if isinstance(v, GrpSet):
        return v.to_json()
    return v


class Check:
    """One expected value.

    ``mode`` is ``status`` (compare a Verdict status, optionally its label),
    ``set`` (compare SetExpr, accepting (set, decided) pairs) or ``value``.
    """

    def __init__(self, key: str, compute: Callable[[dict], Any], expected, mode: str = "value",
                 label: Optional[str] = None, note: str = ""):
        self.key = key
        self.compute = compute
        self.expected = expected
        self.mode = mode
        self.label = label
        self.note = note

    def expected_json(self):
        if self.mode == "status":
            return {"status": self.expected, **({"label": self.label} if self.label else {})}
        return _js(self.expected)

    def run(self, ctx: dict) -> dict:
        actual = self.compute(ctx)
        out = {"check": self.key, "expected": self.expected_json()}
        if self.mode == "status":
            out["actual"] = actual.to_json()
            if actual.status == UNKNOWN:
                out["result"] = "unknown"
            else:
                ok = actual.status == self.expected and (self.label is None or actual.label == self.label)
                out["result"] = "match" if ok else "mismatch"
        elif self.mode == "set":
            decided = True
            if isinstance(actual, tuple):
                actual, decided = actual
            out["actual"] = actual.to_json()
            out["result"] = "unknown" if not decided else ("match" if actual == self.expected else "mismatch")
        else:
            out["actual"] = _js(actual)
            out["result"] = "match" if out["actual"] == out["expected"] else "mismatch"
        if self.note:
            out["note"] = self.note
        return out


class Fixture:
    def __init__(self, name: str, summary: str, build: Callable[[], dict], checks: list,
                 representable: bool = True, required: bool = True, hints: Optional[dict] = None):
        self.name = name
        self.summary = summary
        self.build = build
        self.checks = checks
        self.representable = representable
        self.required = required
        self.hints = hints or {}
        self._ctx = None

    def context(self) -> dict:
        if self._ctx is None:
            self._ctx = self.build()
        return self._ctx

    def describe(self) -> dict:
        d = {"name": self.name, "summary": self.summary, "representable": self.representable,
             "required": self.required,
             "expected": {c.key: c.expected_json() for c in self.checks}}
        if self.representable:
            act = self.context()["action"]
            d["groupoid"] = act.groupoid.to_json()
            d["action"] = {"rule": act.rule, "sigma": act.carrier.to_json(),
                           **({"perm": list(act.perm)} if act.perm else {})}
        return d

    def verify(self) -> dict:
        if not self.representable:
            return {"name": self.name, "skipped": "not representable", "checks": []}
        ctx = self.context()
        return {"name": self.name, "checks": [c.run(ctx) for c in self.checks]}


# ---------------------------------------------------------------------------
# helpers used by several fixtures


def pt(*xs) -> SetExpr:
    return SetExpr.points([Point(x) for x in xs])


RL = SetExpr.universe()
RX = R(None, 0) | R(0, None)
Q = R(None, None, flavor="rat")
IRR = RL - Q


def _profile(key: str, which: str = "action"):
    def run(ctx):
        if "profiles" not in ctx:
            ctx["profiles"] = {}
        if which not in ctx["profiles"]:
            ctx["profiles"][which] = transitivity_profile(ctx[which])
        return ctx["profiles"][which][key]
    return run


def _class_set(kind: str, which: str = "action"):
    return lambda ctx: ctx[which].point_class_set(kind)


def _flag(point, flag: str, which: str = "action"):
    return lambda ctx: ctx[which].classify_point(point)[flag]


def _closure_table(cases: list):
    """Invariant closure of every representative point, compared with a table.

    cases: list of (region, value) where value is a SetExpr or the string "self".
    """
    def run(ctx):
        act = ctx["action"]
        extra = set()
        for region, _ in cases:
            extra |= region.breakpoints()
        seen = []
        for region, value in cases:
            for _, reps in region.pieces(act.breakpoints() | extra, max_layer_reps=1):
                for r in reps:
                    got = act.invariant_closure(act.point_set(r))
                    want = act.point_set(r) if value == "self" else value
                    if got != want:
                        seen.append({"point": _pj(r), "closure": got.to_json()})
        return {"table": [[region.to_json(), value if value == "self" else value.to_json()]
                          for region, value in cases], "disagreements": seen}
    expected = {"table": [[region.to_json(), value if value == "self" else value.to_json()]
                          for region, value in cases], "disagreements": []}
    return run, expected


# ---------------------------------------------------------------------------
# fixtures


def _tutosh():
    act = GroupoidAction(build_equivalence(Space(RL), [R(-1, 1, True, True)]), name="tutosh")
    return {"action": act}


def _maidevreme():
    tut = build_equivalence(Space(RL), [R(-1, 1, True, True)])
    return {"action": GroupoidAction(product_with_group(tut), name="maidevreme")}


def _valioso():
    x1 = pt(-1) | (R(0, None) - pt(1))
    x2 = (R(None, 0) - pt(-1)) | pt(1)
    return {"action": GroupoidAction(build_equivalence(Space(RX), [x1, x2]), name="valioso")}


def _valioso2():
    y1 = pt(-1) | R(0, 1) | R(1, 2) | R(3, None)
    x2 = (R(None, 0) - pt(-1)) | pt(1)
    y3 = R(2, 3, True, True)
    return {"action": GroupoidAction(build_equivalence(Space(RX), [y1, x2, y3]), name="valioso2")}


def _valioso3():
    return {"action": GroupoidAction(build_equivalence(Space(RL), [Q]), name="valioso3")}


def _valioso4():
    delta = ArrowSet.from_atoms("line", [("rect", Q, Q, ALL), ("diag", RL, ZERO)])
    dg = wide_subgroupoid(product_with_group(pair_groupoid(Space(RL))), delta)
    sigma = SetExpr("zhat", [(GrpSet.all(), Q.as_line())], LineSet.full())
    up = GroupoidAction(dg, sigma, rule="shift", name="valioso4")
    f = rho_factor(up)
    return {"action": up, "factor": f.target, "map": f}


def _bor1():
    car = SetExpr.product(GrpSet.all(), LineSet.points([Point(0)]), "strip")
    return {"action": GroupoidAction(pair_groupoid(Space(car)), name="bor1")}


def _bor3_groupoid():
    return product_with_group(build_equivalence(Space(RL), [R(None, 0, False, True), R(0, None)]))


def _bor3():
    return {"action": GroupoidAction(_bor3_groupoid(), name="bor3")}


def _zuvertaj():
    b3 = _bor3_groupoid()
    pos, nonpos = R(0, None), R(None, 0, False, True)
    delta = ArrowSet.from_atoms("line", [("rect", pos, pos, ALL), ("rect", nonpos, nonpos, ZERO)])
    return {"action": GroupoidAction(wide_subgroupoid(b3, delta), name="zuvertaj theta2"),
            "theta1": GroupoidAction(b3, name="zuvertaj theta1")}


def _cocoselu():
    return {"action": GroupoidAction(pair_groupoid(Space(R(0, 1, True, True))), name="cocoselu")}


def _dr(nu, name):
    return lambda: {"action": GroupoidAction(deaconu_renault(nu), name=name)}


def _pullback_double():
    base = deaconu_renault([1, 0])
    h = FiniteMap({0: 0, 1: 1, 2: 0, 3: 1})
    up = pullback(base, h)
    return {"action": GroupoidAction(up, name="pullback_double"), "base": GroupoidAction(base), "h": h}


def _finite_points(a: SetExpr) -> list[Point]:
    ls = a.as_line()
    return [b for b, isp in zip(ls.bps, ls.pt) if isp]


def _pullback_identity(ctx) -> dict:
    """Recurrence sets of the pull-back equal N x (base recurrence set of h(M), h(N)) x M."""
    act, base, h = ctx["action"], ctx["base"], ctx["h"]
    omega = [Point(k) for k in range(4)]
    subsets = [SetExpr.points(c) for n in (1, 2, 4) for c in itertools.combinations(omega, n)]
    bad = []
    for m in subsets:
        for n in subsets:
            lhs = act.recurrence_set(m, n)
            rec = base.recurrence_set(h.image(m), h.image(n))
            atoms = []
            for w in _finite_points(n):
                for w2 in _finite_points(m):
                    lab = rec.labels_at(h.table[w], h.table[w2])
                    if lab:
                        atoms.append(("rect", SetExpr.points([w]), SetExpr.points([w2]), lab))
            rhs = ArrowSet.from_atoms("line", atoms)
            if not lhs.equals(rhs):
                bad.append({"M": m.to_json(), "N": n.to_json()})
    return {"pairs": len(subsets) ** 2, "violations": bad}


def _pullback_orbits(ctx) -> list:
    act, base, h = ctx["action"], ctx["base"], ctx["h"]
    bad = []
    for k in range(4):
        w = Point(k)
        if act.orbit(w) != h.preimage(base.orbit(h.table[w])):
            bad.append(k)
    return bad


Y_INTERVAL = R(0, 5)


def _partial_interval():
    return {"action": GroupoidAction(partial_z_action_groupoid([1, 2, 3, 4, 0], [0, 1, 2]), name="partial_interval")}


def _partial_rec_identity(ctx) -> list:
    """For S, T inside Y the partial and global translation recurrence sets agree."""
    pieces = [R(0, 1), R(Fraction(1, 2), 2, True, False), R(3, 4), R(Fraction(9, 2), 5), pt(2), pt(Fraction(5, 2))]
    bad = []
    for s in pieces:
        for t in pieces:
            if partial_translation_rec(Y_INTERVAL, s, t) != global_translation_rec(s, t):
                bad.append([s.to_json(), t.to_json()])
    return bad


def _finite_partial_identity(ctx) -> list:
    """Groupoid recurrence sets on Y agree with recurrence of the restricted cyclic shift."""
    act = ctx["action"]
    ys = [0, 1, 2]
    bad = []
    subsets = [c for n in range(1, 4) for c in itertools.combinations(ys, n)]
    for s in subsets:
        for t in subsets:
            rec = act.recurrence_set(SetExpr.points(s), SetExpr.points(t)).labels()
            direct = GrpSet.finite([a for a in range(-12, 13) if any((y + a) % 5 in t for y in s)])
            window = GrpSet.interval(-12, 12)
            if (rec & window) != direct:
                bad.append([list(s), list(t)])
    return bad


def _all_points(x):
    return lambda ctx: x


def _fixtures() -> dict[str, Fixture]:
    fx: dict[str, Fixture] = {}

    def add(f: Fixture):
        fx[f.name] = f

    add(Fixture("tutosh", "equivalence on R with one block [-1,1]; not an open groupoid", _tutosh, [
        Check("is_open", lambda c: is_open_groupoid(c["action"].groupoid), FAILS, "status", label="NotOpen"),
        Check("saturation(-1/2,1/2)", lambda c: c["action"].saturate(R(Fraction(-1, 2), Fraction(1, 2))),
              R(-1, 1, True, True), "set"),
        Check("saturation_open", lambda c: c["action"].sigma.is_open(
            c["action"].saturate(R(Fraction(-1, 2), Fraction(1, 2)))), False),
    ], hints={"is_open": {"U": R(Fraction(-1, 2), Fraction(1, 2))}}))

    add(Fixture("maidevreme", "tutosh times Z acting on R", _maidevreme, [
        Check("set.fix", _class_set("fix"), R(None, -1) | R(1, None), "set"),
        Check("set.per", _class_set("per"), RL, "set"),
        Check("set.wper", _class_set("wper"), RL, "set"),
        Check("set.alper", _class_set("alper"), RL, "set"),
        Check("point0.periodic", _flag(0, "periodic"), HOLDS, "status"),
        Check("point0.weakly_periodic", _flag(0, "weakly_periodic"), HOLDS, "status"),
        Check("point0.almost_periodic", _flag(0, "almost_periodic"), HOLDS, "status"),
    ]))

    run, exp = _closure_table([(RX, RX)])
    add(Fixture("valioso", "two interleaved blocks on R minus 0", _valioso, [
        Check("prop_ii", _profile("prop_ii"), HOLDS, "status"),
        Check("prop_iii_recurrent_transitivity", _profile("prop_iii_recurrent_transitivity"), FAILS, "status"),
        Check("prop_iv_topological_transitivity", _profile("prop_iv_topological_transitivity"), FAILS, "status"),
        Check("recurrence_set((2,inf),(-inf,-2))_empty",
              lambda c: c["action"].recurrence_set(R(2, None), R(None, -2)).is_empty(), True),
        Check("weakly_pointwise_transitive", _profile("weakly_pointwise_transitive"), HOLDS, "status"),
        Check("invariant_closures", run, exp),
    ], hints={"prop_iii_recurrent_transitivity": {"U": R(2, None), "V": R(None, -2)}}))

    run, exp = _closure_table([(R(2, 3, True, True), R(2, 3, True, True)), (RX - R(2, 3, True, True), RX)])
    add(Fixture("valioso2", "three blocks on R minus 0 with a closed block [2,3]", _valioso2, [
        Check("prop_i_prime", _profile("prop_i_prime"), HOLDS, "status"),
        Check("prop_ii", _profile("prop_ii"), FAILS, "status"),
        Check("weakly_pointwise_transitive", _profile("weakly_pointwise_transitive"), HOLDS, "status"),
        Check("invariant_closures", run, exp),
    ]))

    run, exp = _closure_table([(Q, RL), (IRR, "self")])
    add(Fixture("valioso3", "rationals form one block, irrationals are fixed", _valioso3, [
        Check("pointwise_transitive", _profile("pointwise_transitive"), HOLDS, "status"),
        Check("prop_iv_topological_transitivity", _profile("prop_iv_topological_transitivity"), FAILS, "status"),
        Check("weakly_pointwise_transitive", _profile("weakly_pointwise_transitive"), HOLDS, "status"),
        Check("invariant_closures", run, exp),
    ]))

    add(Fixture("valioso4", "Z-variant: layered action with a point at infinity, and its unit-space factor",
                _valioso4, [
        Check("upstream.prop_iv_topological_transitivity", _profile("prop_iv_topological_transitivity"),
              HOLDS, "status"),
        Check("factor.prop_iv_topological_transitivity",
              _profile("prop_iv_topological_transitivity", "factor"), FAILS, "status"),
        Check("audit.prop_iv", lambda c: transfer_audit(c["map"]).profile["property.prop_iv_topological_transitivity"],
              HOLDS, "status", label="NonTransfer"),
    ]))

    add(Fixture("valioso4_literal", "the R-labelled original; labels in R are outside the representation",
                lambda: {}, [Check("upstream.prop_iv_topological_transitivity", lambda c: None, HOLDS, "status")],
                representable=False, required=False))

    add(Fixture("bor1", "pair groupoid over Z", _bor1, [
        Check("strongly_noncompact", lambda c: c["action"].strongly_noncompact(), True),
        Check("limit_set(0,-2)", lambda c: c["action"].limit_set((Point(0), -2)), SetExpr.empty("strip"), "set"),
        Check("limit_set(0,0)", lambda c: c["action"].limit_set((Point(0), 0)), SetExpr.empty("strip"), "set"),
        Check("limit_set(0,5)", lambda c: c["action"].limit_set((Point(0), 5)), SetExpr.empty("strip"), "set"),
    ]))

    add(Fixture("bor3", "two half-lines times Z", _bor3, [
        Check("limit_set(1)", lambda c: c["action"].limit_set(1), R(0, None, True), "set"),
        Check("limit_set(1)_invariant", lambda c: c["action"].is_invariant(c["action"].limit_set(1)), False),
        Check("limit_set(-1)", lambda c: c["action"].limit_set(-1), R(None, 0, False, True), "set"),
    ]))

    add(Fixture("zuvertaj", "bor3 and its wide subgroupoid with trivial labels on the non-positive block",
                _zuvertaj, [
        Check("theta2.set.nw", _class_set("nw"), R(0, None, True), "set"),
        Check("theta2.set.rec", _class_set("rec"), R(0, None), "set"),
        Check("theta1.set.nw", _class_set("nw", "theta1"), RL, "set"),
        Check("theta2.limit_set(1)", lambda c: c["action"].limit_set(1), R(0, None, True), "set"),
        Check("theta2.limit_set(0)", lambda c: c["action"].limit_set(0), SetExpr.empty(), "set"),
        Check("theta2.limit_set(-1)", lambda c: c["action"].limit_set(-1), SetExpr.empty(), "set"),
    ]))

    add(Fixture("cocoselu", "pair groupoid on [0,1]", _cocoselu, [
        Check("set.alper", _class_set("alper"), R(0, 1, True, True), "set"),
        Check("transitive", _profile("transitive"), HOLDS, "status"),
    ]))

    x3 = SetExpr.points([0, 1, 2])
    add(Fixture("dr_cycle", "Deaconu-Renault groupoid of the 3-cycle", _dr([1, 2, 0], "dr_cycle"), [
        Check("set.per", _class_set("per"), x3, "set"),
        Check("set.wper", _class_set("wper"), x3, "set"),
        Check("set.fix", _class_set("fix"), SetExpr.empty(), "set"),
        Check("set.rec", _class_set("rec"), x3, "set"),
        Check("transitive", _profile("transitive"), HOLDS, "status"),
    ]))

    add(Fixture("dr_tail", "Deaconu-Renault groupoid of 0 -> 1 -> 2 -> 2", _dr([1, 2, 2], "dr_tail"), [
        Check("set.per", _class_set("per"), x3, "set"),
        Check("set.wper", _class_set("wper"), x3, "set"),
        Check("set.fix", _class_set("fix"), SetExpr.empty(), "set"),
        Check("labels(0,0)", lambda c: c["action"].groupoid.arrows.labels_at(Point(0), Point(0)), ALL),
        Check("transitive", _profile("transitive"), HOLDS, "status"),
    ]))

    add(Fixture("pullback_double", "pull-back of the 2-cycle DR groupoid along a 2-to-1 map",
                _pullback_double, [
        Check("recurrence_identity", _pullback_identity, {"pairs": 121, "violations": []}),
        Check("orbits_are_preimages", _pullback_orbits, []),
    ]))

    add(Fixture("partial_interval", "translations restricted to an interval, and a restricted cyclic shift",
                _partial_interval, [
        Check("translation_rec_identity", _partial_rec_identity, []),
        Check("rec((0,1),(3,4))", lambda c: partial_translation_rec(Y_INTERVAL, R(0, 1), R(3, 4)),
              GrpSet.single(3)),
        Check("rec_outside_Y", lambda c: partial_translation_rec(Y_INTERVAL, R(-2, -1), R(1, 2)), EMPTY),
        Check("finite_restriction_identity", _finite_partial_identity, []),
    ]))
    return fx


_CATALOG: Optional[dict] = None


def catalog() -> dict[str, Fixture]:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _fixtures()
    return _CATALOG


def names() -> list[str]:
    return list(catalog())


def get(name: str) -> Fixture:
    try:
        return catalog()[name]
    except KeyError:
        raise UnknownFixture(name) from None


def catalog_load(name: str):
    """(action, expected) for a fixture; expected maps check ids to JSON values."""
    f = get(name)
    if not f.representable:
        from .groupoid import UnrepresentableArrowSet
        raise UnrepresentableArrowSet(f"{name}: {f.summary}")
    return f.context()["action"], {c.key: c.expected_json() for c in f.checks}


def verify(selected: Optional[list] = None) -> dict:
    out = []
    counts = {"match": 0, "mismatch": 0, "unknown": 0, "skipped": 0}
    for name in selected or names():
        res = get(name).verify()
        if "skipped" in res:
            counts["skipped"] += 1
        for c in res["checks"]:
            counts[c["result"]] += 1
        out.append(res)
    return {"fixtures": out, "summary": counts}
