"""Compare the symbolic deciders with the enumeration oracle on shared instances.

Encodable symbolic actions have a finite carrier (so the relative topology is
discrete) and labels that are two-sided periodic up to finitely many integers.
"""
from __future__ import annotations

import random
from math import gcd
from typing import Optional

from .dynamics import (GroupoidAction, NotStronglyNonCompact, mixing_profile, minimal_sets,
                       transitivity_profile, is_semisimple)
from .groupoid import build_equivalence, explicit_block_groupoid, product_with_group
from .grpset import GrpSet
from .oracle import (FiniteInstance, HybridGroupoid, PredicateNotApplicable, Topo, ZPattern,
                     gen_instance, layered_action)
from .setalg import Point, SetExpr, Space
from .verdict import FAILS, HOLDS, UNKNOWN


class NotEncodable(ValueError):
    pass


PROFILE_KEYS = {"transitive": "transitive", "pointwise_transitive": "pointwise_transitive",
                "weakly_pointwise_transitive": "weakly_pointwise_transitive", "prop_i": "prop_i",
                "prop_i_prime": "prop_i_prime", "prop_ii": "prop_ii",
                "prop_iii_recurrent_transitivity": "prop_iii", "prop_iv_topological_transitivity": "prop_iv"}
FLAGS = ("fixed", "periodic", "weakly_periodic", "almost_periodic", "recurrent", "nonwandering")
KINDS = ("fix", "per", "wper", "alper", "rec", "nw")


# ---------------------------------------------------------------------------
# label conversion


def grp_to_pattern(g: GrpSet) -> ZPattern:
    if g.is_finite():
        return ZPattern.finite(g.elements())
    if g.lp != g.rp or g.lres != g.rres:
        raise NotEncodable(f"label set {g!r} is not two-sided periodic")
    return ZPattern(g.rp, g.rres, [n for n in range(g.lo, g.hi) if (n in g) != (n % g.rp in g.rres)])


def pattern_to_grp(z: ZPattern) -> GrpSet:
    if z.is_finite():
        return GrpSet.finite(z.elements())
    b = z.bound()
    return GrpSet(-b, b + 1, [n for n in range(-b, b + 1) if n in z], z.p, z.res, z.p, z.res)


def same_labels(g: GrpSet, z: ZPattern) -> bool:
    """Equality by membership over a window that covers both irregular parts and two full periods."""
    period = g.lp * g.rp // gcd(g.lp, g.rp)
    period = period * z.p // gcd(period, z.p)
    b = max(abs(g.lo), abs(g.hi), z.bound()) + 2 * period + 1
    return all((n in g) == (n in z) for n in range(-b, b + 1))


# ---------------------------------------------------------------------------
# encodings


def _uid(p: Point):
    if p.b == 0 and p.a.denominator == 1:
        return int(p.a)
    return str(p)


class Encoding:
    """A symbolic action with its oracle twin and the point correspondence."""

    def __init__(self, symbolic: GroupoidAction, instance: FiniteInstance, to_oracle: dict):
        self.symbolic = symbolic
        self.instance = instance
        self.to_oracle = to_oracle
        self.to_symbolic = {v: k for k, v in to_oracle.items()}

    def oracle_set(self, s: SetExpr) -> frozenset:
        return frozenset(o for p, o in self.to_oracle.items() if s.contains(p))

    def symbolic_set(self, a) -> SetExpr:
        return SetExpr.points([self.to_symbolic[o] for o in a], self.symbolic.carrier.kind)


def _finite_line_points(a: SetExpr) -> list:
    ls = a.as_line()
    return [b for b, isp in zip(ls.bps, ls.pt) if isp]


def from_symbolic(act: GroupoidAction) -> Encoding:
    """Encode a symbolic action on a finite carrier as an oracle instance."""
    g = act.groupoid
    if g.carrier.count_upto(65) > 64 or act.carrier.count_upto(257) > 256:
        raise NotEncodable("carrier is not a small finite set")
    if act.rule == "shift":
        raise NotEncodable("shift rule acts on infinitely many layers")
    ups = _finite_line_points(g.carrier)
    uid = {p: _uid(p) for p in ups}
    labels = {}
    for x in ups:
        for y in ups:
            lab = g.arrows.labels_at(x, y)
            if lab:
                labels[(uid[x], uid[y])] = grp_to_pattern(lab)
    units = [uid[p] for p in ups]
    og = HybridGroupoid(Topo.discrete(units), labels)
    if act.rule == "canonical":
        oa = layered_action(og, [0], {u: [0] for u in units})
        to_o = {p: (uid[p], 0) for p in ups}
        meta = {"source": act.name, "layers": {"perm": [0], "layers": {u: [0] for u in units},
                                               "order": "discrete", "twist": {}}}
        return Encoding(act, FiniteInstance(oa, meta), to_o)
    perm = list(act.perm)
    layers = {u: [] for u in units}
    to_o = {}
    for h in range(len(perm)):
        for p in _finite_line_points(SetExpr.line(act.carrier.layer_at(h))):
            layers[uid[p]].append(h)
            to_o[(p, h)] = (uid[p], h)
    oa = layered_action(og, perm, layers)
    meta = {"source": act.name, "layers": {"perm": perm, "layers": layers, "order": "discrete", "twist": {}}}
    return Encoding(act, FiniteInstance(oa, meta), to_o)


def to_symbolic(inst: FiniteInstance) -> Encoding:
    """Encode a discrete untwisted layered oracle instance symbolically."""
    if not inst.encodable():
        raise NotEncodable("instance is not Hausdorff, or is twisted, or has no layer description")
    og = inst.groupoid
    lay = inst.meta["layers"]
    if any(not isinstance(u, int) for u in og.units):
        raise NotEncodable("units must be integers")
    labels = {(x, y): pattern_to_grp(v) for (x, y), v in og.labels.items()}
    g = explicit_block_groupoid(list(og.units), labels)
    perm = list(lay["perm"])
    if len(perm) == 1:
        act = GroupoidAction(g, name=f"seed{inst.meta.get('seed')}")
        to_o = {Point(x): (x, 0) for x in og.units}
    else:
        pts = [(Point(x), s) for x, s in inst.action.points]
        act = GroupoidAction(g, SetExpr.points(pts, "strip"), rule="perm", perm=perm,
                             name=f"seed{inst.meta.get('seed')}")
        to_o = {(Point(x), s): (x, s) for x, s in inst.action.points}
    return Encoding(act, inst, to_o)


# ---------------------------------------------------------------------------
# named encodable instances


def named_instances() -> dict:
    """Small symbolic instances with finite carriers, built with the ordinary constructors."""
    grid = SetExpr.points([Point(k) for k in range(-2, 3)])
    block = SetExpr.points([Point(k) for k in (-1, 0, 1)])
    tut = build_equivalence(Space(grid), [block])
    out = {"tutosh_grid": GroupoidAction(tut, name="tutosh_grid"),
           "maidevreme_grid": GroupoidAction(product_with_group(tut), name="maidevreme_grid")}
    return out


# ---------------------------------------------------------------------------
# comparison


def _status(v) -> str:
    return v.status


def _ostatus(flag) -> str:
    return HOLDS if flag else FAILS


class Agreement:
    """Outcome of one cross-check: per predicate, agree / disagree / unknown."""

    def __init__(self, name: str):
        self.name = name
        self.rows: list = []

    def add(self, predicate: str, symbolic, oracle):
        if symbolic == UNKNOWN:
            res = "unknown"
        else:
            res = "agree" if symbolic == oracle else "disagree"
        self.rows.append({"predicate": predicate, "symbolic": symbolic, "oracle": oracle, "result": res})

    @property
    def disagreements(self) -> list:
        return [r for r in self.rows if r["result"] == "disagree"]

    @property
    def unknown(self) -> int:
        return sum(r["result"] == "unknown" for r in self.rows)

    def to_json(self) -> dict:
        return {"name": self.name, "checked": len(self.rows), "unknown": self.unknown,
                "disagreements": self.disagreements}


def _sym_set(enc: Encoding, s) -> list:
    return sorted(map(repr, enc.oracle_set(s)))


def _ora_set(a) -> list:
    return sorted(map(repr, a))


def cross_check(sym, predicates: Optional[list] = None, seed: int = 0, samples: int = 4) -> Agreement:
    """Evaluate the listed predicates on both sides; `sym` is a symbolic action or an Encoding."""
    enc = sym if isinstance(sym, Encoding) else from_symbolic(sym)
    act, oa = enc.symbolic, enc.instance.action
    preds = predicates or ["is_open", "strongly_noncompact", "profile", "flags", "class_sets", "orbits",
                           "limit_sets", "recurrence", "saturation", "minimal", "mixing"]
    rep = Agreement(act.name)
    rng = random.Random(seed)
    pts = sorted(enc.to_oracle, key=lambda p: repr(enc.to_oracle[p]))
    snc = oa.snc()
    if "is_open" in preds:
        rep.add("is_open", _status(act.open_groupoid()), _ostatus(oa.groupoid.is_open()))
    if "strongly_noncompact" in preds:
        rep.add("strongly_noncompact", _ostatus(act.strongly_noncompact()), _ostatus(snc))
    if "profile" in preds:
        sp, op = transitivity_profile(act), oa.profile()
        for k, ok in PROFILE_KEYS.items():
            rep.add(f"profile.{k}", sp[k].status, op[ok]["status"])
    if "flags" in preds:
        for p in pts:
            sf, of = act.classify_point(p), oa.flags(enc.to_oracle[p])
            for k in FLAGS:
                o = of[k]
                rep.add(f"flag.{k}@{enc.to_oracle[p]}", sf[k].status,
                        "NotApplicable" if o is None else _ostatus(o))
    if "class_sets" in preds:
        for k in KINDS:
            try:
                s, decided = act.point_class_set(k)
                sv = _sym_set(enc, s) if decided else UNKNOWN
            except NotStronglyNonCompact:
                sv = "NotApplicable"
            try:
                ov = _ora_set(oa.class_set(k))
            except PredicateNotApplicable:
                ov = "NotApplicable"
            rep.add(f"class.{k}", sv, ov)
    if "orbits" in preds:
        for p in pts:
            rep.add(f"orbit@{enc.to_oracle[p]}", _sym_set(enc, act.orbit(p)), _ora_set(oa.orbit(enc.to_oracle[p])))
            rep.add(f"orbit_closure@{enc.to_oracle[p]}", _sym_set(enc, act.orbit(p, closed=True)),
                    _ora_set(oa.topo.closure(oa.orbit(enc.to_oracle[p]))))
            rep.add(f"invariant_closure@{enc.to_oracle[p]}",
                    _sym_set(enc, act.invariant_closure(act.point_set(p))),
                    _ora_set(oa.invariant_closure({enc.to_oracle[p]})))
    if "limit_sets" in preds and snc:
        for p in pts:
            rep.add(f"limit_set@{enc.to_oracle[p]}", _sym_set(enc, act.limit_set(p)),
                    _ora_set(oa.limit_set(enc.to_oracle[p])))
    if "recurrence" in preds or "saturation" in preds:
        opts = list(oa.points)
        for i in range(samples):
            m = frozenset(rng.sample(opts, rng.randint(1, len(opts))))
            n = frozenset(rng.sample(opts, rng.randint(1, len(opts))))
            if "recurrence" in preds:
                sr = act.recurrence_set(enc.symbolic_set(m), enc.symbolic_set(n))
                orr = oa.recurrence_set(m, n)
                ok = all(same_labels(sr.labels_at(Point(x) if isinstance(x, int) else x,
                                                  Point(y) if isinstance(y, int) else y),
                                     orr.get((x, y), ZPattern.empty()))
                         for x in oa.groupoid.units for y in oa.groupoid.units)
                rep.add(f"recurrence#{i}", HOLDS if ok else FAILS, HOLDS)
            if "saturation" in preds:
                rep.add(f"saturation#{i}", _sym_set(enc, act.saturate(enc.symbolic_set(m))),
                        _ora_set(oa.saturate(m)))
    if "minimal" in preds:
        ms = minimal_sets(act)
        found = [_sym_set(enc, s) for s in ms["sets"]]
        # singleton orbits are reported as a region; the closed ones are minimal
        for p in pts:
            one = act.point_set(p)
            if ms["singleton_region"].contains(p) and act.sigma.is_closed(one):
                found.append(_sym_set(enc, one))
        rep.add("minimal_sets", sorted(found) if ms["complete"] else UNKNOWN,
                sorted(_ora_set(s) for s in oa.minimal_sets()))
        rep.add("semisimple", is_semisimple(act).status, _ostatus(oa.is_semisimple()))
    if "mixing" in preds:
        sm, om = mixing_profile(act), oa.mixing()
        for k in ("weak", "strong"):
            rep.add(f"mixing.{k}", sm[k].status, om[k]["status"])
    return rep


def encodable_params() -> dict:
    return {"hausdorff": "discrete", "twist": False, "max_units": 4, "max_layers": 3}


def seeded_cross_check(seed: int, cases: int) -> dict:
    """Cross-check `cases` seeded encodable instances; returns a JSON-ready summary."""
    rows, total, unknown, bad = [], 0, 0, []
    for i in range(cases):
        s = seed * 100003 + i
        inst = gen_instance(s, encodable_params())
        enc = to_symbolic(inst)
        rep = cross_check(enc, seed=s)
        total += len(rep.rows)
        unknown += rep.unknown
        if rep.disagreements:
            bad.append({"seed": s, "disagreements": rep.disagreements})
        rows.append({"seed": s, "checked": len(rep.rows), "unknown": rep.unknown,
                     "disagreements": len(rep.disagreements)})
    return {"cases": cases, "predicates": total, "unknown": unknown,
            "unknown_rate": round(unknown / total, 4) if total else 0.0, "disagreements": bad, "rows": rows}
