"""Independent re-verification of counterexample witnesses.

Each Fails verdict carries a witness. The checks here confirm the witness by a
route different from the one that produced it: saturations instead of
recurrence sets, anchor images instead of arrow sets, window enumeration
instead of pattern algebra.
"""
from __future__ import annotations

from typing import Optional

from . import oracle as O
from .setalg import SetExpr, parse_point
from .verdict import FAILS, HOLDS


class Recheck:
    """Outcome of re-verifying one witness."""

    def __init__(self, source: str, key: str, ok: bool, reason: str = ""):
        self.source = source
        self.key = key
        self.ok = ok
        self.reason = reason

    def to_json(self) -> dict:
        d = {"source": self.source, "key": self.key, "verified": self.ok}
        if self.reason:
            d["reason"] = self.reason
        return d


# ---------------------------------------------------------------------------
# symbolic witnesses


def parse_sym_point(v):
    if isinstance(v, list):
        return (parse_point(v[0]), None if v[1] == "inf" else int(v[1]))
    return parse_point(v)


def _sets(w, key) -> list:
    return [SetExpr.from_json(d) for d in w[key]]


def _nonempty_open(act, *sets) -> bool:
    return all(not s.is_empty() and act.sigma.is_open(s) and s.issubset(act.carrier) for s in sets)


def recheck_symbolic(act, key: str, verdict) -> tuple[bool, str]:
    """Confirm a symbolic Fails verdict for `key` on the action `act`."""
    w = verdict.witness
    if w is None:
        return False, "no witness"
    label = verdict.label or ""
    if label.startswith("open groupoid") and act.open_groupoid().status != HOLDS:
        return False, "equivalence used on a groupoid that is not open"
    sig, space = act.carrier, act.sigma
    if "points" in w:
        a, b = (parse_sym_point(p) for p in w["points"])
        ok = act.contains(a) and act.contains(b) and not act.orbit(b).contains(a) and \
            act.recurrence_set(act.point_set(a), act.point_set(b)).is_empty()
        return ok, "" if ok else "points share an orbit"
    if "orbits" in w:
        orbs = _sets(w, "orbits")
        f = SetExpr.from_json(w["fixed_region"])
        cover = f
        for o in orbs:
            cover = cover | o
        if cover != sig:
            return False, "orbits do not cover the space"
        if any(not act.is_invariant(o) or space.is_dense(o) for o in orbs):
            return False, "an orbit is dense or not invariant"
        if not f.is_empty():
            # fixed points are singleton orbits; one point is dense only in a one-point space
            if not (space.hausdorff and sig.count_upto(2) > 1):
                return False, "fixed region not shown nowhere dense"
            if not act.is_invariant(f):
                return False, "fixed region not invariant"
        return True, ""
    if "invariant_closures" in w:
        cls = _sets(w, "invariant_closures")
        for c in cls:
            if c == sig or not space.is_closed(c) or not act.is_invariant(c):
                return False, "a listed closure is not a proper closed invariant set"
        for r in act.representatives():
            ps = act.point_set(r)
            if any(ps.issubset(c) for c in cls):
                continue
            if act.orbit(r) == ps and space.is_closed(ps) and ps != sig:
                continue
            return False, f"point {r!r} is not covered"
        return True, ""
    if "invariant_set" in w:
        a = SetExpr.from_json(w["invariant_set"])
        cl = space.closure(a)
        ok = act.is_invariant(a) and cl != sig and not space.interior(cl).is_empty()
        return ok, "" if ok else "set is dense or nowhere dense"
    if "invariant_open" in w:
        a = SetExpr.from_json(w["invariant_open"])
        ok = _nonempty_open(act, a) and act.is_invariant(a) and space.closure(a) != sig
        return ok, "" if ok else "open set is dense or not invariant"
    if "invariant_opens" in w:
        a, b = _sets(w, "invariant_opens")
        ok = _nonempty_open(act, a, b) and act.is_invariant(a) and act.is_invariant(b) and (a & b).is_empty()
        return ok, "" if ok else "opens meet"
    if "invariant_closed" in w:
        a, b = _sets(w, "invariant_closed")
        ok = all(space.is_closed(s) and act.is_invariant(s) and s != sig for s in (a, b)) and (a | b) == sig
        return ok, "" if ok else "closed sets do not split the space"
    if "U" in w and "saturation" in w:
        u, sat = SetExpr.from_json(w["U"]), SetExpr.from_json(w["saturation"])
        g = act.groupoid
        ok = g.base.is_open(u) and u.issubset(sat) and g.saturate_units(sat) == sat and \
            g.saturate_units(u) == sat and g.base.interior(sat) != sat
        return ok, "" if ok else "saturation is open"
    if {"U", "U2", "V", "V2"} <= set(w):
        u, u2, v, v2 = (SetExpr.from_json(w[k]) for k in ("U", "U2", "V", "V2"))
        if not _nonempty_open(act, u, u2, v, v2):
            return False, "witness sets are not non-empty opens"
        if w.get("reason") == "two distinct units":
            # ranges of the two recurrence sets lie over disjoint unit sets
            ok = (act.rho_set(v) & act.rho_set(v2)).is_empty()
            return ok, "" if ok else "anchor images meet"
        ok = (act.recurrence_set(v, u).inverse() & act.recurrence_set(v2, u2).inverse()).is_empty()
        return ok, "" if ok else "recurrence sets meet"
    if "U" in w and "V" in w:
        u, v = SetExpr.from_json(w["U"]), SetExpr.from_json(w["V"])
        if not _nonempty_open(act, u, v):
            return False, "witness sets are not non-empty opens"
        if "strong" in key:
            rest = act.arrows - act.recurrence_set(v, u).inverse()
            ok = not act.relcompact(rest)
            return ok, "" if ok else "complement is relatively compact"
        ok = not act.saturate(u).intersects(v)
        return ok, "" if ok else "saturation of U meets V"
    if "orbit_closure" in w:
        c = SetExpr.from_json(w["orbit_closure"])
        if not space.is_closed(c) or not act.is_invariant(c):
            return True, ""
        for r in act.representatives():
            ps = act.point_set(r)
            if ps.issubset(c):
                c2 = space.closure(act.saturate(ps))
                if c2 != c and c2.issubset(c):
                    return True, ""
        return False, "orbit closure looks minimal"
    return False, f"unrecognised witness shape {sorted(w)}"


# ---------------------------------------------------------------------------
# oracle witnesses


def _fs(v) -> frozenset:
    return frozenset(O._pt_parse(p) for p in v)


def recheck_oracle(inst, key: str, w) -> tuple[bool, str]:
    """Confirm an oracle Fails verdict by queries through oracle_eval and window enumeration."""
    act = inst.action if isinstance(inst, O.FiniteInstance) else inst
    if w is None:
        return False, "no witness"
    tp, full = act.topo, frozenset(act.points)
    q = lambda op, **kw: O.oracle_eval(act, {"op": op, **kw})
    sat = lambda a: _fs(q("saturate", A=O._set_json(a)))
    invariant = lambda a: sat(a) == frozenset(a)
    if key == "is_open":
        x, n, y = O._pt_parse(w["arrow"][0]), w["arrow"][1], O._pt_parse(w["arrow"][2])
        g = act.groupoid
        up = g.topo.up
        img = {y2 for y2 in up[y] if any(n in g.L(x2, y2) for x2 in up[x])}
        ok = any(z not in img for y2 in img for z in up[y2])
        return ok, "" if ok else "source image is open"
    if key == "transitive":
        a, b = (_fs(o) for o in w["orbits"])
        s = next(iter(sorted(a, key=repr)))
        ok = not (b & _fs(q("orbit", point=O._pt_json(s))))
        return ok, "" if ok else "points share an orbit"
    if key == "pointwise_transitive":
        orbs = [_fs(o) for o in w["orbits"]]
        cover = frozenset().union(*orbs)
        ok = cover == full and all(_fs(q("orbit", point=O._pt_json(min(o, key=repr)))) == o and
                                   tp.closure(o) != full for o in orbs)
        return ok, "" if ok else "an orbit is dense"
    if key == "weakly_pointwise_transitive":
        cls = {_fs(c) for c in w["closures"]}
        ok = full not in cls and all(_fs(q("invariant_closure", A=[O._pt_json(s)])) in cls for s in act.points)
        return ok, "" if ok else "some point has dense invariant closure"
    if key == "prop_i":
        a, b = (_fs(c) for c in w["closed"])
        ok = all(tp.is_closed(s) and invariant(s) and s != full for s in (a, b)) and a | b == full
        return ok, "" if ok else "closed sets do not split the space"
    if key == "prop_i_prime":
        a, b = (_fs(c) for c in w["opens"])
        ok = all(s and tp.is_open(s) and invariant(s) for s in (a, b)) and not a & b
        return ok, "" if ok else "opens meet"
    if key == "prop_ii":
        a = _fs(w["open"])
        ok = bool(a) and tp.is_open(a) and invariant(a) and tp.closure(a) != full
        return ok, "" if ok else "open set is dense"
    if key == "prop_iii":
        u, v = _fs(w["U"]), _fs(w["V"])
        ok = bool(u) and bool(v) and tp.is_open(u) and tp.is_open(v) and not sat(u) & v
        return ok, "" if ok else "saturation of U meets V"
    if key == "prop_iv":
        a = _fs(w["invariant"])
        cl = tp.closure(a)
        ok = invariant(a) and cl != full and bool(tp.interior(cl))
        return ok, "" if ok else "set is dense or nowhere dense"
    if key in ("weak", "mixing.weak"):
        from .suites import brute_recurrence
        sets = [_fs(w[k]) for k in ("U", "V", "U2", "V2")]
        if not all(s and tp.is_open(s) for s in sets):
            return False, "witness sets are not non-empty opens"
        r1 = brute_recurrence(act, sets[0], sets[1])
        r2 = brute_recurrence(act, sets[2], sets[3])
        ok = not O.aset_inter(r1, r2)
        return ok, "" if ok else "recurrence sets meet"
    if key in ("strong", "mixing.strong"):
        from .suites import brute_recurrence
        u, v = _fs(w["U"]), _fs(w["V"])
        rest = O.aset_diff(act.groupoid.labels, brute_recurrence(act, u, v))
        ok = any(not lab.is_finite() for lab in rest.values())
        return ok, "" if ok else "complement is relatively compact"
    return False, f"unrecognised key {key}"


def oracle_fails(inst) -> list[tuple[str, dict]]:
    """Every Fails verdict the oracle reports for one instance, as (key, witness)."""
    act = inst.action if isinstance(inst, O.FiniteInstance) else inst
    out = []
    for k, v in act.profile().items():
        if v["status"] == "Fails":
            out.append((k, v.get("witness")))
    for k, v in act.mixing().items():
        if v["status"] == "Fails":
            out.append((f"mixing.{k}", v.get("witness")))
    w = act.groupoid.open_witness()
    if w is not None:
        out.append(("is_open", w))
    return out


# conversion of symbolic witnesses to oracle form on encoded instances
_SYM_TO_ORACLE_KEY = {
    "transitive": "transitive", "pointwise_transitive": "pointwise_transitive",
    "weakly_pointwise_transitive": "weakly_pointwise_transitive", "prop_i": "prop_i",
    "prop_i_prime": "prop_i_prime", "prop_ii": "prop_ii", "prop_iii_recurrent_transitivity": "prop_iii",
    "prop_iv_topological_transitivity": "prop_iv", "mixing.weak": "weak", "mixing.strong": "strong",
}


def symbolic_to_oracle(enc, key: str, w: dict) -> Optional[tuple[str, dict]]:
    """Translate a symbolic witness into the oracle's witness format for the encoded twin."""
    conv = lambda d: O._set_json(enc.oracle_set(SetExpr.from_json(d)))
    ok = _SYM_TO_ORACLE_KEY.get(key)
    if ok is None:
        return None
    if "points" in w:
        pts = [enc.to_oracle[parse_sym_point(p)] for p in w["points"]]
        return ok, {"orbits": [[O._pt_json(p)] for p in pts]}
    if "orbits" in w:
        f = enc.oracle_set(SetExpr.from_json(w["fixed_region"]))
        return ok, {"orbits": [conv(o) for o in w["orbits"]] + [[O._pt_json(p)] for p in sorted(f, key=repr)]}
    if "invariant_closures" in w:
        act = enc.instance.action
        # fixed points contribute their own singleton closures
        cls = [conv(c) for c in w["invariant_closures"]]
        for s in act.points:
            if act.orbit(s) == {s} and act.topo.is_closed({s}):
                cls.append([O._pt_json(s)])
        return ok, {"closures": cls}
    if "invariant_set" in w:
        return ok, {"invariant": conv(w["invariant_set"])}
    if "invariant_open" in w:
        return ok, {"open": conv(w["invariant_open"])}
    if "invariant_opens" in w:
        return ok, {"opens": [conv(d) for d in w["invariant_opens"]]}
    if "invariant_closed" in w:
        return ok, {"closed": [conv(d) for d in w["invariant_closed"]]}
    if {"U", "V", "U2", "V2"} <= set(w):
        return ok, {k: conv(w[k]) for k in ("U", "V", "U2", "V2")}
    if "U" in w and "V" in w:
        return ok, {"U": conv(w["U"]), "V": conv(w["V"])}
    return None


# ---------------------------------------------------------------------------
# collections


def symbolic_fails(act) -> list[tuple[str, object]]:
    """(key, verdict) for every Fails verdict of the symbolic deciders on an action."""
    from .dynamics import is_semisimple, mixing_profile, transitivity_profile
    from .groupoid import is_open_groupoid

    out = [(k, v) for k, v in transitivity_profile(act).items() if v.status == FAILS]
    out += [(f"mixing.{k}", v) for k, v in mixing_profile(act).items() if v.status == FAILS]
    v = is_open_groupoid(act.groupoid)
    if v.status == FAILS:
        out.append(("is_open", v))
    v = is_semisimple(act)
    if v.status == FAILS:
        out.append(("semisimple", v))
    return out


def fixture_witness_report() -> list[dict]:
    """Re-verify every Fails verdict produced on the catalog fixtures."""
    from . import catalog
    from .dynamics import GroupoidAction
    from .morphism import transfer_audit

    rows = []
    for name in catalog.names():
        fx = catalog.get(name)
        if not fx.representable:
            continue
        ctx = fx.context()
        for which in sorted(k for k, v in ctx.items() if isinstance(v, GroupoidAction)):
            act = ctx[which]
            for key, v in symbolic_fails(act):
                ok, why = recheck_symbolic(act, key, v)
                rows.append(Recheck(f"catalog:{name}:{which}", key, ok, why).to_json())
            if which == "action" and fx.hints:
                for hk, hw in sorted(fx.hints.items()):
                    ok, why = recheck_hint(act, hk, hw)
                    rows.append(Recheck(f"catalog:{name}:hint", hk, ok, why).to_json())
        if "map" in ctx:
            rep = transfer_audit(ctx["map"])
            for k, v in rep.profile.items():
                if v.status == FAILS:
                    rows.append(Recheck(f"catalog:{name}:audit", k, False, "transfer statement violated").to_json())
    return rows


def recheck_hint(act, key: str, hint: dict) -> tuple[bool, str]:
    """Hints are witness sets stated for a fixture; they must verify like computed ones."""
    from .verdict import Verdict
    w = {k: v.to_json() for k, v in hint.items()}
    if key == "is_open":
        g = act.groupoid
        w["saturation"] = g.saturate_units(hint["U"]).to_json()
    return recheck_symbolic(act, key, Verdict.fails(w))


def oracle_witness_report(instances) -> list[dict]:
    rows = []
    for name, inst in instances:
        for key, w in oracle_fails(inst):
            k = key.split(".", 1)[1] if key.startswith("mixing.") else key
            ok, why = recheck_oracle(inst, k, w)
            rows.append(Recheck(name, key, ok, why).to_json())
    return rows


def encoded_witness_report(encodings) -> list[dict]:
    """Symbolic Fails on encodable instances, re-verified on the oracle twin."""
    rows = []
    for name, enc in encodings:
        act = enc.symbolic
        for key, v in symbolic_fails(act):
            ok, why = recheck_symbolic(act, key, v)
            conv = symbolic_to_oracle(enc, key, v.witness) if v.witness else None
            if ok and conv is not None:
                ok, why = recheck_oracle(enc.instance, conv[0], conv[1])
                why = f"oracle: {why}" if why else ""
            rows.append(Recheck(name, key, ok, why).to_json())
    return rows
