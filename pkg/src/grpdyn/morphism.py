"""Homomorphisms between actions of one block groupoid, factors and extensions.

A map between actions is one of a few piecewise classes whose continuity is
structural: the identity, the anchor (projection onto the unit space), a
layer relabelling between two ``perm`` actions and a constant map.  Anchor
compatibility and equivariance are checked on representatives of the cells
cut out by all breakpoints, with labels sampled over a full period.
"""
from __future__ import annotations

from math import gcd
from typing import Sequence

from .grpset import GrpSet
from .groupoid import BlockGroupoid, GroupoidMismatch, UnrepresentableArrowSet
from .dynamics import (GroupoidAction, VerdictReport, _cycle_len, _pj,
                       is_minimal, minimal_sets, transitivity_profile)
from .setalg import SetExpr, as_lpoint
from .verdict import FAILS, HOLDS, NOT_APPLICABLE, UNKNOWN, Verdict


class NotAnEpimorphism(ValueError):
    pass


class NotAnActionGroupoid(ValueError):
    pass


class NotCompactInstance(ValueError):
    pass


class NoCandidateFound(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# point maps


class IdentityMap:
    name = "identity"

    def point(self, p):
        return p

    def image(self, a: SetExpr) -> SetExpr:
        return a

    def preimage(self, a: SetExpr, source: GroupoidAction) -> SetExpr:
        return source.sigma.clip(a)

    def to_json(self):
        return {"map": "identity"}


class AnchorMap:
    """sigma -> rho(sigma), onto the canonical action."""

    name = "anchor"

    def __init__(self, act: GroupoidAction):
        self.act = act

    def point(self, p):
        return self.act.rho(p)

    def image(self, a: SetExpr) -> SetExpr:
        return self.act.rho_set(a)

    def preimage(self, a: SetExpr, source: GroupoidAction) -> SetExpr:
        return source.rho_preimage(a)

    def to_json(self):
        return {"map": "anchor"}


class LayerMap:
    """(y, i) -> (y, table[i]) between two layered carriers."""

    name = "layers"

    def __init__(self, table: Sequence[int], kind: str = "strip"):
        self.table = tuple(table)
        self.kind = kind

    def point(self, p):
        y, h = as_lpoint(p)
        return (y, self.table[h])

    def image(self, a: SetExpr) -> SetExpr:
        items = [(GrpSet.single(self.table[i]), a.layer_at(i)) for i in range(len(self.table))]
        return SetExpr(self.kind, items)

    def preimage(self, a: SetExpr, source: GroupoidAction) -> SetExpr:
        items = [(GrpSet.single(i), a.layer_at(self.table[i])) for i in range(len(self.table))]
        return source.sigma.clip(SetExpr(self.kind, items))

    def to_json(self):
        return {"map": "layers", "table": list(self.table)}


class ConstantMap:
    name = "constant"

    def __init__(self, value, kind: str = "line"):
        self.value = value
        self.kind = kind

    def point(self, p):
        return self.value

    def image(self, a: SetExpr) -> SetExpr:
        return SetExpr.points([self.value], self.kind) if a else SetExpr.empty(self.kind)

    def preimage(self, a: SetExpr, source: GroupoidAction) -> SetExpr:
        return source.carrier if a.contains(self.value) else SetExpr.empty(source.carrier.kind)

    def to_json(self):
        return {"map": "constant", "value": _pj(self.value)}


class ActionMap:
    def __init__(self, source: GroupoidAction, target: GroupoidAction, fmap, name: str = ""):
        self.source = source
        self.target = target
        self.fmap = fmap
        self.name = name or fmap.name

    def __call__(self, p):
        return self.fmap.point(p)

    def image(self, a: SetExpr) -> SetExpr:
        return self.target.sigma.clip(self.fmap.image(a))

    def preimage(self, a: SetExpr) -> SetExpr:
        return self.fmap.preimage(a, self.source)

    def to_json(self) -> dict:
        return {"name": self.name, "map": self.fmap.to_json()}


def _same_groupoid(a: BlockGroupoid, b: BlockGroupoid) -> bool:
    return a is b or (a.carrier == b.carrier and a.arrows.equals(b.arrows))


def _period(act: GroupoidAction) -> int:
    if act.rule != "perm":
        return 1
    out = 1
    for i in range(len(act.perm)):
        c = _cycle_len(act.perm, i)
        out = out * c // gcd(out, c)
    return out


def _label_samples(g: GrpSet, period: int) -> list[int]:
    """Members of g hitting every residue class mod period that g meets in its window and tails."""
    span = period * max(g.lp, g.rp, 1)
    lo, hi = g.lo - 2 * span, g.hi + 2 * span
    seen, out = set(), []
    for n in sorted(range(lo, hi + 1), key=lambda v: (abs(v), v)):
        if n in g:
            key = n if g.lo <= n < g.hi else (n % period, n >= g.hi)
            if key not in seen:
                seen.add(key)
                out.append(n)
    return sorted(out)


def check_homomorphism(f: ActionMap, require_epi: bool = True) -> Verdict:
    src, tgt = f.source, f.target
    if not _same_groupoid(src.groupoid, tgt.groupoid):
        raise GroupoidMismatch("source and target act through different groupoids")
    period = max(_period(src), 1) * max(_period(tgt), 1)
    for r in src.representatives():
        img = f(r)
        if not tgt.contains(img):
            return Verdict.fails({"point": _pj(r), "reason": "image leaves the target carrier"})
        if tgt.rho(img) != src.rho(r):
            return Verdict.fails({"point": _pj(r), "reason": "anchors disagree"})
        fib = src.fiber(r)
        y = src.rho(r)
        for atom in fib.atoms():
            region, lab = atom[1], atom[-1]
            xs = [x for _, reps in region.pieces(src.breakpoints()) for x in reps]
            for x in xs:
                for n in _label_samples(lab, period):
                    arrow = (x, y, n)
                    lhs = f(src.act_point(arrow, r))
                    rhs = tgt.act_point(arrow, img)
                    if lhs != rhs:
                        return Verdict.fails({"point": _pj(r), "arrow": [_pj(x), _pj(y), n],
                                              "reason": "not equivariant"})
    if require_epi:
        image = f.image(src.carrier)
        if image != tgt.carrier:
            missing = tgt.carrier - image
            return Verdict.fails({"reason": "not surjective", "missing": missing.to_json()})
    return Verdict.holds()


def rho_factor(act: GroupoidAction) -> ActionMap:
    target = GroupoidAction(act.groupoid, name=f"{act.name}/units" if act.name else "units")
    if act.rule == "canonical":
        return ActionMap(act, target, IdentityMap(), "identity")
    return ActionMap(act, target, AnchorMap(act), "anchor")


def _require_epi(f: ActionMap):
    v = check_homomorphism(f, require_epi=True)
    if v.status != HOLDS:
        raise NotAnEpimorphism(str(v.witness))


# ---------------------------------------------------------------------------
# transfer audit


AUDIT_WORDS = {HOLDS: "Confirmed", FAILS: "Violated", UNKNOWN: "Undecided", NOT_APPLICABLE: "Vacuous"}


def _confirmed(witness=None) -> Verdict:
    return Verdict.holds(witness, label="Confirmed")


def _violated(witness) -> Verdict:
    return Verdict.fails(witness, label="Violated")


def _undecided(reason: str) -> Verdict:
    return Verdict.unknown(reason)


def transfer_audit(f: ActionMap) -> VerdictReport:
    """Evaluate both sides of each transfer statement for an epimorphism."""
    _require_epi(f)
    src, tgt = f.source, f.target
    rep = VerdictReport(f"{src.name or 'source'} -> {tgt.name or 'target'}")
    snc = src.strongly_noncompact()

    # images of the point classes
    for kind in ("fix", "per", "wper", "alper", "rec", "nw"):
        key = f"class_image.{kind}"
        if kind in ("rec", "nw") and not snc:
            rep.add(key, Verdict.not_applicable("groupoid is not strongly non-compact"))
            continue
        a, da = src.point_class_set(kind)
        b, db = tgt.point_class_set(kind)
        img = f.image(a)
        if img.issubset(b):
            rep.add(key, _confirmed() if (da and db) else _undecided("class sets not fully decided"))
        else:
            rep.add(key, _violated({"image": img.to_json(), "target_set": b.to_json()}) if (da and db)
                    else _undecided("class sets not fully decided"))

    # transitivity properties
    up, down = transitivity_profile(src), transitivity_profile(tgt)
    for k in ("transitive", "pointwise_transitive", "prop_i", "prop_i_prime", "prop_ii",
              "prop_iii_recurrent_transitivity"):
        a, b = up[k].status, down[k].status
        if a == FAILS:
            rep.add(f"property.{k}", Verdict.not_applicable("source lacks the property"))
        elif a == HOLDS and b == HOLDS:
            rep.add(f"property.{k}", _confirmed())
        elif a == HOLDS and b == FAILS:
            rep.add(f"property.{k}", _violated({"target": down[k].to_json()}))
        else:
            rep.add(f"property.{k}", _undecided("verdict unknown on one side"))
    a, b = up["prop_iv_topological_transitivity"].status, down["prop_iv_topological_transitivity"].status
    if a == HOLDS and b == FAILS:
        if src.open_groupoid().status == HOLDS:
            rep.add("property.prop_iv_topological_transitivity",
                    _violated({"reason": "open groupoid must transfer (iv)"}))
        else:
            rep.add("property.prop_iv_topological_transitivity",
                    Verdict.holds({"target": down["prop_iv_topological_transitivity"].to_json()},
                                  label="NonTransfer"))
    elif a == HOLDS and b == HOLDS:
        rep.add("property.prop_iv_topological_transitivity", _confirmed())
    elif a == FAILS:
        rep.add("property.prop_iv_topological_transitivity", Verdict.not_applicable("source lacks the property"))
    else:
        rep.add("property.prop_iv_topological_transitivity", _undecided("verdict unknown on one side"))

    reps = src.representatives()
    # orbits and limit sets
    bad = None
    for r in reps:
        if f.image(src.orbit(r)) != tgt.orbit(f(r)):
            bad = {"point": _pj(r), "reason": "image of orbit"}
            break
        if not f.image(src.orbit(r, closed=True)).issubset(tgt.orbit(f(r), closed=True)):
            bad = {"point": _pj(r), "reason": "image of orbit closure"}
            break
    rep.add("orbits", _violated(bad) if bad else _confirmed())
    if snc:
        bad = None
        for r in reps:
            lhs, rhs = f.image(src.limit_set(r)), tgt.limit_set(f(r))
            if lhs != rhs:
                bad = {"point": _pj(r), "image": lhs.to_json(), "limit_set": rhs.to_json()}
                break
        rep.add("limit_sets", _violated(bad) if bad else _confirmed())
    else:
        rep.add("limit_sets", Verdict.not_applicable("groupoid is not strongly non-compact"))

    # recurrence sets
    bps = src.breakpoints()
    nbs = [src.nbhd(r, bps) for r in reps]
    bad = None
    for m in nbs:
        for n in nbs:
            lhs = src.recurrence_set(m, n)
            rhs = tgt.recurrence_set(f.image(m), f.image(n))
            if not lhs.issubset(rhs):
                bad = {"M": m.to_json(), "N": n.to_json()}
                break
        if bad:
            break
    rep.add("recurrence_sets", _violated(bad) if bad else _confirmed())

    # minimality
    ms = minimal_sets(src)
    bad = None
    for m in ms["sets"]:
        img = f.image(m)
        if tgt.sigma.is_closed(img) and is_minimal(tgt, img).status != HOLDS:
            bad = {"M": m.to_json(), "image": img.to_json()}
            break
    rep.add("minimal_images", _violated(bad) if bad else _confirmed())
    if src.sigma.is_compact(src.carrier):
        target_ms = minimal_sets(tgt)
        bad, undecided = None, False
        for m2 in target_ms["sets"]:
            try:
                minimal_lift(f, m2)
            except NoCandidateFound:
                if ms["complete"] and target_ms["complete"]:
                    bad = {"target_minimal": m2.to_json()}
                    break
                undecided = True
        if bad:
            rep.add("minimal_lifts", _violated(bad))
        elif undecided:
            rep.add("minimal_lifts", _undecided("candidate lattice incomplete"))
        else:
            rep.add("minimal_lifts", _confirmed())
    else:
        rep.add("minimal_lifts", Verdict.not_applicable("source carrier is not compact"))
    for v in rep.profile.values():
        if v.label is None:
            v.label = AUDIT_WORDS[v.status]
    return rep


def minimal_lift(f: ActionMap, target_min: SetExpr) -> SetExpr:
    """A minimal subset of the source mapped onto the given minimal subset of the target."""
    src, tgt = f.source, f.target
    if not tgt.sigma.is_compact(tgt.carrier) or not src.sigma.is_compact(src.carrier):
        raise NotCompactInstance("minimal lifts need compact carriers")
    found = minimal_sets(src)
    candidates = list(found["sets"])
    region = found["singleton_region"]
    if region:
        for piece, reps in region.pieces(src.breakpoints(), max_layer_reps=1):
            for r in reps:
                candidates.append(src.point_set(r))
    for m in candidates:
        if f.image(m) == target_min:
            return m
    raise NoCandidateFound(repr(target_min))


# ---------------------------------------------------------------------------
# action groupoids, induced actions and extensions


class ActionGroupoid:
    """The groupoid of an action, with its units identified with Sigma.

    Only canonical actions are representable: then the action groupoid is the
    groupoid itself.  Layered actions pair layers with labels, which the
    rectangle-times-labels arrow sets cannot express.
    """

    def __init__(self, action: GroupoidAction):
        if action.rule != "canonical":
            raise UnrepresentableArrowSet("action groupoid of a layered action")
        self.action = action
        self.groupoid = action.groupoid

    def canonical_action(self) -> GroupoidAction:
        return GroupoidAction(self.groupoid, name=f"{self.action.name} crossed")


def action_groupoid(act: GroupoidAction) -> ActionGroupoid:
    return ActionGroupoid(act)


class InducedAction:
    """An action of an action groupoid whose anchor is the factor map."""

    def __init__(self, crossed: ActionGroupoid, action: GroupoidAction, anchor):
        self.crossed = crossed
        self.action = action
        self.anchor = anchor

    def anchor_point(self, p):
        return self.anchor.point(p)


def induced_action(f: ActionMap) -> InducedAction:
    _require_epi(f)
    crossed = action_groupoid(f.target)
    src = f.source
    big = GroupoidAction(crossed.groupoid, src.carrier, src.rule, src.perm, name=f"{src.name} induced")
    return InducedAction(crossed, big, f.fmap)


def extension_from_action(big: InducedAction) -> tuple[GroupoidAction, ActionMap]:
    if not isinstance(big, InducedAction):
        raise NotAnActionGroupoid("expected an action of an action groupoid")
    base = big.crossed.action
    a = big.action
    theta = GroupoidAction(base.groupoid, a.carrier, a.rule, a.perm, name=a.name.replace(" induced", ""))
    fmap = big.anchor
    if isinstance(fmap, AnchorMap):
        fmap = AnchorMap(theta)
    return theta, ActionMap(theta, base, fmap)


def same_action(a: GroupoidAction, b: GroupoidAction) -> bool:
    return (_same_groupoid(a.groupoid, b.groupoid) and a.carrier == b.carrier and a.rule == b.rule
            and a.perm == b.perm)
