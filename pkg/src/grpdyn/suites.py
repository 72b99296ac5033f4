"""Randomized identity and theorem suites over oracle instances, plus fixture-level checks.

Every suite returns a JSON-ready dict with no timings, so repeated runs with
the same seed serialize identically.
"""
from __future__ import annotations

import random
from typing import Callable, Optional

from . import oracle as O
from .oracle import (FiniteInstance, HybridAction, HybridGroupoid, HybridMap, Topo, ZPattern, aset,
                     aset_compose, aset_diff, aset_inverse, aset_relcompact, aset_subset,
                     aset_union, gen_instance)

FAMILIES = {
    "mixed": {},
    "open": {"open_groupoid_bias": 1.0},
    "discrete": {"hausdorff": "discrete"},
    "discrete_open": {"hausdorff": "discrete", "open_groupoid_bias": 1.0},
    "minimal": {"single_class": 1.0, "single_cycle": True, "open_groupoid_bias": 1.0, "group_factor": "Z"},
    "minimal_discrete": {"single_class": 1.0, "single_cycle": True, "hausdorff": "discrete",
                         "group_factor": "Z"},
}
FAMILY_INDEX = {name: i for i, name in enumerate(FAMILIES)}


def case_seed(seed: int, family: str, i: int) -> int:
    return seed * 1_000_003 + FAMILY_INDEX[family] * 100_000 + i


_INSTANCE_CACHE: dict = {}


def instance(seed: int, family: str, i: int) -> FiniteInstance:
    key = (seed, family, i)
    if key not in _INSTANCE_CACHE:
        if len(_INSTANCE_CACHE) > 5000:
            _INSTANCE_CACHE.clear()
        _INSTANCE_CACHE[key] = gen_instance(case_seed(seed, family, i), FAMILIES[family])
    return _INSTANCE_CACHE[key]


# ---------------------------------------------------------------------------
# helpers


def _pick_arrow(rng: random.Random, g: HybridGroupoid) -> tuple:
    keys = sorted(g.labels, key=repr)
    x, y = rng.choice(keys)
    lab = g.L(x, y)
    w = lab.bound() + 2 * lab.p
    return x, rng.choice(lab.window(-w, w)), y


def _subset(rng: random.Random, pts, allow_empty: bool = False) -> frozenset:
    pts = sorted(pts, key=repr)
    lo = 0 if allow_empty else 1
    if not pts:
        return frozenset()
    return frozenset(rng.sample(pts, rng.randint(lo, len(pts))))


def _open_subset(rng: random.Random, topo: Topo) -> frozenset:
    seeds = _subset(rng, topo.points)
    return topo.open_hull(seeds)


def _single(x, n, y) -> dict:
    return {(x, y): ZPattern.finite([n])}


def _fiber_between(g: HybridGroupoid, sources, ranges) -> dict:
    """All arrows with source in `sources` and range in `ranges`."""
    return aset({(x, y): v for (x, y), v in g.labels.items() if y in sources and x in ranges})


def brute_recurrence(act: HybridAction, m, n, units=None) -> dict:
    """Recurrence set by enumerating labels in a window; exact because both sides are periodic beyond it."""
    g = act.groupoid
    out = {}
    for (x, y), lab in g.labels.items():
        if units is not None and (x not in units or y not in units):
            continue
        q = O._lcm(lab.p, act.P)
        w = lab.bound() + 2 * q
        hits = [k for k in lab.window(-w, w)
                if any(act.rho[s] == y and act.act(x, k, y, s) in n for s in m)]
        if hits:
            # rebuild as a pattern: residues that hit at the far end define the periodic part
            tail = {k % q for k in hits if k > lab.bound()}
            per = ZPattern.residues(q, tail) & lab
            hit_set = set(hits)
            flips = [k for k in range(-w, w + 1) if (k in per) != (k in hit_set)]
            out[(x, y)] = _with_flips(per, flips)
    return aset(out)


def _with_flips(p: ZPattern, flips) -> ZPattern:
    out = p
    for k in flips:
        one = ZPattern.finite([k])
        out = (out - one) if k in out else (out | one)
    return out


class Tally:
    """Per-check counts: evaluated cases, violations, and non-Hausdorff observations."""

    def __init__(self):
        self.rows: dict = {}

    def _row(self, name):
        return self.rows.setdefault(name, {"evaluated": 0, "violations": [], "nonhausdorff_observations": []})

    def record(self, name: str, case: str, ok: bool, hausdorff: bool = True, detail=None):
        row = self._row(name)
        row["evaluated"] += 1
        if not ok:
            entry = {"case": case}
            if detail is not None:
                entry["detail"] = detail
            (row["violations"] if hausdorff else row["nonhausdorff_observations"]).append(entry)

    def skip(self, name: str):
        self._row(name)

    def violations(self) -> int:
        return sum(len(r["violations"]) for r in self.rows.values())

    def to_json(self) -> dict:
        return {k: self.rows[k] for k in sorted(self.rows)}


# ---------------------------------------------------------------------------
# identity suite


def _epimorphisms(inst: FiniteInstance) -> list:
    act = inst.action
    out = [("identity", O.identity_map(act)), ("rho", O.rho_map(act))]
    lay = inst.meta.get("layers")
    if lay and len(lay["perm"]) > 1:
        for m in (1, 2):
            try:
                f = O.layer_quotient(act, lay["perm"], m)
            except O.InvalidInstance:
                continue
            out.append((f"quotient{m}", f))
    return out


def _lift(a: dict, fm: HybridMap, sigma) -> dict:
    """Arrows of the crossed groupoid over f(sigma) matching the arrows of `a` with source rho(sigma)."""
    src, tgt = fm.source, fm.target
    sp = fm.f[sigma]
    y = src.rho[sigma]
    out = {}
    for (x, yy), lab in a.items():
        if yy != y:
            continue
        for r in range(tgt.P):
            part = lab & ZPattern.residues(tgt.P, [r])
            if part:
                key = (tgt.act(x, r, y, sp), sp)
                out[key] = out[key] | part if key in out else part
    return aset(out)


def _project(a: dict, rho_t: dict) -> dict:
    """First projection from crossed-groupoid arrows (t, n, s) to (rho t, n, rho s)."""
    out: dict = {}
    for (t, s), lab in a.items():
        key = (rho_t[t], rho_t[s])
        out[key] = out[key] | lab if key in out else lab
    return aset(out)


def _group_rec(perm, d: int, s_set, t_set) -> ZPattern:
    """{n in dZ : perm^n(S) meets T} from cycle offsets."""
    out = ZPattern.empty()
    for s in s_set:
        cyc = [s]
        while perm[cyc[-1]] != s:
            cyc.append(perm[cyc[-1]])
        for e, t in enumerate(cyc):
            if t in t_set:
                out = out | ZPattern.coset(e, len(cyc))
    return out & ZPattern.coset(0, d)


def identity_checks(inst: FiniteInstance, rng: random.Random, tally: Tally, case: str, pairs: int = 3):
    act, g = inst.action, inst.groupoid
    pts = act.points
    H = inst.hausdorff

    for _ in range(pairs):
        m, n = _subset(rng, pts), _subset(rng, pts)
        rec = act.recurrence_set(m, n)
        tally.record("recurrence_brute_force", case, rec == brute_recurrence(act, m, n), H)
        # conjugation and inversion
        e1, e2 = _pick_arrow(rng, g), _pick_arrow(rng, g)
        lhs = act.recurrence_set(act.apply(e1[0], e1[1], e1[2], m), act.apply(e2[0], e2[1], e2[2], n))
        rhs = aset_compose(aset_compose(_single(*e2), rec), _single(e1[2], -e1[1], e1[0]))
        tally.record("conjugation_identity", case, lhs == rhs, H)
        tally.record("inversion_identity", case, aset_inverse(rec) == act.recurrence_set(n, m), H)
        # three-way equivalence
        sm, sn = act.saturate(m), act.saturate(n)
        a1, a2, a3 = bool(sm & n), bool(sm & sn), bool(rec)
        tally.record("saturation_equivalence", case, a1 == a2 == a3, H)
        # union over points, containments, injective anchors
        union = {}
        for s in m:
            union = aset_union(union, act.recurrence_set({s}, n))
        tally.record("pointwise_union", case, union == rec, H)
        rho_m = {act.rho[s] for s in m}
        rho_n = {act.rho[s] for s in n}
        ok = aset_subset(rec, _fiber_between(g, rho_m, rho_n))
        for s in m:
            ok = ok and aset_subset(act.recurrence_set({s}, n), _fiber_between(g, {act.rho[s]}, rho_n))
        tally.record("anchor_containment", case, ok, H)
        injective = len(set(act.rho.values())) == len(pts)
        if injective:
            tally.record("anchor_injective_equality", case, rec == _fiber_between(g, rho_m, rho_n), H)
    for s in pts:
        stab, iso = act.stabilizer(s), {(act.rho[s], act.rho[s]): g.isotropy(act.rho[s])}
        ok = aset_subset(stab, iso)
        if len(set(act.rho.values())) == len(pts):
            ok = ok and stab == aset(iso)
        tally.record("stabilizer_in_isotropy", case, ok, H)

    _equivalence_relation_checks(inst, rng, tally, case)
    _group_checks(inst, rng, tally, case)
    _restriction_checks(inst, rng, tally, case)
    _pullback_checks(inst, rng, tally, case)
    _action_groupoid_checks(inst, rng, tally, case)
    _extension_checks(inst, rng, tally, case)


def _equivalence_relation_checks(inst, rng, tally, case):
    g = inst.groupoid
    rel = {k: ZPattern.finite([0]) for k in g.labels}
    eq = HybridGroupoid(g.topo, rel)
    can = O.canonical_action(eq)
    for _ in range(2):
        m, n = _subset(rng, g.units), _subset(rng, g.units)
        rec = can.recurrence_set({x for x in m}, {x for x in n})
        expect = aset({(x, y): ZPattern.finite([0]) for (x, y) in rel if x in n and y in m})
        tally.record("equivalence_relation_formula", case, rec == expect, inst.hausdorff)


def _group_checks(inst, rng, tally, case):
    """Single-unit groupoids: recurrence sets are the classical dwelling sets; partial restrictions agree."""
    lay = inst.meta.get("layers")
    if not lay:
        return
    perm = lay["perm"]
    k = len(perm)
    d = rng.choice([1, 2, 3])
    grp = HybridGroupoid(Topo.discrete([0]), {(0, 0): ZPattern.coset(0, d)})
    order = lay.get("order", "discrete")
    act = O.layered_action(grp, perm, {0: list(range(k))}, order if order != "all" else "discrete")
    for _ in range(2):
        s_set, t_set = _subset(rng, range(k)), _subset(rng, range(k))
        rec = act.recurrence_set({(0, s) for s in s_set}, {(0, t) for t in t_set})
        expect = _group_rec(perm, d, s_set, t_set)
        tally.record("group_dwelling_sets", case, rec.get((0, 0), ZPattern.empty()) == expect)
    # partial action on an open subset Y, recurrence for S, T inside Y
    y = act.topo.open_hull(_subset(rng, act.points))
    yl = {s for _, s in y}
    for _ in range(2):
        s_set, t_set = _subset(rng, yl), _subset(rng, yl)
        w = 2 * O._lcm(d, act.P) + 2
        partial = []
        for a in range(-w, w + 1):
            if a % d:
                continue
            img = {s: _perm_pow(perm, s, a) for s in yl}
            if any(img[s] in yl and img[s] in t_set for s in s_set):
                partial.append(a)
        glob = _group_rec(perm, d, s_set, t_set)
        tally.record("partial_restriction_dwelling", case, partial == glob.window(-w, w))


def _perm_pow(perm, s, n):
    cyc = [s]
    while perm[cyc[-1]] != s:
        cyc.append(perm[cyc[-1]])
    return cyc[n % len(cyc)]


def _restriction_checks(inst, rng, tally, case):
    act, H = inst.action, inst.hausdorff
    sub = _open_subset(rng, act.topo)
    sub_x = frozenset(act.rho[s] for s in sub)
    sat = frozenset(s for s in act.points if act.rho[s] in sub_x)
    inside = lambda a: {k: v for k, v in a.items() if k[0] in sub_x and k[1] in sub_x}
    for _ in range(2):
        m, n = _subset(rng, sub), _subset(rng, sub)
        r_sub = brute_recurrence(act, m, n, units=sub_x)
        full = act.recurrence_set(m, n)
        tally.record("restriction_inside", case, r_sub == inside(full) == full, H)
        m2, n2 = _subset(rng, act.points), _subset(rng, act.points)
        left = brute_recurrence(act, m2 & sub, n2 & sub, units=sub_x)
        mid = inside(act.recurrence_set(m2, n2))
        right = brute_recurrence(act, m2 & sat, n2 & sat, units=sub_x)
        ok = aset_subset(left, mid) and mid == right
        if sub == sat:
            ok = ok and left == mid
        tally.record("restriction_general", case, ok, H)


def _pullback_checks(inst, rng, tally, case):
    g = inst.groupoid
    copies = {x: rng.randint(1, 2) for x in g.units}
    omega_pts = [(x, j) for x in g.units for j in range(copies[x])]
    h = {w: w[0] for w in omega_pts}
    up = {w: {v for v in omega_pts if g.topo.leq(h[w], h[v])} for w in omega_pts}
    omega = Topo(omega_pts, up)
    pb = O.pullback_groupoid(g, omega, h)
    can_pb, can = O.canonical_action(pb), O.canonical_action(g)
    for _ in range(2):
        m, n = _subset(rng, omega_pts), _subset(rng, omega_pts)
        lhs = can_pb.recurrence_set(m, n)
        base = can.recurrence_set({h[w] for w in m}, {h[w] for w in n})
        rhs = aset({(w, v): base[(h[w], h[v])] for w in n for v in m if (h[w], h[v]) in base})
        tally.record("pullback_recurrence", case, lhs == rhs, inst.hausdorff)
    ok = True
    for w in omega_pts:
        orb = can_pb.orbit(w)
        ok = ok and orb == frozenset(v for v in omega_pts if h[v] in can.orbit(h[w]))
        ok = ok and omega.closure(orb) == frozenset(v for v in omega_pts if h[v] in g.topo.closure(can.orbit(h[w])))
    tally.record("pullback_orbits", case, ok, inst.hausdorff)


def _action_groupoid_checks(inst, rng, tally, case):
    act = inst.action
    ag = O.action_groupoid(act)
    can = O.canonical_action(ag)
    for _ in range(2):
        m, n = _subset(rng, act.points), _subset(rng, act.points)
        ag_rec = can.recurrence_set(m, n)
        tally.record("action_groupoid_projection", case, _project(ag_rec, act.rho) == act.recurrence_set(m, n),
                     inst.hausdorff)
    tally.record("action_groupoid_orbits", case, _orbit_key(can.orbits()) == _orbit_key(act.orbits()),
                 inst.hausdorff)


def _orbit_key(orbs) -> list:
    return sorted(sorted(map(repr, o)) for o in orbs)


def _extension_checks(inst, rng, tally, case):
    act, H = inst.action, inst.hausdorff
    for name, fm in _epimorphisms(inst):
        big = O.induced_action(fm)
        rho_t = {sp: fm.target.rho[sp] for sp in fm.target.points}
        for _ in range(2):
            m, n = _subset(rng, act.points), _subset(rng, act.points)
            tally.record("crossed_projection", case, _project(big.recurrence_set(m, n), rho_t) ==
                         act.recurrence_set(m, n), H)
        ok_point = ok_fiber = ok_stab = True
        for s in act.points:
            n = _subset(rng, act.points)
            ok_point &= big.recurrence_set({s}, n) == _lift(act.recurrence_set({s}, n), fm, s)
            ok_fiber &= big.fiber(s) == _lift(act.fiber(s), fm, s)
            ok_stab &= big.stabilizer(s) == _lift(act.stabilizer(s), fm, s)
        tally.record("crossed_pointwise", case, ok_point, H)
        tally.record("crossed_fiber", case, ok_fiber, H)
        tally.record("crossed_stabilizer", case, ok_stab, H)
        theta, back = O.extension_from_action(big, fm.target)
        tally.record("extension_round_trip", case, O.same_action(theta, act) and back.f == fm.f, H)


def symbolic_identity_checks(enc, rng: random.Random, tally: Tally, case: str, pairs: int = 3):
    """Recurrence-set identities evaluated with the symbolic deciders on an encodable instance."""
    from .groupoid import ArrowSet
    from .setalg import SetExpr

    act = enc.symbolic
    opts = sorted(enc.instance.action.points, key=repr)
    g = enc.instance.groupoid
    oa = enc.instance.action
    enc_unit = {oa.rho[o]: act.rho(p) for p, o in enc.to_oracle.items()}
    for _ in range(pairs):
        mo, no = _subset(rng, opts), _subset(rng, opts)
        m, n = enc.symbolic_set(mo), enc.symbolic_set(no)
        rec = act.recurrence_set(m, n)
        tally.record("symbolic.inversion_identity", case, rec.inverse().equals(act.recurrence_set(n, m)))
        a1 = act.saturate(m).intersects(n)
        a2 = act.saturate(m).intersects(act.saturate(n))
        tally.record("symbolic.saturation_equivalence", case, a1 == a2 == (not rec.is_empty()))
        union = None
        for o in mo:
            r = act.recurrence_set(enc.symbolic_set([o]), n)
            union = r if union is None else (union | r)
        tally.record("symbolic.pointwise_union", case, union.equals(rec))
        e1, e2 = _pick_arrow(rng, g), _pick_arrow(rng, g)

        kind = act.groupoid.carrier.kind

        def single(x, k, y):
            return ArrowSet.arrow(enc_unit[x], enc_unit[y], k, kind)

        def push(e, a_oracle):
            return enc.symbolic_set(enc.instance.action.apply(e[0], e[1], e[2], a_oracle))

        lhs = act.recurrence_set(push(e1, mo), push(e2, no))
        rhs = single(*e2).compose(rec).compose(single(e1[2], -e1[1], e1[0]))
        tally.record("symbolic.conjugation_identity", case, lhs.equals(rhs))
        rho_m = SetExpr.points([enc_unit[oa.rho[s]] for s in mo], kind)
        rho_n = SetExpr.points([enc_unit[oa.rho[s]] for s in no], kind)
        between = act.arrows.restrict(rho_n, rho_m)
        tally.record("symbolic.anchor_containment", case, rec.issubset(between))


def identity_suite(seed: int = 0, cases: int = 500, pairs: int = 3, symbolic_cases: int = 40) -> dict:
    tally = Tally()
    for i in range(cases):
        inst = instance(seed, "mixed", i)
        rng = random.Random(case_seed(seed, "mixed", i))
        identity_checks(inst, rng, tally, f"mixed/{i}", pairs)
    # symbolic side: catalog instances with finite carriers, named grids, seeded encodings
    sym = Tally()
    for name, enc in _encodable_symbolic(seed, symbolic_cases):
        symbolic_identity_checks(enc, random.Random(name), sym, name, pairs)
    return {"suite": "identities", "seed": seed, "cases": cases, "checks": tally.to_json(),
            "symbolic_checks": sym.to_json(), "violations": tally.violations() + sym.violations()}


def _encodable_symbolic(seed: int, count: int) -> list:
    from . import catalog
    from .crosscheck import NotEncodable, encodable_params, from_symbolic, named_instances, to_symbolic
    out = []
    for name in catalog.names():
        fx = catalog.get(name)
        if not fx.representable:
            continue
        try:
            out.append((f"catalog:{name}", from_symbolic(fx.context()["action"])))
        except NotEncodable:
            continue
    for name, act in named_instances().items():
        out.append((f"named:{name}", from_symbolic(act)))
    for i in range(count):
        s = seed * 100003 + 50000 + i
        out.append((f"seed:{s}", to_symbolic(gen_instance(s, encodable_params()))))
    return out


# ---------------------------------------------------------------------------
# theorem suite


class Facts:
    """Lazily computed properties of one oracle instance."""

    def __init__(self, inst: FiniteInstance):
        self.inst = inst
        self.act = inst.action
        self.H = inst.hausdorff
        self._c: dict = {}

    def get(self, key, fn):
        if key not in self._c:
            self._c[key] = fn()
        return self._c[key]

    @property
    def open(self) -> bool:
        return self.get("open", self.act.groupoid.is_open)

    @property
    def snc(self) -> bool:
        return self.act.snc()

    @property
    def profile(self) -> dict:
        return self.get("profile", lambda: {k: v["status"] == "Holds" for k, v in self.act.profile().items()})

    def cls(self, kind) -> frozenset:
        return self.get(("cls", kind), lambda: self.act.class_set(kind))

    def limit(self, s) -> frozenset:
        return self.get(("lim", s), lambda: self.act.limit_set(s))

    @property
    def minimal(self) -> bool:
        return self.get("minimal", self.act.is_minimal)

    @property
    def epis(self) -> list:
        return self.get("epis", lambda: _epimorphisms(self.inst)[1:])


def _implies(a: bool, b: bool) -> bool:
    return (not a) or b


def th_pricinoasa(F: Facts):
    p = F.profile
    pairs = [("prop_iv", "prop_iii"), ("prop_iii", "prop_ii"), ("prop_ii", "prop_i_prime"),
             ("prop_i_prime", "prop_i"), ("prop_i", "prop_i_prime"), ("transitive", "pointwise_transitive"),
             ("pointwise_transitive", "prop_iii"), ("pointwise_transitive", "weakly_pointwise_transitive"),
             ("weakly_pointwise_transitive", "prop_i")]
    if F.open:
        pairs.append(("prop_i_prime", "prop_iv"))
    bad = [f"{a}=>{b}" for a, b in pairs if not _implies(p[a], p[b])]
    return not bad, bad


def th_intclo(F: Facts):
    if not F.open:
        return None
    act, tp = F.act, F.act.topo
    bad = []
    for a in act.invariant_sets()[:64]:
        cl, it = tp.closure(a), tp.interior(a)
        for name, b in (("interior", it), ("closure", cl), ("boundary", cl - it)):
            if not act.is_invariant(b):
                bad.append({"set": O._set_json(a), "part": name})
    return not bad, bad[:3]


def th_uncorolar(F: Facts):
    if not (F.H and F.open):
        return None
    p = F.profile
    vals = {k: p[k] for k in ("prop_iv", "prop_iii", "pointwise_transitive", "prop_i", "prop_ii")}
    return len(set(vals.values())) == 1, vals


def _snc_points(F: Facts):
    return F.act.points if F.snc else None


def th_inflorit(F: Facts):
    if not F.snc:
        return None
    act = F.act
    bad = [O._pt_json(s) for s in act.points if act.topo.closure(act.orbit(s)) != act.orbit(s) | F.limit(s)]
    return not bad, bad


def th_eusper_i(F: Facts):
    if not F.snc:
        return None
    act = F.act
    bad = [O._pt_json(s) for s in act.points for t in act.orbit(s) if F.limit(t) != F.limit(s)]
    return not bad, bad[:3]


def th_eusper_ii(F: Facts):
    if not (F.snc and F.open):
        return None
    bad = [O._pt_json(s) for s in F.act.points if not F.act.is_invariant(F.limit(s))]
    return not bad, bad


def th_eusper_iii(F: Facts):
    if not F.snc:
        return None
    act = F.act
    bad = []
    for s in act.points:
        lim = F.limit(s)
        if not lim:
            bad.append({"point": O._pt_json(s), "reason": "empty limit set"})
            continue
        w = act.topo.open_hull(lim)
        rest = aset_diff(act.fiber(s), act.recurrence_set({s}, w))
        if not aset_relcompact(rest):
            bad.append({"point": O._pt_json(s), "reason": "not attracted"})
    return not bad, bad


def th_recur(F: Facts):
    if not F.snc:
        return None
    act = F.act
    bad = []
    for s in act.points:
        lim, orb = F.limit(s), act.orbit(s)
        a = bool(orb & lim)
        b = lim == act.topo.closure(orb)
        c = s in lim
        e = not aset_relcompact(act.recurrence_set({s}, act.topo.up[s]))
        ok = _implies(b, c) and c == e and _implies(c, a)
        if F.open:
            ok = ok and a == b == c == e
        if not ok:
            bad.append({"point": O._pt_json(s), "abce": [a, b, c, e]})
    return not bad, bad


def th_pastish(F: Facts):
    if not F.snc:
        return None
    fix, per, wper, alper = F.cls("fix"), F.cls("per"), F.cls("wper"), F.cls("alper")
    rec, nw = F.cls("rec"), F.cls("nw")
    lims = frozenset().union(*(F.limit(s) for s in F.act.points))
    chain = [fix, per, wper & alper, wper | alper, rec, lims, nw]
    bad = [i + 1 for i in range(len(chain) - 1) if not chain[i] <= chain[i + 1]]
    return not bad, bad


def th_zets(F: Facts):
    fix = F.cls("fix")
    ok = F.act.is_invariant(fix)
    if F.open:
        ok = ok and F.act.topo.is_closed(fix)
    return ok, O._set_json(fix)


def th_sets(F: Facts):
    bad = [k for k in ("per", "wper") if not F.act.is_invariant(F.cls(k))]
    return not bad, bad


def th_haihui(F: Facts):
    if not F.snc:
        return None
    nw = F.cls("nw")
    ok = F.act.topo.is_closed(nw)
    if F.open:
        ok = ok and F.act.is_invariant(nw)
    return ok, O._set_json(nw)


def th_laloc(F: Facts):
    if not (F.snc and F.open):
        return None
    rec = F.cls("rec")
    return F.act.is_invariant(rec), O._set_json(rec)


def th_lacidraci(F: Facts):
    # orbits of a finite space are finite, hence compact; periodic points are no exception
    bad = [O._pt_json(s) for s in F.cls("per") if not F.act.orbit(s)]
    return not bad, bad


def th_dracilaci(F: Facts):
    if not F.open:
        return None
    per = F.cls("per")
    bad = [O._pt_json(s) for s in F.act.points if s not in per]
    return not bad, bad


def th_sacacarez(F: Facts):
    act = F.act
    alper = F.cls("alper")
    bad = []
    for s in act.points:
        mini = act.is_minimal_set(act.topo.closure(act.orbit(s)))
        ok = _implies(s in alper, mini)
        if F.open:
            ok = ok and (s in alper) == mini
        if not ok:
            bad.append(O._pt_json(s))
    return not bad, bad


def th_sindecat(F: Facts):
    if not (F.open and F.minimal):
        return None
    act = F.act
    bad = []
    for s in act.points:
        for t in act.points:
            if not act.syndetic(act.recurrence_set({s}, act.topo.up[t]), act.rho[s])[0]:
                bad.append([O._pt_json(s), O._pt_json(t)])
    return not bad, bad[:3]


def th_oblu(F: Facts):
    act = F.act
    semi = act.is_semisimple()
    ok = True
    if all(act.topo.is_closed(act.orbit(s)) for s in act.points):
        ok = ok and semi
    if F.cls("alper") == act.topo.full:
        ok = ok and semi
    if F.open:
        ok = ok and F.cls("alper") == act.topo.full
    return ok, {"semisimple": semi}


def th_zdrikat(F: Facts):
    if not (F.open and F.snc and F.minimal):
        return None
    nw = F.cls("nw")
    return nw == F.act.topo.full, O._set_json(nw)


def th_hayhuy(F: Facts):
    if not F.snc:
        return None
    act = F.act
    v = act.topo.open_hull(F.cls("nw"))
    bad = [O._pt_json(s) for s in act.points if not aset_relcompact(aset_diff(act.fiber(s),
                                                                               act.recurrence_set({s}, v)))]
    return not bad, bad


def th_prinurmare(F: Facts):
    if not F.snc:
        return None
    return bool(F.cls("nw")), None


def _classes(act: HybridAction, snc: bool) -> dict:
    kinds = ["fix", "per", "wper", "alper"] + (["rec", "nw"] if snc else [])
    return {k: act.class_set(k) for k in kinds}


def th_chiroare(F: Facts):
    bad = []
    src = _classes(F.act, F.snc)
    for name, fm in F.epis:
        tgt = _classes(fm.target, F.snc)
        for k in src:
            if not fm.image(src[k]) <= tgt[k]:
                bad.append(f"{name}:{k}")
    return not bad, bad


MORPH_PROPS = ("transitive", "pointwise_transitive", "prop_i", "prop_ii", "prop_iii")


def th_morptranz(F: Facts):
    bad = []
    for name, fm in F.epis:
        tp = fm.target.profile()
        for k in MORPH_PROPS:
            if F.profile[k] and tp[k]["status"] != "Holds":
                bad.append(f"{name}:{k}")
    return not bad, bad


def th_gagiu(F: Facts):
    if not F.snc:
        return None
    bad = []
    for name, fm in F.epis:
        for s in F.act.points:
            if fm.image(F.limit(s)) != fm.target.limit_set(fm.f[s]):
                bad.append(f"{name}:{s}")
    return not bad, bad[:3]


def th_despreorbite(F: Facts):
    bad = []
    for name, fm in F.epis:
        tgt = fm.target
        for s in F.act.points:
            if fm.image(F.act.orbit(s)) != tgt.orbit(fm.f[s]):
                bad.append(f"{name}:orbit:{s}")
            if not fm.image(F.act.topo.closure(F.act.orbit(s))) <= tgt.topo.closure(tgt.orbit(fm.f[s])):
                bad.append(f"{name}:closure:{s}")
    return not bad, bad[:3]


def th_garbanzos(F: Facts):
    bad = []
    for name, fm in F.epis:
        tgt = fm.target
        mins = F.act.minimal_sets()
        for m in mins:
            img = fm.image(m)
            if tgt.topo.is_closed(img) and not tgt.is_minimal_set(img):
                bad.append(f"{name}:image")
        for mp in tgt.minimal_sets():
            if not any(fm.image(m) == mp for m in mins):
                bad.append(f"{name}:lift")
        if F.open:
            alper = F.cls("alper")
            for sp in tgt.class_set("alper"):
                if not any(fm.f[s] == sp for s in alper):
                    bad.append(f"{name}:alper:{sp}")
    return not bad, bad[:3]


def th_vindeo(F: Facts):
    bad = []
    act = F.act
    for name, fm in F.epis + [("identity", O.identity_map(act))]:
        big = O.induced_action(fm)
        if _orbit_key(big.orbits()) != _orbit_key(act.orbits()):
            bad.append(f"{name}:orbits")
        if big.class_set("fix") != F.cls("fix"):
            bad.append(f"{name}:fix")
        bp = big.profile()
        for k in ("transitive", "pointwise_transitive", "prop_iv", "prop_i", "prop_ii"):
            if (bp[k]["status"] == "Holds") != F.profile[k]:
                bad.append(f"{name}:{k}")
        if big.is_minimal() != F.minimal:
            bad.append(f"{name}:minimal")
    return not bad, bad


def th_deruta(F: Facts):
    bad = []
    act = F.act
    for name, fm in F.epis + [("identity", O.identity_map(act))]:
        big = O.induced_action(fm)
        if (big.profile()["prop_iii"]["status"] == "Holds") != F.profile["prop_iii"]:
            bad.append(f"{name}:prop_iii")
        kinds = ["per", "wper", "alper"] + (["rec", "nw"] if F.snc else [])
        for k in kinds:
            if big.class_set(k) != F.cls(k):
                bad.append(f"{name}:{k}")
    return not bad, bad


def th_label(F: Facts):
    rng = random.Random(repr(F.inst.meta.get("seed")))
    bad = []
    for name, fm in F.epis:
        for _ in range(3):
            m, n = _subset(rng, F.act.points), _subset(rng, F.act.points)
            if not aset_subset(F.act.recurrence_set(m, n), fm.target.recurrence_set(fm.image(m), fm.image(n))):
                bad.append(name)
    return not bad, bad


def _mix(F: Facts) -> dict:
    return F.get("mix", lambda: {k: v["status"] == "Holds" for k, v in F.act.mixing().items()})


def th_mixing_collapse(F: Facts):
    weak = _mix(F)["weak"]
    units = {F.act.rho[s] for s in F.act.points}
    return _implies(weak, len(units) == 1), {"weak": weak, "units": len(units)}


def th_mixing_strong_weak(F: Facts):
    if F.act.groupoid.compact():
        return None
    m = _mix(F)
    return _implies(m["strong"], m["weak"]), m


def th_mixing_weak_iii(F: Facts):
    m = _mix(F)
    return _implies(m["weak"], F.profile["prop_iii"]), m


THEOREMS: dict[str, tuple[Callable, tuple]] = {
    "transitivity_implications": (th_pricinoasa, ("mixed", "open")),
    "invariant_interior_closure": (th_intclo, ("open",)),
    "baire_equivalence": (th_uncorolar, ("discrete_open",)),
    "orbit_closure_decomposition": (th_inflorit, ("mixed",)),
    "limit_sets_constant_on_orbits": (th_eusper_i, ("mixed",)),
    "limit_sets_invariant": (th_eusper_ii, ("open",)),
    "limit_sets_attract": (th_eusper_iii, ("mixed",)),
    "recurrence_conditions": (th_recur, ("mixed", "open")),
    "point_class_chain": (th_pastish, ("mixed",)),
    "fixed_set_invariant_closed": (th_zets, ("mixed", "open")),
    "periodic_sets_invariant": (th_sets, ("mixed",)),
    "nonwandering_closed_invariant": (th_haihui, ("mixed", "open")),
    "recurrent_set_invariant": (th_laloc, ("open",)),
    "periodic_compact_orbit": (th_lacidraci, ("mixed",)),
    "compact_orbit_periodic": (th_dracilaci, ("open",)),
    "almost_periodic_minimal_closure": (th_sacacarez, ("mixed", "open")),
    "minimal_syndetic_returns": (th_sindecat, ("minimal",)),
    "semisimplicity": (th_oblu, ("mixed", "open")),
    "minimal_nonwandering": (th_zdrikat, ("minimal",)),
    "nonwandering_attracts": (th_hayhuy, ("mixed",)),
    "nonwandering_nonempty": (th_prinurmare, ("mixed",)),
    "factor_point_classes": (th_chiroare, ("mixed",)),
    "factor_transitivity": (th_morptranz, ("mixed",)),
    "factor_limit_sets": (th_gagiu, ("mixed",)),
    "factor_orbits": (th_despreorbite, ("mixed",)),
    "factor_minimal_sets": (th_garbanzos, ("mixed", "open")),
    "crossed_same_invariant_sets": (th_vindeo, ("mixed",)),
    "crossed_same_point_classes": (th_deruta, ("mixed",)),
    "factor_recurrence_inclusion": (th_label, ("mixed",)),
    "weak_mixing_single_unit": (th_mixing_collapse, ("mixed", "minimal_discrete")),
    "strong_mixing_weak": (th_mixing_strong_weak, ("mixed", "minimal")),
    "weak_mixing_recurrent_transitive": (th_mixing_weak_iii, ("mixed", "minimal")),
}


def theorem_suite(seed: int = 0, cases: int = 100, theorems: Optional[list] = None, max_attempts: int = 40,
                  replay_dir: Optional[str] = None, fixtures: bool = True) -> dict:
    """Each theorem is evaluated until `cases` applicable Hausdorff instances have been seen."""
    names = theorems or list(THEOREMS)
    facts_cache: dict = {}
    out = {}
    total_viol = 0
    for name in names:
        fn, fams = THEOREMS[name]
        row = {"applicable": 0, "hausdorff": 0, "violations": [], "nonhausdorff_observations": [], "tried": 0}
        i = 0
        while row["hausdorff"] < cases and row["tried"] < cases * max_attempts:
            fam = fams[i % len(fams)]
            idx = i // len(fams)
            i += 1
            row["tried"] += 1
            key = (seed, fam, idx)
            if key not in facts_cache:
                facts_cache[key] = Facts(instance(seed, fam, idx))
            F = facts_cache[key]
            res = fn(F)
            if res is None:
                continue
            ok, detail = res
            row["applicable"] += 1
            row["hausdorff"] += F.H
            if not ok:
                entry = {"case": f"{fam}/{idx}", "seed": case_seed(seed, fam, idx), "detail": detail}
                if F.H:
                    row["violations"].append(entry)
                    if replay_dir:
                        _write_violation(replay_dir, name, F.inst, detail)
                else:
                    row["nonhausdorff_observations"].append(entry)
        total_viol += len(row["violations"])
        out[name] = row
    report = {"suite": "theorems", "seed": seed, "cases": cases, "theorems": out, "violations": total_viol}
    if fixtures:
        fx = fixture_theorems()
        report["fixtures"] = fx["checks"]
        report["violations"] += fx["violations"]
    return report


def _write_violation(replay_dir: str, name: str, inst: FiniteInstance, detail):
    import os
    os.makedirs(replay_dir, exist_ok=True)
    path = os.path.join(replay_dir, f"{name}-{inst.meta.get('seed')}.json")
    O.write_replay(path, inst, {"op": "theorem", "name": name}, {"oracle": detail}, kind="theorem-violation")


def evaluate_theorem(name: str, inst: FiniteInstance):
    """Re-run one theorem check on an instance (used by replay)."""
    return THEOREMS[name][0](Facts(inst))


# ---------------------------------------------------------------------------
# fixture-level checks with the symbolic deciders


def fixture_theorems() -> dict:
    from . import catalog
    from .dynamics import transitivity_profile
    from .morphism import rho_factor, transfer_audit
    from .verdict import FAILS, HOLDS

    tally = Tally()
    for name in catalog.names():
        fx = catalog.get(name)
        if not fx.representable:
            continue
        ctx = fx.context()
        act = ctx["action"]
        case = f"catalog:{name}"
        prof = transitivity_profile(act)
        st = {k: v.status for k, v in prof.items()}
        pairs = [("prop_iv_topological_transitivity", "prop_iii_recurrent_transitivity"),
                 ("prop_iii_recurrent_transitivity", "prop_ii"), ("prop_ii", "prop_i_prime"),
                 ("prop_i_prime", "prop_i"), ("prop_i", "prop_i_prime"),
                 ("transitive", "pointwise_transitive"), ("pointwise_transitive", "prop_iii_recurrent_transitivity"),
                 ("pointwise_transitive", "weakly_pointwise_transitive"), ("weakly_pointwise_transitive", "prop_i")]
        if act.open_groupoid().status == HOLDS:
            pairs.append(("prop_i_prime", "prop_iv_topological_transitivity"))
        bad = [f"{a}=>{b}" for a, b in pairs if st[a] == HOLDS and st[b] == FAILS]
        tally.record("transitivity_implications", case, not bad, True, bad or None)
        # point class chain and invariance where every set is decided
        snc = act.strongly_noncompact()
        kinds = ["fix", "per", "wper", "alper"] + (["rec", "nw"] if snc else [])
        sets = {}
        for k in kinds:
            s, decided = act.point_class_set(k)
            if decided:
                sets[k] = s
        if all(k in sets for k in kinds) and snc:
            chain = [sets["fix"], sets["per"], sets["wper"] & sets["alper"], sets["wper"] | sets["alper"],
                     sets["rec"], sets["nw"]]
            bad = [i + 1 for i in range(len(chain) - 1) if not chain[i].issubset(chain[i + 1])]
            tally.record("point_class_chain", case, not bad, True, bad or None)
        if "fix" in sets:
            tally.record("fixed_set_invariant_closed", case, act.is_invariant(sets["fix"]) and
                         (act.open_groupoid().status != HOLDS or act.sigma.is_closed(sets["fix"])))
        for k in ("per", "wper"):
            if k in sets:
                tally.record("periodic_sets_invariant", case, act.is_invariant(sets[k]))
        if "nw" in sets:
            tally.record("nonwandering_closed_invariant", case, act.sigma.is_closed(sets["nw"]) and
                         (act.open_groupoid().status != HOLDS or act.is_invariant(sets["nw"])))
            if act.carrier.count_upto(65) <= 64:
                tally.record("nonwandering_nonempty", case, not sets["nw"].is_empty())
        # factor transfers through the anchor, and the stored factor map
        maps = [("rho", rho_factor(act))]
        if "map" in ctx:
            maps.append(("map", ctx["map"]))
        for mname, f in maps:
            rep = transfer_audit(f)
            bad = [k for k, v in rep.profile.items() if v.status == FAILS and v.label != "NonTransfer"]
            tally.record("factor_transfers", f"{case}:{mname}", not bad, True, bad or None)
    return {"suite": "fixture_theorems", "checks": tally.to_json(), "violations": tally.violations()}


# ---------------------------------------------------------------------------
# cross-world agreement


def cross_check_suite(seed: int = 0, cases: int = 500, replay_dir: Optional[str] = None) -> dict:
    """Seeded encodable instances plus catalog and named instances with finite carriers."""
    from . import catalog
    from .crosscheck import NotEncodable, cross_check, from_symbolic, named_instances, seeded_cross_check

    seeded = seeded_cross_check(seed, cases)
    listed = []
    extra_total = extra_unknown = 0
    bad = list(seeded["disagreements"])
    sources = []
    for name in catalog.names():
        fx = catalog.get(name)
        if fx.representable:
            try:
                sources.append((f"catalog:{name}", from_symbolic(fx.context()["action"])))
            except NotEncodable:
                continue
    sources += [(f"named:{k}", from_symbolic(v)) for k, v in named_instances().items()]
    for name, enc in sources:
        rep = cross_check(enc, seed=seed)
        extra_total += len(rep.rows)
        extra_unknown += rep.unknown
        listed.append({"name": name, "checked": len(rep.rows), "unknown": rep.unknown,
                       "disagreements": len(rep.disagreements)})
        if rep.disagreements:
            bad.append({"name": name, "disagreements": rep.disagreements})
    total = seeded["predicates"] + extra_total
    unknown = seeded["unknown"] + extra_unknown
    if replay_dir and bad:
        import os
        os.makedirs(replay_dir, exist_ok=True)
        for entry in bad:
            if "seed" in entry:
                from .crosscheck import encodable_params
                inst = gen_instance(entry["seed"], encodable_params())
                O.write_replay(os.path.join(replay_dir, f"crosscheck-{entry['seed']}.json"), inst,
                               {"op": "cross_check", "seed": entry["seed"]},
                               {"disagreements": entry["disagreements"]})
    return {"suite": "cross_check", "seed": seed, "cases": cases,
            "off_catalog": {"predicates": seeded["predicates"], "unknown": seeded["unknown"],
                            "unknown_rate": seeded["unknown_rate"]},
            "listed_instances": listed,
            "predicates": total, "unknown": unknown,
            "unknown_rate": round(unknown / total, 4) if total else 0.0,
            "disagreements": bad, "rows": seeded["rows"]}


# ---------------------------------------------------------------------------
# fixture suite and witness soundness


def fixture_suite() -> dict:
    from . import catalog
    res = catalog.verify()
    bad = [{"fixture": f["name"], "check": c["check"], "result": c["result"]}
           for f in res["fixtures"] for c in f["checks"] if c["result"] != "match"]
    required_skips = [f["name"] for f in res["fixtures"] if "skipped" in f and catalog.get(f["name"]).required]
    return {"suite": "fixtures", "summary": res["summary"], "problems": bad, "required_skipped": required_skips,
            "fixtures": res["fixtures"]}


def visited_instances(seed: int, theorem_report: dict) -> list:
    """(label, instance) for every instance a theorem suite run touched."""
    upto: dict = {}
    for name, row in theorem_report["theorems"].items():
        fams = THEOREMS[name][1]
        for j, fam in enumerate(fams):
            n = max(0, -(-(row["tried"] - j) // len(fams)))
            upto[fam] = max(upto.get(fam, 0), n)
    return [(f"{fam}/{idx}", instance(seed, fam, idx)) for fam in FAMILIES for idx in range(upto.get(fam, 0))]


def witness_suite(seed: int = 0, cases: int = 100, symbolic_cases: int = 40,
                  theorem_report: Optional[dict] = None) -> dict:
    """Re-verify every Fails witness from the fixture, identity and theorem suites."""
    from . import witness as W
    if theorem_report is None:
        theorem_report = theorem_suite(seed, cases)
    rows = W.fixture_witness_report()
    rows += W.oracle_witness_report(visited_instances(seed, theorem_report))
    rows += W.encoded_witness_report(_encodable_symbolic(seed, symbolic_cases))
    bad = [r for r in rows if not r["verified"]]
    return {"suite": "witnesses", "seed": seed, "checked": len(rows), "unverified": bad}
