"""Groupoid actions and their dynamical properties.

Three action rules are supported on block groupoids over the line:

``canonical``  Sigma is the unit space and xi . y = r(xi)
``perm``       Sigma inside X x {0..k-1}, (x, y, n) . (y, i) = (x, tau^n(i))
``shift``      Sigma inside X x Z (or X x (Z + {inf})), (x, y, g) . (y, h) = (x, g + h)

Every "for all neighborhoods" quantifier is evaluated on the small basic
neighborhoods of representative points of the cells cut out by the finite
set of breakpoints of the instance.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .grpset import GrpSet
from .groupoid import (ALL, EMPTY, ArrowSet, BlockGroupoid, _union_all,
                       is_open_groupoid, is_strongly_noncompact, small_radius, tail_index)
from .setalg import LineSet, Point, SetExpr, Space, as_lpoint, rational_between
from .verdict import FAILS, HOLDS, UNKNOWN, Verdict


class PointOutsideSigma(ValueError):
    pass


class NotStronglyNonCompact(ValueError):
    pass


class FixpointBoundExceeded(RuntimeError):
    pass


class NotSubsetOfFiber(ValueError):
    pass


class NotAnAction(ValueError):
    pass


MAX_CANDIDATES = 10


def _perm_power(tau: Sequence[int], i: int, n: int) -> int:
    c = _cycle_len(tau, i)
    for _ in range(n % c):
        i = tau[i]
    return i


def _cycle_len(tau: Sequence[int], i: int) -> int:
    c, j = 1, tau[i]
    while j != i:
        j = tau[j]
        c += 1
    return c


class GroupoidAction:
    def __init__(self, groupoid: BlockGroupoid, sigma: Optional[SetExpr] = None, rule: str = "canonical",
                 perm: Optional[Sequence[int]] = None, validate: bool = True, name: str = ""):
        self.groupoid = groupoid
        self.rule = rule
        self.perm = tuple(perm) if perm is not None else None
        self.name = name
        if rule == "canonical":
            sigma = groupoid.carrier if sigma is None else sigma
        elif rule == "perm":
            if self.perm is None or sorted(self.perm) != list(range(len(self.perm))):
                raise NotAnAction("perm rule needs a permutation of range(k)")
        elif rule != "shift":
            raise NotAnAction(f"unknown rule {rule}")
        if rule != "canonical" and groupoid.kind != "line":
            raise NotAnAction("layered actions need a groupoid over the line")
        self.sigma = Space(sigma)
        self._cache: dict = {}
        if validate:
            self._validate()

    # basics -----------------------------------------------------------------
    @property
    def carrier(self) -> SetExpr:
        return self.sigma.carrier

    @property
    def arrows(self) -> ArrowSet:
        return self.groupoid.arrows

    def _validate(self):
        sig = self.carrier
        if self.rule == "canonical":
            if sig != self.groupoid.carrier:
                raise NotAnAction("canonical action must act on the unit space")
            return
        if self.rule == "perm":
            if sig.kind != "strip":
                raise NotAnAction("perm rule needs a strip carrier")
            k = len(self.perm)
            box = SetExpr("strip", [(GrpSet.interval(0, k - 1), LineSet.full())])
            if not sig.issubset(box):
                raise NotAnAction("carrier leaves X x {0..k-1}")
        elif sig.kind not in ("strip", "zhat"):
            raise NotAnAction("shift rule needs a strip or zhat carrier")
        if SetExpr.line(sig.project()) != self.groupoid.carrier:
            raise NotAnAction("anchor is not onto the unit space")
        if not self.saturate(sig).issubset(sig):
            raise NotAnAction("carrier is not invariant under the rule")

    def rho(self, p):
        if self.rule == "canonical":
            return p
        return as_lpoint(p)[0]

    def rho_set(self, a: SetExpr) -> SetExpr:
        if self.rule == "canonical":
            return a
        return SetExpr.line(a.project())

    def rho_preimage(self, a: SetExpr) -> SetExpr:
        if self.rule == "canonical":
            return self.sigma.clip(a)
        ls = a.as_line()
        full = SetExpr(self.carrier.kind, [(GrpSet.all(), ls)], ls if self.carrier.kind == "zhat" else None)
        return self.carrier & full

    def act_point(self, arrow: tuple, p):
        """xi . p for an explicit arrow (x, y, n) with y = rho(p)."""
        x, y, n = arrow
        if self.rule == "canonical":
            return x
        _, h = as_lpoint(p)
        if self.rule == "perm":
            return (x, _perm_power(self.perm, h, n))
        return (x, None if h is None else h + n)

    def contains(self, p) -> bool:
        return self.carrier.contains(p)

    def _check_point(self, p):
        if not self.contains(p):
            raise PointOutsideSigma(repr(p))

    def point_set(self, p) -> SetExpr:
        return SetExpr.points([p], self.carrier.kind)

    # layers -----------------------------------------------------------------
    def _layers(self, a: SetExpr) -> list:
        if self.rule == "perm":
            return [(i, a.layer_at(i)) for i in range(len(self.perm)) if not a.layer_at(i).is_empty()]
        out = [(g, ls) for g, ls in a.layers]
        if a.kind == "zhat" and not a.inf.is_empty():
            out.append((None, a.inf))
        return out

    def _pull(self, a, b) -> GrpSet:
        """Labels n taking layer class a into layer class b."""
        if self.rule == "perm":
            c = _cycle_len(self.perm, a)
            for d in range(c):
                if _perm_power(self.perm, a, d) == b:
                    return GrpSet.coset(d, c)
            return EMPTY
        if a is None or b is None:
            return ALL if a is None and b is None else EMPTY
        return b + a.neg()

    def _push(self, s: GrpSet, a) -> list:
        if self.rule == "perm":
            c = _cycle_len(self.perm, a)
            return [_perm_power(self.perm, a, d) for d in range(c) if (s & GrpSet.coset(d, c))]
        if a is None:
            return [None]
        return [s + a]

    def _assemble(self, items: list) -> SetExpr:
        kind = self.carrier.kind
        layers, inf = [], LineSet.empty()
        for cls, ls in items:
            if self.rule == "perm":
                layers.append((GrpSet.single(cls), ls))
            elif cls is None:
                inf = inf | ls
            else:
                layers.append((cls, ls))
        return SetExpr(kind, layers, inf if kind == "zhat" else None)

    # recurrence and orbits ----------------------------------------------------------
    def recurrence_set(self, m: SetExpr, n: SetExpr) -> ArrowSet:
        """Arrows xi with (xi . M) meeting N."""
        key = ("rec", m, n)
        if key in self._cache:
            return self._cache[key]
        m, n = self.sigma.clip(m), self.sigma.clip(n)
        if self.rule == "canonical":
            out = self.arrows.restrict(rng=n, src=m)
        else:
            atoms = []
            for a, ma in self._layers(m):
                for b, nb in self._layers(n):
                    lab = self._pull(a, b)
                    if lab:
                        atoms.append(("rect", SetExpr.line(nb), SetExpr.line(ma), lab))
            out = self.arrows & ArrowSet.from_atoms("line", atoms) if atoms else ArrowSet.empty("line")
        self._cache[key] = out
        return out

    def saturate(self, a: SetExpr) -> SetExpr:
        key = ("sat", a)
        if key in self._cache:
            return self._cache[key]
        a = self.sigma.clip(a) if a.kind == self.carrier.kind else a
        if self.rule == "canonical":
            out = self.arrows.restrict(src=a).range_set()
        else:
            items = []
            for cls, ls in self._layers(a):
                c = self.arrows.restrict(src=SetExpr.line(ls))
                for atom in c.atoms():
                    region, lab = atom[1], atom[-1]
                    for out_cls in self._push(lab, cls):
                        items.append((out_cls, region.as_line()))
            out = self._assemble(items)
        self._cache[key] = out
        return out

    def is_invariant(self, a: SetExpr) -> bool:
        return self.saturate(a).issubset(self.sigma.clip(a))

    def orbit(self, p, closed: bool = False) -> SetExpr:
        self._check_point(p)
        o = self.saturate(self.point_set(p))
        return self.sigma.closure(o) if closed else o

    def stabilizer(self, p) -> ArrowSet:
        self._check_point(p)
        s = self.point_set(p)
        return self.recurrence_set(s, s)

    def fiber(self, p) -> ArrowSet:
        return self.groupoid.fiber("source", self.rho(p))

    def invariant_closure(self, a: SetExpr) -> SetExpr:
        cap = len(self.groupoid.blocks) + len(self.carrier.breakpoints() | self.groupoid.breakpoints()) + \
            len(self.carrier.layers) + 4
        cur = self.sigma.clip(a)
        for _ in range(cap):
            nxt = self.sigma.closure(self.saturate(cur))
            if nxt == cur:
                return cur
            cur = nxt
        raise FixpointBoundExceeded(repr(a))

    # neighborhoods ---------------------------------------------------------------
    def breakpoints(self, extra: Iterable = ()) -> set:
        out = set(self.carrier.breakpoints()) | self.groupoid.breakpoints()
        for p in extra:
            out.add(as_lpoint(p)[0])
        return out

    def tail(self) -> int:
        return tail_index(self.carrier, self.arrows)

    def nbhd(self, p, bps: Optional[set] = None) -> SetExpr:
        bps = self.breakpoints() if bps is None else bps
        delta = small_radius(p, bps)
        return self.sigma.clip(self.carrier.nbhd(p, delta, self.tail()))

    def pieces(self, extra: Iterable = ()) -> list:
        bps = self.breakpoints(extra)
        return self.carrier.pieces(bps, max_layer_reps=2)

    def representatives(self) -> list:
        return [p for _, reps in self.pieces() for p in reps]

    # compactness ----------------------------------------------------------------------
    def strongly_noncompact(self) -> bool:
        if "snc" not in self._cache:
            self._cache["snc"] = is_strongly_noncompact(self.groupoid)
        return self._cache["snc"]

    def open_groupoid(self) -> Verdict:
        if "open" not in self._cache:
            self._cache["open"] = is_open_groupoid(self.groupoid)
        return self._cache["open"]

    def relcompact(self, a: ArrowSet) -> bool:
        return a.relatively_compact_in(self.arrows)

    # point classification ---------------------------------------------------------------
    def in_limit_set(self, p, tau, bps: Optional[set] = None) -> bool:
        bps = self.breakpoints([p, tau]) if bps is None else bps
        v = self.nbhd(tau, bps)
        return not self.relcompact(self.recurrence_set(self.point_set(p), v))

    def limit_set(self, p) -> SetExpr:
        self._check_point(p)
        if not self.strongly_noncompact():
            raise NotStronglyNonCompact("limit sets need strongly non-compact groupoids")
        orb = self.orbit(p)
        extra = [p] + [(b, 0) if self.rule != "canonical" else b for b in orb.breakpoints()]
        bps = self.breakpoints(extra)
        parts = []
        for piece, reps in self.carrier.pieces(bps, max_layer_reps=2):
            flags = {self.in_limit_set(p, t, bps) for t in reps}
            if len(flags) != 1:
                raise FixpointBoundExceeded("limit set is not constant on a canonical cell")
            if flags.pop():
                parts.append(piece)
        return _union_all(self.carrier.kind, parts)

    def classify_point(self, p) -> dict:
        self._check_point(p)
        key = ("flags", as_lpoint(p))
        if key not in self._cache:
            self._cache[key] = self._classify(p)
        return self._cache[key]

    def _classify(self, p) -> dict:
        snc = self.strongly_noncompact()
        fib = self.fiber(p)
        stab = self.stabilizer(p)
        bps = self.breakpoints([p])
        u = self.nbhd(p, bps)
        out = {"fixed": Verdict.of(stab.equals(fib))}
        orb = self.orbit(p)
        out["compact_orbit"] = Verdict.of(self.sigma.is_compact(orb))
        out["weakly_transitive"] = Verdict.of(self.invariant_closure(self.point_set(p)) == self.carrier)
        # (weak, almost) periodicity is meaningful on any groupoid; recurrence needs non-compact fibres
        out["weakly_periodic"] = Verdict.of(not stab.is_compact())
        out["periodic"] = syndetic(stab, fib, self.groupoid)
        out["almost_periodic"] = syndetic(self.recurrence_set(self.point_set(p), u), fib, self.groupoid)
        if not snc:
            na = Verdict.not_applicable("groupoid is not strongly non-compact")
            out["recurrent"] = out["nonwandering"] = na
            return _ordered(out)
        out["recurrent"] = Verdict.of(not self.relcompact(self.recurrence_set(self.point_set(p), u)))
        out["nonwandering"] = Verdict.of(not self.relcompact(self.recurrence_set(u, u)))
        return _ordered(out)

    def point_class_set(self, kind: str) -> tuple[SetExpr, bool]:
        """(set of points with the flag, decided everywhere)."""
        flag = {"fix": "fixed", "per": "periodic", "wper": "weakly_periodic", "alper": "almost_periodic",
                "rec": "recurrent", "nw": "nonwandering", "compact_orbit": "compact_orbit",
                "wt": "weakly_transitive"}[kind]
        if flag in ("recurrent", "nonwandering") and not self.strongly_noncompact():
            raise NotStronglyNonCompact(kind)
        key = ("class", flag)
        if key in self._cache:
            return self._cache[key]
        parts, decided = [], True
        for piece, reps in self.pieces():
            vals = {self.classify_point(r)[flag].status for r in reps}
            if vals == {HOLDS}:
                parts.append(piece)
            elif vals != {FAILS}:
                decided = False
        res = (_union_all(self.carrier.kind, parts), decided)
        self._cache[key] = res
        return res

    # orbit structure --------------------------------------------------------------------
    def orbit_structure(self):
        """(distinct non-singleton orbits, region of fixed orbits, complete?)."""
        if "orbits" in self._cache:
            return self._cache["orbits"]
        orbits: list[SetExpr] = []
        fixed_parts = []
        for piece, reps in self.pieces():
            single = True
            for r in reps:
                o = self.orbit(r)
                if o.count_upto(2) == 1:
                    continue
                single = False
                if not any(o == q for q in orbits):
                    orbits.append(o)
            if single:
                fixed_parts.append(piece)
        f = _union_all(self.carrier.kind, fixed_parts)
        covered = _union_all(self.carrier.kind, orbits) | f
        complete = covered == self.carrier and self.saturate(f) == f
        if complete:
            for a, b in itertools.combinations(orbits, 2):
                if a.intersects(b):
                    complete = False
        orbits.sort(key=lambda s: s.key())
        res = (orbits, f, complete)
        self._cache["orbits"] = res
        return res

    def fixed_cells(self, f: SetExpr) -> list[SetExpr]:
        """Cells of the fixed region, each open gap split once more."""
        bps = sorted(self.breakpoints() | f.breakpoints())
        extra = []
        if not bps:
            extra = [Point(0)]
        else:
            extra.append(bps[0] - Point(1))
            extra.append(bps[-1] + Point(1))
            for a, b in zip(bps, bps[1:]):
                extra.append(Point(rational_between(a, b)))
        return [piece for piece, _ in f.pieces(set(bps) | set(extra), max_layer_reps=1)] if f else []

    def candidate_algebra(self):
        orbits, f, complete = self.orbit_structure()
        cells = self.fixed_cells(f)
        return orbits, cells, f, complete


def _ordered(d: dict) -> dict:
    order = ["fixed", "periodic", "weakly_periodic", "almost_periodic", "recurrent", "nonwandering",
             "compact_orbit", "weakly_transitive"]
    return {k: d[k] for k in order if k in d}


# ---------------------------------------------------------------------------
# syndeticity


def syndetic(a: ArrowSet, fiber: ArrowSet, g: BlockGroupoid) -> Verdict:
    """Is there a compact K with K A equal to the fiber?"""
    if not a.issubset(fiber):
        raise NotSubsetOfFiber(repr(a - fiber))
    if a.is_empty():
        return Verdict.fails({"reason": "empty set"})
    orbit = fiber.range_set()
    space = g.base
    if not space.is_compact(space.closure(orbit)):
        return Verdict.fails({"reason": "orbit is not relatively compact", "orbit": orbit.to_json()})
    lf, la = fiber.labels(), a.labels()
    if (lf.rres and not la.rres) or (lf.lres and not la.lres):
        return Verdict.fails({"reason": "labels of the fiber are not within bounded distance",
                              "fiber_labels": lf.to_json(), "labels": la.to_json()})
    span = 2
    for s in (lf, la):
        span = max(span, abs(s.lo), abs(s.hi), s.lp, s.rp)
    src = space.closure(a.range_set())
    for radius in (2 * span, 4 * span + 4):
        k = g.arrows.restrict(rng=space.closure(orbit), src=src, labels=GrpSet.interval(-radius, radius))
        if k.is_compact() and k.compose(a).equals(fiber):
            return Verdict.holds({"K": k.to_json()})
    return Verdict.unknown("no compact cover found in the candidate family")


# ---------------------------------------------------------------------------
# transitivity


def _subsets(items: list):
    for r in range(1, len(items) + 1):
        for combo in itertools.combinations(range(len(items)), r):
            yield combo


def transitivity_profile(act: GroupoidAction) -> dict:
    sig, space = act.carrier, act.sigma
    bps = act.breakpoints()
    pieces = act.pieces()
    reps = [r for _, rs in pieces for r in rs]
    out: dict[str, Verdict] = {}

    # transitive: one orbit
    o0 = act.orbit(reps[0])
    if o0 == sig:
        out["transitive"] = Verdict.holds({"point": _pj(reps[0])})
    else:
        other = next((r for r in reps if not o0.contains(r)), None)
        out["transitive"] = Verdict.fails({"points": [_pj(reps[0]), _pj(other)]}) if other is not None else \
            Verdict.unknown("no witness point outside the first orbit")

    orbits, cells, f, complete = act.candidate_algebra()
    dense_pt = next((r for r in reps if space.is_dense(act.orbit(r))), None)
    if dense_pt is not None:
        out["pointwise_transitive"] = Verdict.holds({"point": _pj(dense_pt)})
    elif complete and sig.count_upto(2) > 1:
        out["pointwise_transitive"] = Verdict.fails({"orbits": [o.to_json() for o in orbits],
                                                     "fixed_region": f.to_json()})
    else:
        out["pointwise_transitive"] = Verdict.unknown("orbit decomposition incomplete")

    wt_pt = next((r for r in reps if act.invariant_closure(act.point_set(r)) == sig), None)
    if wt_pt is not None:
        out["weakly_pointwise_transitive"] = Verdict.holds({"point": _pj(wt_pt)})
    elif complete and sig.count_upto(2) > 1:
        out["weakly_pointwise_transitive"] = Verdict.fails(
            {"invariant_closures": [act.invariant_closure(o).to_json() for o in orbits]})
    else:
        out["weakly_pointwise_transitive"] = Verdict.unknown("orbit decomposition incomplete")

    # (iii) on canonical neighborhoods
    out["prop_iii_recurrent_transitivity"] = _prop_iii(act, pieces, bps)

    # candidate algebra for (i), (i'), (ii), (iv)
    items = list(orbits) + list(cells)
    f_finite = f.count_upto(64) < 64
    exact = complete and f_finite
    if not complete or len(items) > MAX_CANDIDATES:
        for k in ("prop_i", "prop_i_prime", "prop_ii", "prop_iv_topological_transitivity"):
            out[k] = Verdict.unknown("candidate algebra incomplete")
    else:
        unions = []
        for combo in _subsets(items):
            u = _union_all(sig.kind, (items[i] for i in combo))
            unions.append(u)
        opens = [u for u in unions if space.is_open(u)]
        # (iv)
        bad = next((u for u in unions if not space.is_dense(u) and not space.is_nowhere_dense(u)), None)
        if bad is not None:
            out["prop_iv_topological_transitivity"] = Verdict.fails(
                {"invariant_set": bad.to_json(), "reason": "neither dense nor nowhere dense"})
        elif exact or space.is_nowhere_dense(f):
            out["prop_iv_topological_transitivity"] = Verdict.holds()
        else:
            out["prop_iv_topological_transitivity"] = Verdict.unknown("fixed region has interior")
        # (ii)
        int_f_empty = space.interior(f).is_empty()
        bad = next((u for u in opens if not space.is_dense(u)), None)
        if bad is not None:
            out["prop_ii"] = Verdict.fails({"invariant_open": bad.to_json(), "reason": "not dense"})
        elif exact or (int_f_empty and all(space.is_dense(o) for o in orbits)):
            out["prop_ii"] = Verdict.holds()
        else:
            out["prop_ii"] = Verdict.unknown("no certificate")
        # (i')
        pair = next(((a, b) for a, b in itertools.combinations(opens, 2) if not a.intersects(b)), None)
        if pair is not None:
            out["prop_i_prime"] = Verdict.fails({"invariant_opens": [pair[0].to_json(), pair[1].to_json()]})
        elif exact or out["prop_ii"].status == HOLDS:
            out["prop_i_prime"] = Verdict.holds()
        else:
            out["prop_i_prime"] = Verdict.unknown("no certificate")
        # (i)
        closeds = [u for u in unions if space.is_closed(u) and u != sig]
        pair = next(((a, b) for a, b in itertools.combinations(closeds, 2) if (a | b) == sig), None)
        if pair is not None:
            out["prop_i"] = Verdict.fails({"invariant_closed": [pair[0].to_json(), pair[1].to_json()]})
        elif exact or out["prop_i_prime"].status == HOLDS:
            out["prop_i"] = Verdict.holds()
        else:
            out["prop_i"] = Verdict.unknown("no certificate")

    _propagate(out, act)
    order = ["transitive", "pointwise_transitive", "weakly_pointwise_transitive", "prop_i", "prop_i_prime",
             "prop_ii", "prop_iii_recurrent_transitivity", "prop_iv_topological_transitivity"]
    return {k: out[k] for k in order}


def _prop_iii(act: GroupoidAction, pieces, bps) -> Verdict:
    # whole open gaps between breakpoints first, they give the most readable witnesses
    cuts = sorted(bps)
    ends = [None] + cuts + [None]
    cells = []
    for lo, hi in zip(ends, ends[1:]):
        ls = LineSet.interval(lo, hi)
        if act.rule != "canonical":
            gap = act.rho_preimage(SetExpr.line(ls))
        elif act.carrier.kind == "line":
            gap = act.sigma.clip(SetExpr.line(ls))
        else:
            # layered carrier under the canonical rule: take the band over the gap
            gap = act.carrier & SetExpr(act.carrier.kind, [(GrpSet.all(), ls)], ls if act.carrier.kind == "zhat" else None)
        if gap and act.sigma.is_open(gap):
            cells.append(gap)
    for u in cells:
        for v in cells:
            if act.recurrence_set(u, v).is_empty():
                return Verdict.fails({"U": u.to_json(), "V": v.to_json()})
    reps = [r for _, rs in pieces for r in rs]
    nb = {id(r): act.nbhd(r, bps) for r in reps}
    for r in reps:
        for s in reps:
            u, v = nb[id(r)], nb[id(s)]
            if act.recurrence_set(u, v).is_empty():
                return Verdict.fails({"U": u.to_json(), "V": v.to_json()})
    return Verdict.holds()


def _propagate(out: dict, act: GroupoidAction):
    chain = ["prop_iv_topological_transitivity", "prop_iii_recurrent_transitivity", "prop_ii", "prop_i_prime"]
    for i, k in enumerate(chain):
        if out[k].status == HOLDS:
            for weaker in chain[i + 1:] + ["prop_i"]:
                if out[weaker].status == UNKNOWN:
                    out[weaker] = Verdict.holds(label=f"implied by {k}")
    for a, b in (("prop_i", "prop_i_prime"), ("prop_i_prime", "prop_i")):
        if out[a].status == UNKNOWN and out[b].status == HOLDS:
            out[a] = Verdict.holds(label=f"equivalent to {b}")
    if out["pointwise_transitive"].status == HOLDS and out["weakly_pointwise_transitive"].status == UNKNOWN:
        out["weakly_pointwise_transitive"] = Verdict.holds(label="implied by pointwise_transitive")
    if act.open_groupoid().status == HOLDS:
        decided = [k for k in chain + ["prop_i"] if out[k].status != UNKNOWN]
        if decided:
            st = out[decided[0]]
            for k in chain + ["prop_i"]:
                if out[k].status == UNKNOWN:
                    out[k] = Verdict(st.status, st.witness, f"open groupoid: equivalent to {decided[0]}")


def _pj(p):
    if isinstance(p, tuple):
        return [p[0].to_json(), p[1] if p[1] is not None else "inf"]
    return p.to_json()


# ---------------------------------------------------------------------------
# minimality


def is_minimal(act: GroupoidAction, m: SetExpr) -> Verdict:
    m = act.sigma.clip(m)
    if m.is_empty():
        return Verdict.fails({"reason": "empty"})
    if not act.sigma.is_closed(m):
        return Verdict.fails({"reason": "not closed", "closure": act.sigma.closure(m).to_json()})
    if not act.is_invariant(m):
        return Verdict.fails({"reason": "not invariant", "saturation": act.saturate(m).to_json()})
    bps = act.breakpoints() | m.breakpoints()
    for piece, reps in m.pieces(bps, max_layer_reps=2):
        for r in reps:
            c = act.invariant_closure(act.point_set(r))
            if c != m:
                return Verdict.fails({"point": _pj(r), "invariant_closure": c.to_json()})
    return Verdict.holds()


def minimal_sets(act: GroupoidAction) -> dict:
    """Minimal sets among invariant closures of representatives; fixed points are minimal singletons."""
    orbits, f, complete = act.orbit_structure()
    found: list[SetExpr] = []
    for o in orbits:
        c = act.invariant_closure(o)
        if any(c == q for q in found):
            continue
        if is_minimal(act, c).status == HOLDS:
            found.append(c)
    found.sort(key=lambda s: s.key())
    return {"sets": found, "singleton_region": f, "complete": complete}


def is_semisimple(act: GroupoidAction) -> Verdict:
    """Every orbit closure is minimal."""
    for r in act.representatives():
        c = act.orbit(r, closed=True)
        v = is_minimal(act, c)
        if v.status != HOLDS:
            return Verdict.fails({"point": _pj(r), "orbit_closure": c.to_json()})
    return Verdict.holds()


# ---------------------------------------------------------------------------
# mixing


def mixing_profile(act: GroupoidAction) -> dict:
    x = act.groupoid.carrier
    xs = [p for _, reps in x.pieces(act.breakpoints()) for p in reps]
    distinct = []
    for p in xs:
        if all(p != q for q in distinct):
            distinct.append(p)
    out = {}
    if len(distinct) >= 2:
        if x.kind == "line":
            a, b = sorted(distinct[:2])
            gap = (b - a).scale(Fraction(1, 3))
            u0 = SetExpr.line(LineSet.interval(a - gap, a + gap)) & x
            v0 = SetExpr.line(LineSet.interval(b - gap, b + gap)) & x
        else:
            bps = act.groupoid.breakpoints()
            tail = tail_index(x, act.groupoid.arrows)
            a, b = distinct[:2]
            u0 = x.nbhd(a, small_radius(a, bps), tail) & x
            v0 = x.nbhd(b, small_radius(b, bps), tail) & x
        u, v = act.rho_preimage(u0), act.rho_preimage(v0)
        inter = act.recurrence_set(u, u) & act.recurrence_set(u, v)
        if inter.is_empty():
            out["weak"] = Verdict.fails({"U": u.to_json(), "U2": u.to_json(), "V": u.to_json(), "V2": v.to_json(),
                                         "reason": "two distinct units"})
        else:
            out["weak"] = Verdict.unknown("separation witness did not verify")
    else:
        out["weak"] = _weak_by_reps(act)
    out["strong"] = _strong_by_reps(act)
    return out


def _weak_by_reps(act: GroupoidAction) -> Verdict:
    bps = act.breakpoints()
    nbs = [act.nbhd(r, bps) for r in act.representatives()]
    recs = {}
    for i, u in enumerate(nbs):
        for j, v in enumerate(nbs):
            recs[i, j] = act.recurrence_set(u, v)
    keys = list(recs)
    for k1 in keys:
        for k2 in keys:
            if (recs[k1] & recs[k2]).is_empty():
                return Verdict.fails({"U": nbs[k1[0]].to_json(), "V": nbs[k1[1]].to_json(),
                                      "U2": nbs[k2[0]].to_json(), "V2": nbs[k2[1]].to_json()})
    return Verdict.holds()


def _strong_by_reps(act: GroupoidAction) -> Verdict:
    bps = act.breakpoints()
    nbs = [act.nbhd(r, bps) for r in act.representatives()]
    for u in nbs:
        for v in nbs:
            comp = act.arrows - act.recurrence_set(u, v)
            if not act.relcompact(comp):
                return Verdict.fails({"U": u.to_json(), "V": v.to_json()})
    return Verdict.holds()


# ---------------------------------------------------------------------------
# reports


class VerdictReport:
    def __init__(self, name: str = ""):
        self.name = name
        self.profile: dict = {}
        self.sets: dict = {}
        self.witnesses: list = []

    def add(self, key: str, v: Verdict):
        self.profile[key] = v
        if v.witness is not None and v.status in (HOLDS, FAILS):
            self.witnesses.append({"query": key, "status": v.status, "witness": v.witness})

    def to_json(self) -> dict:
        return {"name": self.name, "profile": {k: v.to_json() for k, v in self.profile.items()},
                "sets": {k: (s.to_json() if isinstance(s, SetExpr) else s) for k, s in self.sets.items()},
                "witnesses": self.witnesses}

    def to_markdown(self) -> str:
        lines = [f"# {self.name}" if self.name else "# report", "", "| query | status |", "|---|---|"]
        for k, v in self.profile.items():
            lines.append(f"| {k} | {v.status} ({v.label}) |" if v.label else f"| {k} | {v.status} |")
        if self.sets:
            lines += ["", "| set | value |", "|---|---|"]
            for k, s in self.sets.items():
                lines.append(f"| {k} | {s!r} |")
        return "\n".join(lines) + "\n"

    def unknowns(self) -> list[str]:
        return [k for k, v in self.profile.items() if v.status == UNKNOWN]


def full_report(act: GroupoidAction) -> VerdictReport:
    rep = VerdictReport(act.name)
    rep.add("is_open", act.open_groupoid())
    rep.add("strongly_noncompact", Verdict.of(act.strongly_noncompact()))
    for k, v in transitivity_profile(act).items():
        rep.add(k, v)
    kinds = ["fix", "per", "wper", "alper"] + (["rec", "nw"] if act.strongly_noncompact() else [])
    for k in kinds:
        s, decided = act.point_class_set(k)
        rep.sets[k] = s
        if not decided:
            rep.add(f"set_{k}", Verdict.unknown("flag not constant on a cell"))
    for k, v in mixing_profile(act).items():
        rep.add(f"mixing_{k}", v)
    return rep
