"""Reference semantics by exhaustive enumeration.

The hybrid world is a finite preordered unit space, arrows ``(x, n, y)`` with
``n`` in an eventually periodic label set, and actions on finite preordered
spaces stored as explicit tables indexed by ``n mod P``.  Open sets are the
up-sets of the preorders (Alexandrov topology); the integer coordinate is
discrete, so a set of arrows is relatively compact iff it uses finitely many
labels.

Nothing here calls the symbolic deciders; the only shared code is Python.
"""
from __future__ import annotations

import itertools
import json
import random
from math import gcd
from typing import Iterable, Optional, Sequence


class PredicateNotApplicable(ValueError):
    pass


class GenerationExhausted(RuntimeError):
    pass


class InvalidInstance(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# ---------------------------------------------------------------------------
# integer patterns


class ZPattern:
    """Subset of Z that is periodic up to finitely many flipped integers.

    n is a member iff ``(n % p in res) != (n in exc)``.  Only two-sided
    periodic behaviour is representable, which covers cosets, finite sets and
    every Boolean combination of them.
    """

    __slots__ = ("p", "res", "exc")

    def __init__(self, p: int = 1, res: Iterable[int] = (), exc: Iterable[int] = ()):
        p = max(1, int(p))
        res = frozenset(int(r) % p for r in res)
        for q in range(1, p + 1):
            if p % q == 0 and all((r in res) == ((r + q) % p in res) for r in range(p)):
                res = frozenset(r for r in res if r < q)
                p = q
                break
        self.p = p
        self.res = res
        self.exc = frozenset(int(n) for n in exc)

    # constructors
    @classmethod
    def empty(cls) -> "ZPattern":
        return cls()

    @classmethod
    def all(cls) -> "ZPattern":
        return cls(1, [0])

    @classmethod
    def finite(cls, elems: Iterable[int]) -> "ZPattern":
        return cls(1, (), set(elems))

    @classmethod
    def coset(cls, c: int, d: int) -> "ZPattern":
        """c + dZ, or {c} when d == 0."""
        if d == 0:
            return cls.finite([c])
        return cls(abs(d), [c % abs(d)])

    @classmethod
    def residues(cls, p: int, rs: Iterable[int]) -> "ZPattern":
        return cls(p, rs)

    # membership and comparison
    def __contains__(self, n: int) -> bool:
        return ((n % self.p) in self.res) != (n in self.exc)

    def __eq__(self, o) -> bool:
        return isinstance(o, ZPattern) and (self.p, self.res, self.exc) == (o.p, o.res, o.exc)

    def __hash__(self) -> int:
        return hash((self.p, self.res, self.exc))

    def is_empty(self) -> bool:
        return not self.res and not self.exc

    def __bool__(self) -> bool:
        return not self.is_empty()

    def is_finite(self) -> bool:
        return not self.res

    def elements(self) -> list[int]:
        if not self.is_finite():
            raise ValueError("infinite pattern")
        return sorted(self.exc)

    def bound(self) -> int:
        return max((abs(n) for n in self.exc), default=0)

    def window(self, lo: int, hi: int) -> list[int]:
        return [n for n in range(lo, hi + 1) if n in self]

    def residues_mod(self, q: int) -> frozenset:
        """Residues mod q of the members."""
        out = {n % q for n in self.exc if n in self}
        if self.res:
            per = _lcm(self.p, q)
            start = self.bound() + 1
            out |= {n % q for n in range(start, start + per) if n in self}
        return frozenset(out)

    # Boolean algebra
    def _binop(self, o: "ZPattern", f) -> "ZPattern":
        p = _lcm(self.p, o.p)
        res = [r for r in range(p) if f((r % self.p) in self.res, (r % o.p) in o.res)]
        rs = set(res)
        exc = [n for n in self.exc | o.exc if f(n in self, n in o) != ((n % p) in rs)]
        return ZPattern(p, res, exc)

    def __or__(self, o):
        return self._binop(o, lambda a, b: a or b)

    def __and__(self, o):
        return self._binop(o, lambda a, b: a and b)

    def __sub__(self, o):
        return self._binop(o, lambda a, b: a and not b)

    def complement(self) -> "ZPattern":
        return ZPattern(self.p, set(range(self.p)) - self.res, self.exc)

    def issubset(self, o: "ZPattern") -> bool:
        return (self - o).is_empty()

    # arithmetic
    def shift(self, k: int) -> "ZPattern":
        return ZPattern(self.p, [r + k for r in self.res], [n + k for n in self.exc])

    def neg(self) -> "ZPattern":
        return ZPattern(self.p, [-r for r in self.res], [-n for n in self.exc])

    def _extras(self) -> list[int]:
        return [n for n in self.exc if n in self]

    def __add__(self, o: "ZPattern") -> "ZPattern":
        """Minkowski sum."""
        if self.is_empty() or o.is_empty():
            return ZPattern.empty()
        if self.is_finite() and o.is_finite():
            return ZPattern.finite({a + b for a in self.exc for b in o.exc})
        if self.is_finite():
            return o + self
        if o.is_finite():
            out = ZPattern.empty()
            for b in o.exc:
                out = out | self.shift(b)
            return out
        g = gcd(self.p, o.p)
        out = ZPattern(g, {(a + b) % g for a in self.res for b in o.res})
        for e in self._extras():
            out = out | o.shift(e)
        for e in o._extras():
            out = out | self.shift(e)
        return out

    def to_json(self):
        return {"p": self.p, "res": sorted(self.res), "exc": sorted(self.exc)}

    @classmethod
    def from_json(cls, d) -> "ZPattern":
        return cls(d["p"], d["res"], d["exc"])

    def __repr__(self) -> str:
        if self.is_finite():
            return "{" + ",".join(map(str, self.elements())) + "}"
        base = "|".join(f"{r}+{self.p}Z" for r in sorted(self.res))
        return base + (f" ^ {sorted(self.exc)}" if self.exc else "")


# ---------------------------------------------------------------------------
# finite preordered spaces


class Topo:
    """Alexandrov topology of a preorder given by the up-sets ``up[p]``."""

    def __init__(self, points: Sequence, up: dict):
        self.points = tuple(points)
        self.full = frozenset(self.points)
        self.up = {p: frozenset(up[p]) for p in self.points}
        for p in self.points:
            if p not in self.up[p]:
                raise InvalidInstance("preorder is not reflexive")
            for q in self.up[p]:
                if not self.up[q] <= self.up[p]:
                    raise InvalidInstance("preorder is not transitive")

    @classmethod
    def from_pairs(cls, points: Sequence, pairs: Iterable[tuple]) -> "Topo":
        up = {p: {p} for p in points}
        for a, b in pairs:
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for p in points:
                new = set(up[p])
                for q in list(up[p]):
                    new |= up[q]
                if new != up[p]:
                    up[p] = new
                    changed = True
        return cls(points, up)

    @classmethod
    def discrete(cls, points: Sequence) -> "Topo":
        return cls(points, {p: {p} for p in points})

    def leq(self, p, q) -> bool:
        return q in self.up[p]

    @property
    def hausdorff(self) -> bool:
        return all(len(self.up[p]) == 1 for p in self.points)

    def closure(self, a) -> frozenset:
        a = frozenset(a)
        return frozenset(p for p in self.points if self.up[p] & a)

    def interior(self, a) -> frozenset:
        a = frozenset(a)
        return frozenset(p for p in self.points if self.up[p] <= a)

    def open_hull(self, a) -> frozenset:
        out = set()
        for p in a:
            out |= self.up[p]
        return frozenset(out)

    def is_open(self, a) -> bool:
        a = frozenset(a)
        return all(self.up[p] <= a for p in a)

    def is_closed(self, a) -> bool:
        return self.is_open(self.full - frozenset(a))

    def is_dense(self, a) -> bool:
        return self.closure(a) == self.full

    def is_nowhere_dense(self, a) -> bool:
        return not self.interior(self.closure(a))

    def to_json(self):
        return {"points": [_pt_json(p) for p in self.points],
                "up": [[_pt_json(q) for q in sorted(self.up[p])] for p in self.points]}

    @classmethod
    def from_json(cls, d) -> "Topo":
        pts = [_pt_parse(p) for p in d["points"]]
        return cls(pts, {p: {_pt_parse(q) for q in u} for p, u in zip(pts, d["up"])})


def _pt_json(p):
    return list(p) if isinstance(p, tuple) else p


def _pt_parse(p):
    return tuple(_pt_parse(q) for q in p) if isinstance(p, list) else p


# ---------------------------------------------------------------------------
# arrow sets: dict (range, source) -> non-empty ZPattern


def aset(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


def aset_union(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] | v if k in out else v
    return aset(out)


def aset_inter(a: dict, b: dict) -> dict:
    return aset({k: a[k] & b[k] for k in a if k in b})


def aset_diff(a: dict, b: dict) -> dict:
    return aset({k: (a[k] - b[k]) if k in b else a[k] for k in a})


def aset_subset(a: dict, b: dict) -> bool:
    return not aset_diff(a, b)


def aset_relcompact(a: dict) -> bool:
    return all(v.is_finite() for v in a.values())


def aset_compose(a: dict, b: dict) -> dict:
    """{alpha beta : alpha in a, beta in b, d(alpha) = r(beta)}."""
    out: dict = {}
    for (x, y), la in a.items():
        for (y2, z), lb in b.items():
            if y == y2:
                s = la + lb
                out[(x, z)] = out[(x, z)] | s if (x, z) in out else s
    return aset(out)


def aset_inverse(a: dict) -> dict:
    return {(y, x): v.neg() for (x, y), v in a.items()}


def aset_json(a: dict) -> list:
    return [[_pt_json(x), _pt_json(y), v.to_json()] for (x, y), v in sorted(a.items(), key=lambda kv: repr(kv[0]))]


def aset_from_json(items) -> dict:
    return {(_pt_parse(x), _pt_parse(y)): ZPattern.from_json(v) for x, y, v in items}


# ---------------------------------------------------------------------------
# groupoids


class HybridGroupoid:
    """Units with a preorder and labels L(x, y) of the arrows from y to x."""

    def __init__(self, topo: Topo, labels: dict, validate: bool = True):
        self.topo = topo
        self.units = topo.points
        self.labels = aset(labels)
        if validate:
            self._validate()

    def L(self, x, y) -> ZPattern:
        return self.labels.get((x, y), ZPattern.empty())

    def _validate(self):
        for x in self.units:
            if 0 not in self.L(x, x):
                raise InvalidInstance(f"missing unit at {x}")
        for (x, y), v in self.labels.items():
            if self.L(y, x) != v.neg():
                raise InvalidInstance(f"inverse labels differ at {(x, y)}")
        for (x, y), a in self.labels.items():
            for z in self.units:
                b = self.L(y, z)
                if b and not (a + b).issubset(self.L(x, z)):
                    raise InvalidInstance(f"composition leaves the groupoid at {(x, y, z)}")

    @property
    def all_arrows(self) -> dict:
        return dict(self.labels)

    def fiber(self, x) -> dict:
        return {(z, x): v for (z, y), v in self.labels.items() if y == x}

    def isotropy(self, x) -> ZPattern:
        return self.L(x, x)

    def orbit(self, x) -> frozenset:
        return frozenset(z for (z, y) in self.labels if y == x)

    def strongly_noncompact(self) -> bool:
        return all(not aset_relcompact(self.fiber(x)) for x in self.units)

    def compact(self) -> bool:
        return aset_relcompact(self.labels)

    def window_bound(self) -> int:
        per, b = 1, 0
        for v in self.labels.values():
            per = _lcm(per, v.p)
            b = max(b, v.bound())
        return b + 2 * per + 1

    def is_open(self) -> bool:
        """The source map sends basic opens of arrows to up-sets."""
        return self.open_witness() is None

    def open_witness(self):
        bound = self.window_bound()
        up = self.topo.up
        for (x, y), lab in self.labels.items():
            for n in lab.window(-bound, bound):
                img = {y2 for y2 in up[y] if any(n in self.L(x2, y2) for x2 in up[x])}
                if not self.topo.is_open(img):
                    return {"arrow": [_pt_json(x), n, _pt_json(y)], "source_image": sorted(map(repr, img))}
        return None

    def to_json(self):
        return {"units": self.topo.to_json(), "labels": aset_json(self.labels)}

    @classmethod
    def from_json(cls, d) -> "HybridGroupoid":
        return cls(Topo.from_json(d["units"]), aset_from_json(d["labels"]))


# ---------------------------------------------------------------------------
# actions


class HybridAction:
    """Action given by table[(x, y, s)][n % P] for arrows (x, n, y) and rho(s) == y."""

    def __init__(self, groupoid: HybridGroupoid, topo: Topo, rho: dict, period: int, table: dict,
                 validate: bool = True, name: str = ""):
        self.groupoid = groupoid
        self.topo = topo
        self.points = topo.points
        self.rho = dict(rho)
        self.P = int(period)
        self.table = {k: tuple(v) for k, v in table.items()}
        self.name = name
        self._cache: dict = {}
        if validate:
            self._validate()

    # basics
    def act(self, x, n: int, y, s):
        return self.table[(x, y, s)][n % self.P]

    def fiber_points(self, y) -> list:
        return [s for s in self.points if self.rho[s] == y]

    def label_residues(self, x, y) -> frozenset:
        key = ("lres", x, y)
        if key not in self._cache:
            self._cache[key] = self.groupoid.L(x, y).residues_mod(self.P)
        return self._cache[key]

    def moves(self):
        """All (x, y, s, r) with an arrow of label residue r from y = rho(s) to x."""
        g = self.groupoid
        for (x, y) in g.labels:
            for s in self.fiber_points(y):
                for r in sorted(self.label_residues(x, y)):
                    yield x, y, s, r

    def _validate(self):
        g, up = self.groupoid, self.topo.up
        if set(self.rho.values()) != set(g.units):
            raise InvalidInstance("anchor is not onto the units")
        for s in self.points:
            for t in up[s]:
                if not g.topo.leq(self.rho[s], self.rho[t]):
                    raise InvalidInstance("anchor is not continuous")
        for x, y, s, r in self.moves():
            t = self.act(x, r, y, s)
            if t not in self.topo.full or self.rho[t] != x:
                raise InvalidInstance(f"bad target at {(x, y, s, r)}")
        for x in g.units:
            for s in self.fiber_points(x):
                if self.act(x, 0, x, s) != s:
                    raise InvalidInstance(f"units do not act trivially at {s}")
        for (x, y) in g.labels:
            for z in g.units:
                if (y, z) not in g.labels:
                    continue
                for s in self.fiber_points(z):
                    for r2 in self.label_residues(y, z):
                        mid = self.act(y, r2, z, s)
                        for r1 in self.label_residues(x, y):
                            if self.act(x, r1, y, mid) != self.act(x, r1 + r2, z, s):
                                raise InvalidInstance(f"not an action at {(x, y, z, s)}")
        # continuity: the action map is monotone on composable pairs
        for (x, y), lab in g.labels.items():
            for s in self.fiber_points(y):
                for t in up[s]:
                    y2 = self.rho[t]
                    for x2 in g.topo.up[x]:
                        common = lab & g.L(x2, y2)
                        for r in common.residues_mod(self.P):
                            if not self.topo.leq(self.act(x, r, y, s), self.act(x2, r, y2, t)):
                                raise InvalidInstance(f"action is not continuous at {(x, y, s, t)}")

    # orbits and recurrence
    def orbit(self, s) -> frozenset:
        key = ("orbit", s)
        if key not in self._cache:
            y = self.rho[s]
            self._cache[key] = frozenset(self.act(x, r, y, s) for (x, yy) in self.groupoid.labels if yy == y
                                         for r in self.label_residues(x, y))
        return self._cache[key]

    def orbits(self) -> list[frozenset]:
        out, seen = [], set()
        for s in self.points:
            if s not in seen:
                o = self.orbit(s)
                seen |= o
                out.append(o)
        return out

    def saturate(self, a) -> frozenset:
        out = set()
        for s in a:
            out |= self.orbit(s)
        return frozenset(out)

    def apply(self, x, n: int, y, a) -> frozenset:
        """(x, n, y) . A, using the points of A over y."""
        return frozenset(self.act(x, n, y, s) for s in a if self.rho[s] == y)

    def recurrence_set(self, m, n) -> dict:
        """Arrows xi with (xi . M) meeting N."""
        m, n = frozenset(m), frozenset(n)
        out = {}
        for (x, y), lab in self.groupoid.labels.items():
            rs = {r for r in range(self.P) for s in m if self.rho[s] == y and self.act(x, r, y, s) in n}
            if rs:
                v = lab & ZPattern.residues(self.P, rs)
                if v:
                    out[(x, y)] = v
        return out

    def stabilizer(self, s) -> dict:
        return self.recurrence_set({s}, {s})

    def fiber(self, s) -> dict:
        return self.groupoid.fiber(self.rho[s])

    def is_invariant(self, a) -> bool:
        return self.saturate(a) <= frozenset(a)

    def invariant_closure(self, a) -> frozenset:
        cur = frozenset(a)
        while True:
            nxt = self.topo.closure(self.saturate(cur))
            if nxt == cur:
                return cur
            cur = nxt

    def invariant_sets(self) -> list[frozenset]:
        if "invsets" not in self._cache:
            orbs = self.orbits()
            out = []
            for k in range(len(orbs) + 1):
                for combo in itertools.combinations(orbs, k):
                    out.append(frozenset().union(*combo))
            self._cache["invsets"] = out
        return self._cache["invsets"]

    # syndeticity
    def syndetic(self, a: dict, x) -> tuple[bool, Optional[dict]]:
        """Is a subset A of the fibre over x syndetic?  Returns (answer, K) with K an explicit compact set."""
        fib = self.groupoid.fiber(x)
        if not aset_subset(a, fib):
            raise ValueError("not a subset of the fibre")
        zs = sorted({z for (z, _) in fib}, key=repr)
        for (y, _), ay in sorted(a.items(), key=lambda kv: repr(kv[0])):
            k = self._cover(ay, y, x, zs)
            if k is not None:
                return True, k
        return False, None

    def _cover(self, ay: ZPattern, y, x, zs) -> Optional[dict]:
        g = self.groupoid
        if ay.is_finite():
            if any(not g.L(z, x).is_finite() for z in zs):
                return None
            a0 = ay.elements()[0]
            k = {(z, y): ZPattern.finite(n - a0 for n in g.L(z, x).elements()) for z in zs}
        else:
            w = ay.bound() + 2 * ay.p + max(g.L(z, x).bound() + g.L(z, y).p for z in zs) + 1
            k = {(z, y): ZPattern.finite(g.L(z, y).window(-w, w)) for z in zs}
        k = aset(k)
        if all(((k.get((z, y), ZPattern.empty())) + ay) == g.L(z, x) for z in zs):
            return k
        if ay.is_finite():
            return None
        raise RuntimeError("syndetic cover construction failed")

    # limit sets and point classes
    def hit_infinitely(self, s) -> frozenset:
        y = self.rho[s]
        out = set()
        for (x, yy), lab in self.groupoid.labels.items():
            if yy != y or lab.is_finite():
                continue
            for r in range(self.P):
                if not (lab & ZPattern.residues(self.P, [r])).is_finite():
                    out.add(self.act(x, r, y, s))
        return frozenset(out)

    def limit_set(self, s) -> frozenset:
        """Intersection over compact K of the closures of (fibre minus K) . s."""
        return self.topo.closure(self.hit_infinitely(s))

    def snc(self) -> bool:
        if "snc" not in self._cache:
            self._cache["snc"] = self.groupoid.strongly_noncompact()
        return self._cache["snc"]

    def flags(self, s) -> dict:
        key = ("flags", s)
        if key in self._cache:
            return self._cache[key]
        stab, fib = self.stabilizer(s), self.fiber(s)
        u = self.topo.up[s]
        out = {"fixed": stab == fib,
               "periodic": self.syndetic(stab, self.rho[s])[0],
               "weakly_periodic": not aset_relcompact(stab),
               "almost_periodic": self.syndetic(self.recurrence_set({s}, u), self.rho[s])[0]}
        if self.snc():
            out["recurrent"] = s in self.limit_set(s)
            out["nonwandering"] = not aset_relcompact(self.recurrence_set(u, u))
        else:
            out["recurrent"] = out["nonwandering"] = None
        self._cache[key] = out
        return out

    def class_set(self, kind: str) -> frozenset:
        flag = {"fix": "fixed", "per": "periodic", "wper": "weakly_periodic", "alper": "almost_periodic",
                "rec": "recurrent", "nw": "nonwandering"}[kind]
        if kind in ("rec", "nw") and not self.snc():
            raise PredicateNotApplicable(f"{kind} needs a strongly non-compact groupoid")
        return frozenset(s for s in self.points if self.flags(s)[flag])

    # transitivity
    def profile(self) -> dict:
        if "profile" in self._cache:
            return self._cache["profile"]
        tp, orbs, full = self.topo, self.orbits(), self.topo.full
        inv = self.invariant_sets()
        out: dict = {}
        out["transitive"] = _v(len(orbs) == 1, None if len(orbs) == 1 else {"orbits": _sets_json(orbs[:2])})
        dense = next((o for o in orbs if tp.is_dense(o)), None)
        out["pointwise_transitive"] = _v(dense is not None, {"orbit": _set_json(dense)} if dense else
                                         {"orbits": _sets_json(orbs)})
        wt = next((s for s in self.points if self.invariant_closure({s}) == full), None)
        if wt is not None:
            out["weakly_pointwise_transitive"] = _v(True, {"point": _pt_json(wt)})
        else:
            closures = {self.invariant_closure({s}) for s in self.points}
            out["weakly_pointwise_transitive"] = _v(False, {"closures": sorted(_sets_json(closures))})
        closed = [a for a in inv if tp.is_closed(a) and a != full]
        pair = next(((a, b) for a, b in itertools.combinations(closed, 2) if a | b == full), None)
        out["prop_i"] = _v(pair is None, None if pair is None else {"closed": _sets_json(pair)})
        opens = [a for a in inv if a and tp.is_open(a)]
        pair = next(((a, b) for a, b in itertools.combinations(opens, 2) if not a & b), None)
        out["prop_i_prime"] = _v(pair is None, None if pair is None else {"opens": _sets_json(pair)})
        bad = next((a for a in opens if not tp.is_dense(a)), None)
        out["prop_ii"] = _v(bad is None, None if bad is None else {"open": _set_json(bad)})
        bad = None
        for s in self.points:
            for t in self.points:
                if not self.recurrence_set(tp.up[s], tp.up[t]):
                    bad = (tp.up[s], tp.up[t])
                    break
            if bad:
                break
        out["prop_iii"] = _v(bad is None, None if bad is None else {"U": _set_json(bad[0]), "V": _set_json(bad[1])})
        bad = next((a for a in inv if not tp.is_dense(a) and not tp.is_nowhere_dense(a)), None)
        out["prop_iv"] = _v(bad is None, None if bad is None else {"invariant": _set_json(bad)})
        self._cache["profile"] = out
        return out

    def closed_invariant_sets(self) -> list[frozenset]:
        return [a for a in self.invariant_sets() if a and self.topo.is_closed(a)]

    def is_minimal_set(self, m) -> bool:
        m = frozenset(m)
        if not m or not self.topo.is_closed(m) or not self.is_invariant(m):
            return False
        return not any(c < m for c in self.closed_invariant_sets())

    def minimal_sets(self) -> list[frozenset]:
        cs = self.closed_invariant_sets()
        return [m for m in cs if not any(c < m for c in cs)]

    def is_minimal(self) -> bool:
        return self.is_minimal_set(self.topo.full)

    def is_semisimple(self) -> bool:
        return all(self.is_minimal_set(self.topo.closure(self.orbit(s))) for s in self.points)

    # mixing
    def mixing(self) -> dict:
        up = self.topo.up
        opens = sorted({up[s] for s in self.points}, key=lambda a: sorted(map(repr, a)))
        recs = {(u, v): self.recurrence_set(u, v) for u in opens for v in opens}
        weak = None
        for k1, k2 in itertools.product(recs, repeat=2):
            if not aset_inter(recs[k1], recs[k2]):
                weak = {"U": _set_json(k1[0]), "V": _set_json(k1[1]), "U2": _set_json(k2[0]), "V2": _set_json(k2[1])}
                break
        strong = None
        for k, r in recs.items():
            if not aset_relcompact(aset_diff(self.groupoid.labels, r)):
                strong = {"U": _set_json(k[0]), "V": _set_json(k[1])}
                break
        return {"weak": _v(weak is None, weak), "strong": _v(strong is None, strong)}

    def to_json(self):
        return {"groupoid": self.groupoid.to_json(), "sigma": self.topo.to_json(),
                "rho": [[_pt_json(s), _pt_json(self.rho[s])] for s in self.points], "period": self.P,
                "table": [[_pt_json(x), _pt_json(y), _pt_json(s), [_pt_json(t) for t in v]]
                          for (x, y, s), v in sorted(self.table.items(), key=lambda kv: repr(kv[0]))],
                "name": self.name}

    @classmethod
    def from_json(cls, d) -> "HybridAction":
        g = HybridGroupoid.from_json(d["groupoid"])
        topo = Topo.from_json(d["sigma"])
        rho = {_pt_parse(s): _pt_parse(x) for s, x in d["rho"]}
        table = {(_pt_parse(x), _pt_parse(y), _pt_parse(s)): tuple(_pt_parse(t) for t in v)
                 for x, y, s, v in d["table"]}
        return cls(g, topo, rho, d["period"], table, name=d.get("name", ""))


def _v(flag: bool, witness=None) -> dict:
    out = {"status": "Holds" if flag else "Fails"}
    if witness is not None:
        out["witness"] = witness
    return out


def _set_json(a) -> list:
    return sorted((_pt_json(p) for p in a), key=repr)


def _sets_json(sets) -> list:
    return [_set_json(a) for a in sets]


# ---------------------------------------------------------------------------
# constructions


def canonical_action(g: HybridGroupoid, name: str = "") -> HybridAction:
    table = {(x, y, y): (x,) for (x, y) in g.labels}
    return HybridAction(g, g.topo, {x: x for x in g.units}, 1, table, name=name or "canonical")


def layered_action(g: HybridGroupoid, perm: Sequence[int], layers: dict, layer_pre: str = "discrete",
                   twist: Optional[dict] = None, validate: bool = True) -> HybridAction:
    """Sigma = union of {x} x layers[x]; (x, n, y) . (y, s) = (x, perm^(n - b(x) + b(y)) s)."""
    perm = tuple(perm)
    k = len(perm)
    order = 1
    for i in range(k):
        c, j = 1, perm[i]
        while j != i:
            j, c = perm[j], c + 1
        order = _lcm(order, c)
    b = twist or {x: 0 for x in g.units}
    pw = [list(range(k))]
    for _ in range(order - 1):
        pw.append([perm[i] for i in pw[-1]])
    cyc = {i: frozenset(pw[e][i] for e in range(order)) for i in range(k)}
    pts = [(x, s) for x in g.units for s in sorted(layers[x])]

    def le_s(s, t):
        if layer_pre == "discrete":
            return s == t
        if layer_pre == "cycle":
            return t in cyc[s]
        return True

    up = {p: {q for q in pts if g.topo.leq(p[0], q[0]) and le_s(p[1], q[1])} for p in pts}
    topo = Topo(pts, up)
    table = {}
    for (x, y) in g.labels:
        for s in layers[y]:
            table[(x, y, (y, s))] = tuple((x, pw[(r - b[x] + b[y]) % order][s]) for r in range(order))
    return HybridAction(g, topo, {p: p[0] for p in pts}, order, table, validate=validate)


def action_groupoid(act: HybridAction) -> HybridGroupoid:
    """Units Sigma, labels {n in L(rho t, rho s) : (rho t, n, rho s) . s = t}."""
    labels = {}
    g = act.groupoid
    for (x, y), lab in g.labels.items():
        for s in act.fiber_points(y):
            for t in act.fiber_points(x):
                rs = [r for r in range(act.P) if act.act(x, r, y, s) == t]
                v = lab & ZPattern.residues(act.P, rs)
                if v:
                    labels[(t, s)] = v
    return HybridGroupoid(act.topo, labels, validate=False)


def pullback_groupoid(g: HybridGroupoid, omega: Topo, h: dict) -> HybridGroupoid:
    labels = {}
    for w in omega.points:
        for w2 in omega.points:
            v = g.L(h[w], h[w2])
            if v:
                labels[(w, w2)] = v
    return HybridGroupoid(omega, labels)


def restricted_recurrence(act: HybridAction, sub_units, m, n) -> dict:
    """Recurrence set of the restriction of the groupoid to arrows with both ends in sub_units."""
    sub_units = frozenset(sub_units)
    return {k: v for k, v in act.recurrence_set(m, n).items() if k[0] in sub_units and k[1] in sub_units}


class HybridMap:
    """Equivariant map between two actions of the same groupoid."""

    def __init__(self, source: HybridAction, target: HybridAction, f: dict):
        self.source = source
        self.target = target
        self.f = dict(f)

    def image(self, a) -> frozenset:
        return frozenset(self.f[s] for s in a)

    def preimage(self, a) -> frozenset:
        a = frozenset(a)
        return frozenset(s for s in self.source.points if self.f[s] in a)

    def problems(self) -> list[str]:
        src, tgt = self.source, self.target
        out = []
        if src.groupoid is not tgt.groupoid and src.groupoid.labels != tgt.groupoid.labels:
            out.append("different groupoids")
            return out
        if self.image(src.points) != tgt.topo.full:
            out.append("not surjective")
        for s in src.points:
            if tgt.rho[self.f[s]] != src.rho[s]:
                out.append(f"anchor at {s}")
            for t in src.topo.up[s]:
                if not tgt.topo.leq(self.f[s], self.f[t]):
                    out.append(f"not continuous at {s}")
        q = _lcm(src.P, tgt.P)
        for (x, y), lab in src.groupoid.labels.items():
            for s in src.fiber_points(y):
                for r in lab.residues_mod(q):
                    if self.f[src.act(x, r, y, s)] != tgt.act(x, r, y, self.f[s]):
                        out.append(f"not equivariant at {(x, r, y, s)}")
        return out

    def is_epimorphism(self) -> bool:
        return not self.problems()


def rho_map(act: HybridAction) -> HybridMap:
    return HybridMap(act, canonical_action(act.groupoid), {s: act.rho[s] for s in act.points})


def identity_map(act: HybridAction) -> HybridMap:
    return HybridMap(act, act, {s: s for s in act.points})


def layer_quotient(act: HybridAction, perm: Sequence[int], m: int) -> HybridMap:
    """Collapse layers along the orbits of perm^m; the action descends because perm commutes with perm^m."""
    perm = tuple(perm)
    k = len(perm)

    def powm(i):
        for _ in range(m):
            i = perm[i]
        return i

    cls = {}
    for i in range(k):
        orb, j = {i}, powm(i)
        while j not in orb:
            orb.add(j)
            j = powm(j)
        cls[i] = min(orb)
    f = {s: (s[0], cls[s[1]]) for s in act.points}
    pts = sorted(set(f.values()))
    pairs = [(f[s], f[t]) for s in act.points for t in act.topo.up[s]]
    topo = Topo.from_pairs(pts, pairs)
    table = {}
    for (x, y, s), v in act.table.items():
        table[(x, y, f[s])] = tuple(f[t] for t in v)
    tgt = HybridAction(act.groupoid, topo, {p: p[0] for p in pts}, act.P, table, name="layer quotient")
    return HybridMap(act, tgt, f)


def crossed_groupoid(act: HybridAction) -> HybridGroupoid:
    return action_groupoid(act)


def induced_action(fm: HybridMap) -> HybridAction:
    """The action of the crossed groupoid of the target on the source space, anchored by f."""
    src, tgt = fm.source, fm.target
    cg = action_groupoid(tgt)
    table = {}
    for (tp, sp), lab in cg.labels.items():
        x, y = tgt.rho[tp], tgt.rho[sp]
        for s in src.points:
            if fm.f[s] != sp:
                continue
            table[(tp, sp, s)] = tuple(src.act(x, r, y, s) for r in range(src.P))
    return HybridAction(cg, src.topo, dict(fm.f), src.P, table, name="induced")


def extension_from_action(big: HybridAction, base: HybridAction) -> tuple[HybridAction, HybridMap]:
    """Recover the extension from an action of the crossed groupoid of ``base``."""
    g = base.groupoid
    q = _lcm(big.P, base.P)
    rho = {s: base.rho[big.rho[s]] for s in big.points}
    table = {}
    for (x, y), lab in g.labels.items():
        reps = _residue_reps(lab, q)
        for s in big.points:
            if rho[s] != y:
                continue
            sp = big.rho[s]
            row = []
            for r in range(q):
                n = reps.get(r)
                if n is None:
                    row.append(s)
                    continue
                tp = base.act(x, n, y, sp)
                row.append(big.table[(tp, sp, s)][n % big.P])
            table[(x, y, s)] = tuple(row)
    theta = HybridAction(g, big.topo, rho, q, table, validate=False, name="extension")
    return theta, HybridMap(theta, base, dict(big.rho))


def _residue_reps(lab: ZPattern, q: int) -> dict:
    """One member of lab for every residue class mod q that it meets."""
    w = lab.bound() + 2 * _lcm(lab.p, q) + 1
    out = {}
    for n in sorted(lab.window(-w, w), key=abs):
        out.setdefault(n % q, n)
    return out


def same_action(a: HybridAction, b: HybridAction) -> bool:
    """Equal carriers, anchors and results on every arrow."""
    if a.points != b.points or a.rho != b.rho or a.groupoid.labels != b.groupoid.labels:
        return False
    if any(a.topo.up[p] != b.topo.up[p] for p in a.points):
        return False
    q = _lcm(a.P, b.P)
    for (x, y), lab in a.groupoid.labels.items():
        for s in a.fiber_points(y):
            for r in lab.residues_mod(q):
                if a.act(x, r, y, s) != b.act(x, r, y, s):
                    return False
    return True


# ---------------------------------------------------------------------------
# instances


class FiniteInstance:
    """An action plus generation metadata and the layer description used by quotients."""

    def __init__(self, action: HybridAction, meta: Optional[dict] = None):
        self.action = action
        self.meta = dict(meta or {})

    @property
    def groupoid(self) -> HybridGroupoid:
        return self.action.groupoid

    @property
    def hausdorff(self) -> bool:
        return self.groupoid.topo.hausdorff and self.action.topo.hausdorff

    def flags(self) -> dict:
        return {"open": self.groupoid.is_open(), "hausdorff": self.hausdorff,
                "strongly_noncompact": self.groupoid.strongly_noncompact(),
                "encodable": self.encodable()}

    def encodable(self) -> bool:
        lay = self.meta.get("layers")
        return bool(lay) and self.hausdorff and not any(lay.get("twist", {}).values())

    def to_json(self) -> dict:
        return {"action": self.action.to_json(), "meta": self.meta}

    @classmethod
    def from_json(cls, d) -> "FiniteInstance":
        meta = d.get("meta", {})
        if meta.get("layers"):
            lay = meta["layers"]
            lay["layers"] = {int(k): v for k, v in lay["layers"].items()}
            lay["twist"] = {int(k): v for k, v in lay.get("twist", {}).items()}
        return cls(HybridAction.from_json(d["action"]), meta)


DEFAULT_PARAMS = {"max_units": 4, "max_layers": 3, "hausdorff": "mixed", "open_groupoid_bias": 0.5,
                  "group_factor": "mixed", "twist": True, "single_class": 0.25, "single_cycle": False}


def gen_instance(seed: int, params: Optional[dict] = None) -> FiniteInstance:
    """Deterministic random instance for a seed."""
    p = dict(DEFAULT_PARAMS)
    p.update(params or {})
    rng = random.Random(seed)
    for _ in range(50):
        try:
            return _gen(rng, p, seed)
        except InvalidInstance:
            continue
    raise GenerationExhausted(f"no valid instance for seed {seed}")


def _components(topo: Topo) -> dict:
    comp = {p: p for p in topo.points}

    def find(a):
        while comp[a] != a:
            a = comp[a]
        return a

    for p in topo.points:
        for q in topo.up[p]:
            ra, rb = find(p), find(q)
            if ra != rb:
                comp[max(ra, rb)] = min(ra, rb)
    return {p: find(p) for p in topo.points}


def _gen(rng: random.Random, p: dict, seed: int) -> FiniteInstance:
    n = rng.randint(1, p["max_units"])
    units = list(range(n))
    mode = p["hausdorff"]
    discrete = mode == "discrete" or (mode == "mixed" and rng.random() < 0.5)
    if discrete:
        xtop = Topo.discrete(units)
    else:
        pairs = [(a, b) for a in units for b in units if a != b and rng.random() < 0.3]
        xtop = Topo.from_pairs(units, pairs)
    comp = _components(xtop)
    open_bias = rng.random() < p["open_groupoid_bias"]
    if rng.random() < p["single_class"]:
        cls = {x: 0 for x in units}
    elif open_bias:
        roots = sorted(set(comp.values()))
        pick = {r: rng.randint(0, len(roots) - 1) for r in roots}
        cls = {x: pick[comp[x]] for x in units}
    else:
        cls = {x: rng.randint(0, n - 1) for x in units}
    gf = p["group_factor"]
    dvals = {}
    for c in sorted(set(cls.values())):
        if gf == "Z":
            dvals[c] = rng.choice([1, 2, 3])
        elif gf == "trivial":
            dvals[c] = 0
        else:
            dvals[c] = rng.choice([0, 1, 1, 2, 3])
    if open_bias:
        apot = {r: rng.randint(-2, 2) for r in sorted(set(comp.values()))}
        a = {x: apot[comp[x]] for x in units}
    else:
        a = {x: rng.randint(-2, 2) for x in units}
    labels = {(x, y): ZPattern.coset(a[x] - a[y], dvals[cls[x]]) for x in units for y in units if cls[x] == cls[y]}
    g = HybridGroupoid(xtop, labels)

    k = rng.randint(1, p["max_layers"])
    perm = list(range(k))
    rng.shuffle(perm)
    cycles, seen = [], set()
    for i in range(k):
        if i in seen:
            continue
        c, j = [i], perm[i]
        while j != i:
            c.append(j)
            j = perm[j]
        seen |= set(c)
        cycles.append(c)
    layers = {}
    per_class = {}
    for c in sorted(set(cls.values())):
        if p["single_cycle"]:
            chosen = [cycles[0]]
        else:
            chosen = [cy for cy in cycles if rng.random() < 0.7] or [cycles[0]]
        per_class[c] = sorted(s for cy in chosen for s in cy)
    for x in units:
        layers[x] = per_class[cls[x]]
    layer_pre = "discrete" if discrete else rng.choice(["discrete", "cycle", "all"])
    order = 1
    for cy in cycles:
        order = _lcm(order, len(cy))
    twist = {x: 0 for x in units}
    if p["twist"] and order > 1 and not discrete and rng.random() < 0.3:
        bc = {r: rng.randint(0, order - 1) for r in sorted(set(comp.values()))}
        twist = {x: bc[comp[x]] for x in units}
    act = layered_action(g, perm, layers, layer_pre, twist)
    meta = {"seed": seed, "params": {k2: p[k2] for k2 in sorted(p)},
            "layers": {"perm": perm, "layers": layers, "order": layer_pre, "twist": twist}}
    return FiniteInstance(act, meta)


# ---------------------------------------------------------------------------
# evaluation entry point


def oracle_eval(inst, query: dict):
    """Evaluate a predicate or set query by enumeration; the result is JSON-ready."""
    act = inst.action if isinstance(inst, FiniteInstance) else inst
    op = query["op"]
    P = lambda key: _pt_parse(query[key])
    S = lambda key: frozenset(_pt_parse(v) for v in query[key])
    if op == "recurrence_set":
        return aset_json(act.recurrence_set(S("M"), S("N")))
    if op == "orbit":
        return _set_json(act.orbit(P("point")))
    if op == "saturate":
        return _set_json(act.saturate(S("A")))
    if op == "invariant_closure":
        return _set_json(act.invariant_closure(S("A")))
    if op == "limit_set":
        if not act.snc():
            raise PredicateNotApplicable("limit sets need a strongly non-compact groupoid")
        return _set_json(act.limit_set(P("point")))
    if op == "flags":
        return act.flags(P("point"))
    if op == "class_set":
        return _set_json(act.class_set(query["kind"]))
    if op == "profile":
        return {k: v["status"] for k, v in act.profile().items()}
    if op == "is_open":
        return act.groupoid.is_open()
    if op == "strongly_noncompact":
        return act.snc()
    if op == "minimal_sets":
        return sorted(_set_json(m) for m in act.minimal_sets())
    if op == "mixing":
        return {k: v["status"] for k, v in act.mixing().items()}
    if op == "semisimple":
        return act.is_semisimple()
    raise ValueError(f"unknown query {op}")


# ---------------------------------------------------------------------------
# replay files


def write_replay(path: str, inst: FiniteInstance, predicate: dict, answers: dict, kind: str = "disagreement"):
    doc = {"kind": kind, "instance": inst.to_json(), "predicate": predicate, "answers": answers}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def read_replay(path: str) -> tuple[FiniteInstance, dict, dict, str]:
    with open(path) as fh:
        doc = json.load(fh)
    return FiniteInstance.from_json(doc["instance"]), doc["predicate"], doc.get("answers", {}), doc.get("kind", "")
