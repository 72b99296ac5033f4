"""Two-sided eventually periodic subsets of the integers.

A set is stored as a finite window ``[lo, hi)`` with explicit members plus
a periodic rule on each side: below ``lo`` membership is decided by
``n % lp in lres`` and from ``hi`` upward by ``n % rp in rres``.  The
constructor canonicalizes (minimal periods, minimal window) so equal sets
compare equal structurally.
"""
from __future__ import annotations

from functools import reduce
from math import gcd
from typing import Callable, Iterable, Iterator


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _min_period(p: int, res: frozenset) -> tuple[int, frozenset]:
    for d in range(1, p + 1):
        if p % d:
            continue
        if all(((r in res) == ((r + d) % p in res)) for r in range(p)):
            return d, frozenset(r % d for r in res)
    return p, res


# pure operations on canonical keys, memoized
_OPS = {"or": lambda a, b: a or b, "and": lambda a, b: a and b, "sub": lambda a, b: a and not b,
        "xor": lambda a, b: a != b}
_OP_CACHE: dict = {}


class GrpSet:
    __slots__ = ("lo", "hi", "mid", "lp", "lres", "rp", "rres", "_key")

    def __init__(self, lo: int, hi: int, mid: Iterable[int], lp: int, lres: Iterable[int],
                 rp: int, rres: Iterable[int]):
        lp, lres = _min_period(lp, frozenset(r % lp for r in lres))
        rp, rres = _min_period(rp, frozenset(r % rp for r in rres))
        mid = frozenset(n for n in mid if lo <= n < hi)

        def member(n: int) -> bool:
            if n < lo:
                return n % lp in lres
            if n >= hi:
                return n % rp in rres
            return n in mid

        if lp == rp and lres == rres and all(member(n) == (n % rp in rres) for n in range(lo, hi)):
            lo2 = hi2 = 0
        else:
            period = _lcm(lp, rp)
            hi2 = hi
            floor = lo - 2 * period - 1
            while hi2 > floor and member(hi2 - 1) == ((hi2 - 1) % rp in rres):
                hi2 -= 1
            lo2 = min(lo, hi2)
            while lo2 < hi2 and member(lo2) == (lo2 % lp in lres):
                lo2 += 1
        self.lo, self.hi = lo2, hi2
        self.mid = frozenset(n for n in range(lo2, hi2) if member(n))
        self.lp, self.lres, self.rp, self.rres = lp, lres, rp, rres
        self._key = (self.lo, self.hi, tuple(sorted(self.mid)), self.lp, tuple(sorted(self.lres)),
                     self.rp, tuple(sorted(self.rres)))

    # construction helpers
    @classmethod
    def from_func(cls, f: Callable[[int], bool], lo: int, hi: int, lp: int, rp: int) -> "GrpSet":
        """Build from a membership function that is lp-periodic below lo and rp-periodic from hi."""
        lres = {n % lp for n in range(lo - lp, lo) if f(n)}
        rres = {n % rp for n in range(hi, hi + rp) if f(n)}
        mid = [n for n in range(lo, hi) if f(n)]
        return cls(lo, hi, mid, lp, lres, rp, rres)

    @classmethod
    def empty(cls) -> "GrpSet":
        return cls(0, 0, (), 1, (), 1, ())

    @classmethod
    def all(cls) -> "GrpSet":
        return cls(0, 0, (), 1, (0,), 1, (0,))

    @classmethod
    def finite(cls, elems: Iterable[int]) -> "GrpSet":
        elems = list(elems)
        if not elems:
            return cls.empty()
        return cls(min(elems), max(elems) + 1, elems, 1, (), 1, ())

    @classmethod
    def single(cls, n: int) -> "GrpSet":
        return cls.finite([n])

    @classmethod
    def coset(cls, c: int, d: int) -> "GrpSet":
        """c + dZ; d == 0 gives the singleton {c}."""
        if d == 0:
            return cls.single(c)
        d = abs(d)
        return cls(0, 0, (), d, (c % d,), d, (c % d,))

    @classmethod
    def ray(cls, start: int, step: int) -> "GrpSet":
        """{start + k*step : k >= 0} for step != 0."""
        p = abs(step)
        if step > 0:
            return cls(start, start, (), 1, (), p, (start % p,))
        return cls(start + 1, start + 1, (), p, (start % p,), 1, ())

    @classmethod
    def interval(cls, a: int, b: int) -> "GrpSet":
        return cls.finite(range(a, b + 1))

    # queries
    def __contains__(self, n: int) -> bool:
        if n < self.lo:
            return n % self.lp in self.lres
        if n >= self.hi:
            return n % self.rp in self.rres
        return n in self.mid

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GrpSet) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "GrpSet") -> bool:
        return self._key < other._key

    def is_empty(self) -> bool:
        return not self.mid and not self.lres and not self.rres

    def __bool__(self) -> bool:
        return not self.is_empty()

    def is_finite(self) -> bool:
        return not self.lres and not self.rres

    def bounded_above(self) -> bool:
        return not self.rres

    def bounded_below(self) -> bool:
        return not self.lres

    def is_syndetic(self) -> bool:
        """Bounded gaps in Z: both tails recur."""
        return bool(self.lres) and bool(self.rres)

    def is_all(self) -> bool:
        return self == GrpSet.all()

    def elements(self) -> list[int]:
        if not self.is_finite():
            raise ValueError("infinite set")
        return sorted(self.mid)

    def samples(self, per_tail: int = 2) -> list[int]:
        """Window members plus a few members of every tail residue class."""
        out = set(self.mid)
        for r in self.rres:
            n = self.hi + ((r - self.hi) % self.rp)
            out.update(n + k * self.rp for k in range(per_tail))
        for r in self.lres:
            n = self.lo - 1 - ((self.lo - 1 - r) % self.lp)
            out.update(n - k * self.lp for k in range(per_tail))
        return sorted(out)

    # Boolean algebra
    def _binop(self, other: "GrpSet", name: str) -> "GrpSet":
        key = (name, self._key, other._key)
        hit = _OP_CACHE.get(key)
        if hit is not None:
            return hit
        op = _OPS[name]
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        lp, rp = _lcm(self.lp, other.lp), _lcm(self.rp, other.rp)
        out = GrpSet.from_func(lambda n: op(n in self, n in other), lo, hi, lp, rp)
        if len(_OP_CACHE) > 200000:
            _OP_CACHE.clear()
        _OP_CACHE[key] = out
        return out

    def __or__(self, other: "GrpSet") -> "GrpSet":
        return self._binop(other, "or")

    def __and__(self, other: "GrpSet") -> "GrpSet":
        return self._binop(other, "and")

    def __sub__(self, other: "GrpSet") -> "GrpSet":
        return self._binop(other, "sub")

    def __xor__(self, other: "GrpSet") -> "GrpSet":
        return self._binop(other, "xor")

    def complement(self) -> "GrpSet":
        return GrpSet.from_func(lambda n: n not in self, self.lo, self.hi, self.lp, self.rp)

    def issubset(self, other: "GrpSet") -> bool:
        return (self - other).is_empty()

    def neg(self) -> "GrpSet":
        return GrpSet.from_func(lambda n: -n in self, 1 - self.hi, 1 - self.lo, self.rp, self.lp)

    def shift(self, k: int) -> "GrpSet":
        return GrpSet.from_func(lambda n: (n - k) in self, self.lo + k, self.hi + k, self.lp, self.rp)

    # Minkowski sum
    def _pieces(self) -> Iterator[tuple[str, int, int]]:
        for n in sorted(self.mid):
            yield ("pt", n, 0)
        for r in sorted(self.rres):
            yield ("ray", self.hi + ((r - self.hi) % self.rp), self.rp)
        for r in sorted(self.lres):
            yield ("ray", self.lo - 1 - ((self.lo - 1 - r) % self.lp), -self.lp)

    def __add__(self, other: "GrpSet") -> "GrpSet":
        if self.is_empty() or other.is_empty():
            return GrpSet.empty()
        parts = [_piece_sum(a, b) for a in self._pieces() for b in other._pieces()]
        return reduce(lambda x, y: x | y, parts)

    def __neg__(self) -> "GrpSet":
        return self.neg()

    # serialization
    def to_json(self):
        if self.is_empty():
            return "empty"
        if self.is_all():
            return "all"
        if self.is_finite():
            return sorted(self.mid)
        return {"lo": self.lo, "hi": self.hi, "mid": sorted(self.mid), "lp": self.lp,
                "lres": sorted(self.lres), "rp": self.rp, "rres": sorted(self.rres)}

    @classmethod
    def from_json(cls, obj) -> "GrpSet":
        if obj == "empty":
            return cls.empty()
        if obj == "all":
            return cls.all()
        if isinstance(obj, list):
            return cls.finite(int(v) for v in obj)
        if isinstance(obj, dict) and "coset" in obj:
            c, d = obj["coset"]
            return cls.coset(int(c), int(d))
        if isinstance(obj, dict):
            return cls(int(obj["lo"]), int(obj["hi"]), obj.get("mid", []), int(obj["lp"]),
                       obj.get("lres", []), int(obj["rp"]), obj.get("rres", []))
        raise ValueError(f"bad GrpSet encoding: {obj!r}")

    def __repr__(self) -> str:
        j = self.to_json()
        if j == "all":
            return "Z"
        if j == "empty":
            return "{}"
        if isinstance(j, list):
            return "{" + ",".join(map(str, j)) + "}"
        if self.lo == self.hi == 0 and self.lp == self.rp and self.lres == self.rres:
            res = ",".join(map(str, sorted(self.rres)))
            return f"{{{res}}}+{self.rp}Z"
        return f"GrpSet({j})"


def _semigroup_ray(start: int, p: int, q: int) -> GrpSet:
    """{start + p*a + q*b : a, b >= 0} for p, q > 0."""
    g = gcd(p, q)
    p1, q1 = p // g, q // g
    frob = p1 * q1 - p1 - q1
    top = max(frob, -1) + 1
    reach = [False] * (top + 1)
    reach[0] = True
    for m in range(1, top + 1):
        reach[m] = (m >= p1 and reach[m - p1]) or (m >= q1 and reach[m - q1])
    mid = [start + g * m for m in range(top) if reach[m]]
    hi = start + g * top
    return GrpSet(start, hi, mid, 1, (), g, (hi % g,))


def _piece_sum(a: tuple[str, int, int], b: tuple[str, int, int]) -> GrpSet:
    ka, sa, pa = a
    kb, sb, pb = b
    if ka == "pt" and kb == "pt":
        return GrpSet.single(sa + sb)
    if ka == "pt":
        return GrpSet.ray(sa + sb, pb)
    if kb == "pt":
        return GrpSet.ray(sa + sb, pa)
    if pa > 0 and pb > 0:
        return _semigroup_ray(sa + sb, pa, pb)
    if pa < 0 and pb < 0:
        return _semigroup_ray(-(sa + sb), -pa, -pb).neg()
    return GrpSet.coset(sa + sb, gcd(abs(pa), abs(pb)))
