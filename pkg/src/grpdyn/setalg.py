"""Exact point and set algebra.

Points live in Q(sqrt 2).  A one-dimensional set (``LineSet``) is stored by
its sorted breakpoints, a flavor label on each open gap between them
(bit 1 = rationals, bit 2 = irrationals) and a membership flag for each
breakpoint.  Redundant breakpoints are removed, which makes the
representation canonical.

A ``SetExpr`` is a finite family of horizontal layers ``G x L`` with ``G`` an
eventually periodic set of integers and ``L`` a ``LineSet``.  Three ambient
kinds are supported:

``line``   the real line (only layer 0 is used)
``strip``  R x Z, layers are open and closed
``zhat``   R x (Z + {inf}), the integer coordinate one-point compactified;
           layers with infinitely many indices accumulate on the ``inf`` layer.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Optional, Sequence, Union

from .grpset import GrpSet

Rat = Fraction


class MalformedCell(ValueError):
    pass


class AmbientMismatch(ValueError):
    pass


class NotATopology(ValueError):
    pass


class OutsideCarrier(ValueError):
    pass


def _sign_q2(p: Fraction, q: Fraction) -> int:
    """Sign of p + q*sqrt2."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    return sp if p * p > 2 * q * q else sq


@total_ordering
class Point:
    """Exact real number a + b*sqrt2 with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Point):
            other = Point(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __lt__(self, other) -> bool:
        if not isinstance(other, Point):
            other = Point(other)
        if self.b == other.b:
            return self.a < other.a
        return _sign_q2(self.a - other.a, self.b - other.b) < 0

    def __add__(self, other) -> "Point":
        if not isinstance(other, Point):
            other = Point(other)
        return Point(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other) -> "Point":
        if not isinstance(other, Point):
            other = Point(other)
        return Point(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Point":
        return Point(-self.a, -self.b)

    def scale(self, c) -> "Point":
        c = Fraction(c)
        return Point(self.a * c, self.b * c)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    def key(self):
        return (self.a, self.b)

    def to_json(self) -> str:
        if self.b == 0:
            return _fmt_rat(self.a)
        sign = "+" if self.b > 0 else "-"
        return f"{_fmt_rat(self.a)}{sign}{_fmt_rat(abs(self.b))}*sqrt2"

    def __repr__(self) -> str:
        return self.to_json()


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_point(s) -> Point:
    if isinstance(s, Point):
        return s
    if isinstance(s, (int, Fraction)):
        return Point(s)
    s = str(s).replace(" ", "")
    if "sqrt2" not in s:
        return Point(Fraction(s))
    body = s[: s.index("sqrt2")].rstrip("*")
    # split a and b at the last sign that is not at position 0
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut <= 0:
        a, bstr = "0", body
    else:
        a, bstr = body[:cut], body[cut:]
    if bstr in ("", "+"):
        b = Fraction(1)
    elif bstr == "-":
        b = Fraction(-1)
    else:
        b = Fraction(bstr)
    return Point(Fraction(a), b)


SQRT2 = Point(0, 1)


def rational_between(lo: Point, hi: Point) -> Fraction:
    """Some rational strictly between lo < hi (deterministic)."""
    assert lo < hi
    mid = (float(lo) + float(hi)) / 2
    k = 0
    while True:
        den = 2 ** k
        c = Fraction(round(mid * den), den)
        if lo < Point(c) < hi:
            return c
        for d in (1, -1):
            c2 = c + Fraction(d, den)
            if lo < Point(c2) < hi:
                return c2
        k += 1


def irrational_between(lo: Point, hi: Point) -> Point:
    r = rational_between(lo, hi)
    k = 1
    while True:
        p = Point(r, Fraction(1, 2 ** k))
        if lo < p < hi:
            return p
        k += 1


class _Inf:
    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"

    def to_json(self) -> str:
        return repr(self)


NEG_INF = _Inf(-1)
POS_INF = _Inf(1)
ExtPoint = Union[Point, _Inf]

RAT, IRR, FULL = 1, 2, 3
_FLAVOR_NAMES = {FULL: "full", RAT: "rat", IRR: "irr"}
_FLAVOR_CODES = {"full": FULL, "rat": RAT, "irr": IRR}


def _member(label: int, p: Point) -> bool:
    return bool(label & (RAT if p.is_rational else IRR))


@dataclass(frozen=True)
class Cell:
    lo: ExtPoint
    hi: ExtPoint
    lo_closed: bool = False
    hi_closed: bool = False
    flavor: str = "full"

    def __post_init__(self):
        if self.flavor not in _FLAVOR_CODES:
            raise MalformedCell(f"unknown flavor {self.flavor!r}")
        if isinstance(self.lo, _Inf) and (self.lo.sign > 0 or self.lo_closed):
            raise MalformedCell("bad lower end")
        if isinstance(self.hi, _Inf) and (self.hi.sign < 0 or self.hi_closed):
            raise MalformedCell("bad upper end")
        if isinstance(self.lo, Point) and isinstance(self.hi, Point):
            if self.hi < self.lo:
                raise MalformedCell("lo > hi")
            if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
                raise MalformedCell("degenerate cell must be closed")

    def to_lineset(self) -> "LineSet":
        code = _FLAVOR_CODES[self.flavor]
        lo_f = isinstance(self.lo, Point)
        hi_f = isinstance(self.hi, Point)
        if lo_f and hi_f and self.lo == self.hi:
            return LineSet.make((self.lo,), (0, 0), (_member(code, self.lo),))
        bps, pts, iv = [], [], [0]
        if lo_f:
            bps.append(self.lo)
            pts.append(self.lo_closed and _member(code, self.lo))
        iv[-1] = 0 if lo_f else code
        if lo_f:
            iv.append(code)
        if hi_f:
            bps.append(self.hi)
            pts.append(self.hi_closed and _member(code, self.hi))
            iv.append(0)
        return LineSet.make(bps, iv, pts)

    def to_json(self) -> dict:
        return {"lo": _ext_json(self.lo), "hi": _ext_json(self.hi), "lo_closed": self.lo_closed,
                "hi_closed": self.hi_closed, "flavor": self.flavor}

    @classmethod
    def from_json(cls, d: dict) -> "Cell":
        return cls(_ext_parse(d["lo"]), _ext_parse(d["hi"]), bool(d.get("lo_closed", False)),
                   bool(d.get("hi_closed", False)), d.get("flavor", "full"))


def _ext_json(e: ExtPoint) -> str:
    return e.to_json()


def _ext_parse(s) -> ExtPoint:
    if s in ("-inf", "−inf"):
        return NEG_INF
    if s in ("inf", "+inf"):
        return POS_INF
    return parse_point(s)


class LineSet:
    """Canonical subset of R: breakpoints, gap labels, breakpoint membership."""

    __slots__ = ("bps", "iv", "pt", "_hash")

    def __init__(self, bps: Sequence[Point], iv: Sequence[int], pt: Sequence[bool]):
        self.bps = tuple(bps)
        self.iv = tuple(iv)
        self.pt = tuple(bool(x) for x in pt)
        self._hash = None

    @classmethod
    def make(cls, bps, iv, pt) -> "LineSet":
        bps, iv, pt = list(bps), list(iv), list(pt)
        out_b, out_p, out_i = [], [], [iv[0]]
        for k, b in enumerate(bps):
            left, right = out_i[-1], iv[k + 1]
            if left == right and pt[k] == _member(left, b):
                continue
            out_b.append(b)
            out_p.append(pt[k])
            out_i.append(right)
        return cls(out_b, out_i, out_p)

    @classmethod
    def empty(cls) -> "LineSet":
        return cls((), (0,), ())

    @classmethod
    def full(cls) -> "LineSet":
        return cls((), (FULL,), ())

    @classmethod
    def points(cls, pts: Iterable[Point]) -> "LineSet":
        ps = sorted(set(parse_point(p) for p in pts))
        return cls.make(ps, [0] * (len(ps) + 1), [True] * len(ps))

    @classmethod
    def interval(cls, lo, hi, lo_closed=False, hi_closed=False, flavor="full") -> "LineSet":
        lo = NEG_INF if lo is None else (lo if isinstance(lo, _Inf) else parse_point(lo))
        hi = POS_INF if hi is None else (hi if isinstance(hi, _Inf) else parse_point(hi))
        return Cell(lo, hi, lo_closed, hi_closed, flavor).to_lineset()

    def __eq__(self, other) -> bool:
        return isinstance(other, LineSet) and (self.bps, self.iv, self.pt) == (other.bps, other.iv, other.pt)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.bps, self.iv, self.pt))
        return self._hash

    def key(self):
        return (tuple(b.key() for b in self.bps), self.iv, self.pt)

    def is_empty(self) -> bool:
        return not any(self.iv) and not any(self.pt)

    def is_full(self) -> bool:
        return self.iv == (FULL,)

    def contains(self, p) -> bool:
        p = parse_point(p)
        i = bisect_left(self.bps, p)
        if i < len(self.bps) and self.bps[i] == p:
            return self.pt[i]
        return _member(self.iv[i], p)

    def _restate(self, bps: Sequence[Point]) -> tuple[list[int], list[bool]]:
        iv = []
        for j in range(len(bps) + 1):
            if j == 0:
                iv.append(self.iv[0])
            else:
                iv.append(self.iv[bisect_right(self.bps, bps[j - 1])])
        return iv, [self.contains(b) for b in bps]

    def combine(self, other: "LineSet", op) -> "LineSet":
        a, b = self, other
        na, nb = len(a.bps), len(b.bps)
        i = j = 0
        bps, iv, pt = [], [op(a.iv[0], b.iv[0]) & FULL], []
        while i < na or j < nb:
            if j >= nb or (i < na and a.bps[i] < b.bps[j]):
                p = a.bps[i]
                x, y = a.pt[i], _member(b.iv[j], p)
                i += 1
            elif i >= na or b.bps[j] < a.bps[i]:
                p = b.bps[j]
                x, y = _member(a.iv[i], p), b.pt[j]
                j += 1
            else:
                p = a.bps[i]
                x, y = a.pt[i], b.pt[j]
                i += 1
                j += 1
            bps.append(p)
            pt.append(bool(op(int(x), int(y)) & 1))
            iv.append(op(a.iv[i], b.iv[j]) & FULL)
        return LineSet.make(bps, iv, pt)

    def __or__(self, o):
        return self.combine(o, lambda x, y: x | y)

    def __and__(self, o):
        return self.combine(o, lambda x, y: x & y)

    def __sub__(self, o):
        return self.combine(o, lambda x, y: x & ~y)

    def complement(self) -> "LineSet":
        return LineSet(self.bps, [FULL ^ x for x in self.iv], [not x for x in self.pt])

    def closure(self) -> "LineSet":
        iv = [FULL if x else 0 for x in self.iv]
        pt = [self.pt[k] or bool(self.iv[k]) or bool(self.iv[k + 1]) for k in range(len(self.bps))]
        return LineSet.make(self.bps, iv, pt)

    def interior(self) -> "LineSet":
        iv = [FULL if x == FULL else 0 for x in self.iv]
        pt = [self.pt[k] and self.iv[k] == FULL and self.iv[k + 1] == FULL for k in range(len(self.bps))]
        return LineSet.make(self.bps, iv, pt)

    def isolated(self) -> "LineSet":
        return LineSet.points(b for k, b in enumerate(self.bps)
                              if self.pt[k] and not self.iv[k] and not self.iv[k + 1])

    def is_bounded(self) -> bool:
        return self.iv[0] == 0 and self.iv[-1] == 0

    def has_interval(self) -> bool:
        return any(self.iv)

    def point_count(self) -> Optional[int]:
        return None if self.has_interval() else sum(self.pt)

    def translate(self, c) -> "LineSet":
        c = parse_point(c)
        return LineSet([b + c for b in self.bps], self.iv, self.pt)

    def cells(self) -> list[Cell]:
        out: list[Cell] = []
        used = [False] * len(self.bps)
        n = len(self.bps)
        for j, lab in enumerate(self.iv):
            if not lab:
                continue
            lo = self.bps[j - 1] if j > 0 else NEG_INF
            hi = self.bps[j] if j < n else POS_INF
            lc = j > 0 and self.pt[j - 1] and not used[j - 1] and _member(lab, lo)
            hc = j < n and self.pt[j] and _member(lab, hi)
            if lc:
                used[j - 1] = True
            if hc:
                used[j] = True
            out.append(Cell(lo, hi, lc, hc, _FLAVOR_NAMES[lab]))
        for k, b in enumerate(self.bps):
            if self.pt[k] and not used[k]:
                out.append(Cell(b, b, True, True, "full"))
        out.sort(key=lambda c: (_ext_key(c.lo), 0 if c.lo_closed else 1))
        return out

    def pieces(self, extra: Iterable[Point] = ()) -> list[tuple["LineSet", list[Point]]]:
        """Split into breakpoints and flavored open gaps, each with representatives."""
        bps = sorted(set(self.bps) | set(extra))
        iv, pt = self._restate(bps)
        out = []
        for k, b in enumerate(bps):
            if pt[k]:
                out.append((LineSet.points([b]), [b]))
        for j, lab in enumerate(iv):
            if not lab:
                continue
            lo = bps[j - 1] if j > 0 else None
            hi = bps[j] if j < len(bps) else None
            if lo is not None and hi is not None:
                a, z = lo, hi
            elif hi is not None:
                a, z = hi - 4, hi
            elif lo is not None:
                a, z = lo, lo + 4
            else:
                a, z = Point(-2), Point(2)
            t = (z - a).scale(Fraction(1, 3))
            for fl in (RAT, IRR):
                if lab & fl:
                    piece = LineSet.interval(lo, hi, False, False, _FLAVOR_NAMES[fl])
                    pick = rational_between if fl == RAT else irrational_between
                    reps = [Point(pick(a, a + t)), Point(pick(a + t.scale(2), z))] if fl == RAT else \
                        [pick(a, a + t), pick(a + t.scale(2), z)]
                    out.append((piece, reps))
        return out

    def __repr__(self) -> str:
        if self.is_empty():
            return "{}"
        return " u ".join(_cell_str(c) for c in self.cells())


def _ext_key(e: ExtPoint):
    return (-1,) if isinstance(e, _Inf) else (0, e)


def _cell_str(c: Cell) -> str:
    if isinstance(c.lo, Point) and isinstance(c.hi, Point) and c.lo == c.hi:
        return "{" + repr(c.lo) + "}"
    s = ("[" if c.lo_closed else "(") + repr(c.lo) + "," + repr(c.hi) + ("]" if c.hi_closed else ")")
    if c.flavor == "rat":
        s += "&Q"
    elif c.flavor == "irr":
        s += "\\Q"
    return s


# ---------------------------------------------------------------------------
# layered sets

KINDS = ("line", "strip", "zhat")
_ZERO = GrpSet.single(0)


def _universe(kind: str) -> GrpSet:
    return _ZERO if kind == "line" else GrpSet.all()


LPoint = tuple  # (Point, h) with h an int, or None for the inf layer


def as_lpoint(p) -> tuple:
    if isinstance(p, tuple):
        return (parse_point(p[0]), p[1])
    return (parse_point(p), 0)


_SET_OPS = {"or": lambda x, y: x | y, "and": lambda x, y: x & y, "sub": lambda x, y: x & ~y}
_SET_OP_CACHE: dict = {}


class SetExpr:
    """Exact subset of a line, strip or compactified strip."""

    __slots__ = ("kind", "layers", "inf", "_hash")

    def __init__(self, kind: str, layers: Iterable[tuple[GrpSet, LineSet]] = (), inf: Optional[LineSet] = None):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind}")
        self.kind = kind
        uni = _universe(kind)
        # refine the layer classes into disjoint atoms, then merge atoms carrying equal slices
        atoms: list[tuple[GrpSet, LineSet]] = []
        for g, ls in layers:
            g = g & uni
            if g.is_empty() or ls.is_empty():
                continue
            nxt, rest = [], g
            for ag, als in atoms:
                both = ag & g
                if both:
                    nxt.append((both, als | ls))
                    rest = rest - both
                    only = ag - g
                    if only:
                        nxt.append((only, als))
                else:
                    nxt.append((ag, als))
            if rest:
                nxt.append((rest, ls))
            atoms = nxt
        acc: dict[LineSet, GrpSet] = {}
        for g, ls in atoms:
            acc[ls] = (acc[ls] | g) if ls in acc else g
        self.layers = tuple(sorted(((g, ls) for ls, g in acc.items()), key=lambda t: (t[1].key(), t[0]._key)))
        self.inf = (inf if inf is not None else LineSet.empty()) if kind == "zhat" else None
        self._hash = None

    # constructors
    @classmethod
    def line(cls, ls: LineSet) -> "SetExpr":
        return cls("line", [(_ZERO, ls)])

    @classmethod
    def empty(cls, kind: str = "line") -> "SetExpr":
        return cls(kind)

    @classmethod
    def universe(cls, kind: str = "line") -> "SetExpr":
        return cls(kind, [(_universe(kind), LineSet.full())], LineSet.full())

    @classmethod
    def interval(cls, lo, hi, lo_closed=False, hi_closed=False, flavor="full") -> "SetExpr":
        return cls.line(LineSet.interval(lo, hi, lo_closed, hi_closed, flavor))

    @classmethod
    def points(cls, pts: Iterable, kind: str = "line") -> "SetExpr":
        by_layer: dict = {}
        for p in pts:
            y, h = as_lpoint(p)
            by_layer.setdefault(h, []).append(y)
        layers, inf = [], None
        for h, ys in by_layer.items():
            if h is None:
                inf = LineSet.points(ys)
            else:
                layers.append((GrpSet.single(h), LineSet.points(ys)))
        return cls(kind, layers, inf)

    @classmethod
    def from_cells(cls, cells: Iterable[Cell]) -> "SetExpr":
        ls = LineSet.empty()
        for c in cells:
            ls = ls | c.to_lineset()
        return cls.line(ls)

    @classmethod
    def product(cls, g: GrpSet, ls: LineSet, kind: str = "strip", inf: Optional[LineSet] = None) -> "SetExpr":
        return cls(kind, [(g, ls)], inf)

    # basic access
    def __eq__(self, other) -> bool:
        return isinstance(other, SetExpr) and self.kind == other.kind and self.layers == other.layers \
            and self.inf == other.inf

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.kind, self.layers, self.inf))
        return self._hash

    def key(self):
        return (self.kind, tuple((g._key, ls.key()) for g, ls in self.layers),
                self.inf.key() if self.inf is not None else None)

    def layer_at(self, h) -> LineSet:
        if h is None:
            return self.inf if self.inf is not None else LineSet.empty()
        for g, ls in self.layers:
            if h in g:
                return ls
        return LineSet.empty()

    def as_line(self) -> LineSet:
        if self.kind != "line":
            raise AmbientMismatch("not a line set")
        return self.layer_at(0)

    def is_empty(self) -> bool:
        return not self.layers and (self.inf is None or self.inf.is_empty())

    def __bool__(self) -> bool:
        return not self.is_empty()

    def contains(self, p) -> bool:
        y, h = as_lpoint(p)
        return self.layer_at(h).contains(y)

    __contains__ = contains

    # Boolean algebra
    def _check(self, other: "SetExpr"):
        if self.kind != other.kind:
            raise AmbientMismatch(f"{self.kind} vs {other.kind}")

    def _combine(self, other: "SetExpr", name: str) -> "SetExpr":
        self._check(other)
        key = (name, self, other)
        hit = _SET_OP_CACHE.get(key)
        if hit is not None:
            return hit
        op = _SET_OPS[name]
        empty = LineSet.empty()
        cells = [(_universe(self.kind), empty, empty)]
        for side, src in ((0, self), (1, other)):
            for g, ls in src.layers:
                nxt = []
                for c, a, b in cells:
                    inside = c & g
                    outside = c - g
                    if inside:
                        nxt.append((inside, ls, b) if side == 0 else (inside, a, ls))
                    if outside:
                        nxt.append((outside, a, b))
                cells = nxt
        layers = [(c, a.combine(b, op)) for c, a, b in cells]
        inf = None
        if self.kind == "zhat":
            inf = self.inf.combine(other.inf, op)
        out = SetExpr(self.kind, layers, inf)
        if len(_SET_OP_CACHE) > 100000:
            _SET_OP_CACHE.clear()
        _SET_OP_CACHE[key] = out
        return out

    def __or__(self, o):
        return self._combine(o, "or")

    def __and__(self, o):
        return self._combine(o, "and")

    def __sub__(self, o):
        return self._combine(o, "sub")

    def complement(self) -> "SetExpr":
        return SetExpr.universe(self.kind) - self

    def issubset(self, o: "SetExpr") -> bool:
        return (self - o).is_empty()

    def intersects(self, o: "SetExpr") -> bool:
        return not (self & o).is_empty()

    # ambient topology
    def closure(self) -> "SetExpr":
        layers = [(g, ls.closure()) for g, ls in self.layers]
        inf = None
        if self.kind == "zhat":
            inf = self.inf.closure()
            for g, ls in self.layers:
                if not g.is_finite():
                    inf = inf | ls.closure()
        return SetExpr(self.kind, layers, inf)

    def interior(self) -> "SetExpr":
        return self.complement().closure().complement()

    def isolated(self) -> "SetExpr":
        layers = [(g, ls.isolated()) for g, ls in self.layers]
        inf = None
        if self.kind == "zhat":
            tail = LineSet.empty()
            for g, ls in self.layers:
                if not g.is_finite():
                    tail = tail | ls.closure()
            inf = self.inf.isolated() - tail
        return SetExpr(self.kind, layers, inf)

    def accumulation(self) -> "SetExpr":
        """Points that are limits of the set minus themselves."""
        return self.closure() - self.isolated()

    def is_bounded(self) -> bool:
        for g, ls in self.layers:
            if not ls.is_bounded():
                return False
            if self.kind == "strip" and not g.is_finite():
                return False
        return self.inf is None or self.inf.is_bounded()

    def is_compact(self) -> bool:
        return self.is_bounded() and self.closure() == self

    def count_upto(self, cap: int = 3) -> int:
        total = 0
        for g, ls in self.layers:
            n = ls.point_count()
            if n is None or not g.is_finite():
                return cap
            total += n * len(g.elements())
        if self.inf is not None:
            n = self.inf.point_count()
            if n is None:
                return cap
            total += n
        return min(total, cap)

    def the_point(self):
        """The unique point of a singleton set."""
        assert self.count_upto(2) == 1
        for g, ls in self.layers:
            h = g.elements()[0]
            y = ls.bps[ls.pt.index(True)]
            return y if self.kind == "line" else (y, h)
        ls = self.inf
        return (ls.bps[ls.pt.index(True)], None)

    def breakpoints(self) -> set:
        out = set()
        for _, ls in self.layers:
            out.update(ls.bps)
        if self.inf is not None:
            out.update(self.inf.bps)
        return out

    def layer_indices(self) -> set:
        """Finite window indices plus tail samples of every layer class."""
        out = set()
        for g, _ in self.layers:
            out.update(g.samples(1))
        return out

    def translate_layers(self, g: GrpSet) -> "SetExpr":
        """{(y, h + k) : (y, h) in self, k in g}; the inf layer is fixed."""
        layers = [(h + g, ls) for h, ls in self.layers]
        return SetExpr(self.kind, layers, self.inf)

    def project(self) -> LineSet:
        """First-coordinate projection."""
        out = self.inf if self.inf is not None else LineSet.empty()
        for _, ls in self.layers:
            out = out | ls
        return out

    def pieces(self, extra: Iterable[Point] = (), max_layer_reps: int = 1) -> list[tuple["SetExpr", list]]:
        """Split into homogeneous pieces, each with representative points."""
        extra = list(extra)
        out = []
        for g, ls in self.layers:
            if g.is_finite():
                groups = [(GrpSet.single(h), [h]) for h in g.elements()]
            else:
                groups = [(g, g.samples(max_layer_reps))]
            for gg, hs in groups:
                for pls, reps in ls.pieces(extra):
                    piece = SetExpr(self.kind, [(gg, pls)])
                    pts = [r if self.kind == "line" else (r, h) for h in hs for r in reps]
                    out.append((piece, pts))
        if self.inf is not None and not self.inf.is_empty():
            for pls, reps in self.inf.pieces(extra):
                out.append((SetExpr(self.kind, [], pls), [(r, None) for r in reps]))
        return out

    def nbhd(self, p, delta: Fraction, tail: int) -> "SetExpr":
        """Basic ambient neighborhood of p of radius delta (and tail index for inf)."""
        y, h = as_lpoint(p)
        iv = LineSet.interval(y - delta, y + delta)
        if self.kind == "line":
            return SetExpr.line(iv)
        if h is None:
            big = GrpSet.ray(tail, 1) | GrpSet.ray(-tail, -1)
            return SetExpr(self.kind, [(big, iv)], iv)
        return SetExpr(self.kind, [(GrpSet.single(h), iv)])

    # serialization
    def to_json(self) -> dict:
        if self.kind == "line":
            return {"dim": 1, "cells": [c.to_json() for c in self.layer_at(0).cells()]}
        d = {"dim": 2, "kind": self.kind,
             "layers": [{"z": g.to_json(), "cells": [c.to_json() for c in ls.cells()]} for g, ls in self.layers]}
        if self.kind == "zhat":
            d["inf"] = [c.to_json() for c in self.inf.cells()]
        return d

    @classmethod
    def from_json(cls, d) -> "SetExpr":
        if d.get("dim", 1) == 1:
            return cls.from_cells(Cell.from_json(c) for c in d.get("cells", []))
        kind = d.get("kind", "strip")
        layers = []
        for lay in d.get("layers", []):
            ls = LineSet.empty()
            for c in lay.get("cells", []):
                ls = ls | Cell.from_json(c).to_lineset()
            layers.append((GrpSet.from_json(lay["z"]), ls))
        inf = None
        if kind == "zhat":
            inf = LineSet.empty()
            for c in d.get("inf", []):
                inf = inf | Cell.from_json(c).to_lineset()
        return cls(kind, layers, inf)

    def __repr__(self) -> str:
        if self.kind == "line":
            return repr(self.layer_at(0))
        parts = [f"{ls!r} x {g!r}" for g, ls in self.layers]
        if self.inf is not None and not self.inf.is_empty():
            parts.append(f"{self.inf!r} x {{inf}}")
        return " ; ".join(parts) if parts else "{}"


def R(lo=None, hi=None, lo_closed=False, hi_closed=False, flavor="full") -> SetExpr:
    """Shorthand for a one-cell subset of the line; None means infinite."""
    return SetExpr.interval(lo, hi, lo_closed, hi_closed, flavor)


# ---------------------------------------------------------------------------
# finite spaces

class FiniteSpace:
    """Finite topological space given by its open sets."""

    def __init__(self, points: Sequence, opens: Iterable[Iterable]):
        self.points = tuple(points)
        pset = frozenset(self.points)
        fam = {frozenset(o) for o in opens}
        for o in fam:
            if not o <= pset:
                raise NotATopology("open set outside the point set")
        if frozenset() not in fam or pset not in fam:
            raise NotATopology("empty set and whole space must be open")
        for a in fam:
            for b in fam:
                if a | b not in fam or a & b not in fam:
                    raise NotATopology("not closed under union/intersection")
        self.opens = frozenset(fam)
        self.full = pset
        self._minimal = {p: frozenset.intersection(*[o for o in fam if p in o]) for p in self.points}

    @classmethod
    def from_preorder(cls, points: Sequence, leq) -> "FiniteSpace":
        """Alexandrov topology: open sets are the up-closed sets of the preorder."""
        pts = list(points)
        ups = [frozenset(q for q in pts if leq(p, q)) for p in pts]
        opens = {frozenset()}
        frontier = set(ups)
        opens |= frontier
        changed = True
        while changed:
            changed = False
            for a in list(opens):
                for b in ups:
                    c = a | b
                    if c not in opens:
                        opens.add(c)
                        changed = True
        opens.add(frozenset(pts))
        return cls(pts, opens)

    @classmethod
    def discrete(cls, points: Sequence) -> "FiniteSpace":
        return cls.from_preorder(points, lambda a, b: a == b)

    def minimal_nbhd(self, p) -> frozenset:
        return self._minimal[p]

    @property
    def hausdorff(self) -> bool:
        return all(self._minimal[p] == {p} for p in self.points)

    def closure(self, a) -> frozenset:
        a = frozenset(a)
        return frozenset(p for p in self.points if self._minimal[p] & a)

    def interior(self, a) -> frozenset:
        a = frozenset(a)
        return frozenset(p for p in self.points if self._minimal[p] <= a)

    def boundary(self, a) -> frozenset:
        return self.closure(a) - self.interior(a)

    def is_open(self, a) -> bool:
        return frozenset(a) in self.opens

    def is_closed(self, a) -> bool:
        return self.full - frozenset(a) in self.opens

    def is_dense(self, a) -> bool:
        return self.closure(a) == self.full

    def is_nowhere_dense(self, a) -> bool:
        return not self.interior(self.closure(a))


def finite_space(points, opens) -> FiniteSpace:
    return FiniteSpace(points, opens)


# ---------------------------------------------------------------------------
# spaces and relative topology

class Space:
    """A carrier set with the subspace topology inherited from its ambient."""

    def __init__(self, carrier: Union[SetExpr, FiniteSpace], strict: bool = False):
        self.carrier = carrier
        self.strict = strict

    @property
    def kind(self) -> str:
        return "finite" if isinstance(self.carrier, FiniteSpace) else self.carrier.kind

    @property
    def hausdorff(self) -> bool:
        return self.carrier.hausdorff if self.kind == "finite" else True

    def clip(self, a: SetExpr) -> SetExpr:
        if self.kind == "finite":
            a = frozenset(a)
            if not a <= self.carrier.full:
                if self.strict:
                    raise OutsideCarrier(str(sorted(a - self.carrier.full)))
                a = a & self.carrier.full
            return a
        if a.kind != self.carrier.kind:
            raise AmbientMismatch(f"{a.kind} vs {self.carrier.kind}")
        if self.strict and not a.issubset(self.carrier):
            raise OutsideCarrier(repr(a - self.carrier))
        return a & self.carrier

    def closure(self, a):
        if self.kind == "finite":
            return self.carrier.closure(a)
        return self.clip(a).closure() & self.carrier

    def interior(self, a):
        if self.kind == "finite":
            return self.carrier.interior(a)
        return self.carrier - (self.carrier - self.clip(a)).closure()

    def boundary(self, a):
        return self.closure(a) - self.interior(a)

    def is_open(self, a) -> bool:
        return self.interior(a) == self.clip(a)

    def is_closed(self, a) -> bool:
        return self.closure(a) == self.clip(a)

    def is_dense(self, a) -> bool:
        c = self.closure(a)
        return c == (self.carrier.full if self.kind == "finite" else self.carrier)

    def is_nowhere_dense(self, a) -> bool:
        i = self.interior(self.closure(a))
        return not i if self.kind == "finite" else i.is_empty()

    def is_compact(self, a) -> bool:
        if self.kind == "finite":
            return True
        return self.clip(a).is_compact()

    def contains(self, p) -> bool:
        if self.kind == "finite":
            return p in self.carrier.full
        return self.carrier.contains(p)

    def to_json(self):
        if self.kind == "finite":
            fs = self.carrier
            return {"finite": {"points": list(fs.points), "opens": sorted(sorted(o) for o in fs.opens)}}
        return self.carrier.to_json()


# top-level entry points -----------------------------------------------------

def normalize(cells: Iterable[Cell], ambient: Optional[Space] = None) -> SetExpr:
    s = SetExpr.from_cells(cells)
    return ambient.clip(s) if ambient is not None else s


def combine(kind: str, a, b=None, ambient: Optional[Space] = None):
    if kind == "complement":
        if ambient is None:
            return a.complement()
        if ambient.kind == "finite":
            return ambient.carrier.full - frozenset(a)
        return ambient.carrier - a
    if kind == "union":
        return a | b
    if kind == "intersect":
        return a & b
    if kind == "difference":
        return a - b
    raise ValueError(kind)


def topo(kind: str, a, ambient: Space):
    return {"closure": ambient.closure, "interior": ambient.interior, "boundary": ambient.boundary}[kind](a)


def query(kind: str, a, ambient: Space, point=None) -> bool:
    if kind == "is_empty":
        return not a if ambient.kind == "finite" else a.is_empty()
    if kind == "contains":
        return point in a if ambient.kind == "finite" else a.contains(point)
    return {"is_open": ambient.is_open, "is_closed": ambient.is_closed, "is_dense": ambient.is_dense,
            "is_nowhere_dense": ambient.is_nowhere_dense, "is_compact": ambient.is_compact}[kind](a)
