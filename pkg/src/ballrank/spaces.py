"""Presented Polish spaces with exact ball relations.

A presentation fixes a space family, an injective dense-point enumeration
rule, and a radius schedule.  Ball codes are pairs (center index, level);
the relations "strictly below" (closure of the finer ball inside the
coarser open ball, with a strictly larger level) and "apart" (disjoint
closed balls) are decided exactly over the rationals, per family.

Points are exact values: rationals on interval families, (spine, radial)
pairs on the hedgehog, eventually-constant words (word, tail) on the word
spaces, component-tagged points on amalgams.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

from . import trees


class SpaceError(Exception):
    pass


# ---------------------------------------------------------------------------
# interval algebra: bounded rational intervals with open/closed endpoints


@dataclass(frozen=True)
class Iv:
    lo: Fraction
    lo_open: bool
    hi: Fraction
    hi_open: bool


def iv_make(lo, lo_open, hi, hi_open):
    """Interval or None when empty."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return None
    return Iv(lo, lo_open, hi, hi_open)


def iv_contains(a, x):
    if a is None:
        return False
    if x < a.lo or (x == a.lo and a.lo_open):
        return False
    if x > a.hi or (x == a.hi and a.hi_open):
        return False
    return True


def iv_subset(a, b):
    """a included in b; empty (None) is included in everything."""
    if a is None:
        return True
    if b is None:
        return False
    left = b.lo < a.lo or (b.lo == a.lo and (not b.lo_open or a.lo_open))
    right = a.hi < b.hi or (a.hi == b.hi and (not b.hi_open or a.hi_open))
    return left and right


def iv_disjoint(a, b):
    if a is None or b is None:
        return True
    if a.hi < b.lo or (a.hi == b.lo and (a.hi_open or b.lo_open)):
        return True
    if b.hi < a.lo or (b.hi == a.lo and (b.hi_open or a.lo_open)):
        return True
    return False


# ---------------------------------------------------------------------------
# radius schedules


@dataclass(frozen=True)
class RadiusSchedule:
    """Level -> exact radius; the names match the three stock rules."""

    name: str

    def radius(self, k):
        if self.name == "paper":
            return Fraction(1, 2 ** (k + 1))
        if self.name == "top":
            return Fraction(1, 2 ** k)
        if self.name == "aligned":
            return Fraction(3, 2 ** (k + 2))
        raise SpaceError("unknown schedule %r" % self.name)


DYADIC_PAPER = RadiusSchedule("paper")
DYADIC_TOP = RadiusSchedule("top")
ALIGNED_ULTRA = RadiusSchedule("aligned")

SCHEDULES = {s.name: s for s in (DYADIC_PAPER, DYADIC_TOP, ALIGNED_ULTRA)}


# ---------------------------------------------------------------------------
# space families


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple
    matrix: tuple  # tuple of tuples of Fractions

    def size(self):
        return len(self.labels)


@dataclass(frozen=True)
class IntervalSpace:
    """Finite union of disjoint closed rational intervals and points.

    pieces: ascending ((lo, hi)) with lo <= hi; lo == hi is an isolated
    point.  Compact by construction.
    """

    pieces: tuple

    def __post_init__(self):
        prev = None
        for lo, hi in self.pieces:
            if lo > hi:
                raise SpaceError("interval piece with lo > hi")
            if prev is not None and lo <= prev:
                raise SpaceError("interval pieces must be disjoint ascending")
            prev = hi


@dataclass(frozen=True)
class RealLine:
    pass


@dataclass(frozen=True)
class Hedgehog:
    """Countably many unit spines glued at a center.

    Points are (spine, radial) with radial in (0, 1], center is (0, 0);
    cross-spine distance is the sum of radial coordinates.
    """


@dataclass(frozen=True)
class BaireSpace:
    pass


@dataclass(frozen=True)
class UltraTable:
    """The branch set of a term as a standalone ultrametric space on ω.

    Points are the branches themselves with the word-space metric; the
    dense enumeration is the canonical branch enumeration, so this is a
    presentation of a countable discrete space of prescribed shape.
    """

    term: object

    def __eq__(self, other):
        return isinstance(other, UltraTable) and trees.term_key(
            self.term
        ) == trees.term_key(other.term)

    def __hash__(self):
        return hash(("ultratable", trees.term_key(self.term)))


@dataclass(frozen=True)
class Scaled:
    factor: Fraction
    inner: object

    def __post_init__(self):
        if self.factor <= 0:
            raise SpaceError("scale factor must be positive")


@dataclass(frozen=True)
class AmalgamSum:
    """Disjoint components joined through anchor points and bridges.

    parts: tuple of (inner space, anchor point, bridge length > 0);
    cross distance d((i,x),(j,y)) = d_i(x,a_i) + c_i + c_j + d_j(a_j,y).
    """

    parts: tuple

    def __post_init__(self):
        for _, _, bridge in self.parts:
            if bridge <= 0:
                raise SpaceError("bridge lengths must be positive")


def unit_interval():
    return IntervalSpace(((Fraction(0), Fraction(1)),))


# ---------------------------------------------------------------------------
# metric


def hh_point(spine, radial):
    radial = Fraction(radial)
    if radial < 0 or radial > 1:
        raise SpaceError("radial coordinate outside [0,1]")
    if radial == 0:
        return (0, Fraction(0))
    return (int(spine), radial)


def word_first_diff(x, y):
    """Index of the first differing position of two branches, or None."""
    w1, t1 = x
    w2, t2 = y
    top = max(len(w1), len(w2))
    for k in range(top):
        a = w1[k] if k < len(w1) else t1
        b = w2[k] if k < len(w2) else t2
        if a != b:
            return k
    if t1 != t2:
        return top
    return None


def word_dist(x, y):
    j = word_first_diff(x, y)
    return Fraction(0) if j is None else Fraction(1, 2 ** (j + 1))


def metric(space, x, y):
    if isinstance(space, FiniteSpace):
        return Fraction(space.matrix[x][y])
    if isinstance(space, (IntervalSpace, RealLine)):
        return abs(Fraction(x) - Fraction(y))
    if isinstance(space, Hedgehog):
        (i, r), (j, s) = x, y
        return abs(r - s) if i == j or r == 0 or s == 0 else r + s
    if isinstance(space, (BaireSpace, UltraTable)):
        return word_dist(x, y)
    if isinstance(space, Scaled):
        return space.factor * metric(space.inner, x, y)
    if isinstance(space, AmalgamSum):
        (i, xi), (j, yj) = x, y
        if i == j:
            return metric(space.parts[i][0], xi, yj)
        si, ai, ci = space.parts[i]
        sj, aj, cj = space.parts[j]
        return metric(si, xi, ai) + ci + cj + metric(sj, aj, yj)
    raise SpaceError("unknown space %r" % (space,))


# ---------------------------------------------------------------------------
# ball extents
#
# ball_extent(space, center, radius, closed) gives an exact descriptor of
# the ball as a subset of the space; the descriptor kinds per family are
#   FiniteSpace     frozenset of point indices
#   IntervalSpace   tuple of Iv-or-None aligned with the pieces
#   RealLine        Iv
#   Hedgehog        Star
#   Baire/UltraTbl  prefix tuple (the cylinder through the center)
#   Scaled          inner extent (radius rescaled)
#   AmalgamSum      tuple of per-component extents


@dataclass(frozen=True)
class Star:
    """Hedgehog ball: one special spine interval, a uniform bound on all
    other spines, and a center-membership flag.  Radial domain (0, 1]."""

    spine: int
    arm: object  # Iv or None on the special spine
    others: object  # Iv or None, shared by every other spine
    center: bool

    def on(self, sp):
        return self.arm if sp == self.spine else self.others


def _clip_radial(lo, lo_open, hi, hi_open):
    if lo < 0:
        lo, lo_open = Fraction(0), True
    if lo == 0:
        lo_open = True
    if hi > 1:
        hi, hi_open = Fraction(1), False
    return iv_make(lo, lo_open, hi, hi_open)


def cylinder_level(radius, closed):
    """Least level j with the word-metric ball of this radius equal to the
    level-j cylinder: smallest j >= 0 such that 2^{-j-1} < r (open ball)
    or <= r (closed ball)."""
    j = 0
    while True:
        step = Fraction(1, 2 ** (j + 1))
        if step < radius or (closed and step == radius):
            return j
        j += 1
        if j > 4096:
            raise SpaceError("radius too small for a cylinder level")


def ball_extent(space, center, radius, closed):
    radius = Fraction(radius)
    if radius < 0 or (radius == 0 and not closed):
        return None
    if isinstance(space, FiniteSpace):
        out = set()
        for j in range(space.size()):
            d = Fraction(space.matrix[center][j])
            if d < radius or (closed and d == radius):
                out.add(j)
        return frozenset(out)
    if isinstance(space, IntervalSpace):
        c = Fraction(center)
        ball = iv_make(c - radius, not closed, c + radius, not closed)
        out = []
        for lo, hi in space.pieces:
            piece = iv_make(lo, False, hi, False)
            out.append(_iv_intersect(ball, piece))
        return tuple(out)
    if isinstance(space, RealLine):
        c = Fraction(center)
        return iv_make(c - radius, not closed, c + radius, not closed)
    if isinstance(space, Hedgehog):
        i, r0 = center
        op = not closed
        if r0 == 0:
            others = _clip_radial(Fraction(0), True, radius, op)
            return Star(0, others, others, True)
        arm = _clip_radial(r0 - radius, op, r0 + radius, op)
        others = _clip_radial(Fraction(0), True, radius - r0, op)
        in_center = r0 < radius or (closed and r0 == radius)
        return Star(i, arm, others, in_center)
    if isinstance(space, (BaireSpace, UltraTable)):
        if radius == 0:
            return ("pt", center)  # closed radius-0 ball: a singleton
        lvl = cylinder_level(radius, closed)
        return trees.branch_prefix(center, lvl)
    if isinstance(space, Scaled):
        return ball_extent(space.inner, center, radius / space.factor, closed)
    if isinstance(space, AmalgamSum):
        ci, xi = center
        si, ai, bi = space.parts[ci]
        out = []
        for j, (sj, aj, bj) in enumerate(space.parts):
            if j == ci:
                out.append(ball_extent(sj, xi, radius, closed))
            else:
                rem = radius - metric(si, xi, ai) - bi - bj
                out.append(ball_extent(sj, aj, rem, closed))
        return tuple(out)
    raise SpaceError("unknown space %r" % (space,))


def _iv_intersect(a, b):
    if a is None or b is None:
        return None
    lo, lo_open = max(
        (a.lo, a.lo_open), (b.lo, b.lo_open), key=lambda t: (t[0], t[1])
    )
    hi, hi_open = min(
        (a.hi, a.hi_open), (b.hi, b.hi_open), key=lambda t: (t[0], not t[1])
    )
    return iv_make(lo, lo_open, hi, hi_open)


def _prefix_extends(p, q):
    return len(p) >= len(q) and p[: len(q)] == q


def _is_pt(e):
    return len(e) == 2 and e[0] == "pt"


def _branch_in_cyl(branch, prefix):
    return trees.branch_prefix(branch, len(prefix)) == prefix


def extent_subset(space, a, b):
    """a included in b, exactly, as subsets of the space."""
    if a is None:
        return True
    if b is None:
        return False
    if isinstance(space, FiniteSpace):
        return a <= b
    if isinstance(space, IntervalSpace):
        return all(iv_subset(x, y) for x, y in zip(a, b))
    if isinstance(space, RealLine):
        return iv_subset(a, b)
    if isinstance(space, Hedgehog):
        if a.center and not b.center:
            return False
        spines = {a.spine, b.spine}
        return all(iv_subset(a.on(sp), b.on(sp)) for sp in spines) and iv_subset(
            a.others, b.others
        )
    if isinstance(space, (BaireSpace, UltraTable)):
        if _is_pt(a):
            return a == b if _is_pt(b) else _branch_in_cyl(a[1], b)
        if _is_pt(b):
            if isinstance(space, BaireSpace):
                return False  # cylinders are never singletons here
            t = space.term
            for sym in a:
                t = trees.subtree(t, sym)
            if not trees.is_single_branch(t):
                return False
            w, tail = trees.single_branch_of(t)
            return trees._norm_branch(a + w, tail) == b[1]
        return _prefix_extends(a, b)
    if isinstance(space, Scaled):
        return extent_subset(space.inner, a, b)
    if isinstance(space, AmalgamSum):
        return all(
            extent_subset(part[0], x, y)
            for part, x, y in zip(space.parts, a, b)
        )
    raise SpaceError("unknown space %r" % (space,))


def extent_disjoint(space, a, b):
    if a is None or b is None:
        return True
    if isinstance(space, FiniteSpace):
        return not (a & b)
    if isinstance(space, IntervalSpace):
        return all(iv_disjoint(x, y) for x, y in zip(a, b))
    if isinstance(space, RealLine):
        return iv_disjoint(a, b)
    if isinstance(space, Hedgehog):
        if a.center and b.center:
            return False
        spines = {a.spine, b.spine}
        if any(not iv_disjoint(a.on(sp), b.on(sp)) for sp in spines):
            return False
        return iv_disjoint(a.others, b.others)
    if isinstance(space, (BaireSpace, UltraTable)):
        if _is_pt(a):
            return a != b if _is_pt(b) else not _branch_in_cyl(a[1], b)
        if _is_pt(b):
            return not _branch_in_cyl(b[1], a)
        return not _prefix_extends(a, b) and not _prefix_extends(b, a)
    if isinstance(space, Scaled):
        return extent_disjoint(space.inner, a, b)
    if isinstance(space, AmalgamSum):
        return all(
            extent_disjoint(part[0], x, y)
            for part, x, y in zip(space.parts, a, b)
        )
    raise SpaceError("unknown space %r" % (space,))


def extent_contains(space, e, point):
    if e is None:
        return False
    if isinstance(space, FiniteSpace):
        return point in e
    if isinstance(space, IntervalSpace):
        return any(iv_contains(x, Fraction(point)) for x in e)
    if isinstance(space, RealLine):
        return iv_contains(e, Fraction(point))
    if isinstance(space, Hedgehog):
        sp, r = point
        if r == 0:
            return e.center
        return iv_contains(e.on(sp), r)
    if isinstance(space, (BaireSpace, UltraTable)):
        if _is_pt(e):
            return trees._norm_branch(*point) == trees._norm_branch(*e[1])
        return _branch_in_cyl(point, e)
    if isinstance(space, Scaled):
        return extent_contains(space.inner, e, point)
    if isinstance(space, AmalgamSum):
        ci, xi = point
        return extent_contains(space.parts[ci][0], e[ci], xi)
    raise SpaceError("unknown space %r" % (space,))


def extent_is_space(space, e):
    """Does the extent cover the whole space?"""
    if e is None:
        return False
    if isinstance(space, FiniteSpace):
        return len(e) == space.size()
    if isinstance(space, IntervalSpace):
        return all(
            x is not None
            and iv_subset(iv_make(lo, False, hi, False), x)
            for x, (lo, hi) in zip(e, space.pieces)
        )
    if isinstance(space, RealLine):
        return False
    if isinstance(space, Hedgehog):
        full = iv_make(Fraction(0), True, Fraction(1), False)
        return e.center and iv_subset(full, e.others) and iv_subset(full, e.arm)
    if isinstance(space, (BaireSpace, UltraTable)):
        return not _is_pt(e) and len(e) == 0
    if isinstance(space, Scaled):
        return extent_is_space(space.inner, e)
    if isinstance(space, AmalgamSum):
        return all(
            extent_is_space(part[0], x) for part, x in zip(space.parts, e)
        )
    raise SpaceError("unknown space %r" % (space,))


# ---------------------------------------------------------------------------
# dense enumerations


def _rat_unit(i, include_zero):
    """The i-th rational of [0,1] ordered by denominator then numerator."""
    seen = 0
    den = 1
    while True:
        for num in range(0, den + 1):
            if gcd(num, den) != 1:
                continue
            if num == 0 and (den != 1 or not include_zero):
                continue
            if num == den and den != 1:
                continue
            if seen == i:
                return Fraction(num, den)
            seen += 1
        den += 1


def _rat_line(i):
    """Spiral over all rationals: 0, 1, -1, 1/2, -1/2, 2, -2, ..."""
    if i == 0:
        return Fraction(0)
    i -= 1
    k, sign = divmod(i, 2)
    seen = 0
    s = 2
    while True:
        for num in range(1, s):
            den = s - num
            if gcd(num, den) != 1:
                continue
            if seen == k:
                q = Fraction(num, den)
                return -q if sign else q
            seen += 1
        s += 1


def _unpair(j):
    s = 0
    while (s + 1) * (s + 2) // 2 <= j:
        s += 1
    k = j - s * (s + 1) // 2
    return s - k, k


def _word_decode(n):
    """Bijection between naturals and finite words (0 is the empty word)."""
    out = []
    while n > 0:
        a, n = _unpair(n - 1)
        out.append(a)
    return tuple(out)


def _baire_point(i, tail):
    seen = 0
    n = 0
    while True:
        w = _word_decode(n)
        if not w or w[-1] != tail:
            if seen == i:
                return (w, tail)
            seen += 1
        n += 1


_ULTRA_CACHE = {}


def _ultra_branches(space, upto):
    key = trees.term_key(space.term)
    got = _ULTRA_CACHE.setdefault(key, {"bound": -1, "list": [], "seen": set()})
    while len(got["list"]) <= upto:
        got["bound"] += 1
        b = got["bound"]
        for br in trees.term_branches(space.term, b, block_bound=b + 1):
            if br not in got["seen"]:
                got["seen"].add(br)
                got["list"].append(br)
        if got["bound"] > 4096:
            raise SpaceError("branch enumeration exhausted")
    return got["list"]


def dense_point(space, rule, i):
    """The i-th dense point under the named enumeration rule."""
    if isinstance(space, FiniteSpace):
        if not 0 <= i < space.size():
            raise SpaceError("dense index out of range for finite space")
        if rule == "all":
            return i
        if rule == "reversed":
            return space.size() - 1 - i
    if isinstance(space, IntervalSpace):
        if rule in ("farey", "farey-nozero"):
            include_zero = rule == "farey"
            seen = 0
            for rnd in itertools.count():
                for t, (lo, hi) in enumerate(space.pieces):
                    if t > rnd:
                        break
                    j = rnd - t
                    if lo == hi:
                        if j > 0:
                            continue
                        q = lo
                    else:
                        q = lo + _rat_unit(j, True) * (hi - lo)
                    if not include_zero and q == 0:
                        continue
                    if seen == i:
                        return q
                    seen += 1
    if isinstance(space, RealLine):
        if rule == "spiral":
            return _rat_line(i)
        if rule == "spiral-offset":
            return _rat_line(i) + Fraction(1, 3)
    if isinstance(space, Hedgehog):
        if rule in ("dovetail", "dovetail-swapped"):
            if i == 0:
                return hh_point(0, 0)
            a, b = _unpair(i - 1)
            spine, k = (a, b) if rule == "dovetail" else (b, a)
            return hh_point(spine, _rat_unit(k, False))
    if isinstance(space, BaireSpace):
        if rule == "ev0":
            return _baire_point(i, 0)
        if rule == "ev1":
            return _baire_point(i, 1)
    if isinstance(space, UltraTable):
        if rule == "branches":
            return _ultra_branches(space, i)[i]
    if isinstance(space, Scaled):
        return dense_point(space.inner, rule, i)
    if isinstance(space, AmalgamSum):
        if rule == "dovetail":
            k = len(space.parts)
            seen = 0
            exhausted = set()
            for cand in itertools.count():
                t, j = cand % k, cand // k
                if t in exhausted:
                    continue
                inner = space.parts[t][0]
                try:
                    pt = dense_point(inner, default_rule(inner), j)
                except SpaceError:
                    exhausted.add(t)
                    if len(exhausted) == k:
                        raise SpaceError("dense index out of range for amalgam")
                    continue
                if seen == i:
                    return (t, pt)
                seen += 1
    raise SpaceError("no dense rule %r for %r" % (rule, type(space).__name__))


def dense_rules(space):
    if isinstance(space, FiniteSpace):
        return ("all", "reversed")
    if isinstance(space, IntervalSpace):
        return ("farey", "farey-nozero")
    if isinstance(space, RealLine):
        return ("spiral", "spiral-offset")
    if isinstance(space, Hedgehog):
        return ("dovetail", "dovetail-swapped")
    if isinstance(space, BaireSpace):
        return ("ev0", "ev1")
    if isinstance(space, UltraTable):
        return ("branches",)
    if isinstance(space, Scaled):
        return dense_rules(space.inner)
    if isinstance(space, AmalgamSum):
        return ("dovetail",)
    raise SpaceError("unknown space %r" % (space,))


def default_rule(space):
    return dense_rules(space)[0]


# ---------------------------------------------------------------------------
# homeomorphisms (supported pushforwards)


@dataclass(frozen=True)
class AffineHomeo:
    """x -> a x + b on interval families and the line."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.a == 0:
            raise SpaceError("affine homeomorphism needs a != 0")

    def apply(self, x):
        return self.a * Fraction(x) + self.b

    def inverse(self, y):
        return (Fraction(y) - self.b) / self.a


@dataclass(frozen=True)
class SwitchHomeo:
    """A switch map on the word space; an involution."""

    pair: object

    def apply(self, x):
        return self.pair.apply_branch(x)

    inverse = apply


@dataclass(frozen=True)
class IdentityHomeo:
    def apply(self, x):
        return x

    inverse = apply


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class BallId:
    center: int
    level: int


@dataclass(frozen=True)
class Presentation:
    space: object
    rule: str
    schedule: RadiusSchedule
    homeo: object = None  # pushforward twist, None for plain presentations

    def radius(self, k):
        return self.schedule.radius(k)

    def point(self, i):
        """The i-th dense point (pulled back through the twist if any)."""
        x = dense_point(self.space, self.rule, i)
        return self.homeo.inverse(x) if self.homeo is not None else x

    def anchor(self, i):
        """The i-th dense point in the untwisted geometry."""
        return dense_point(self.space, self.rule, i)

    def open_extent(self, ball):
        return ball_extent(
            self.space, self.anchor(ball.center), self.radius(ball.level), False
        )

    def closed_extent(self, ball):
        return ball_extent(
            self.space, self.anchor(ball.center), self.radius(ball.level), True
        )

    def contains_point(self, ball, x, closed=False):
        """Exact membership of a space point in the (open) ball."""
        if self.homeo is not None:
            x = self.homeo.apply(x)
        ext = self.closed_extent(ball) if closed else self.open_extent(ball)
        return extent_contains(self.space, ext, x)


def presentation(space, rule=None, schedule=None, homeo=None):
    if rule is None:
        rule = default_rule(space)
    if rule not in dense_rules(space):
        raise SpaceError("no dense rule %r for this space" % rule)
    if schedule is None:
        schedule = (
            ALIGNED_ULTRA
            if isinstance(space, (BaireSpace, UltraTable))
            else DYADIC_PAPER
        )
    return Presentation(space, rule, schedule, homeo)


def dist(p, i, j):
    """Exact distance between dense points i and j of the presentation."""
    if p.homeo is not None:
        return metric(p.space, p.anchor(i), p.anchor(j))
    return metric(p.space, p.point(i), p.point(j))


def ball_strictly_below(p, m, n):
    """Decides whether n is strictly below m: n's level is smaller and the
    closed ball of m is contained in the open ball of n."""
    if not n.level < m.level:
        return False
    return extent_subset(p.space, p.closed_extent(m), p.open_extent(n))


def ball_apart(p, m, n):
    """Decides whether the closed balls of m and n are disjoint."""
    return extent_disjoint(p.space, p.closed_extent(m), p.closed_extent(n))


def dense_swap(p, rule):
    if rule not in dense_rules(p.space):
        raise SpaceError("no dense rule %r for this space" % rule)
    return replace(p, rule=rule)


def pushforward_presentation(p, f):
    """Presentation with metric d(f x, f y) and dense points f^{-1}(x_i)."""
    if p.homeo is not None:
        raise SpaceError("presentation is already a pushforward")
    if isinstance(f, IdentityHomeo):
        return replace(p, homeo=f)
    if isinstance(f, AffineHomeo):
        if not isinstance(p.space, (IntervalSpace, RealLine, Scaled)):
            raise SpaceError("affine pushforward needs an interval family")
        return replace(p, homeo=f)
    if isinstance(f, SwitchHomeo):
        if not isinstance(p.space, BaireSpace):
            raise SpaceError("switch pushforward needs the word space")
        return replace(p, homeo=f)
    raise SpaceError("unsupported homeomorphism %r" % (f,))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    notes: tuple
    problems: tuple

    @property
    def ok(self):
        return not self.problems


def validate_presentation(p, sample=8):
    """Exact checks on a finite sample: metric axioms, schedule shape,
    density of enumerated points in sampled balls, whole-space ball."""
    notes, problems = [], []
    pts = []
    for i in range(sample):
        try:
            pts.append(p.point(i))
        except SpaceError:
            break  # finite families run out of dense indices
    n = len(pts)
    for i in range(n):
        if metric(p.space, pts[i], pts[i]) != 0:
            problems.append("identity violated at %d" % i)
        for j in range(i + 1, n):
            dij = metric(p.space, pts[i], pts[j])
            dji = metric(p.space, pts[j], pts[i])
            if dij != dji:
                problems.append("symmetry violated at (%d,%d)" % (i, j))
            if dij == 0:
                problems.append("distinct dense points at distance 0 (%d,%d)" % (i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                dik = metric(p.space, pts[i], pts[k])
                dij = metric(p.space, pts[i], pts[j])
                djk = metric(p.space, pts[j], pts[k])
                if dik > dij + djk:
                    problems.append(
                        "triangle violated at (%d,%d,%d)" % (i, j, k)
                    )
    radii = [p.radius(k) for k in range(6)]
    if not all(a > b for a, b in zip(radii, radii[1:])):
        problems.append("radius schedule not strictly decreasing")
    for i in range(min(4, n)):
        for lvl in (0, 2):
            ball = BallId(i, lvl)
            if not extent_contains(
                p.space, p.open_extent(ball), p.anchor(i)
            ):
                problems.append(
                    "ball (%d,%d) misses its own center" % (i, lvl)
                )
    whole = any(
        extent_is_space(p.space, p.open_extent(BallId(i, 0)))
        for i in range(min(4, n))
    )
    notes.append("whole-space ball: %s" % ("yes" if whole else "no"))
    if isinstance(p.space, (BaireSpace, UltraTable)) and p.schedule.name != "aligned":
        notes.append("schedule %r on a word space: balls are off-level cylinders" % p.schedule.name)
    return ValidationReport(tuple(notes), tuple(problems))
