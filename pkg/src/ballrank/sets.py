"""Symbolic descriptions of countable closed sets.

A set spec names a closed subset of an ambient space without listing it:

  Empty               nothing
  FinitePoints        an explicit finite tuple of points, any family
  ConvergentPackage   finitely many points plus geometric sequences
                      a + c*2^-n with their limits, on interval-like spaces
  OrdinalEmbedding    the classical nested-interval copy of the ordinal
                      space w^a * m + 1 inside [0, 1]
  BranchFamily        the branch set of a term, inside Baire space
  SwitchImage         the image of a branch family under a switch map

Every variant supports exact ball membership (meets), a closed-form
Cantor-Bendixson derivative, and a symbolic CB rank.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

from .ordinal import (
    Ordinal,
    ZERO,
    ONE,
    from_int,
    omega_power,
    ord_cmp,
    ord_pred,
    ord_add,
    fundamental_seq,
)
from . import trees
from .trees import DEAD, Base, subtree, term_key
from .switch import SwitchError, switch_pair, switch_apply_term
from . import spaces
from .spaces import (
    Iv,
    iv_make,
    iv_contains,
    iv_subset,
    AffineHomeo,
    SwitchHomeo,
    IdentityHomeo,
    IntervalSpace,
    RealLine,
    Scaled,
    BaireSpace,
)

STEP_CAP = 4096


class SetError(Exception):
    """A set spec was malformed or an operation does not apply to it."""


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class Empty:
    def __str__(self):
        return "empty"


@dataclass(frozen=True)
class FinitePoints:
    """An explicit finite set.  Points use the ambient family's coordinates."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def __str__(self):
        return "finite(%d points)" % len(self.points)


@dataclass(frozen=True)
class ConvergentPackage:
    """Finitely many isolated points plus sequences a + c*2^-n with limits.

    Each sequence is an (anchor, coefficient) pair of rationals; the
    coefficient is nonzero and n runs over 0, 1, 2, ...  The anchor itself
    belongs to the set, so the spec is closed.
    """

    points: tuple = ()
    sequences: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(Fraction(x) for x in self.points))
        seqs = []
        for a, c in self.sequences:
            c = Fraction(c)
            if c == 0:
                raise SetError("sequence coefficient must be nonzero")
            seqs.append((Fraction(a), c))
        object.__setattr__(self, "sequences", tuple(seqs))

    def __str__(self):
        return "package(%d points, %d sequences)" % (
            len(self.points),
            len(self.sequences),
        )


@dataclass(frozen=True)
class OrdinalEmbedding:
    """The ordinal space w^alpha * copies + 1 laid out inside [0, 1].

    Copy j of the unit block sits on [j/m, (j+1)/m].  Inside a unit block
    for [0, w^b] the n-th sub-block occupies [1 - 2^-n, 1 - 2^-n-1]; a
    successor b fills the slots with [0, w^(b-1)] copies, a limit b with
    copies of [0, w^fs(b, n)].  The top of each block is its right endpoint,
    so suprema converge geometrically and the embedding is a homeomorphism
    onto its image.

    level counts derivatives already taken: the realized set is the level-th
    CB derivative of the full copy.  A point of address g survives to level
    d exactly when its least Cantor normal form exponent is >= d.
    """

    alpha: Ordinal
    copies: int = 1
    level: int = 0

    def __post_init__(self):
        if not isinstance(self.alpha, Ordinal):
            object.__setattr__(self, "alpha", from_int(self.alpha))
        if ord_cmp(self.alpha, omega_power(from_int(4))) >= 0:
            raise SetError("embedding exponent must stay below w^4")
        if not isinstance(self.copies, int) or self.copies < 1:
            raise SetError("copies must be a positive int")
        if not isinstance(self.level, int) or self.level < 0:
            raise SetError("derivative level must be a natural number")
        if ord_cmp(from_int(self.level), self.alpha) > 0:
            raise SetError("derivative level exceeds the exponent")

    def __str__(self):
        tag = "ordemb(%s, %d)" % (self.alpha, self.copies)
        if self.level:
            tag += "'" * self.level
        return tag


@dataclass(frozen=True)
class BranchFamily:
    """The branch set of a term, as a closed subset of Baire space."""

    term: object

    def __post_init__(self):
        if not isinstance(self.term, trees.BranchTerm):
            raise SetError("branch family needs a branch term")

    def __str__(self):
        return "branches(%s)" % self.term


@dataclass(frozen=True)
class SwitchImage:
    """A branch family pushed through the switch map at one level."""

    level: Ordinal
    base: BranchFamily

    def __post_init__(self):
        if not isinstance(self.level, Ordinal):
            object.__setattr__(self, "level", from_int(self.level))
        if not isinstance(self.base, BranchFamily):
            raise SetError("switch image wraps a branch family")
        _pushed_term(self.level, self.base.term)  # validate eagerly

    @property
    def term(self):
        return _pushed_term(self.level, self.base.term)

    def __str__(self):
        return "switch(%s) %s" % (self.level, self.base)


@lru_cache(maxsize=None)
def _pushed_term(level, term):
    return switch_apply_term(switch_pair(level), term)


# ---------------------------------------------------------------------------
# interval plumbing

_F0 = Fraction(0)
_F1 = Fraction(1)
_HALF = Fraction(1, 2)


def _extent_ivs(space, extent):
    """Flatten a ball extent on an interval-like space to a list of Iv."""
    if isinstance(space, IntervalSpace):
        return [iv for iv in extent if iv is not None]
    if isinstance(space, RealLine):
        return [extent] if extent is not None else []
    if isinstance(space, Scaled):
        return _extent_ivs(space.inner, extent)
    raise SetError("this set variant lives on interval-like spaces")


def _seq_meets_iv(anchor, coeff, iv):
    """Does some a + c*2^-n (n >= 0) land in the interval?"""
    if coeff > 0:
        # elements decrease from a + c towards a, all strictly above a
        if iv.hi <= anchor:
            return False
    else:
        if iv.lo >= anchor:
            return False
    step = Fraction(1)
    for _ in range(STEP_CAP):
        v = anchor + coeff * step
        if iv_contains(iv, v):
            return True
        if coeff > 0 and (v < iv.lo or (v == iv.lo and iv.lo_open)):
            return False
        if coeff < 0 and (v > iv.hi or (v == iv.hi and iv.hi_open)):
            return False
        step = step / 2
    raise SetError("sequence membership did not resolve")


def _slot(lo, hi, n):
    """The n-th sub-block of a unit block on [lo, hi]."""
    w = hi - lo
    return lo + w * (1 - Fraction(1, 2 ** n)), lo + w * (1 - Fraction(1, 2 ** (n + 1)))


def _zone_exponent(beta, n):
    return fundamental_seq(beta, n)


def _unit_meets(beta, d, lo, hi, iv, include_zero):
    """Does the level-d derivative of the [0, w^beta] block on [lo, hi]
    meet the interval?  include_zero says whether the block's bottom point
    still counts at this level (its address is the enclosing offset).
    """
    box = iv_make(lo, False, hi, False)
    iv = spaces._iv_intersect(iv, box) if box is not None else None
    if iv is None:
        return False
    if include_zero and iv_contains(iv, lo):
        return True
    d_ord = from_int(d)
    if ord_cmp(d_ord, beta) <= 0 and iv_contains(iv, hi):
        return True  # the top point has address divisible by w^beta
    if beta.is_zero():
        return False
    if beta.is_successor():
        delta = ord_pred(beta)
        if ord_cmp(d_ord, delta) > 0:
            return False  # interior addresses bottom out below w^d
        for n in range(STEP_CAP):
            s_lo, s_hi = _slot(lo, hi, n)
            if s_lo > iv.hi or (s_lo == iv.hi and iv.hi_open):
                return False
            block = Iv(s_lo, False, s_hi, False)
            if iv_subset(block, iv):
                return True  # whole sub-block inside, its top qualifies
            sub = spaces._iv_intersect(iv, block)
            if sub is None:
                continue
            if _unit_meets(delta, d, s_lo, s_hi, sub, n >= 1 or include_zero):
                return True
        raise SetError("block descent did not resolve")
    for n in range(STEP_CAP):
        zeta = _zone_exponent(beta, n)
        s_lo, s_hi = _slot(lo, hi, n)
        if s_lo > iv.hi or (s_lo == iv.hi and iv.hi_open):
            return False
        if ord_cmp(d_ord, zeta) > 0:
            continue  # zone too shallow to carry level-d points
        block = Iv(s_lo, False, s_hi, False)
        if iv_subset(block, iv):
            return True
        sub = spaces._iv_intersect(iv, block)
        if sub is None:
            continue
        if n >= 1:
            inc = ord_cmp(d_ord, _zone_exponent(beta, n - 1)) <= 0
        else:
            inc = include_zero
        if _unit_meets(zeta, d, s_lo, s_hi, sub, inc):
            return True
    raise SetError("zone descent did not resolve")


def _ordemb_meets_iv(spec, iv):
    m = spec.copies
    for j in range(m):
        c_lo = Fraction(j, m)
        c_hi = Fraction(j + 1, m)
        if c_lo > iv.hi or (c_lo == iv.hi and iv.hi_open):
            return False
        if j == 0:
            inc = spec.level == 0
        else:
            inc = True  # address w^alpha * j, least exponent alpha >= level
        if _unit_meets(spec.alpha, spec.level, c_lo, c_hi, iv, inc):
            return True
    return False


def _meets_ivs(spec, ivs):
    if isinstance(spec, ConvergentPackage):
        for iv in ivs:
            for x in spec.points:
                if iv_contains(iv, x):
                    return True
            for a, c in spec.sequences:
                if iv_contains(iv, a) or _seq_meets_iv(a, c, iv):
                    return True
        return False
    if isinstance(spec, OrdinalEmbedding):
        return any(_ordemb_meets_iv(spec, iv) for iv in ivs)
    raise SetError("no interval reading for %s" % spec)


def meets_window(spec, lo, hi, closed=True):
    """Exact test against one rational window; closed includes endpoints."""
    iv = iv_make(Fraction(lo), not closed, Fraction(hi), not closed)
    if iv is None:
        return False
    if isinstance(spec, Empty):
        return False
    if isinstance(spec, FinitePoints):
        return any(iv_contains(iv, x) for x in spec.points)
    return _meets_ivs(spec, [iv])


# ---------------------------------------------------------------------------
# ball membership


def meets(spec, p, ball):
    """Does the open ball of the presentation meet the described set?"""
    if p.homeo is not None:
        return meets(homeo_image(spec, p.homeo), replace(p, homeo=None), ball)
    if isinstance(spec, Empty):
        return False
    extent = p.open_extent(ball)
    if isinstance(spec, FinitePoints):
        return any(spaces.extent_contains(p.space, extent, x) for x in spec.points)
    if isinstance(spec, (ConvergentPackage, OrdinalEmbedding)):
        return _meets_ivs(spec, _extent_ivs(p.space, extent))
    if isinstance(spec, (BranchFamily, SwitchImage)):
        if not isinstance(p.space, BaireSpace):
            raise SetError("branch families live in Baire space")
        term = spec.term
        if spaces._is_pt(extent):
            return trees.term_contains_branch(term, extent[1])
        return not trees.subtree_word(term, extent).is_dead()
    raise SetError("not a set spec: %r" % (spec,))


# ---------------------------------------------------------------------------
# derivatives and ranks


def cb_derivative(spec):
    """A spec realizing exactly the set of limit points."""
    if isinstance(spec, Empty):
        return Empty()
    if isinstance(spec, FinitePoints):
        return Empty()
    if isinstance(spec, ConvergentPackage):
        anchors = sorted({a for a, _ in spec.sequences})
        if not anchors:
            return Empty()
        return FinitePoints(tuple(anchors))
    if isinstance(spec, OrdinalEmbedding):
        nxt = from_int(spec.level + 1)
        if ord_cmp(nxt, spec.alpha) > 0:
            return Empty()
        return OrdinalEmbedding(spec.alpha, spec.copies, spec.level + 1)
    if isinstance(spec, (BranchFamily, SwitchImage)):
        return Empty()  # every term denotes a discrete branch set
    raise SetError("not a set spec: %r" % (spec,))


def cb_rank(spec):
    """Least ordinal a with the a-th derivative empty."""
    if isinstance(spec, Empty):
        return ZERO
    if isinstance(spec, FinitePoints):
        return ONE if spec.points else ZERO
    if isinstance(spec, ConvergentPackage):
        if spec.sequences:
            return from_int(2)
        return ONE if spec.points else ZERO
    if isinstance(spec, OrdinalEmbedding):
        if spec.alpha.is_finite():
            return from_int(spec.alpha.to_int() - spec.level + 1)
        # finite levels do not dent a transfinite exponent
        return ord_add(spec.alpha, ONE)
    if isinstance(spec, (BranchFamily, SwitchImage)):
        term = spec.term
        return ZERO if term.is_dead() else ONE
    raise SetError("not a set spec: %r" % (spec,))


def is_discrete(spec):
    return ord_cmp(cb_rank(spec), ONE) <= 0


# ---------------------------------------------------------------------------
# transport


def homeo_image(spec, f):
    """Push a spec forward through a supported homeomorphism."""
    if isinstance(f, IdentityHomeo):
        return spec
    if isinstance(spec, Empty):
        return spec
    if isinstance(f, AffineHomeo):
        if isinstance(spec, FinitePoints):
            try:
                pts = tuple(f.apply(Fraction(x)) for x in spec.points)
            except (TypeError, ValueError):
                raise SetError("affine transport needs rational points")
            return FinitePoints(pts)
        if isinstance(spec, ConvergentPackage):
            return ConvergentPackage(
                tuple(f.apply(x) for x in spec.points),
                tuple((f.apply(a), f.a * c) for a, c in spec.sequences),
            )
        raise SetError("affine transport works on point and package specs")
    if isinstance(f, SwitchHomeo):
        return switch_apply(f.pair, spec)
    raise SetError("unsupported homeomorphism %r" % (f,))


def switch_apply(pair, spec):
    """Image of a branch-set spec under the switch map at the pair's level."""
    if isinstance(spec, Empty):
        return spec
    if isinstance(spec, FinitePoints):
        return FinitePoints(tuple(pair.apply_branch(x) for x in spec.points))
    if isinstance(spec, BranchFamily):
        if ord_cmp(pair.level, from_int(2)) == 0:
            return spec  # the level-2 map is the identity
        if term_key(spec.term) == term_key(Base()):
            return SwitchImage(pair.level, spec)
        return BranchFamily(switch_apply_term(pair, spec.term))
    if isinstance(spec, SwitchImage):
        if ord_cmp(pair.level, spec.level) == 0:
            return spec.base  # the map is an involution
        return BranchFamily(switch_apply_term(pair, spec.term))
    raise SetError("switch maps act on branch set specs")


# ---------------------------------------------------------------------------
# samples (exact witnesses for oracles and the rank engines)


def _unit_points(beta, lo, hi, depth, zero_lsb, out):
    """Collect (position, least CNF exponent of the address) pairs.

    zero_lsb is the exponent carried by the block's bottom point, or None
    when its global address is 0.  Sub-block indices stop at depth.
    """
    out[lo] = zero_lsb
    out[hi] = beta
    if beta.is_zero():
        return
    if beta.is_successor():
        delta = ord_pred(beta)
        for n in range(depth + 1):
            s_lo, s_hi = _slot(lo, hi, n)
            sub_zero = delta if n >= 1 else zero_lsb
            _unit_points(delta, s_lo, s_hi, depth, sub_zero, out)
        return
    for n in range(depth + 1):
        zeta = _zone_exponent(beta, n)
        s_lo, s_hi = _slot(lo, hi, n)
        sub_zero = _zone_exponent(beta, n - 1) if n >= 1 else zero_lsb
        _unit_points(zeta, s_lo, s_hi, depth, sub_zero, out)


def ordemb_levels(spec, depth=4):
    """Sampled points of the full embedding with their survival exponents.

    Returns a dict position -> least CNF exponent (None for the origin).
    A point belongs to the level-d derivative iff its exponent is >= d.
    """
    out = {}
    m = spec.copies
    for j in range(m):
        lo, hi = Fraction(j, m), Fraction(j + 1, m)
        zero = None if j == 0 else spec.alpha
        _unit_points(spec.alpha, lo, hi, depth, zero, out)
    return out


def sample_points(spec, depth=4):
    """A finite, exact sample of the realized set.

    Interval variants return sorted rationals; branch variants return
    normalized (word, tail) branches.  The sample is truncation-complete:
    every returned point really belongs to the set.
    """
    if isinstance(spec, Empty):
        return []
    if isinstance(spec, FinitePoints):
        return list(spec.points)
    if isinstance(spec, ConvergentPackage):
        pts = set(spec.points)
        for a, c in spec.sequences:
            pts.add(a)
            for n in range(depth + 1):
                pts.add(a + c * Fraction(1, 2 ** n))
        return sorted(pts)
    if isinstance(spec, OrdinalEmbedding):
        want = from_int(spec.level)
        pts = []
        for x, lsb in ordemb_levels(spec, depth).items():
            if spec.level == 0 or (lsb is not None and ord_cmp(lsb, want) >= 0):
                pts.append(x)
        return sorted(pts)
    if isinstance(spec, (BranchFamily, SwitchImage)):
        return trees.term_branches(spec.term, depth, block_bound=max(2, depth // 2))
    raise SetError("not a set spec: %r" % (spec,))


def ambient_problems(spec, space):
    """Light structural compatibility report; empty list means fine."""
    problems = []

    def interval_like(s):
        if isinstance(s, (IntervalSpace, RealLine)):
            return True
        if isinstance(s, Scaled):
            return interval_like(s.inner)
        return False

    def covers_unit(s):
        if isinstance(s, RealLine):
            return True
        if isinstance(s, IntervalSpace):
            return any(lo <= 0 and hi >= 1 for lo, hi in s.pieces)
        if isinstance(s, Scaled):
            return covers_unit(s.inner)
        return False

    if isinstance(spec, (ConvergentPackage, OrdinalEmbedding)) and not interval_like(space):
        problems.append("spec needs an interval-like ambient space")
    if isinstance(spec, OrdinalEmbedding) and interval_like(space) and not covers_unit(space):
        problems.append("embedding lives on [0, 1] but the space misses part of it")
    if isinstance(spec, (BranchFamily, SwitchImage)) and not isinstance(space, BaireSpace):
        problems.append("branch families live in Baire space")
    return problems


__all__ = [
    "SetError",
    "Empty",
    "FinitePoints",
    "ConvergentPackage",
    "OrdinalEmbedding",
    "BranchFamily",
    "SwitchImage",
    "meets",
    "meets_window",
    "cb_derivative",
    "cb_rank",
    "is_discrete",
    "homeo_image",
    "switch_apply",
    "switch_pair",
    "subtree",
    "sample_points",
    "ordemb_levels",
    "ambient_problems",
]
