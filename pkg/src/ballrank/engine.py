"""Derivative ranks of presented families over their ball codes.

A code survives one derivative step when two strictly finer codes with
disjoint closed balls survive below it, so the rank of a family is the
closure ordinal of that step over all codes whose ball meets the family.
Three routes compute it:

* finite point families on geometric spaces get a finite quotient of a
  sampled code universe (profile partition refined until the sampled
  below/apart/pair relations are stable) and the rank falls out of plain
  step iteration;
* convergent packages and ordinal embeddings keep the same quotient but
  read the rank off a content calculus: ball contents are multisets of
  atoms (isolated point, tower = tail plus its limit, ladder = tower
  minus its top) whose values jump by omega per height level;
* branch families on the aligned word presentation use a node-type graph
  with the standard rank recursion on children, index symmetry collapsing
  infinite unions to spot checks plus a declared supremum.

A truncated direct computation over explicit codes (brute_force_rank)
is the independent cross-check wherever a finite truncation level is
sound for the full rank.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cmp_to_key
from math import gcd, isqrt

from .ordinal import (
    ZERO,
    ONE,
    OMEGA,
    Ordinal,
    format_ordinal,
    from_int,
    omega_power,
    ord_add,
    ord_cmp,
    ord_min,
    ord_mul,
    ord_succ,
)
from . import sets
from . import spaces
from . import trees
from .sets import (
    BranchFamily,
    ConvergentPackage,
    Empty,
    FinitePoints,
    OrdinalEmbedding,
    SwitchImage,
)
from .spaces import (
    AmalgamSum,
    BaireSpace,
    BallId,
    FiniteSpace,
    Hedgehog,
    IntervalSpace,
    RealLine,
    extent_disjoint,
    extent_subset,
    iv_contains,
    iv_make,
    iv_subset,
    metric,
)


class EngineError(Exception):
    pass


DEFAULT_ORDINAL_CAP = ord_mul(omega_power(from_int(2)), from_int(2))

_BASE_CENTERS = 16
_LEVEL_CAP = 12
_SEQ_CAP = 4096
_WORD_BUDGET = 250000


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class ClassInfo:
    """One ball class of a quotient: its content profile and a witness."""

    ident: str
    key: object
    atoms: tuple
    representative: BallId
    size: int


@dataclass(frozen=True)
class QuotientStructure:
    classes: tuple
    info: object  # ident -> ClassInfo
    below: object  # ident -> frozenset of idents reachable strictly below
    apart: object  # ident -> frozenset of idents with disjoint closed balls
    pair_witness: object  # ident -> frozenset of frozensets {c1, c2}
    member_of: object  # BallId -> ident for every sampled code


@dataclass(frozen=True)
class DerivativeTrace:
    stages: tuple  # ((stage ordinal, frozenset of surviving idents), ...)
    final_rank: Ordinal
    stabilized_empty: bool

    def alive_at(self, stage):
        """Surviving idents at the latest recorded stage <= stage."""
        out = None
        for s, alive in self.stages:
            if ord_cmp(s, stage) <= 0:
                out = alive
        return out


@dataclass(frozen=True)
class NodeRankTable:
    ranks: object  # type key -> node value
    root: object
    idents: object  # type key -> short ident
    labels: object  # type key -> printable term


class DepthBound(int):
    """A truncation level together with the argument that produced it."""

    def __new__(cls, value, derivation, sound_for_rank=True):
        obj = super().__new__(cls, value)
        obj.derivation = derivation
        obj.sound_for_rank = sound_for_rank
        return obj


# ---------------------------------------------------------------------------
# content calculus
#
# Atoms name what a ball can see of the family: ("P", pos) an isolated
# point, ("T", b, pos) a height-b tower (tail plus its limit at pos),
# ("L", b, pos) the same tower with the limit excluded because it sits
# exactly on the ball's open edge.


def _tower_value(b):
    v = ZERO
    for _ in range(b):
        v = ord_add(v, OMEGA)
    return v


def _atom_value(atom):
    if atom[0] == "P":
        return ZERO
    return _tower_value(atom[1])


def _fnu(offsets):
    """Value of the min-combine game on finite start offsets.

    Largest d such that a binary combining tree has enough leaves: the
    total weight sum 2^min(f, d) must reach 2^d.
    """
    d = 0
    cap = max(offsets) + len(offsets).bit_length() + 2
    while sum(2 ** min(f, d + 1) for f in offsets) >= 2 ** (d + 1):
        d += 1
        if d > cap:
            raise EngineError("offset game failed to settle")
    return d


def _band_split(v):
    deg = 0
    off = 0
    for exp, coeff in v.terms:
        if exp == ZERO:
            off = coeff
        elif exp == ONE:
            deg = coeff
        else:
            raise EngineError("content value outside the omega^2 window")
    return deg, off


def nu_of_atoms(atoms):
    """Rank of a code with the given ball content, None when empty.

    Pairs across different omega-bands and splits tapping a tower's
    inner supply are dominated by single-band play, so the exact value
    is the best band: omega*deg plus the finite game on its offsets.
    """
    if not atoms:
        return None
    values = [_atom_value(a) for a in atoms]
    best = values[0]
    for v in values[1:]:
        if ord_cmp(v, best) > 0:
            best = v
    bands = {}
    for v in values:
        deg, off = _band_split(v)
        bands.setdefault(deg, []).append(off)
    for deg, offs in bands.items():
        cand = ord_add(ord_mul(OMEGA, from_int(deg)), from_int(_fnu(offs)))
        if ord_cmp(cand, best) > 0:
            best = cand
    return best


# ---------------------------------------------------------------------------
# ball contents


def _merge_atoms(raw):
    """Collapse atoms sharing a position; the heaviest reading wins.

    Pieces anchored at one position share their accumulation point, so
    two of them can never sit in disjoint closed balls and must count
    once.
    """
    best = {}
    for atom in raw:
        pos = atom[-1]
        prev = best.get(pos)
        if prev is None:
            best[pos] = atom
            continue
        ka = (0, False) if atom[0] == "P" else (atom[1], atom[0] == "T")
        kp = (0, False) if prev[0] == "P" else (prev[1], prev[0] == "T")
        if ka > kp:
            best[pos] = atom
    return tuple(sorted(best.values(), key=repr))


def _seq_positions_in(anchor, coeff, iv):
    out = []
    for n in range(_SEQ_CAP):
        pos = anchor + coeff * Fraction(1, 2 ** n)
        if iv_contains(iv, pos):
            out.append(pos)
        elif (coeff > 0 and pos <= iv.lo) or (coeff < 0 and pos >= iv.hi):
            return out
    raise EngineError("sequence window did not close")


def _conv_atoms(spec, ivs):
    raw = []
    points = set()
    for iv in ivs:
        for x in spec.points:
            if iv_contains(iv, x):
                points.add(x)
        for anchor, coeff in spec.sequences:
            tail_side = (coeff > 0 and iv.hi > anchor) or (
                coeff < 0 and iv.lo < anchor
            )
            if iv_contains(iv, anchor):
                if tail_side:
                    raw.append(("T", 1, anchor))
                else:
                    points.add(anchor)
                continue
            on_edge = (coeff > 0 and iv.lo == anchor and iv.lo_open) or (
                coeff < 0 and iv.hi == anchor and iv.hi_open
            )
            if on_edge and tail_side:
                raw.append(("L", 1, anchor))
                continue
            if (coeff > 0 and iv.hi <= anchor) or (coeff < 0 and iv.lo >= anchor):
                continue
            points.update(_seq_positions_in(anchor, coeff, iv))
    raw.extend(("P", x) for x in points)
    return _merge_atoms(raw)


def _slot(lo, hi, n):
    width = hi - lo
    return (
        lo + width * (1 - Fraction(1, 2 ** n)),
        lo + width * (1 - Fraction(1, 2 ** (n + 1))),
    )


def _cell_atoms(b, d, lo, hi, iv, out):
    """Atoms of the tower cell (lo, hi] of height b at derivative level d."""
    cell = iv_make(lo, True, hi, False)
    inter = spaces._iv_intersect(cell, iv)
    if inter is None or b < d:
        return
    if iv_subset(cell, iv):
        out.append(("T", b - d, hi) if b > d else ("P", hi))
        return
    if inter.lo == hi:
        # the overlap grabs nothing but the top point
        out.append(("P", hi))
        return
    if b == d or b == 0:
        if iv_contains(iv, hi):
            out.append(("P", hi))
        return
    for n in range(512):
        s_lo, s_hi = _slot(lo, hi, n)
        if iv_subset(iv_make(s_lo, True, hi, False), iv):
            out.append(("T", b - d, hi))
            return
        if iv_subset(iv_make(s_lo, True, hi, True), iv):
            out.append(("L", b - d, hi))
            return
        if s_lo > iv.hi or (s_lo == iv.hi and iv.hi_open):
            return
        sub = iv_make(s_lo, True, s_hi, False)
        if spaces._iv_intersect(sub, iv) is not None:
            if iv_subset(sub, iv):
                if b - 1 > d:
                    out.append(("T", b - 1 - d, s_hi))
                elif b - 1 == d:
                    out.append(("P", s_hi))
            else:
                _cell_atoms(b - 1, d, s_lo, s_hi, iv, out)
    raise EngineError("cell descent did not resolve")


def _ordemb_atoms(spec, ivs):
    alpha = spec.alpha.to_int()
    d = spec.level
    out = []
    for iv in ivs:
        if d == 0 and iv_contains(iv, Fraction(0)):
            out.append(("P", Fraction(0)))
        for j in range(spec.copies):
            _cell_atoms(
                alpha,
                d,
                Fraction(j, spec.copies),
                Fraction(j + 1, spec.copies),
                iv,
                out,
            )
    return _merge_atoms(out)


def _atoms_for(space, F, extent):
    if extent is None:
        return ()
    if isinstance(F, (BranchFamily, SwitchImage)):
        # cylinders are nested or disjoint, so a meets-marker is the
        # whole content story on the word space
        if spaces._is_pt(extent):
            ok = trees.term_contains_branch(F.term, extent[1])
        else:
            ok = not trees.subtree_word(F.term, extent).is_dead()
        return (("W", extent),) if ok else ()
    if isinstance(F, FinitePoints):
        return tuple(
            sorted(
                (
                    ("P", x)
                    for x in set(F.points)
                    if spaces.extent_contains(space, extent, x)
                ),
                key=repr,
            )
        )
    ivs = sets._extent_ivs(space, extent)
    if isinstance(F, ConvergentPackage):
        return _conv_atoms(F, ivs)
    if isinstance(F, OrdinalEmbedding):
        return _ordemb_atoms(F, ivs)
    raise EngineError("no content rule for %r" % (F,))


# ---------------------------------------------------------------------------
# dense-rule index arithmetic
#
# The center cover never scans the dense enumerations point by point;
# every wanted center is found by inverting the rule: Stern-Brocot for a
# small-denominator rational inside a window, then an exact count of the
# enumeration positions before it.


def _pair_nat(a, b):
    s = a + b
    return s * (s + 1) // 2 + b


def _fast_unpair(j):
    s = (isqrt(8 * j + 1) - 1) // 2
    while (s + 1) * (s + 2) // 2 <= j:
        s += 1
    k = j - s * (s + 1) // 2
    return s - k, k


def _fast_decode(n):
    out = []
    while n > 0:
        a, n = _fast_unpair(n - 1)
        out.append(a)
    return tuple(out)


def _simplest_in(lo, hi):
    """A smallest-denominator rational strictly inside (lo, hi)."""
    if lo >= hi:
        return None
    lo, hi = Fraction(lo), Fraction(hi)
    fl = lo.numerator // lo.denominator
    if lo < fl + 1 < hi:
        return Fraction(fl + 1)
    if lo == fl:
        inv = 1 / (hi - fl)
        k = inv.numerator // inv.denominator + 1
        return fl + Fraction(1, k)
    inner = _simplest_in(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def _unit_frac_index(fr, include_zero):
    """Position of a canonical rational of [0,1] in denominator order."""
    num, den = fr.numerator, fr.denominator
    pos = 0
    for d in range(1, den):
        if d == 1:
            pos += 2 if include_zero else 1
        else:
            pos += sum(1 for n in range(1, d) if gcd(n, d) == 1)
    if den == 1:
        return pos + (num if include_zero else num - 1)
    return pos + sum(1 for n in range(1, num) if gcd(n, den) == 1)


def _interval_center_index(space, rule, piece_idx, frac):
    include_zero = rule == "farey"
    zero_pairs = set()
    if not include_zero:
        for t, (plo, phi) in enumerate(space.pieces):
            if plo == phi:
                if plo == 0:
                    zero_pairs.add((t, 0))
            elif plo <= 0 <= phi:
                zero_pairs.add(
                    (t, _unit_frac_index(Fraction(-plo, phi - plo), True))
                )
    lo, hi = space.pieces[piece_idx]
    inner = 0 if lo == hi else _unit_frac_index(frac, True)
    if (piece_idx, inner) in zero_pairs:
        raise EngineError("the zero-skipping rule never enumerates this point")
    seen = 0
    for rnd in range(inner + len(space.pieces) + 2):
        for t, (plo, phi) in enumerate(space.pieces):
            if t > rnd:
                break
            j = rnd - t
            if plo == phi and j > 0:
                continue
            if (t, j) in zero_pairs:
                continue
            if t == piece_idx and j == inner:
                return seen
            seen += 1
    raise EngineError("interval index simulation overran")


def _line_index(value, rule):
    q = Fraction(value)
    if rule == "spiral-offset":
        q = q - Fraction(1, 3)
    if q == 0:
        return 0
    num, den = abs(q).numerator, abs(q).denominator
    s = num + den
    j = 0
    for s2 in range(2, s):
        j += sum(1 for n in range(1, s2) if gcd(n, s2 - n) == 1)
    j += sum(1 for n in range(1, num) if gcd(n, s - n) == 1)
    return 1 + 2 * j + (1 if q < 0 else 0)


def _baire_indices(words, tail, budget=_WORD_BUDGET):
    """Indices of the dense points with the given (normalized) words."""
    want = set(words)
    found = {}
    seen = 0
    n = 0
    while want - set(found) and n <= budget:
        w = _fast_decode(n)
        if not w or w[-1] != tail:
            if w in want:
                found[w] = seen
            seen += 1
        n += 1
    return found


def _space_card(space):
    if isinstance(space, FiniteSpace):
        return space.size()
    if isinstance(space, spaces.Scaled):
        return _space_card(space.inner)
    return None


def _amalgam_index(space, comp, inner_pt):
    k = len(space.parts)
    inner_space = space.parts[comp][0]
    inner_j = _point_index(inner_space, spaces.default_rule(inner_space), inner_pt)
    seen = 0
    for cand in range((inner_j + 2) * k):
        t, j = cand % k, cand // k
        card = _space_card(space.parts[t][0])
        if card is not None and j >= card:
            continue
        if t == comp and j == inner_j:
            return seen
        seen += 1
    raise EngineError("amalgam index simulation overran")


def _point_index(space, rule, x):
    """Index of an exact space point under the named dense rule."""
    if isinstance(space, FiniteSpace):
        if not 0 <= x < space.size():
            raise EngineError("point %r outside the space" % (x,))
        return x if rule == "all" else space.size() - 1 - x
    if isinstance(space, IntervalSpace):
        fx = Fraction(x)
        for t, (lo, hi) in enumerate(space.pieces):
            if lo <= fx <= hi:
                frac = Fraction(0) if lo == hi else Fraction(fx - lo, hi - lo)
                return _interval_center_index(space, rule, t, frac)
        raise EngineError("point %r outside the space" % (x,))
    if isinstance(space, RealLine):
        return _line_index(x, rule)
    if isinstance(space, Hedgehog):
        spine, radial = x
        if radial == 0:
            return 0
        k = _unit_frac_index(Fraction(radial), False)
        a, b = (spine, k) if rule == "dovetail" else (k, spine)
        return 1 + _pair_nat(a, b)
    if isinstance(space, BaireSpace):
        word, btail = trees._norm_branch(*x)
        tail = 0 if rule == "ev0" else 1
        if btail != tail:
            raise EngineError("branch tail outside this enumeration")
        got = _baire_indices({word}, tail)
        if word not in got:
            raise EngineError("word index beyond the enumeration budget")
        return got[word]
    if isinstance(space, AmalgamSum):
        comp, inner = x
        return _amalgam_index(space, comp, inner)
    if isinstance(space, spaces.Scaled):
        return _point_index(space.inner, rule, x)
    raise EngineError("no center index rule for %r" % (space,))


def _window_center(space, rule, lo, hi):
    """(index, value) of a dense point strictly inside (lo, hi), if any."""
    if isinstance(space, IntervalSpace):
        for t, (plo, phi) in enumerate(space.pieces):
            cands = []
            if plo == phi:
                cands.append(Fraction(plo))
            else:
                q = _simplest_in(max(lo, Fraction(plo)), min(hi, Fraction(phi)))
                if q is not None:
                    cands.append(q)
                cands.extend((Fraction(plo), Fraction(phi)))
            for c in cands:
                if lo < c < hi and plo <= c <= phi:
                    if c == 0 and rule == "farey-nozero":
                        continue
                    return _point_index(space, rule, c), c
        return None
    if isinstance(space, RealLine):
        off = Fraction(1, 3) if rule == "spiral-offset" else Fraction(0)
        q = _simplest_in(lo - off, hi - off)
        if q is None:
            return None
        return _line_index(q + off, rule), q + off
    return None


# ---------------------------------------------------------------------------
# the center cover and the sampled universe


def _strip(space):
    while isinstance(space, spaces.Scaled):
        space = space.inner
    return space


def _unscaled(p):
    """(base space, level radius in base coordinates) behind any scaling."""
    space = p.space
    factor = Fraction(1)
    while isinstance(space, spaces.Scaled):
        factor *= space.factor
        space = space.inner

    def rad(k):
        return p.radius(k) / factor

    return space, rad


def _special_points(p, F):
    space, _ = _unscaled(p)
    if isinstance(F, FinitePoints):
        pts = list(dict.fromkeys(F.points))
    elif isinstance(F, ConvergentPackage):
        pts = list(F.points)
        for anchor, coeff in F.sequences:
            pts.append(anchor)
            pts.extend(anchor + coeff * Fraction(1, 2 ** n) for n in range(5))
    elif isinstance(F, OrdinalEmbedding):
        pts = sorted(sets.ordemb_levels(F, depth=0))
    else:
        pts = []
    if isinstance(space, Hedgehog):
        pts.append(spaces.hh_point(0, 0))
    seen, out = set(), []
    for x in pts:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _skeleton(term, cap=4096):
    """(witness branches, deepest branching word depth) of a term.

    The walk samples one symbol per singleton head class, two per larger
    class, and three spot blocks per indexed union; every sampled pair
    of incomparable branches survives to the recorded depth, so covering
    these branches covers every derivative step below that depth.
    """
    out = []
    seen = set()
    deepest = [0]

    def walk(t, prefix):
        if len(out) > cap or len(prefix) > 48:
            raise EngineError("witness branch skeleton grew out of bounds")
        if t.is_dead():
            return
        if trees.is_single_branch(t):
            word, tail = trees.single_branch_of(t)
            br = trees._norm_branch(tuple(prefix) + word, tail)
            if br not in seen:
                seen.add(br)
                out.append(br)
            return
        plain, specs = _flatten_members(t)
        targets = []
        if plain:
            base = plain[0] if len(plain) == 1 else trees.union(*plain)
            try:
                classes = trees.head_classes(base)
            except trees.UnsupportedTermError as exc:
                raise EngineError(
                    "type graph not finite modulo symmetry: %s" % exc
                )
            for hc in classes:
                for a in hc.sample_symbols(1 if hc.count == 1 else 2):
                    child = trees.subtree(base, a)
                    if not child.is_dead():
                        targets.append((a, child))
        for _sup, build, head, _locate in specs:
            for i in (0, 1, 2):
                targets.append((head(i), build(i)))
        if len(targets) > 1:
            deepest[0] = max(deepest[0], len(prefix))
        for a, child in targets:
            walk(child, prefix + [a])

    walk(term, [])
    return out, deepest[0]


def _branch_specials(F):
    if isinstance(F, FinitePoints):
        return [trees._norm_branch(*x) for x in F.points]
    if isinstance(F, (BranchFamily, SwitchImage)):
        return _skeleton(F.term)[0]
    return []


def _window_slices(lo, hi, edges=True):
    """The window itself plus thin slices at both edges.

    Witness balls often need extremal positions inside a window: their
    apartness cut against a neighbouring ball is decided by the closed
    extent endpoint, and only near-edge centers realize the extreme
    cuts.  Slices keep that freedom without enumerating a full grid.
    Edge slices matter only for finite point families; accumulation
    families sample enough deep centers on their own, and the extra
    asymmetric centers would shatter their class structure.
    """
    if not edges:
        return ((lo, hi),)
    w = hi - lo
    return ((lo, hi), (lo, lo + w / 8), (hi - w / 8, hi))


def _center_cover(p, F, K):
    space, rad = _unscaled(p)
    cover = {}

    def put(i, x):
        if i not in cover:
            cover[i] = x

    if isinstance(space, FiniteSpace):
        for i in range(space.size()):
            put(i, p.anchor(i))
        return cover
    if isinstance(space, BaireSpace):
        tail = 0 if p.rule == "ev0" else 1
        want = set()
        for word, btail in _branch_specials(F):
            full = tuple(word) + (btail,) * (K + 1)
            for L in range(len(full) + 1):
                want.add(trees._norm_branch(full[:L], tail)[0])
        for w, i in _baire_indices(want, tail).items():
            put(i, (w, tail))
        for i in range(4):
            put(i, p.anchor(i))
        return cover
    for i in range(_BASE_CENTERS):
        put(i, p.anchor(i))
    edges = isinstance(F, FinitePoints)
    specials = _special_points(p, F)
    for y in specials:
        try:
            put(_point_index(space, p.rule, y), y)
        except EngineError:
            pass
    if isinstance(space, (IntervalSpace, RealLine)):
        vals = sorted({Fraction(y) for y in specials})
        for a in range(len(vals)):
            for b in range(a + 1, len(vals)):
                y1, y2 = vals[a], vals[b]
                for k in range(K + 1):
                    r = rad(k)
                    if 2 * r <= y2 - y1:
                        break
                    for wlo, whi in _window_slices(y2 - r, y1 + r, edges):
                        got = _window_center(space, p.rule, wlo, whi)
                        if got is not None:
                            put(*got)
    elif isinstance(space, Hedgehog):
        for a in range(len(specials)):
            for b in range(a + 1, len(specials)):
                (s1, t1), (s2, t2) = specials[a], specials[b]
                if (t1 == 0 and t2 == 0) or (s1 != s2 and t1 != 0 and t2 != 0):
                    continue
                sp = s1 if t1 != 0 else s2
                for k in range(K + 1):
                    r = rad(k)
                    lo, hi = max(t1, t2) - r, min(t1, t2) + r
                    if lo >= hi:
                        break
                    for wlo, whi in _window_slices(lo, hi, edges):
                        q = _simplest_in(
                            max(wlo, Fraction(0)), min(whi, Fraction(1))
                        )
                        for c in ([q] if q is not None else []) + [Fraction(1)]:
                            if wlo < c < whi and 0 < c <= 1:
                                put(
                                    _point_index(space, p.rule, (sp, c)),
                                    spaces.hh_point(sp, c),
                                )
                                break
    elif isinstance(space, AmalgamSum):
        _amalgam_windows(space, p.rule, rad, specials, K, put, edges)
    return cover


def _amalgam_windows(space, rule, rad, specials, K, put, edges):
    comp_pts = {}
    for comp, inner_pt in specials:
        comp_pts.setdefault(comp, []).append(inner_pt)
    for comp, pts in comp_pts.items():
        inner = space.parts[comp][0]
        if not isinstance(inner, IntervalSpace):
            continue
        anchor = Fraction(space.parts[comp][1])
        targets = sorted({Fraction(x) for x in pts})
        for a in range(len(targets)):
            for b in range(a + 1, len(targets)):
                y1, y2 = targets[a], targets[b]
                for k in range(K + 1):
                    r = rad(k)
                    if 2 * r <= y2 - y1:
                        break
                    for wlo, whi in _window_slices(y2 - r, y1 + r, edges):
                        got = _window_center(
                            inner, spaces.default_rule(inner), wlo, whi
                        )
                        if got is not None:
                            put(
                                _point_index(space, rule, (comp, got[1])),
                                (comp, got[1]),
                            )
        # windows whose ball also reaches a point in another component
        for other, opts in comp_pts.items():
            if other == comp:
                continue
            bridge = Fraction(space.parts[comp][2]) + Fraction(
                space.parts[other][2]
            )
            o_inner = space.parts[other][0]
            o_anchor = space.parts[other][1]
            for y2 in opts:
                const = bridge + metric(o_inner, o_anchor, y2)
                for y1 in targets:
                    for k in range(K + 1):
                        r = rad(k)
                        if r <= const:
                            break
                        lo = max(y1 - r, anchor - (r - const))
                        hi = min(y1 + r, anchor + (r - const))
                        if lo >= hi:
                            continue
                        for wlo, whi in _window_slices(lo, hi, edges):
                            got = _window_center(
                                inner, spaces.default_rule(inner), wlo, whi
                            )
                            if got is not None:
                                put(
                                    _point_index(space, rule, (comp, got[1])),
                                    (comp, got[1]),
                                )


class _Universe:
    """Sampled codes with cached extents, contents, and relations."""

    def __init__(self, p, F, K):
        self.p = p
        self.F = F
        self.K = K
        space = p.space
        self.codes = []
        self.profile = {}
        self._open = []
        self._closed = []
        for i, x in sorted(_center_cover(p, F, K).items()):
            for k in range(K + 1):
                oe = spaces.ball_extent(space, x, p.radius(k), False)
                open_atoms = _atoms_for(space, F, oe)
                if not open_atoms:
                    continue
                ce = spaces.ball_extent(space, x, p.radius(k), True)
                self.codes.append(BallId(i, k))
                self._open.append(oe)
                self._closed.append(ce)
                self.profile[BallId(i, k)] = (
                    open_atoms,
                    _atoms_for(space, F, ce),
                )
        n = len(self.codes)
        self.below = [0] * n
        self.apart = [0] * n
        for a in range(n):
            for b in range(n):
                if self.codes[b].level > self.codes[a].level and extent_subset(
                    space, self._closed[b], self._open[a]
                ):
                    self.below[a] |= 1 << b
            for b in range(a + 1, n):
                if extent_disjoint(space, self._closed[a], self._closed[b]):
                    self.apart[a] |= 1 << b
                    self.apart[b] |= 1 << a

    def open_extent(self, idx):
        return self._open[idx]


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# quotient construction


def _norm_inputs(p, F):
    if p.homeo is not None:
        F = sets.homeo_image(F, p.homeo)
        p = replace(p, homeo=None)
    return p, F


def _class_masks(cls, n):
    masks = {}
    for i in range(n):
        c = cls[i]
        masks[c] = masks.get(c, 0) | (1 << i)
    return masks


def _pair_classes(u, cls, below, masks):
    """Class pairs with an apart witness inside the given below-mask."""
    pairs = set()
    for ca, m in masks.items():
        hit = m & below
        if not hit:
            continue
        acc = 0
        for x in _bits(hit):
            acc |= u.apart[x]
        acc &= below
        tgt = 0
        for y in _bits(acc):
            tgt |= 1 << cls[y]
        for cb in _bits(tgt):
            pairs.add((ca, cb) if ca <= cb else (cb, ca))
    return frozenset(pairs)


def _refine_classes(u):
    """Profile partition refined by pair-witness class sets until stable.

    Survival of a code under one derivative step is a function of its
    pair-class set and the alive classes alone, so this signature is the
    whole congruence story; class views of the raw below/apart relations
    would only split on sampling-depth artifacts.  Singleton classes can
    never split further and skip the pair computation.
    """
    codes = u.codes
    n = len(codes)
    cls = []
    order = {}
    for i, c in enumerate(codes):
        key = u.profile[c]
        if key not in order:
            order[key] = len(order)
        cls.append(order[key])
    for _ in range(n + 2):
        masks = _class_masks(cls, n)
        sigs = {}
        new = []
        for i in range(n):
            c = cls[i]
            if masks[c].bit_count() == 1:
                sig = (c, None)
            else:
                sig = (c, _pair_classes(u, cls, u.below[i], masks))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new.append(sigs[sig])
        if new == cls:
            return cls
        cls = new
    raise EngineError("class refinement did not stabilize")


def _quotient_depth(p, F):
    if isinstance(F, OrdinalEmbedding):
        pts = sorted(sets.ordemb_levels(F, depth=0))
        gap = _min_gap(p.space, pts)
        return min(_level_for(p, gap or Fraction(1)) + 2, _LEVEL_CAP)
    return min(int(witness_depth_bound(p, F)), _LEVEL_CAP)


_GEOMETRIC_SPACES = (FiniteSpace, IntervalSpace, RealLine, Hedgehog, AmalgamSum)


def _empty_quotient():
    return QuotientStructure((), {}, {}, {}, {}, {})


def _check_ordemb(F):
    if not (F.alpha.is_finite() and F.alpha.to_int() <= 3):
        raise EngineError(
            "ordinal embeddings are supported up to height 3; higher "
            "levels are out of scope"
        )


def build_quotient(p, F):
    """Finite class structure over the sampled code universe of (p, F)."""
    p, F = _norm_inputs(p, F)
    if isinstance(F, Empty):
        return _empty_quotient()
    if not isinstance(_strip(p.space), _GEOMETRIC_SPACES):
        raise EngineError("quotients cover geometric presentations only")
    if not isinstance(F, (FinitePoints, ConvergentPackage, OrdinalEmbedding)):
        raise EngineError("no quotient rule for %r" % (F,))
    if isinstance(F, OrdinalEmbedding):
        _check_ordemb(F)
    problems = sets.ambient_problems(F, p.space)
    if problems:
        raise EngineError("; ".join(problems))
    u = _Universe(p, F, _quotient_depth(p, F))
    if not u.codes:
        return _empty_quotient()
    cls = _refine_classes(u)
    masks = _class_masks(cls, len(u.codes))
    by_cls = {}
    for i in range(len(u.codes)):
        by_cls.setdefault(cls[i], []).append(i)
    idents = {}
    for rank, key in enumerate(sorted(by_cls, key=lambda c: min(by_cls[c]))):
        idents[key] = "c%d" % rank
    info = {}
    below_t = {}
    apart_t = {}
    witness_t = {}
    member_of = {}
    for key, members in by_cls.items():
        ident = idents[key]
        rep = min(members)
        ball = u.codes[rep]
        info[ident] = ClassInfo(
            ident=ident,
            key=u.profile[ball],
            atoms=u.profile[ball][0],
            representative=ball,
            size=len(members),
        )
        b_set = set()
        a_set = set()
        for i in members:
            member_of[u.codes[i]] = ident
            b_set.update(idents[cls[j]] for j in _bits(u.below[i]))
            a_set.update(idents[cls[j]] for j in _bits(u.apart[i]))
        pairs = _pair_classes(u, cls, u.below[rep], masks)
        below_t[ident] = frozenset(b_set)
        apart_t[ident] = frozenset(a_set)
        witness_t[ident] = frozenset(
            frozenset((idents[ca], idents[cb])) for ca, cb in pairs
        )
    classes = tuple(sorted(idents.values(), key=lambda s: int(s[1:])))
    return QuotientStructure(classes, info, below_t, apart_t, witness_t, member_of)


def dp_step(q, alive):
    """One derivative step on quotient classes."""
    alive = frozenset(alive)
    unknown = alive - set(q.classes)
    if unknown:
        raise EngineError("unknown classes %s" % sorted(unknown))
    return frozenset(
        c for c in alive if any(pr <= alive for pr in q.pair_witness.get(c, ()))
    )


# ---------------------------------------------------------------------------
# traces


def _trace_from_steps(alive_seq):
    rows = tuple((from_int(d), alive) for d, alive in enumerate(alive_seq))
    return DerivativeTrace(rows, from_int(len(alive_seq) - 1), True)


def _trace_from_nu(nu_by_ident):
    if not nu_by_ident:
        return DerivativeTrace(((ZERO, frozenset()),), ZERO, True)
    values = []
    for v in nu_by_ident.values():
        if all(ord_cmp(v, w) != 0 for w in values):
            values.append(v)
    top = values[0]
    for v in values[1:]:
        if ord_cmp(v, top) > 0:
            top = v
    stage_list = [ZERO]
    stage_list.extend(ord_succ(v) for v in values)
    for i in (1, 2, 3):
        lam = ord_mul(OMEGA, from_int(i))
        if ord_cmp(lam, top) <= 0:
            stage_list.append(lam)
    uniq = []
    for s in stage_list:
        if all(ord_cmp(s, t) != 0 for t in uniq):
            uniq.append(s)
    uniq.sort(key=cmp_to_key(ord_cmp))
    rows = []
    prev = None
    for s in uniq:
        alive = frozenset(c for c, v in nu_by_ident.items() if ord_cmp(v, s) >= 0)
        if alive != prev or s.is_limit():
            rows.append((s, alive))
            prev = alive
    return DerivativeTrace(tuple(rows), ord_succ(top), True)


def trace_csv(trace):
    lines = ["stage,alive,classes"]
    for stage, alive in trace.stages:
        lines.append(
            "%s,%d,%s"
            % (format_ordinal(stage), len(alive), ";".join(sorted(alive)))
        )
    return "\n".join(lines) + "\n"


_DOT_PALETTE = (
    "#4c78a8",
    "#f58518",
    "#54a24b",
    "#e45756",
    "#72b7b2",
    "#eeca3b",
    "#b279a2",
    "#9d755d",
)


def quotient_dot(q, trace=None):
    """DOT rendering of the class graph, colored by death stage."""
    death = {}
    if trace is not None:
        for idx, (stage, alive) in enumerate(trace.stages):
            for c in q.classes:
                if c not in alive and c not in death:
                    death[c] = (idx, format_ordinal(stage))
    lines = ["digraph quotient {", "  rankdir=LR;"]
    for c in q.classes:
        info = q.info[c]
        label = "%s (%d codes, %d atoms)" % (c, info.size, len(info.atoms))
        idx, stage = death.get(c, (len(_DOT_PALETTE) - 1, "survives"))
        if trace is not None:
            label += "\\ndies at %s" % stage
        lines.append(
            '  "%s" [label="%s", style=filled, fillcolor="%s"];'
            % (c, label, _DOT_PALETTE[idx % len(_DOT_PALETTE)])
        )
    for c in q.classes:
        for d in sorted(q.below.get(c, ())):
            lines.append('  "%s" -> "%s";' % (c, d))
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the branch-term engine


def _flatten_members(term, maps=()):
    """Union members of a node with Subst wrappers pushed inward.

    Returns (plain terms, indexed union specs); a spec is (declared
    supremum, block builder, head symbol, head locator) with the
    wrapping symbol maps composed in, innermost first.
    """
    if isinstance(term, trees.UnionFin):
        plain, specs = [], []
        for m in term.members:
            got_p, got_s = _flatten_members(m, maps)
            plain.extend(got_p)
            specs.extend(got_s)
        return plain, specs
    if isinstance(term, trees.Subst):
        return _flatten_members(term.inner, (term.map,) + maps)
    if isinstance(term, trees.IndexedPrimeUnion):

        def build(i, _t=term, _m=maps):
            out = _t.builder(i)
            for mp in _m:
                out = trees.subst(mp, out)
            return out

        def head(i, _t=term, _m=maps):
            h = _t.head(i)
            for mp in _m:
                h = mp.apply(h)
            return h

        def locate(x, _t=term, _m=maps):
            for mp in reversed(_m):
                x = mp.invert(x)
                if x is None:
                    return None
            return _t.locate(x)

        return [], [(term.declared_sup, build, head, locate)]
    out = term
    for mp in maps:
        out = trees.subst(mp, out)
    return ([out] if not out.is_dead() else []), []


def _tree_children(term):
    """(entries, family): entries are (count flag, child term); flag 2
    means at least two symbols share the child type.  family carries an
    indexed union's declared supremum and its spot blocks."""
    entries = []
    family = None
    plain, specs = _flatten_members(term)
    if len(specs) > 1:
        raise EngineError("at most one indexed union per node is supported")
    base = None
    classes = ()
    if plain:
        base = plain[0] if len(plain) == 1 else trees.union(*plain)
        try:
            classes = trees.head_classes(base)
        except trees.UnsupportedTermError as exc:
            raise EngineError("type graph not finite modulo symmetry: %s" % exc)
        for hc in classes:
            a = hc.sample_symbols(1)[0]
            child = trees.subtree(base, a)
            if child.is_dead():
                continue
            entries.append((1 if hc.count == 1 else 2, child))
    if specs:
        sup, build, head, locate = specs[0]
        for hc in classes:
            for a in hc.sample_symbols(1 if hc.count == 1 else 2):
                if locate(a) is not None:
                    raise EngineError(
                        "indexed union heads collide with the rest"
                    )
        spots = []
        for i in (0, 1, 2):
            if base is not None and not trees.subtree(base, head(i)).is_dead():
                raise EngineError("indexed union heads collide with the rest")
            spots.append(build(i))
        for block in spots:
            entries.append((1, block))
        family = (sup, tuple(spots))
    return entries, family


def _tree_graph(term):
    root_key = trees.term_key_renamed(term)
    nodes = {}
    labels = {}
    work = [(root_key, term)]
    while work:
        key, t = work.pop()
        if key in nodes:
            continue
        labels[key] = str(t)
        if trees.is_single_branch(t):
            nodes[key] = {"entries": (), "family": None}
            continue
        entries, family = _tree_children(t)
        ent_keys = []
        for flag, child in entries:
            ck = trees.term_key_renamed(child)
            ent_keys.append((flag, ck))
            work.append((ck, child))
        fam = None
        if family is not None:
            sup, spots = family
            spot_keys = tuple(trees.term_key_renamed(b) for b in spots)
            work.extend(zip(spot_keys, spots))
            fam = (sup, spot_keys)
        nodes[key] = {"entries": tuple(ent_keys), "family": fam}
        if len(nodes) > 400:
            raise EngineError("type graph not finite modulo symmetry")
    return root_key, nodes, labels


def _family_candidates(fam, nu, others):
    sup, spot_keys = fam
    v0, v1, v2 = (nu[k] for k in spot_keys)
    cands = []
    if ord_cmp(v0, v1) == 0 and ord_cmp(v1, v2) == 0:
        # constant block pattern: infinitely many blocks of one value
        cands.append(ord_succ(v0))
        for x in others:
            cands.append(ord_succ(ord_min(v0, x)))
    elif ord_cmp(v0, v1) < 0 and ord_cmp(v1, v2) < 0:
        # strictly increasing: the declared supremum is the limit value
        cands.append(sup)
        for x in others:
            cands.append(ord_succ(x) if ord_cmp(x, sup) < 0 else sup)
    else:
        raise EngineError(
            "indexed union block values are neither constant nor increasing"
        )
    return cands


def _tree_nu(nodes):
    """Node values, children first; cyclic dependencies are rejected so
    the family patterns are judged on settled values only."""
    nu = {}
    state = {}
    for start in nodes:
        stack = [start]
        while stack:
            k = stack[-1]
            if state.get(k) == 2:
                stack.pop()
                continue
            state[k] = 1
            pending = [
                ck for _, ck in nodes[k]["entries"] if state.get(ck) != 2
            ]
            if any(state.get(ck) == 1 for ck in pending):
                raise EngineError("type graph has cyclic dependencies")
            if pending:
                stack.extend(pending)
                continue
            node = nodes[k]
            vals = [nu[ck] for _, ck in node["entries"]]
            cands = [ZERO]
            for flag, ck in node["entries"]:
                cands.append(nu[ck])
                if flag >= 2:
                    cands.append(ord_succ(nu[ck]))
            for a in range(len(vals)):
                for b in range(a + 1, len(vals)):
                    cands.append(ord_succ(ord_min(vals[a], vals[b])))
            if node["family"] is not None:
                cands.extend(_family_candidates(node["family"], nu, vals))
            best = cands[0]
            for v in cands[1:]:
                if ord_cmp(v, best) > 0:
                    best = v
            nu[k] = best
            state[k] = 2
            stack.pop()
    return nu


def _require_tree_presentation(p):
    if not isinstance(p.space, BaireSpace) or p.schedule.name != "aligned":
        raise EngineError(
            "branch families need the aligned schedule on the word space"
        )


def tree_rank(F, p):
    """Rank of a branch family via the node-type recursion.

    Returns (rank, NodeRankTable); the root carries the maximal node
    value and the family rank is its successor.
    """
    if not isinstance(F, (BranchFamily, SwitchImage)):
        raise EngineError("tree_rank expects a branch set spec")
    _require_tree_presentation(p)
    term = F.term
    if term.is_dead():
        return ZERO, NodeRankTable({}, None, {}, {})
    root, nodes, labels = _tree_graph(term)
    nu = _tree_nu(nodes)
    idents = {
        k: "t%d" % i for i, k in enumerate(sorted(nu, key=lambda k: labels[k]))
    }
    return ord_succ(nu[root]), NodeRankTable(nu, root, idents, labels)


# ---------------------------------------------------------------------------
# witness depth and the truncated oracle


def _min_gap(space, pts):
    best = None
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            d = metric(space, pts[a], pts[b])
            if d > 0 and (best is None or d < best):
                best = d
    return best


def _level_for(p, bound):
    for k in range(64):
        if 2 * p.radius(k) < bound:
            return k
    raise EngineError("the radius schedule never resolves the gap")


def _branching_depth(term):
    if trees.contains_indexed_union(term):
        raise EngineError(
            "no finite witness depth for indexed unions; their rank "
            "is computed symbolically instead"
        )
    return _skeleton(term)[1]


def witness_depth_bound(p, F):
    """A truncation level at which the sampled relations are faithful.

    The derivation rides on the value.  Bounds for convergent packages
    and ordinal embeddings cover the finite stages and the congruence
    sampling only, never the transfinite tail, and say so.
    """
    p, F = _norm_inputs(p, F)
    if isinstance(F, Empty):
        return DepthBound(0, "empty family: no codes at any level")
    if isinstance(F, FinitePoints):
        pts = list(dict.fromkeys(F.points))
        if len(pts) == 1:
            return DepthBound(
                1, "singleton: no two subballs meeting it are ever apart"
            )
        gap = _min_gap(p.space, pts)
        k = _level_for(p, gap)
        return DepthBound(
            k + 2,
            "distinct points sit %s apart; level %d closed balls separate "
            "them, plus two levels of headroom for below-chains" % (gap, k),
        )
    if isinstance(F, (BranchFamily, SwitchImage)):
        _require_tree_presentation(p)
        d = _branching_depth(F.term)
        return DepthBound(
            d + 3,
            "all branching happens within word depth %d; three extra "
            "levels expose every incomparable pair below it" % d,
        )
    if isinstance(F, ConvergentPackage):
        specials = [Fraction(x) for x in F.points]
        specials.extend(Fraction(a) for a, _ in F.sequences)
        gap = _min_gap(p.space, specials) if len(specials) > 1 else None
        k = _level_for(p, gap or Fraction(1))
        return DepthBound(
            k + 4,
            "separates the anchors and explicit points; sound for the "
            "finite stages and congruence sampling, while the transfinite "
            "tail has no finite witness level",
            sound_for_rank=False,
        )
    if isinstance(F, OrdinalEmbedding):
        _check_ordemb(F)
        pts = sorted(sets.ordemb_levels(F, depth=3))
        gap = _min_gap(p.space, pts) if len(pts) > 1 else None
        k = _level_for(p, gap or Fraction(1))
        return DepthBound(
            min(k + 2, _LEVEL_CAP),
            "separates the depth-3 skeleton; sound for the finite stages "
            "and congruence sampling only",
            sound_for_rank=False,
        )
    raise EngineError("no witness depth rule for %r" % (F,))


def brute_force_rank(p, F, K):
    """Exact derivative iteration over the truncated code universe.

    The independent cross-check: no quotients, no symbolic values, just
    codes of level at most K over the covered centers.
    """
    bound = witness_depth_bound(p, F)
    if K < int(bound):
        raise EngineError(
            "truncation level %d is below the witness bound %d"
            % (K, int(bound))
        )
    p, F = _norm_inputs(p, F)
    if isinstance(F, Empty):
        return ZERO, DerivativeTrace(((ZERO, frozenset()),), ZERO, True)
    if isinstance(p.space, BaireSpace):
        _require_tree_presentation(p)
    elif not isinstance(_strip(p.space), _GEOMETRIC_SPACES):
        raise EngineError("no truncated code universe for %r" % (p.space,))
    u = _Universe(p, F, K)
    names = ["b%d.%d" % (c.center, c.level) for c in u.codes]
    alive = set(range(len(u.codes)))
    rows = [frozenset(names[i] for i in alive)]
    while True:
        keep = set()
        for i in alive:
            found = False
            for x in _bits(u.below[i]):
                if x not in alive:
                    continue
                for y in _bits(u.apart[x] & u.below[i]):
                    if y in alive:
                        found = True
                        break
                if found:
                    break
            if found:
                keep.add(i)
        if keep == alive:
            if alive:
                raise EngineError(
                    "truncated universe stabilized nonempty; the cover "
                    "or level bound is too small"
                )
            return from_int(len(rows) - 1), _trace_from_steps(rows)
        alive = keep
        rows.append(frozenset(names[i] for i in alive))


# ---------------------------------------------------------------------------
# rank dispatch


def _points_as_branches(F):
    parts = [
        trees.prepend(tuple(word), trees.ConstLine(btail))
        for word, btail in F.points
    ]
    return BranchFamily(trees.union(*parts))


def _tree_trace(F, p, cap):
    rank, table = tree_rank(F, p)
    if ord_cmp(rank, cap) > 0:
        raise EngineError(
            "rank %s exceeds the ordinal cap %s"
            % (format_ordinal(rank), format_ordinal(cap))
        )
    nu_by_ident = {table.idents[k]: v for k, v in table.ranks.items()}
    return rank, _trace_from_nu(nu_by_ident)


def dp_rank(p, F, max_ordinal=None):
    """Rank and derivative trace of a supported (presentation, family).

    Raises EngineError outside the supported catalog and when a computed
    rank crosses the ordinal cap.
    """
    cap = max_ordinal if max_ordinal is not None else DEFAULT_ORDINAL_CAP
    p, F = _norm_inputs(p, F)
    if ord_cmp(sets.cb_rank(F), ZERO) == 0:
        return ZERO, DerivativeTrace(((ZERO, frozenset()),), ZERO, True)
    if isinstance(F, (BranchFamily, SwitchImage)):
        return _tree_trace(F, p, cap)
    if isinstance(F, FinitePoints) and isinstance(p.space, BaireSpace):
        _require_tree_presentation(p)
        return _tree_trace(_points_as_branches(F), p, cap)
    if isinstance(F, FinitePoints):
        q = build_quotient(p, F)
        if not q.classes:
            raise EngineError("no sampled code meets a nonempty family")
        seq = [frozenset(q.classes)]
        while seq[-1]:
            nxt = dp_step(q, seq[-1])
            if nxt == seq[-1]:
                raise EngineError("finite point family failed to stabilize empty")
            seq.append(nxt)
        rank = from_int(len(seq) - 1)
        if ord_cmp(rank, cap) > 0:
            raise EngineError(
                "rank %s exceeds the ordinal cap %s"
                % (format_ordinal(rank), format_ordinal(cap))
            )
        return rank, _trace_from_steps(seq)
    if isinstance(F, (ConvergentPackage, OrdinalEmbedding)):
        q = build_quotient(p, F)
        if not q.classes:
            raise EngineError("no sampled code meets a nonempty family")
        nu_by_ident = {}
        for c in q.classes:
            v = nu_of_atoms(q.info[c].atoms)
            nu_by_ident[c] = v if v is not None else ZERO
        trace = _trace_from_nu(nu_by_ident)
        if ord_cmp(trace.final_rank, cap) > 0:
            raise EngineError(
                "rank %s exceeds the ordinal cap %s"
                % (format_ordinal(trace.final_rank), format_ordinal(cap))
            )
        return trace.final_rank, trace
    raise EngineError("unsupported presentation/family combination")


# ---------------------------------------------------------------------------
# refinement against the classical derivative


def _cb_chain(F):
    chain = [F]
    for _ in range(12):
        if isinstance(chain[-1], Empty):
            return chain
        chain.append(sets.cb_derivative(chain[-1]))
    raise EngineError("classical derivative chain did not reach empty")


def _chain_member(chain, stage):
    if stage.is_finite():
        idx = stage.to_int()
        return chain[idx] if idx < len(chain) else chain[-1]
    return chain[-1]


def refinement_check(p, F, trace):
    """Every sampled ball meeting the classical stage derivative must
    belong to a class the trace still keeps alive at that stage."""
    p, F = _norm_inputs(p, F)
    chain = _cb_chain(F)
    if isinstance(F, (BranchFamily, SwitchImage)) or isinstance(
        p.space, BaireSpace
    ):
        # branch sets are discrete: their first derivative is empty, so
        # the classical chain only constrains fully dead stages
        return all(
            isinstance(_chain_member(chain, stage), Empty)
            for stage, alive in trace.stages
            if not alive
        )
    q = build_quotient(p, F)
    u = _Universe(p, F, _quotient_depth(p, F))
    for stage, alive in trace.stages:
        Fb = _chain_member(chain, stage)
        if isinstance(Fb, Empty):
            continue
        for idx, ball in enumerate(u.codes):
            if not _atoms_for(p.space, Fb, u.open_extent(idx)):
                continue
            if q.member_of[ball] not in alive:
                return False
    return True


__all__ = [
    "EngineError",
    "DEFAULT_ORDINAL_CAP",
    "ClassInfo",
    "QuotientStructure",
    "DerivativeTrace",
    "NodeRankTable",
    "DepthBound",
    "nu_of_atoms",
    "build_quotient",
    "dp_step",
    "dp_rank",
    "tree_rank",
    "witness_depth_bound",
    "brute_force_rank",
    "refinement_check",
    "trace_csv",
    "quotient_dot",
]
