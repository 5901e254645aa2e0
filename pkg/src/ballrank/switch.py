"""Switch maps: prefix-swapping homeomorphisms of the word space.

A switch pair at level alpha >= 2 is two families S = {s_i}, T = {t_i} of
finite words with ln(s_i) = ln(t_i), s_i incomparable to s_j, t_i to t_j
and s_i to t_j whenever i != j.  The induced map swaps the prefix s_i for
t_i and back, fixing everything else; it is an involution.

Levels follow a stage recursion:

  level 2          s_i = t_i = (i)
  level b+1        s'(2i+e) = (2n+e over the head-duplicated s(i)),
                   t'(2i+e) = (e) then (2n+e over t(i)),  e in {0,1}
  level limit L    block i uses the stage max(2, L[i+1]) where L[i+1] is
                   the canonical fundamental sequence of L, with symbols
                   n -> p_i^(n+1) for the i-th prime; s gets the
                   head-duplicated form, t the literal prefix (p_i),
                   indices folded by the Cantor pairing

The image of the base family {n, n, n, ...} under the level-alpha map has
a closed branch-term form (image_term), used by the rank engine; the
pointwise map on eventually-constant branches is independent of it and
serves as the cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numbers import nth_prime, prime_power_base
from .ordinal import (
    OMEGA,
    Ordinal,
    from_int,
    fundamental_seq,
    omega_power,
    ord_cmp,
    ord_max,
    ord_mul,
    ord_pred,
)
from . import trees
from .trees import (
    Base,
    Compose,
    DOUBLE,
    DOUBLE_PLUS_ONE,
    IndexedPrimeUnion,
    NonPrimePowers,
    PrimePowers,
    prepend,
    subst,
    union,
)


class SwitchError(Exception):
    pass


DEFAULT_LEVEL_CAP = ord_mul(omega_power(1), from_int(3))  # w*3

TWO = from_int(2)


def _pair(i, k):
    s = i + k
    return s * (s + 1) // 2 + k


def _unpair(j):
    s = 0
    while (s + 1) * (s + 2) // 2 <= j:
        s += 1
    k = j - s * (s + 1) // 2
    return s - k, k


def stage_ordinal(limit, i):
    """Block stage for the i-th block of a limit level."""
    return ord_max(TWO, fundamental_seq(limit, i + 1))


class _NoMatch(Exception):
    pass


class _Stage:
    """One level of the recursion; supplies generator words and matching."""

    def s_word(self, i):
        raise NotImplementedError

    def t_word(self, i):
        raise NotImplementedError

    def match_s(self, x):
        """(index, consumed length) of the unique s-prefix of the infinite
        word x (an accessor position -> symbol), raising _NoMatch."""
        raise NotImplementedError

    def match_t(self, x):
        raise NotImplementedError


class _BaseStage(_Stage):
    def s_word(self, i):
        return (i,)

    t_word = s_word

    def match_s(self, x):
        return x(0), 1

    match_t = match_s


def _duphead(w):
    return (w[0],) + w


class _SuccStage(_Stage):
    def __init__(self, prev):
        self.prev = prev

    def s_word(self, i):
        k, e = divmod(i, 2)
        return tuple(2 * n + e for n in _duphead(self.prev.s_word(k)))

    def t_word(self, i):
        k, e = divmod(i, 2)
        return (e,) + tuple(2 * n + e for n in self.prev.t_word(k))

    def match_s(self, x):
        if x(0) != x(1):
            raise _NoMatch
        e = x(0) % 2

        def y(n):
            v = x(n + 1)
            if v % 2 != e:
                raise _NoMatch
            return v // 2

        k, ln = self.prev.match_s(y)
        return 2 * k + e, ln + 1

    def match_t(self, x):
        e = x(0)
        if e not in (0, 1):
            raise _NoMatch

        def y(n):
            v = x(n + 1)
            if v % 2 != e:
                raise _NoMatch
            return v // 2

        k, ln = self.prev.match_t(y)
        return 2 * k + e, ln + 1


class _LimitStage(_Stage):
    def __init__(self, limit, cache):
        self.limit = limit
        self._cache = cache
        self._stages = {}

    def stage(self, i):
        if i not in self._stages:
            self._stages[i] = _build_stage(stage_ordinal(self.limit, i), self._cache)
        return self._stages[i]

    def s_word(self, j):
        i, k = _unpair(j)
        p = nth_prime(i)
        return tuple(p ** (n + 1) for n in _duphead(self.stage(i).s_word(k)))

    def t_word(self, j):
        i, k = _unpair(j)
        p = nth_prime(i)
        return (p,) + tuple(p ** (n + 1) for n in self.stage(i).t_word(k))

    def _unmap(self, x, i):
        p = nth_prime(i)

        def y(n):
            pk = prime_power_base(x(n + 1))
            if pk is None or pk[0] != i:
                raise _NoMatch
            return pk[1]

        return y

    def match_s(self, x):
        pk = prime_power_base(x(0))
        if pk is None or x(0) != x(1):
            raise _NoMatch
        i = pk[0]
        k, ln = self.stage(i).match_s(self._unmap(x, i))
        return _pair(i, k), ln + 1

    def match_t(self, x):
        pk = prime_power_base(x(0))
        if pk is None or pk[1] != 0:
            raise _NoMatch
        i = pk[0]
        k, ln = self.stage(i).match_t(self._unmap(x, i))
        return _pair(i, k), ln + 1


def _build_stage(alpha, cache):
    key = str(alpha)
    if key in cache:
        return cache[key]
    if ord_cmp(alpha, TWO) == 0:
        st = _BaseStage()
    elif alpha.is_successor():
        st = _SuccStage(_build_stage(ord_pred(alpha), cache))
    else:
        st = _LimitStage(alpha, cache)
    cache[key] = st
    return st


@dataclass(frozen=True)
class SwitchPair:
    """Compatible prefix families at one level, with the induced map."""

    level: Ordinal

    def _stage(self):
        if not hasattr(self, "_st"):
            object.__setattr__(self, "_st", _build_stage(self.level, {}))
        return self._st

    def s_word(self, i):
        return self._stage().s_word(i)

    def t_word(self, i):
        return self._stage().t_word(i)

    def apply_branch(self, branch):
        """Pointwise switch map on an eventually-constant branch."""
        word, tail = trees._norm_branch(*branch)

        def x(n):
            return word[n] if n < len(word) else tail

        st = self._stage()
        try:
            idx, ln = st.match_s(x)
            new = st.t_word(idx)
        except _NoMatch:
            try:
                idx, ln = st.match_t(x)
                new = st.s_word(idx)
            except _NoMatch:
                return (word, tail)
        return trees._norm_branch(new + word[ln:], tail)


def switch_pair(alpha, cap=DEFAULT_LEVEL_CAP):
    """The compatible pair at the given level (2 <= alpha <= cap)."""
    if not isinstance(alpha, Ordinal):
        alpha = from_int(alpha)
    if ord_cmp(alpha, TWO) < 0:
        raise SwitchError("switch levels start at 2")
    if ord_cmp(alpha, cap) > 0:
        raise SwitchError("switch level above cap %s" % cap)
    return SwitchPair(alpha)


def _image_parts(alpha):
    """Split the image of the base family at a level into the part moved
    through the generator families and the constant lines the map fixes.

    Returns (matched term, fixed chains); each chain is an innermost-first
    tuple of symbol maps whose image lists unmatched constant symbols.
    A constant branch is matched at a successor level iff its halved value
    was matched one level down, and at a limit level iff it is a prime
    power whose exponent part was matched at the block's stage; everything
    else is a fixed point of the map and stays a constant line.
    """
    if ord_cmp(alpha, TWO) == 0:
        return Base(), ()
    if alpha.is_successor():
        inner, chains = _image_parts(ord_pred(alpha))
        matched = union(
            prepend((0,), subst(DOUBLE, inner)),
            prepend((1,), subst(DOUBLE_PLUS_ONE, inner)),
        )
        fixed = []
        for c in chains:
            fixed.append(c + (DOUBLE,))
            fixed.append(c + (DOUBLE_PLUS_ONE,))
        return matched, tuple(fixed)
    if ord_cmp(alpha, OMEGA) != 0:
        # larger limits have stages past w whose own fixed lines would
        # need an infinite family of constant-line blocks
        raise SwitchError("image term not representable at level %s" % alpha)

    def builder(i, _limit=alpha):
        return subst(PrimePowers(i), image_term(stage_ordinal(_limit, i)))

    def locate(a):
        pk = prime_power_base(a)
        return pk[0] if pk is not None and pk[1] == 0 else None

    blocks = IndexedPrimeUnion(
        builder=builder,
        head=lambda i: nth_prime(i),
        locate=locate,
        declared_sup=alpha,
        tag="switch-image:%s" % alpha,
    )
    return blocks, ((NonPrimePowers(),),)


def image_term(alpha):
    """Branch term for the image of the base family at the given level."""
    if not isinstance(alpha, Ordinal):
        alpha = from_int(alpha)
    if ord_cmp(alpha, TWO) < 0:
        raise SwitchError("switch levels start at 2")
    matched, chains = _image_parts(alpha)
    lines = [
        subst(c[0] if len(c) == 1 else Compose(c), Base()) for c in chains
    ]
    return union(matched, *lines)


def switch_apply_term(pair, term):
    """Image of a branch term under the pair's map, in closed form.

    Supported: the base family (image is image_term), a previously built
    image_term of the same level (the map is an involution), and the
    level-2 pair on anything (identity).  Other combinations have no
    closed form here.
    """
    if ord_cmp(pair.level, TWO) == 0:
        return term
    key = trees.term_key(term)
    if key == trees.term_key(Base()):
        return image_term(pair.level)
    if key == trees.term_key(image_term(pair.level)):
        return Base()
    raise SwitchError("no closed form for this term under this pair")
