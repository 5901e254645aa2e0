"""Branch terms: finite descriptions of closed sets of infinite words.

A branch term denotes a countable closed subset of the space of infinite
words over the natural numbers.  Every branch of every constructible term
is eventually constant, so branches admit the exact representation
(word, tail) meaning word followed by tail repeated forever.

Terms are built from:

  Base            all constant words n, n, n, ...
  ConstLine(c)    the single constant word c, c, c, ...
  Prepend(w, T)   branches of T prefixed with the finite word w
  Subst(m, T)     branches of T with every symbol pushed through the
                  injective map m
  DupHead(T)      branches of T with the first symbol repeated once
  UnionFin(...)   finite union
  IndexedPrimeUnion    infinite union of blocks with pairwise distinct
                  prime-power head symbols (see class docstring)
  DEAD            the empty set

Residuation (subtree) is exact: subtree(T, a) denotes the set of tails of
branches of T starting with symbol a.  Head-class analysis groups the
first symbols of a term into finitely many classes with isomorphic
residuals, which is what the rank engine consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .numbers import (
    is_prime_power,
    non_prime_power_index,
    nth_non_prime_power,
    nth_prime,
    prime_power_base,
)


class TermError(Exception):
    pass


class UnsupportedTermError(TermError):
    """Raised when head-class analysis cannot separate symbol sets."""


# ---------------------------------------------------------------------------
# symbol maps


class SymbolMap:
    """Injective, strictly increasing map on the natural numbers."""

    def apply(self, n):
        raise NotImplementedError

    def invert(self, x):
        """Preimage of x, or None when x is outside the range."""
        raise NotImplementedError


@dataclass(frozen=True)
class Affine(SymbolMap):
    """n -> scale * n + shift with shift < scale; covers one residue class."""

    scale: int
    shift: int

    def __post_init__(self):
        if self.scale < 1 or not (0 <= self.shift < self.scale):
            raise TermError("affine map needs 0 <= shift < scale")

    def apply(self, n):
        return self.scale * n + self.shift

    def invert(self, x):
        q, r = divmod(x - self.shift, self.scale)
        return q if r == 0 and q >= 0 else None

    def __str__(self):
        return "n->%d*n+%d" % (self.scale, self.shift)


DOUBLE = Affine(2, 0)
DOUBLE_PLUS_ONE = Affine(2, 1)


@dataclass(frozen=True)
class PrimePowers(SymbolMap):
    """n -> p^(n+1) for the i-th prime p."""

    index: int

    def apply(self, n):
        return nth_prime(self.index) ** (n + 1)

    def invert(self, x):
        pk = prime_power_base(x)
        if pk is None or pk[0] != self.index:
            return None
        return pk[1]

    def __str__(self):
        return "n->%d^(n+1)" % nth_prime(self.index)


@dataclass(frozen=True)
class NonPrimePowers(SymbolMap):
    """n -> the n-th natural number that is not a prime power."""

    def apply(self, n):
        return nth_non_prime_power(n)

    def invert(self, x):
        return non_prime_power_index(x)

    def __str__(self):
        return "n->nonpp(n)"


@dataclass(frozen=True)
class Compose(SymbolMap):
    """Composition, innermost map first."""

    maps: tuple

    def apply(self, n):
        for m in self.maps:
            n = m.apply(n)
        return n

    def invert(self, x):
        for m in reversed(self.maps):
            x = m.invert(x)
            if x is None:
                return None
        return x

    def __str__(self):
        return " then ".join(str(m) for m in self.maps)


# ---------------------------------------------------------------------------
# symbol sets

INFINITE = "inf"


@dataclass(frozen=True)
class SymbolSet:
    """Either an explicit finite set or the monotone image of a cofinite set.

    kind 'fin':  members is a frozenset of symbols.
    kind 'img':  {chain(n) : n not in excluded}, chain applied innermost
                 first; all maps are strictly increasing so enumeration
                 below a bound terminates.
    """

    kind: str
    members: frozenset = frozenset()
    chain: tuple = ()
    excluded: frozenset = frozenset()

    @staticmethod
    def finite(symbols):
        return SymbolSet("fin", members=frozenset(symbols))

    @staticmethod
    def all_symbols():
        return SymbolSet("img")

    @staticmethod
    def image(chain, excluded=frozenset()):
        return SymbolSet("img", chain=tuple(chain), excluded=frozenset(excluded))

    def is_empty(self):
        return self.kind == "fin" and not self.members

    def size(self):
        return len(self.members) if self.kind == "fin" else INFINITE

    def contains(self, x):
        if self.kind == "fin":
            return x in self.members
        for m in reversed(self.chain):
            x = m.invert(x)
            if x is None:
                return False
        return x not in self.excluded

    def push(self, m):
        """Image of this set under the symbol map m."""
        if self.kind == "fin":
            return SymbolSet.finite(m.apply(s) for s in self.members)
        link = m.maps if isinstance(m, Compose) else (m,)
        return SymbolSet.image(self.chain + tuple(link), self.excluded)

    def without(self, symbols):
        hit = [s for s in symbols if self.contains(s)]
        if self.kind == "fin":
            return SymbolSet.finite(self.members - set(hit))
        excl = set(self.excluded)
        for s in hit:
            v = s
            for m in reversed(self.chain):
                v = m.invert(v)
            excl.add(v)
        return SymbolSet.image(self.chain, excl)

    def enumerate_upto(self, bound):
        """Sorted members <= bound (exact; maps are increasing)."""
        if self.kind == "fin":
            return sorted(s for s in self.members if s <= bound)
        out, n = [], 0
        while True:
            v = n
            for m in self.chain:
                v = m.apply(v)
            if v > bound:
                return out
            if n not in self.excluded:
                out.append(v)
            n += 1

    def sample(self, count):
        """First `count` members in increasing order."""
        if self.kind == "fin":
            return sorted(self.members)[:count]
        out, n = [], 0
        while len(out) < count:
            if n not in self.excluded:
                v = n
                for m in self.chain:
                    v = m.apply(v)
                out.append(v)
            n += 1
        return out

    def _residue(self):
        """(modulus, residue) certificate from the trailing affine maps.

        The outermost run of affine maps pins every member to one residue
        class; applying scale*v+shift in application order accumulates
        value = (prod scales) * y + res with y the inner value.
        """
        j = len(self.chain)
        while j > 0 and isinstance(self.chain[j - 1], Affine):
            j -= 1
        mod, res = 1, 0
        for m in self.chain[j:]:
            res = m.scale * res + m.shift
            mod = mod * m.scale
        return mod, res

    def _strip_affine(self):
        """Drop the outer affine maps recorded by _residue."""
        chain = list(self.chain)
        while chain and isinstance(chain[-1], Affine):
            chain.pop()
        return SymbolSet.image(chain, self.excluded)

    def disjoint_from(self, other):
        """Exact disjointness for the combinations the library builds.

        Raises UnsupportedTermError when no decision rule applies.
        """
        a, b = self, other
        if a.kind == "fin":
            return not any(b.contains(s) for s in a.members)
        if b.kind == "fin":
            return not any(a.contains(s) for s in b.members)
        ma, ra = a._residue()
        mb, rb = b._residue()
        g = min(ma, mb)
        if ra % g != rb % g:
            return True
        ca, cb = a._strip_affine(), b._strip_affine()
        ka = ca.chain[-1] if ca.chain else None
        kb = cb.chain[-1] if cb.chain else None
        if isinstance(ka, NonPrimePowers) and isinstance(kb, PrimePowers):
            return True
        if isinstance(kb, NonPrimePowers) and isinstance(ka, PrimePowers):
            return True
        if isinstance(ka, PrimePowers) and isinstance(kb, PrimePowers):
            if ka.index != kb.index:
                return True
        if a == b:
            return False
        if ka is None and kb is None and ma == mb and ra == rb:
            return False
        raise UnsupportedTermError(
            "cannot separate symbol sets %r and %r" % (a, b)
        )


# ---------------------------------------------------------------------------
# terms


class BranchTerm:
    """Base class; concrete terms below are frozen dataclasses."""

    def is_dead(self):
        return isinstance(self, _Dead)


@dataclass(frozen=True)
class _Dead(BranchTerm):
    def __str__(self):
        return "dead"


DEAD = _Dead()


@dataclass(frozen=True)
class Base(BranchTerm):
    """All constant words: the n-th branch is n, n, n, ..."""

    def __str__(self):
        return "base"


@dataclass(frozen=True)
class ConstLine(BranchTerm):
    const: int

    def __str__(self):
        return "line(%d)" % self.const


@dataclass(frozen=True)
class Prepend(BranchTerm):
    word: tuple
    inner: BranchTerm

    def __post_init__(self):
        if not self.word:
            raise TermError("prepend needs a nonempty word")

    def __str__(self):
        return "%s . %s" % (",".join(map(str, self.word)), self.inner)


@dataclass(frozen=True)
class Subst(BranchTerm):
    map: SymbolMap
    inner: BranchTerm

    def __str__(self):
        return "subst[%s](%s)" % (self.map, self.inner)


@dataclass(frozen=True)
class DupHead(BranchTerm):
    inner: BranchTerm

    def __str__(self):
        return "duphead(%s)" % (self.inner,)


@dataclass(frozen=True)
class UnionFin(BranchTerm):
    members: tuple

    def __str__(self):
        return "union(%s)" % "; ".join(str(m) for m in self.members)


@dataclass(frozen=True)
class IndexedPrimeUnion(BranchTerm):
    """Union over i of prepend((head(i),), block(i)).

    head(i) must be pairwise distinct prime powers and block ranks must
    approach declared_sup, a limit ordinal supplied by the constructor of
    the term.  The rank engine verifies samples and otherwise trusts the
    declared supremum; the exact branch-level semantics need no trust.

    builder: i -> BranchTerm      tail below the head symbol
    head:    i -> int             head symbol of block i
    locate:  symbol -> int|None   inverse of head
    """

    builder: object = field(compare=False)
    head: object = field(compare=False)
    locate: object = field(compare=False)
    declared_sup: object
    tag: str

    def __eq__(self, other):
        return (
            isinstance(other, IndexedPrimeUnion)
            and self.tag == other.tag
            and self.declared_sup == other.declared_sup
        )

    def __hash__(self):
        return hash(("ixu", self.tag, self.declared_sup))

    def __str__(self):
        return "ixunion[%s]" % self.tag


def prepend(word, inner):
    word = tuple(word)
    if inner.is_dead():
        return DEAD
    if not word:
        return inner
    if isinstance(inner, Prepend):
        return Prepend(word + inner.word, inner.inner)
    return Prepend(word, inner)


def subst(m, inner):
    if inner.is_dead():
        return DEAD
    return Subst(m, inner)


def duphead(inner):
    if inner.is_dead():
        return DEAD
    return DupHead(inner)


def union(*members):
    flat = []
    for t in members:
        if t.is_dead():
            continue
        if isinstance(t, UnionFin):
            flat.extend(t.members)
        else:
            flat.append(t)
    seen, uniq = set(), []
    for t in flat:
        k = term_key(t)
        if k not in seen:
            seen.add(k)
            uniq.append(t)
    if not uniq:
        return DEAD
    if len(uniq) == 1:
        return uniq[0]
    uniq.sort(key=term_key)
    return UnionFin(tuple(uniq))


def term_key(term):
    """Deterministic structural key (exact, no symbol renaming)."""
    if isinstance(term, _Dead):
        return ("dead",)
    if isinstance(term, Base):
        return ("base",)
    if isinstance(term, ConstLine):
        return ("line", term.const)
    if isinstance(term, Prepend):
        return ("pre", term.word, term_key(term.inner))
    if isinstance(term, Subst):
        return ("sub", str(term.map), term_key(term.inner))
    if isinstance(term, DupHead):
        return ("dup", term_key(term.inner))
    if isinstance(term, UnionFin):
        return ("uni",) + tuple(term_key(m) for m in term.members)
    if isinstance(term, IndexedPrimeUnion):
        return ("ixu", term.tag, str(term.declared_sup))
    raise TermError("unknown term %r" % (term,))


def term_key_renamed(term):
    """Structural key with symbols replaced by first-occurrence indices.

    Two terms with equal renamed keys denote sets related by an injective
    symbol substitution, which preserves both branch count and rank.
    """
    names = {}

    def sym(s):
        if s not in names:
            names[s] = len(names)
        return names[s]

    def walk(t):
        if isinstance(t, _Dead):
            return ("dead",)
        if isinstance(t, Base):
            return ("base",)
        if isinstance(t, ConstLine):
            return ("line", sym(t.const))
        if isinstance(t, Prepend):
            return ("pre", tuple(sym(s) for s in t.word), walk(t.inner))
        if isinstance(t, Subst):
            # the map only relabels deeper symbols; rank and branch
            # structure are preserved, so identify by the inner term
            return ("sub", walk(t.inner))
        if isinstance(t, DupHead):
            return ("dup", walk(t.inner))
        if isinstance(t, UnionFin):
            return ("uni",) + tuple(sorted(walk(m) for m in t.members))
        if isinstance(t, IndexedPrimeUnion):
            return ("ixu", t.tag, str(t.declared_sup))
        raise TermError("unknown term %r" % (t,))

    return walk(term)


# ---------------------------------------------------------------------------
# residuation


def subtree(term, a):
    """Term for the tails of branches starting with symbol a."""
    if isinstance(term, (_Dead,)):
        return DEAD
    if isinstance(term, Base):
        return ConstLine(a)
    if isinstance(term, ConstLine):
        return term if term.const == a else DEAD
    if isinstance(term, Prepend):
        if term.word[0] != a:
            return DEAD
        return prepend(term.word[1:], term.inner)
    if isinstance(term, Subst):
        b = term.map.invert(a)
        if b is None:
            return DEAD
        return subst(term.map, subtree(term.inner, b))
    if isinstance(term, DupHead):
        return prepend((a,), subtree(term.inner, a))
    if isinstance(term, UnionFin):
        return union(*(subtree(m, a) for m in term.members))
    if isinstance(term, IndexedPrimeUnion):
        i = term.locate(a)
        if i is None:
            return DEAD
        return term.builder(i)
    raise TermError("unknown term %r" % (term,))


def subtree_word(term, word):
    for a in word:
        term = subtree(term, a)
        if term.is_dead():
            return DEAD
    return term


# ---------------------------------------------------------------------------
# head classes


@dataclass(frozen=True)
class HeadClass:
    """A set of first symbols whose residuals are pairwise isomorphic.

    residual(a) is exact for each member a; `count` is the number of
    symbols (INFINITE for infinite classes).
    """

    symbols: SymbolSet
    term: BranchTerm

    @property
    def count(self):
        return self.symbols.size()

    def residual(self, a):
        return subtree(self.term, a)

    def sample_symbols(self, k=2):
        return self.symbols.sample(k)


def _raw_classes(term):
    """Head classes before atomisation; may overlap across union members."""
    if isinstance(term, _Dead):
        return []
    if isinstance(term, Base):
        return [(SymbolSet.all_symbols(), term)]
    if isinstance(term, ConstLine):
        return [(SymbolSet.finite([term.const]), term)]
    if isinstance(term, Prepend):
        return [(SymbolSet.finite([term.word[0]]), term)]
    if isinstance(term, Subst):
        inner = _raw_classes(term.inner)
        return [(s.push(term.map), term) for s, _ in inner]
    if isinstance(term, DupHead):
        inner = _raw_classes(term.inner)
        return [(s, term) for s, _ in inner]
    if isinstance(term, UnionFin):
        out = []
        for m in term.members:
            out.extend(_raw_classes(m))
        return out
    if isinstance(term, IndexedPrimeUnion):
        raise UnsupportedTermError("indexed prime union has no finite class list")
    raise TermError("unknown term %r" % (term,))


def head_classes(term):
    """Disjoint head classes of `term`, each with isomorphic residuals.

    Returns a list of HeadClass over the whole original term, so
    residual(a) already merges overlapping union members.  Raises
    UnsupportedTermError when symbol sets cannot be separated or when the
    sampled residuals of an infinite class disagree.
    """
    raw = _raw_classes(term)
    finite_syms = set()
    infinite = []
    for s, _src in raw:
        if s.kind == "fin":
            finite_syms.update(s.members)
        else:
            infinite.append(s)
    for i, s in enumerate(infinite):
        for t in infinite[i + 1:]:
            if s != t and not s.disjoint_from(t):
                raise UnsupportedTermError(
                    "overlapping infinite head classes %r and %r" % (s, t)
                )
    uniq = []
    for s in infinite:
        s2 = s.without(finite_syms)
        if not any(s2 == u for u in uniq):
            uniq.append(s2)
    out = []
    for sym in sorted(finite_syms):
        out.append(HeadClass(SymbolSet.finite([sym]), term))
    for s in uniq:
        cls = HeadClass(s, term)
        a, b = cls.sample_symbols(2)
        if term_key_renamed(subtree(term, a)) != term_key_renamed(subtree(term, b)):
            raise UnsupportedTermError(
                "infinite head class with non-isomorphic residuals"
            )
        out.append(cls)
    return out


# ---------------------------------------------------------------------------
# branch enumeration and discreteness


def term_branches(term, symbol_bound, block_bound=4, _depth=0):
    """All branches using symbols <= symbol_bound, as (word, tail) pairs.

    Exact for symbols within the bound: a branch is listed iff every one
    of its symbols is <= symbol_bound (indexed unions also need their
    block index < block_bound).  The pair (word, tail) means word then
    tail forever, with the word not ending in the tail symbol.
    """
    if _depth > 64:
        raise TermError("branch enumeration too deep")
    if isinstance(term, _Dead):
        return []
    if isinstance(term, Base):
        return [((), n) for n in range(symbol_bound + 1)]
    if isinstance(term, ConstLine):
        return [((), term.const)] if term.const <= symbol_bound else []
    if isinstance(term, Prepend):
        if any(s > symbol_bound for s in term.word):
            return []
        out = []
        for w, c in term_branches(term.inner, symbol_bound, block_bound, _depth + 1):
            out.append(_norm_branch(term.word + w, c))
        return out
    if isinstance(term, Subst):
        out = []
        bound = symbol_bound
        inner_bound = symbol_bound  # map is increasing: preimages are smaller
        for w, c in term_branches(term.inner, inner_bound, block_bound, _depth + 1):
            w2 = tuple(term.map.apply(s) for s in w)
            c2 = term.map.apply(c)
            if all(s <= bound for s in w2) and c2 <= bound:
                out.append(_norm_branch(w2, c2))
        return out
    if isinstance(term, DupHead):
        out = []
        for w, c in term_branches(term.inner, symbol_bound, block_bound, _depth + 1):
            h = w[0] if w else c
            out.append(_norm_branch((h,) + w, c))
        return out
    if isinstance(term, UnionFin):
        seen, out = set(), []
        for m in term.members:
            for br in term_branches(m, symbol_bound, block_bound, _depth + 1):
                if br not in seen:
                    seen.add(br)
                    out.append(br)
        return sorted(out)
    if isinstance(term, IndexedPrimeUnion):
        out = []
        for i in range(block_bound):
            h = term.head(i)
            if h > symbol_bound:
                continue
            for w, c in term_branches(term.builder(i), symbol_bound, block_bound, _depth + 1):
                out.append(_norm_branch((h,) + w, c))
        return sorted(set(out))
    raise TermError("unknown term %r" % (term,))


def _norm_branch(word, tail):
    word = tuple(word)
    while word and word[-1] == tail:
        word = word[:-1]
    return (word, tail)


def branch_prefix(branch, k):
    word, tail = branch
    if k <= len(word):
        return word[:k]
    return word + (tail,) * (k - len(word))


def contains_indexed_union(term):
    if isinstance(term, IndexedPrimeUnion):
        return True
    if isinstance(term, (Prepend, Subst, DupHead)):
        return contains_indexed_union(term.inner)
    if isinstance(term, UnionFin):
        return any(contains_indexed_union(m) for m in term.members)
    return False


def is_single_branch(term, _active=None):
    """Exact test for 'denotes exactly one branch'."""
    if _active is None:
        _active = set()
    if contains_indexed_union(term):
        return False  # an indexed union always has infinitely many branches
    key = term_key(term)
    if key in _active:
        return True  # a cycle is one infinite path
    if isinstance(term, _Dead):
        return False
    if isinstance(term, ConstLine):
        return True
    if isinstance(term, Base):
        return False
    if isinstance(term, IndexedPrimeUnion):
        return False
    if isinstance(term, (Prepend, Subst, DupHead)):
        return is_single_branch(term.inner, _active | {key})
    if isinstance(term, UnionFin):
        if contains_indexed_union(term):
            return False
        classes = head_classes(term)
        if len(classes) != 1 or classes[0].count != 1:
            return False
        (a,) = classes[0].sample_symbols(1)
        return is_single_branch(classes[0].residual(a), _active | {key})
    raise TermError("unknown term %r" % (term,))


def isolating_prefix(term, branch, max_k=64):
    """Least k with branch the only branch through its k-prefix, or None.

    Every constructible term denotes a discrete set, so this search
    succeeds for genuine branches; None signals either a foreign branch
    or an isolation depth beyond max_k.
    """
    for k in range(max_k + 1):
        t = subtree_word(term, branch_prefix(branch, k))
        if t.is_dead():
            return None
        if is_single_branch(t):
            return k
    return None


def single_branch_of(term, max_steps=64):
    """The unique branch of a single-branch term, as (word, tail)."""
    word = []
    t = term
    for _ in range(max_steps):
        classes = head_classes(t)
        (a,) = classes[0].sample_symbols(1)
        t2 = subtree(t, a)
        if term_key(t2) == term_key(t):
            # branch x solves x = a followed by x, so x is constant a
            return _norm_branch(tuple(word), a)
        word.append(a)
        t = t2
    raise TermError("single branch extraction exceeded depth")


def term_contains_branch(term, branch, max_steps=64):
    """Exact membership of an eventually-constant branch."""
    word, tail = _norm_branch(*branch)
    t = subtree_word(term, word)
    for _ in range(max_steps):
        if t.is_dead():
            return False
        if is_single_branch(t):
            return single_branch_of(t) == ((), tail)
        t = subtree(t, tail)
    raise TermError("branch membership test exceeded depth")
