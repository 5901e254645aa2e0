"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a finite sum  w^e1*c1 + ... + w^ek*ck  with strictly
decreasing ordinal exponents and positive integer coefficients.  The
nesting depth of exponents is capped (default 8), which is far more
than the rank engines ever produce but keeps pathological inputs out.

Text form follows the grammar

    ordinal := nat | term ('+' term)*
    term    := 'w' ['^' atom] ['*' nat]
    atom    := nat | 'w' | '(' ordinal ')'

so "0", "w*2+1" and "w^2" all round-trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

DEPTH_CAP = 8


class OrdinalError(ValueError):
    pass


class OrdinalDepthError(OrdinalError):
    pass


class OrdinalParseError(OrdinalError):
    pass


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """Cantor normal form: tuple of (exponent, coefficient) pairs."""

    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(exp, Ordinal):
                raise OrdinalError("exponent must be an Ordinal")
            if not isinstance(coeff, int) or coeff < 1:
                raise OrdinalError("coefficient must be a positive int")
            if prev is not None and ord_cmp(exp, prev) >= 0:
                raise OrdinalError("exponents must strictly decrease")
            prev = exp
        if self.depth() > DEPTH_CAP:
            raise OrdinalDepthError(
                "ordinal exceeds exponent nesting cap %d" % DEPTH_CAP
            )

    def depth(self):
        if not self.terms:
            return 0
        return 1 + max(e.depth() for e, _ in self.terms)

    # --- classification -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_finite(self):
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_successor(self):
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self):
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def to_int(self):
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise OrdinalError("not a finite ordinal: %s" % self)
        return self.terms[0][1]

    # --- comparisons ----------------------------------------------------

    def __lt__(self, other):
        return ord_cmp(self, other) < 0

    def __eq__(self, other):
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    # --- arithmetic sugar -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = from_int(other)
        return ord_add(self, other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = from_int(other)
        return ord_mul(self, other)

    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        return "Ordinal(%s)" % format_ordinal(self)


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))


def from_int(n):
    if not isinstance(n, int) or n < 0:
        raise OrdinalError("expected a natural number, got %r" % (n,))
    if n == 0:
        return ZERO
    return Ordinal(((ZERO, n),))


def omega_power(exp, coeff=1):
    if isinstance(exp, int):
        exp = from_int(exp)
    if coeff == 0:
        return ZERO
    return Ordinal(((exp, coeff),))


OMEGA = omega_power(ONE)


def ord_cmp(a, b):
    """Three-way comparison: -1, 0 or 1."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = ord_cmp(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) != len(b.terms):
        return -1 if len(a.terms) < len(b.terms) else 1
    return 0


def ord_max(a, b):
    return b if ord_cmp(a, b) < 0 else a


def ord_min(a, b):
    return a if ord_cmp(a, b) < 0 else b


def ord_sup(items):
    """Max of a finite list (0 for an empty list)."""
    out = ZERO
    for x in items:
        out = ord_max(out, x)
    return out


def ord_add(a, b):
    """Non-commutative ordinal addition on CNF."""
    if b.is_zero():
        return a
    lead, _ = b.terms[0]
    kept = [t for t in a.terms if ord_cmp(t[0], lead) > 0]
    merged = list(b.terms)
    if len(kept) < len(a.terms):
        exp, coeff = a.terms[len(kept)]
        if ord_cmp(exp, lead) == 0:
            merged[0] = (lead, coeff + merged[0][1])
    return Ordinal(tuple(kept) + tuple(merged))


def ord_succ(a):
    return ord_add(a, ONE)


def ord_mul(a, b):
    """Non-commutative ordinal multiplication on CNF."""
    if a.is_zero() or b.is_zero():
        return ZERO
    lead_exp = a.terms[0][0]
    out = ZERO
    for exp, coeff in b.terms:
        if exp.is_zero():
            # a * n = w^e1*(c1*n) + rest of a
            head = Ordinal(((lead_exp, a.terms[0][1] * coeff),) + a.terms[1:])
            out = ord_add(out, head)
        else:
            out = ord_add(out, omega_power(ord_add(lead_exp, exp), coeff))
    return out


def ord_pred(a):
    if not a.is_successor():
        raise OrdinalError("predecessor of a non-successor: %s" % a)
    exp, coeff = a.terms[-1]
    if coeff > 1:
        return Ordinal(a.terms[:-1] + ((exp, coeff - 1),))
    return Ordinal(a.terms[:-1])


def fundamental_seq(a, i):
    """i-th member of the canonical increasing sequence below a limit a.

    Tail w^(g+1) steps down to w^g*(i+1); a limit exponent recurses.
    """
    if not a.is_limit():
        raise OrdinalError("fundamental sequence of a non-limit: %s" % a)
    if not isinstance(i, int) or i < 0:
        raise OrdinalError("index must be a natural number")
    exp, coeff = a.terms[-1]
    prefix = Ordinal(a.terms[:-1] + ((exp, coeff - 1),)) if coeff > 1 else Ordinal(a.terms[:-1])
    if exp.is_successor():
        step = omega_power(ord_pred(exp), i + 1)
    else:
        step = omega_power(fundamental_seq(exp, i))
    return ord_add(prefix, step)


# --- text form ------------------------------------------------------------


def format_ordinal(a):
    if a.is_zero():
        return "0"
    parts = []
    for exp, coeff in a.terms:
        if exp.is_zero():
            parts.append(str(coeff))
            continue
        if exp == ONE:
            head = "w"
        else:
            inner = format_ordinal(exp)
            if exp.is_finite() or len(exp.terms) == 1 and exp.terms[0][1] == 1 and exp.terms[0][0] == ONE:
                # plain nat or exactly "w"
                head = "w^%s" % inner
            else:
                head = "w^(%s)" % inner
        if coeff > 1:
            head += "*%d" % coeff
        parts.append(head)
    return "+".join(parts)


def parse_ordinal(text):
    """Parse the grammar above; raises OrdinalParseError with position."""
    s = text.strip()
    if not s:
        raise OrdinalParseError("empty ordinal text")
    pos = 0

    def err(msg):
        raise OrdinalParseError("%s at position %d in %r" % (msg, pos, text))

    def peek():
        return s[pos] if pos < len(s) else ""

    def read_nat():
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            err("expected a number")
        return int(s[start:pos])

    def read_atom():
        nonlocal pos
        if peek() == "(":
            pos += 1
            inner = read_sum()
            if peek() != ")":
                err("expected ')'")
            pos += 1
            return inner
        if peek() == "w":
            pos += 1
            return parse_w_tail(coeff_allowed=False)
        return from_int(read_nat())

    def parse_w_tail(coeff_allowed=True):
        # 'w' already consumed
        nonlocal pos
        exp = ONE
        if peek() == "^":
            pos += 1
            exp = read_atom()
        coeff = 1
        if coeff_allowed and peek() == "*":
            pos += 1
            coeff = read_nat()
            if coeff < 1:
                err("coefficient must be >= 1")
        return omega_power(exp, coeff)

    def read_term():
        nonlocal pos
        if peek() == "w":
            pos += 1
            return parse_w_tail()
        return from_int(read_nat())

    def read_sum():
        nonlocal pos
        total = read_term()
        while peek() == "+":
            pos += 1
            nxt = read_term()
            summed = ord_add(total, nxt)
            # reject non-canonical text like "1+w" or "w+w"
            if ord_cmp(summed, total) <= 0 or not _extends(total, nxt):
                err("terms not in strictly decreasing canonical order")
            total = summed
        return total

    def _extends(total, nxt):
        # canonical iff appending nxt's terms keeps CNF shape unmerged
        if total.is_zero() or nxt.is_zero():
            return False
        return ord_cmp(total.terms[-1][0], nxt.terms[0][0]) > 0

    out = read_sum()
    if pos != len(s):
        err("trailing characters")
    return out
