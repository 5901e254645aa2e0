"""Small integer helpers: primes, prime powers, exact dyadic tools."""

from __future__ import annotations

from fractions import Fraction

_PRIMES = [2, 3, 5, 7, 11, 13]


def nth_prime(i):
    while len(_PRIMES) <= i:
        c = _PRIMES[-1] + 2
        while any(c % p == 0 for p in _PRIMES if p * p <= c):
            c += 2
        _PRIMES.append(c)
    return _PRIMES[i]


def prime_power_base(n):
    """Return (i, k) with n == nth_prime(i) ** (k+1), or None.

    Prime powers here start at p^1; 0 and 1 are not prime powers.
    """
    if n < 2:
        return None
    for d in range(2, n + 1):
        if d * d > n:
            d = n
        if n % d == 0:
            m, k = n, 0
            while m % d == 0:
                m //= d
                k += 1
            if m != 1:
                return None
            i = 0
            while nth_prime(i) < d:
                i += 1
            if nth_prime(i) != d:
                return None
            return (i, k - 1)
    return None


def is_prime_power(n):
    return prime_power_base(n) is not None


_NONPP = []


def nth_non_prime_power(n):
    c = _NONPP[-1] + 1 if _NONPP else 0
    while len(_NONPP) <= n:
        if not is_prime_power(c):
            _NONPP.append(c)
        c += 1
    return _NONPP[n]


def non_prime_power_index(x):
    """Inverse of nth_non_prime_power, or None."""
    if is_prime_power(x):
        return None
    i = 0
    while True:
        v = nth_non_prime_power(i)
        if v == x:
            return i
        if v > x:
            return None
        i += 1


def parse_rational(text):
    """Exact rational from 'p/q' or integer text."""
    t = text.strip()
    if "/" in t:
        num, den = t.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(t))


def format_rational(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)
