from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from ballrank.ordinal import (
    DEPTH_CAP,
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalDepthError,
    OrdinalParseError,
    format_ordinal,
    from_int,
    fundamental_seq,
    omega_power,
    ord_add,
    ord_cmp,
    ord_mul,
    ord_pred,
    ord_succ,
    parse_ordinal,
)

from oracles import Triple, RangeExceeded, t_is_limit, t_is_successor, tadd, tcmp, tmul


def triple_to_ordinal(t):
    return ord_add(
        ord_add(ord_mul(omega_power(2), from_int(t.a)), ord_mul(OMEGA, from_int(t.b))),
        from_int(t.c),
    )


SMALL = [Triple(a, b, c) for a, b, c in itertools.product(range(6), repeat=3)]


def test_triple_encoding_roundtrip():
    assert triple_to_ordinal(Triple(0, 0, 0)) == ZERO
    assert triple_to_ordinal(Triple(0, 1, 0)) == OMEGA
    assert triple_to_ordinal(Triple(2, 0, 3)) == parse_ordinal("w^2*2+3")


def test_cmp_matches_lex_oracle_exhaustively():
    ords = [triple_to_ordinal(t) for t in SMALL]
    for (t1, o1), (t2, o2) in itertools.product(zip(SMALL, ords), repeat=2):
        assert ord_cmp(o1, o2) == tcmp(t1, t2)


def test_add_matches_order_type_oracle_exhaustively():
    ords = [triple_to_ordinal(t) for t in SMALL]
    for (t1, o1), (t2, o2) in itertools.product(zip(SMALL, ords), repeat=2):
        assert ord_add(o1, o2) == triple_to_ordinal(tadd(t1, t2))


def test_mul_matches_order_type_oracle_where_encodable():
    w3 = omega_power(3)
    ords = [triple_to_ordinal(t) for t in SMALL]
    for (t1, o1), (t2, o2) in itertools.product(zip(SMALL, ords), repeat=2):
        got = ord_mul(o1, o2)
        try:
            expect = triple_to_ordinal(tmul(t1, t2))
        except RangeExceeded:
            assert ord_cmp(got, w3) >= 0
        else:
            assert got == expect


def test_classification_matches_oracle():
    for t in SMALL:
        o = triple_to_ordinal(t)
        assert o.is_limit() == t_is_limit(t)
        assert o.is_successor() == t_is_successor(t)
        assert o.is_zero() == t.is_zero()


def test_known_arithmetic_values():
    assert ord_add(parse_ordinal("w*2+1"), OMEGA) == parse_ordinal("w*3")
    assert ord_mul(parse_ordinal("w+2"), OMEGA) == parse_ordinal("w^2")
    assert ord_mul(from_int(2), OMEGA) == OMEGA
    assert ord_succ(parse_ordinal("w")) == parse_ordinal("w+1")
    assert ord_pred(parse_ordinal("w+1")) == OMEGA


def test_fundamental_seq_frozen_values():
    assert fundamental_seq(OMEGA, 3) == from_int(4)
    assert fundamental_seq(parse_ordinal("w*2"), 3) == parse_ordinal("w+4")
    assert fundamental_seq(parse_ordinal("w^2"), 2) == parse_ordinal("w*3")
    assert fundamental_seq(parse_ordinal("w^2*2"), 1) == parse_ordinal("w^2+w*2")


def test_fundamental_seq_increases_and_stays_below():
    for text in ["w", "w*2", "w^2", "w^2+w", "w^3", "w^w"]:
        lam = parse_ordinal(text)
        prev = None
        for i in range(6):
            x = fundamental_seq(lam, i)
            assert ord_cmp(x, lam) < 0
            if prev is not None:
                assert ord_cmp(prev, x) < 0
            prev = x


def test_parse_format_roundtrip_examples():
    for text in ["0", "7", "w", "w*2+1", "w^2", "w^2*3+w*2+5", "w^w", "w^(w+1)*2+4"]:
        assert format_ordinal(parse_ordinal(text)) == text


def test_parse_rejects_junk():
    for bad in ["", "w+w", "1+w", "w*0", "w^", "3+2", "w*2+", "(w)"]:
        with pytest.raises(OrdinalParseError):
            parse_ordinal(bad)


def test_depth_cap_enforced():
    o = OMEGA
    for _ in range(DEPTH_CAP - o.depth()):
        o = omega_power(o)
    assert o.depth() == DEPTH_CAP
    with pytest.raises(OrdinalDepthError):
        omega_power(o)


ordinal_texts = st.sampled_from(
    ["0", "1", "5", "w", "w+1", "w*2", "w*3+2", "w^2", "w^2+w", "w^2*2+w*4+1", "w^3", "w^w"]
)


@given(ordinal_texts, ordinal_texts, ordinal_texts)
def test_addition_is_associative(x, y, z):
    a, b, c = parse_ordinal(x), parse_ordinal(y), parse_ordinal(z)
    assert ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))


@given(ordinal_texts, ordinal_texts)
def test_addition_right_monotone(x, y):
    a, b = parse_ordinal(x), parse_ordinal(y)
    if ord_cmp(b, ZERO) > 0:
        assert ord_cmp(ord_add(a, b), a) > 0


@given(ordinal_texts, ordinal_texts, ordinal_texts)
def test_left_distributivity(x, y, z):
    a, b, c = parse_ordinal(x), parse_ordinal(y), parse_ordinal(z)
    assert ord_mul(a, ord_add(b, c)) == ord_add(ord_mul(a, b), ord_mul(a, c))


@given(ordinal_texts)
def test_roundtrip_property(x):
    o = parse_ordinal(x)
    assert parse_ordinal(format_ordinal(o)) == o
