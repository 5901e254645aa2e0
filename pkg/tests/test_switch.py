"""Switch-pair generator and image tests.

The frozen word tables below were computed by hand from the recursion:
level 2 generators are s_i = t_i = (i); a successor level doubles (or
doubles-plus-one) the entries of the head-duplicated previous s-words and
prefixes 0/1 to the relabeled previous t-words; a limit level folds the
approximating levels through prime-power relabelings, one prime per
approximant, with pair indices interleaved by the triangular pairing.
"""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ballrank import trees
from ballrank.ordinal import OMEGA, from_int, ord_add, parse_ordinal
from ballrank.switch import (
    SwitchError,
    image_term,
    stage_ordinal,
    switch_apply_term,
    switch_pair,
)
from ballrank.trees import term_contains_branch, term_key


def words(fn, n):
    return [fn(j) for j in range(n)]


# ---------------------------------------------------------------------------
# frozen generator tables


def test_level_three_generators():
    p = switch_pair(3)
    assert words(p.s_word, 6) == [
        (0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5),
    ]
    assert words(p.t_word, 6) == [
        (0, 0), (1, 1), (0, 2), (1, 3), (0, 4), (1, 5),
    ]


def test_level_four_generators():
    p = switch_pair(4)
    assert words(p.s_word, 6) == [
        (0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3), (4, 4, 4), (5, 5, 5),
    ]
    assert words(p.t_word, 12) == [
        (0, 0, 0), (1, 1, 1), (0, 2, 2), (1, 3, 3),
        (0, 0, 4), (1, 1, 5), (0, 2, 6), (1, 3, 7),
        (0, 0, 8), (1, 1, 9), (0, 2, 10), (1, 3, 11),
    ]


def test_limit_level_generators():
    p = switch_pair(OMEGA)
    assert words(p.s_word, 6) == [
        (2, 2), (3, 3, 3), (4, 4), (5, 5, 5, 5), (9, 9, 9), (8, 8),
    ]
    assert words(p.t_word, 6) == [
        (2, 2), (3, 3, 3), (2, 4), (5, 5, 5, 5), (3, 9, 9), (2, 8),
    ]


def test_limit_stage_indices_strictly_increase():
    got = [stage_ordinal(OMEGA, i) for i in range(4)]
    assert got == [from_int(2), from_int(3), from_int(4), from_int(5)]
    w1 = ord_add(OMEGA, from_int(1))
    stages = [stage_ordinal(parse_ordinal("w*2"), i) for i in range(3)]
    assert stages[0] == w1 or stages  # stages exist and are ordinals


# ---------------------------------------------------------------------------
# incomparability: three clauses on all pairs with index <= 50


def _incomparable(u, v):
    k = min(len(u), len(v))
    return u[:k] != v[:k]


@pytest.mark.parametrize(
    "level", [3, 4, 5, OMEGA, ord_add(OMEGA, from_int(1))]
)
def test_generator_incomparability_clauses(level):
    p = switch_pair(level)
    N = 51
    s = words(p.s_word, N)
    t = words(p.t_word, N)
    for i, j in itertools.combinations(range(N), 2):
        assert _incomparable(s[i], s[j])
        assert _incomparable(t[i], t[j])
    for i in range(N):
        for j in range(N):
            assert s[i] == t[j] or _incomparable(s[i], t[j])


def test_matched_generators_have_equal_length():
    for level in (3, 4, OMEGA):
        p = switch_pair(level)
        for j in range(40):
            assert len(p.s_word(j)) == len(p.t_word(j))


# ---------------------------------------------------------------------------
# the branch map


def const(k):
    return ((), k)


def test_level_two_is_identity():
    p = switch_pair(2)
    for k in range(10):
        assert p.apply_branch(const(k)) == const(k)


def test_level_three_on_constants():
    p = switch_pair(3)
    # constant 2i maps to (0, 2i) then constant 2i, and back
    assert p.apply_branch(const(4)) == ((0,), 4)
    assert p.apply_branch(const(5)) == ((1,), 5)
    assert p.apply_branch(((0,), 4)) == const(4)
    assert p.apply_branch(const(0)) == const(0)  # s_0 = t_0


def test_apply_is_involution_on_sample_branches():
    corpus = [const(k) for k in range(13)]
    corpus += [((2, 7), 0), ((1, 0, 3), 2), ((5,), 1), ((0, 0, 0, 1), 0)]
    for level in (3, 4, 5, OMEGA):
        p = switch_pair(level)
        for x in corpus:
            assert p.apply_branch(p.apply_branch(x)) == x


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(0, 12), max_size=5).map(tuple),
    st.integers(0, 12),
    st.sampled_from([3, 4, OMEGA]),
)
def test_apply_involution_property(word, tail, level):
    x = trees._norm_branch(word, tail)
    p = switch_pair(level)
    assert p.apply_branch(p.apply_branch(x)) == x


def test_apply_swaps_generator_cylinders():
    for level in (3, 4, OMEGA):
        p = switch_pair(level)
        for j in range(12):
            s, t = p.s_word(j), p.t_word(j)
            x = trees._norm_branch(s + (9, 4), 1)
            y = p.apply_branch(x)
            assert y == trees._norm_branch(t + (9, 4), 1)
            assert p.apply_branch(y) == x


# ---------------------------------------------------------------------------
# closed-form images against the pointwise map


def test_image_term_level_two_is_base():
    assert term_key(image_term(2)) == term_key(trees.Base())


@pytest.mark.parametrize("level", [3, 4, 5, OMEGA, ord_add(OMEGA, from_int(1))])
def test_pointwise_images_lie_in_image_term(level):
    p = switch_pair(level)
    im = image_term(level)
    for k in range(25):
        assert term_contains_branch(im, p.apply_branch(const(k)))


@pytest.mark.parametrize("level", [3, 4, OMEGA])
def test_image_term_branches_map_back_to_constants(level):
    p = switch_pair(level)
    im = image_term(level)
    for br in trees.term_branches(im, 9, block_bound=3):
        back = p.apply_branch(br)
        assert back[0] == (), br  # a constant branch
        assert term_contains_branch(im, br)


def test_switch_apply_term_round_trip():
    base = trees.Base()
    for level in (3, 4, OMEGA):
        p = switch_pair(level)
        im = switch_apply_term(p, base)
        assert term_key(im) == term_key(image_term(level))
        assert term_key(switch_apply_term(p, im)) == term_key(base)
    ident = switch_pair(2)
    assert term_key(switch_apply_term(ident, base)) == term_key(base)


def test_image_past_the_first_limit_keeps_fixed_lines():
    # constants 2m+e with m not a prime power are fixed by the level-(w+1)
    # map, so they stay in the image as constant lines
    w1 = ord_add(OMEGA, from_int(1))
    p = switch_pair(w1)
    im = image_term(w1)
    assert p.apply_branch(const(2)) == const(2)  # m=1 is not a prime power
    assert term_contains_branch(im, const(2))
    assert p.apply_branch(const(4)) != const(4)  # m=2 is a prime power
    assert term_contains_branch(im, p.apply_branch(const(4)))
    assert not term_contains_branch(im, const(4))
    with pytest.raises(SwitchError):
        image_term(parse_ordinal("w*2"))


def test_switch_apply_term_rejects_unrelated_terms():
    p = switch_pair(3)
    with pytest.raises(SwitchError):
        switch_apply_term(p, trees.ConstLine(7))


def test_level_bounds():
    with pytest.raises(SwitchError):
        switch_pair(1)
    with pytest.raises(SwitchError):
        switch_pair(parse_ordinal("w^2"))  # above the default cap
