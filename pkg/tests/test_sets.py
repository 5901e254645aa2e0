"""Set specs: exact membership, derivatives, ranks, transport.

The ordinal-embedding oracle below is an independent reading of the same
classical layout: a point is named by its Cantor normal form digits, its
position is computed by a closed formula on the digits, and membership in
the d-th derivative is the statement that every digit below w^d vanishes.
The implementation route goes through interval descent instead; the tests
require the two to agree pointwise.
"""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ballrank import ordinal as O
from ballrank.ordinal import ZERO, ONE, from_int, omega_power, ord_add, ord_cmp
from ballrank.spaces import (
    BallId,
    BaireSpace,
    AffineHomeo,
    IdentityHomeo,
    SwitchHomeo,
    ball_strictly_below,
    presentation,
    pushforward_presentation,
    unit_interval,
)
from ballrank.switch import image_term, switch_pair
from ballrank.trees import Base, ConstLine, term_key
from ballrank.sets import (
    SetError,
    Empty,
    FinitePoints,
    ConvergentPackage,
    OrdinalEmbedding,
    BranchFamily,
    SwitchImage,
    ambient_problems,
    cb_derivative,
    cb_rank,
    homeo_image,
    is_discrete,
    meets,
    meets_window,
    ordemb_levels,
    sample_points,
    switch_apply,
)


# --- oracle: digit addresses for w^a * m + 1, a <= 3 ----------------------


def oracle_pos_unit(k, digits):
    # position of w^(k-1)*c + rest inside a unit block
    if k == 0:
        return F(0)
    c, rest = digits[0], digits[1:]
    return (1 - F(1, 2 ** c)) + F(1, 2 ** (c + 1)) * oracle_pos_unit(k - 1, rest)


def oracle_pos(alpha, m, j, digits):
    if j == m:
        return F(1)
    return (j + oracle_pos_unit(alpha, digits)) / m


def oracle_lsb(alpha, j, digits):
    # least exponent carrying a nonzero digit; None for the origin
    for e in range(alpha):
        if digits[alpha - 1 - e] != 0:
            return e
    return None if j == 0 else alpha


def oracle_table(alpha, m, bound):
    out = {}
    for j in range(m):
        for digits in itertools.product(range(bound + 1), repeat=alpha):
            out[oracle_pos(alpha, m, j, digits)] = oracle_lsb(alpha, j, digits)
    out[F(1)] = alpha if m > 0 else None
    return out


@pytest.mark.parametrize("alpha,m", [(0, 1), (0, 3), (1, 1), (2, 1), (2, 2), (3, 1)])
def test_embedding_matches_address_layout(alpha, m):
    spec = OrdinalEmbedding(alpha, m)
    impl = ordemb_levels(spec, depth=3)
    want = oracle_table(alpha, m, 3)
    for pos, lsb in want.items():
        assert pos in impl
        if lsb is None:
            assert impl[pos] is None
        else:
            assert impl[pos] == from_int(lsb)
    # truncation frontier: block tops carry one extra digit value
    wider = oracle_table(alpha, m, 4)
    for pos, lsb in impl.items():
        assert pos in wider
        assert (lsb is None) == (wider[pos] is None)
        if lsb is not None:
            assert lsb == from_int(wider[pos])


@pytest.mark.parametrize("alpha,m", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_derivative_membership_two_routes(alpha, m):
    want = oracle_table(alpha, m, 2)
    spec = OrdinalEmbedding(alpha, m)
    for d in range(alpha + 1):
        assert spec.level == d
        for pos, lsb in want.items():
            expected = d == 0 or (lsb is not None and lsb >= d)
            assert meets_window(spec, pos, pos) == expected, (d, pos)
        spec = cb_derivative(spec)
    assert spec == Empty()


def test_gaps_between_consecutive_addresses():
    for alpha, m in [(1, 1), (2, 1), (3, 2)]:
        spec = OrdinalEmbedding(alpha, m)
        for j in range(m):
            for digits in itertools.product(range(3), repeat=alpha):
                nxt = digits[:-1] + (digits[-1] + 1,) if alpha else None
                if nxt is None:
                    continue
                lo = oracle_pos(alpha, m, j, digits)
                hi = oracle_pos(alpha, m, j, nxt)
                assert not meets_window(spec, lo, hi, closed=False), (j, digits)


def test_rank_closed_forms():
    assert cb_rank(OrdinalEmbedding(0, 1)) == ONE
    assert cb_rank(OrdinalEmbedding(1, 1)) == from_int(2)
    assert cb_rank(OrdinalEmbedding(3, 2)) == from_int(4)
    w = omega_power(1)
    assert cb_rank(OrdinalEmbedding(w, 1)) == ord_add(w, ONE)
    big = ord_add(O.ord_mul(omega_power(2), from_int(2)), w)
    assert cb_rank(OrdinalEmbedding(big, 3)) == ord_add(big, ONE)
    # finite levels do not dent a transfinite exponent
    assert cb_rank(cb_derivative(OrdinalEmbedding(w, 1))) == ord_add(w, ONE)
    assert cb_rank(cb_derivative(OrdinalEmbedding(2, 1))) == from_int(2)
    with pytest.raises(SetError):
        OrdinalEmbedding(omega_power(from_int(4)), 1)
    with pytest.raises(SetError):
        OrdinalEmbedding(2, 0)
    with pytest.raises(SetError):
        OrdinalEmbedding(2, 1, level=3)


def test_sample_points_frozen():
    e = OrdinalEmbedding(1, 1)
    assert sample_points(e, depth=3) == [F(0), F(1, 2), F(3, 4), F(7, 8), F(15, 16), F(1)]
    assert sample_points(cb_derivative(e), depth=3) == [F(1)]
    conv = ConvergentPackage((F(1, 3),), ((F(0), F(1)),))
    assert sample_points(conv, depth=2) == [F(0), F(1, 4), F(1, 3), F(1, 2), F(1)]


def test_meets_frozen_examples():
    p = presentation(unit_interval())
    assert p.point(2) == F(1, 2)
    assert meets(FinitePoints((F(0), F(1, 2))), p, BallId(2, 3))
    conv = ConvergentPackage((), ((F(0), F(1)),))
    assert meets(conv, p, BallId(0, 5))
    pb = presentation(BaireSpace())
    assert pb.open_extent(BallId(3, 2)) == (0, 1)
    assert not meets(BranchFamily(Base()), pb, BallId(3, 2))
    assert pb.open_extent(BallId(1, 1)) == (1,)
    assert meets(BranchFamily(Base()), pb, BallId(1, 1))
    assert not meets(Empty(), p, BallId(0, 0))


def test_convergent_windows():
    conv = ConvergentPackage((), ((F(0), F(1)),))
    assert meets_window(conv, F(0), F(1, 64), closed=False)
    assert not meets_window(conv, F(1, 3), F(1, 2), closed=False)
    assert meets_window(conv, F(1, 3), F(1, 2), closed=True)
    assert meets_window(conv, F(0), F(0), closed=True)  # the limit itself
    up = ConvergentPackage((), ((F(1, 3), F(-1, 3)),))
    # elements 0, 1/6, 1/4, 7/24, ... climbing to 1/3
    assert meets_window(up, F(1, 4), F(1, 3), closed=False)
    assert meets_window(up, F(0), F(0), closed=True)
    assert not meets_window(up, F(1, 3), F(1, 2), closed=False)
    assert not meets_window(up, F(27, 80), F(1, 2), closed=True)
    with pytest.raises(SetError):
        ConvergentPackage((), ((F(0), F(0)),))


def test_meets_monotone_under_ball_refinement():
    p = presentation(unit_interval())
    specs = [
        ConvergentPackage((F(2, 3),), ((F(0), F(1, 2)),)),
        OrdinalEmbedding(2, 1),
        FinitePoints((F(0), F(1, 3), F(1))),
    ]
    balls = [BallId(i, k) for i in range(9) for k in range(4)]
    for fine in balls:
        for coarse in balls:
            if not ball_strictly_below(p, fine, coarse):
                continue
            for spec in specs:
                if meets(spec, p, fine):
                    assert meets(spec, p, coarse), (spec, fine, coarse)


def test_derivative_points_stay_in_the_set():
    specs = [
        ConvergentPackage((F(1, 7),), ((F(0), F(1)), (F(1, 2), F(-1, 4)))),
        OrdinalEmbedding(2, 2),
        OrdinalEmbedding(3, 1),
    ]
    for spec in specs:
        der = cb_derivative(spec)
        for x in sample_points(der, depth=2):
            assert meets_window(spec, x, x), (spec, x)


def test_derivative_and_rank_small_variants():
    assert cb_derivative(Empty()) == Empty()
    assert cb_rank(Empty()) == ZERO
    assert cb_rank(FinitePoints(())) == ZERO
    assert cb_rank(FinitePoints((F(1),))) == ONE
    assert cb_derivative(FinitePoints((F(1),))) == Empty()
    conv = ConvergentPackage((F(5),), ((F(0), F(1)), (F(0), F(-1)), (F(3), F(2))))
    assert cb_rank(conv) == from_int(2)
    der = cb_derivative(conv)
    assert der == FinitePoints((F(0), F(3)))  # anchors, deduplicated and sorted
    assert cb_rank(ConvergentPackage((F(1), F(2)), ())) == ONE


def test_discreteness():
    assert is_discrete(Empty())
    assert is_discrete(FinitePoints((F(0),)))
    assert is_discrete(BranchFamily(Base()))
    assert not is_discrete(ConvergentPackage((), ((F(0), F(1)),)))
    assert not is_discrete(OrdinalEmbedding(1, 1))
    assert is_discrete(OrdinalEmbedding(0, 4))


def test_switch_images():
    pair = switch_pair(3)
    base = BranchFamily(Base())
    img = switch_apply(pair, base)
    assert isinstance(img, SwitchImage)
    assert term_key(img.term) == term_key(image_term(3))
    assert switch_apply(pair, img) == base  # involution
    assert switch_apply(switch_pair(2), base) == base  # level-2 map is identity
    assert cb_rank(img) == ONE
    assert cb_derivative(img) == Empty()
    # pointwise transport of a finite branch set
    moved = switch_apply(pair, FinitePoints((((), 4), ((), 7))))
    assert moved.points == (pair.apply_branch(((), 4)), pair.apply_branch(((), 7)))
    with pytest.raises((SetError, Exception)):
        switch_apply(pair, ConvergentPackage((), ((F(0), F(1)),)))


def test_switch_image_membership_matches_twisted_presentation():
    pair = switch_pair(3)
    pb = presentation(BaireSpace())
    twisted = pushforward_presentation(pb, SwitchHomeo(pair))
    base = BranchFamily(Base())
    img = switch_apply(pair, base)
    for i in range(8):
        for k in range(3):
            ball = BallId(i, k)
            assert meets(base, twisted, ball) == meets(img, pb, ball), (i, k)


def test_homeo_transport():
    f = AffineHomeo(F(-1), F(1))
    assert homeo_image(FinitePoints((F(0), F(1, 4))), f).points == (F(1), F(3, 4))
    conv = ConvergentPackage((F(1, 2),), ((F(0), F(1)),))
    out = homeo_image(conv, f)
    assert out.points == (F(1, 2),)
    assert out.sequences == ((F(1), F(-1)),)
    spec = OrdinalEmbedding(1, 1)
    assert homeo_image(spec, IdentityHomeo()) is spec
    with pytest.raises(SetError):
        homeo_image(spec, f)
    with pytest.raises(SetError):
        homeo_image(BranchFamily(Base()), f)


def test_affine_twisted_membership_both_routes():
    f = AffineHomeo(F(-1), F(1))
    p = presentation(unit_interval())
    twisted = pushforward_presentation(p, f)
    conv = ConvergentPackage((), ((F(0), F(1, 2)),))
    mirrored = homeo_image(conv, f)
    for i in range(10):
        for k in range(4):
            ball = BallId(i, k)
            assert meets(conv, twisted, ball) == meets(mirrored, p, ball), (i, k)


def test_ambient_reports():
    assert ambient_problems(OrdinalEmbedding(2, 1), unit_interval()) == []
    assert ambient_problems(BranchFamily(Base()), BaireSpace()) == []
    assert ambient_problems(OrdinalEmbedding(2, 1), BaireSpace())
    assert ambient_problems(BranchFamily(Base()), unit_interval())
    from ballrank.spaces import IntervalSpace

    half = IntervalSpace(((F(0), F(1, 2)),))
    assert ambient_problems(OrdinalEmbedding(1, 1), half)


def test_spec_validation():
    with pytest.raises(SetError):
        BranchFamily("base")
    with pytest.raises(SetError):
        SwitchImage(from_int(3), Base())
    with pytest.raises(SetError):
        OrdinalEmbedding(1, 1, level=-1)


@settings(max_examples=60, deadline=None)
@given(
    a=st.fractions(min_value=F(0), max_value=F(1), max_denominator=16),
    c=st.fractions(min_value=F(-1), max_value=F(1), max_denominator=8),
    lo=st.fractions(min_value=F(-1), max_value=F(2), max_denominator=32),
    width=st.fractions(min_value=F(0), max_value=F(1), max_denominator=32),
)
def test_convergent_window_consistent_with_samples(a, c, lo, width):
    if c == 0:
        return
    spec = ConvergentPackage((), ((a, c),))
    hi = lo + width
    hit = meets_window(spec, lo, hi, closed=True)
    sampled = sample_points(spec, depth=12)
    if any(lo <= x <= hi for x in sampled):
        assert hit
    if not hit:
        assert not any(lo <= x <= hi for x in sampled)
