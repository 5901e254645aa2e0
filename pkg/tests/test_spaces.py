"""Geometry tests: exact ball extents, relations, enumerations.

Expected values were computed by hand from the metric formulas and the
radius schedules and are frozen here.
"""

from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ballrank import spaces as sp
from ballrank import trees
from ballrank.spaces import (
    ALIGNED_ULTRA,
    DYADIC_PAPER,
    DYADIC_TOP,
    AffineHomeo,
    AmalgamSum,
    BaireSpace,
    BallId,
    FiniteSpace,
    Hedgehog,
    IntervalSpace,
    Iv,
    RealLine,
    Scaled,
    SpaceError,
    SwitchHomeo,
    UltraTable,
    ball_apart,
    ball_strictly_below,
    dense_swap,
    dist,
    metric,
    presentation,
    pushforward_presentation,
    unit_interval,
    validate_presentation,
)
from ballrank.switch import switch_pair


def baire():
    return presentation(BaireSpace())


def two_points():
    m = ((F(0), F(1)), (F(1), F(0)))
    return presentation(FiniteSpace(("a", "b"), m))


# ---------------------------------------------------------------------------
# schedules and cylinder alignment


def test_schedule_values():
    assert [DYADIC_PAPER.radius(k) for k in range(3)] == [F(1, 2), F(1, 4), F(1, 8)]
    assert [DYADIC_TOP.radius(k) for k in range(3)] == [F(1), F(1, 2), F(1, 4)]
    assert [ALIGNED_ULTRA.radius(k) for k in range(3)] == [F(3, 4), F(3, 8), F(3, 16)]


def test_cylinder_levels_per_schedule():
    for k in range(6):
        assert sp.cylinder_level(ALIGNED_ULTRA.radius(k), False) == k
        assert sp.cylinder_level(ALIGNED_ULTRA.radius(k), True) == k
        assert sp.cylinder_level(DYADIC_PAPER.radius(k), False) == k + 1
        assert sp.cylinder_level(DYADIC_PAPER.radius(k), True) == k
        assert sp.cylinder_level(DYADIC_TOP.radius(k), False) == k
        assert sp.cylinder_level(DYADIC_TOP.radius(k), True) == max(k - 1, 0)


# ---------------------------------------------------------------------------
# dense enumerations


def test_unit_interval_enumerations():
    p = presentation(unit_interval())
    assert [p.point(i) for i in range(8)] == [
        F(0), F(1), F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 5),
    ]
    q = dense_swap(p, "farey-nozero")
    pts = [q.point(i) for i in range(6)]
    assert F(0) not in pts and pts[0] == F(1)


def test_line_spiral_enumeration():
    p = presentation(RealLine())
    assert [p.point(i) for i in range(7)] == [
        F(0), F(1), F(-1), F(1, 2), F(-1, 2), F(2), F(-2),
    ]


def test_baire_enumeration_is_injective_and_eventually_constant():
    p = baire()
    pts = [p.point(i) for i in range(40)]
    assert pts[0] == ((), 0)
    assert len(set(pts)) == 40
    assert all(t == 0 and (not w or w[-1] != 0) for w, t in pts)
    q = dense_swap(p, "ev1")
    assert q.point(0) == ((), 1)


def test_enumerations_are_injective():
    reps = [
        presentation(unit_interval()),
        presentation(RealLine()),
        presentation(Hedgehog()),
        baire(),
    ]
    for p in reps:
        pts = [p.point(i) for i in range(30)]
        assert len(set(pts)) == 30


def test_finite_space_enumeration_bounds():
    p = two_points()
    assert [p.point(i) for i in range(2)] == [0, 1]
    with pytest.raises(SpaceError):
        p.point(2)
    assert dense_swap(p, "reversed").point(0) == 1


# ---------------------------------------------------------------------------
# metric values


def test_interval_and_line_distances():
    p = presentation(unit_interval())
    assert dist(p, 0, 1) == 1
    assert dist(p, 2, 3) == F(1, 6)


def test_hedgehog_metric():
    h = Hedgehog()
    assert metric(h, (1, F(1, 2)), (2, F(1, 3))) == F(5, 6)
    assert metric(h, (1, F(1, 2)), (1, F(1, 3))) == F(1, 6)
    assert metric(h, (0, F(0)), (5, F(1, 4))) == F(1, 4)


def test_word_metric():
    b = BaireSpace()
    assert metric(b, ((), 0), ((), 0)) == 0
    assert metric(b, ((), 0), ((), 1)) == F(1, 2)
    assert metric(b, ((0, 0, 3), 0), ((), 0)) == F(1, 8)


def test_amalgam_metric_uses_anchors_and_bridges():
    a = AmalgamSum(
        ((unit_interval(), F(0), F(1, 2)), (unit_interval(), F(0), F(1, 2)))
    )
    assert metric(a, (0, F(0)), (1, F(0))) == 1
    assert metric(a, (0, F(1, 2)), (1, F(1, 3))) == F(11, 6)
    assert metric(a, (1, F(1, 4)), (1, F(3, 4))) == F(1, 2)


def test_scaled_metric():
    s = Scaled(F(1, 4), unit_interval())
    assert metric(s, F(0), F(1)) == F(1, 4)


# ---------------------------------------------------------------------------
# ball relations


def test_interval_extents_and_relations():
    p = presentation(unit_interval())
    assert p.open_extent(BallId(0, 0))[0] == Iv(F(0), False, F(1, 2), True)
    assert p.closed_extent(BallId(0, 0))[0] == Iv(F(0), False, F(1, 2), False)
    assert ball_strictly_below(p, BallId(0, 2), BallId(0, 0))
    assert not ball_strictly_below(p, BallId(0, 0), BallId(0, 2))
    assert ball_apart(p, BallId(0, 1), BallId(1, 1))
    assert not ball_apart(p, BallId(0, 1), BallId(2, 1))  # closed balls touch


def test_word_space_reference_relations():
    p = baire()

    def oracle_below(m, n):
        # aligned schedule: both balls are cylinders at their own level
        if not n.level < m.level:
            return False
        pm = trees.branch_prefix(p.point(m.center), m.level)
        pn = trees.branch_prefix(p.point(n.center), n.level)
        return pm[: len(pn)] == pn

    def oracle_apart(m, n):
        pm = trees.branch_prefix(p.point(m.center), m.level)
        pn = trees.branch_prefix(p.point(n.center), n.level)
        k = min(len(pm), len(pn))
        return pm[:k] != pn[:k]

    codes = [
        BallId(i, k) for i in range(8) for k in range(4)
    ]
    for m, n in itertools.product(codes, repeat=2):
        assert ball_strictly_below(p, m, n) == oracle_below(m, n)
        assert ball_apart(p, m, n) == oracle_apart(m, n)


@pytest.mark.parametrize(
    "build",
    [
        lambda: presentation(unit_interval()),
        lambda: presentation(unit_interval(), schedule=DYADIC_TOP),
        lambda: presentation(RealLine()),
        lambda: presentation(Hedgehog()),
        lambda: baire(),
        lambda: presentation(BaireSpace(), schedule=DYADIC_PAPER),
        lambda: two_points(),
        lambda: presentation(Scaled(F(1, 2), unit_interval())),
    ],
)
def test_never_both_below_and_apart(build):
    p = build()
    idxs = range(2) if isinstance(p.space, FiniteSpace) else range(5)
    codes = [BallId(i, k) for i in idxs for k in range(3)]
    for m, n in itertools.product(codes, repeat=2):
        assert not (ball_strictly_below(p, m, n) and ball_apart(p, m, n))


def test_hedgehog_cross_spine_relations():
    p = presentation(Hedgehog())
    # points: 0 -> center; find two deep same-level codes on distinct spines
    pts = [p.point(i) for i in range(40)]
    spined = [i for i, (s, r) in enumerate(pts) if r > F(1, 2)]
    i, j = spined[0], next(j for j in spined[1:] if pts[j][0] != pts[spined[0]][0])
    assert ball_apart(p, BallId(i, 2), BallId(j, 2))
    # the center ball at level 0 strictly contains deep balls near the center
    near = next(i for i, (s, r) in enumerate(pts) if 0 < r <= F(1, 4))
    assert ball_strictly_below(p, BallId(near, 3), BallId(0, 0))


def test_ultratable_relations_match_baire_rules():
    term = trees.union(
        trees.ConstLine(0), trees.prepend((1,), trees.ConstLine(0))
    )
    p = presentation(UltraTable(term))
    pts = [p.point(i) for i in range(2)]
    i0, i1 = pts.index(((), 0)), pts.index(((1,), 0))
    assert ball_apart(p, BallId(i0, 1), BallId(i1, 1))
    assert ball_strictly_below(p, BallId(i1, 2), BallId(i0, 0))


# ---------------------------------------------------------------------------
# validation, swap, pushforward


def test_validation_accepts_stock_presentations():
    stock = [
        presentation(unit_interval()),
        presentation(unit_interval(), rule="farey-nozero"),
        presentation(RealLine()),
        presentation(Hedgehog()),
        baire(),
        two_points(),
        presentation(Scaled(F(1, 2), unit_interval())),
        presentation(
            AmalgamSum(
                (
                    (FiniteSpace(("x", "y"), ((F(0), F(1)), (F(1), F(0)))), 0, F(1, 3)),
                    (unit_interval(), F(0), F(1, 3)),
                )
            )
        ),
    ]
    for p in stock:
        rep = validate_presentation(p)
        assert rep.ok, (p.space, rep.problems)


def test_validation_flags_broken_matrix():
    bad = FiniteSpace(("a", "b"), ((F(0), F(1)), (F(2), F(0))))
    rep = validate_presentation(presentation(bad))
    assert not rep.ok
    assert any("symmetry" in msg for msg in rep.problems)


def test_whole_space_ball_note():
    rep = validate_presentation(presentation(unit_interval(), schedule=DYADIC_TOP))
    assert any("whole-space ball: yes" in n for n in rep.notes)
    rep2 = validate_presentation(presentation(RealLine()))
    assert any("whole-space ball: no" in n for n in rep2.notes)


def test_dense_swap_preserves_distances_between_common_points():
    p = presentation(unit_interval())
    q = dense_swap(p, "farey-nozero")
    # the swapped enumeration shifts indices by one while 0 is missing
    assert q.rule == "farey-nozero" and q.space == p.space
    with pytest.raises(SpaceError):
        dense_swap(p, "ev0")


def test_affine_pushforward():
    f = AffineHomeo(F(1, 2), F(1, 4))
    base = presentation(RealLine())
    pf = pushforward_presentation(base, f)
    for i in range(6):
        for j in range(6):
            assert dist(pf, i, j) == dist(base, i, j)
    assert pf.point(1) == F(3, 2)  # preimage of 1 under x/2 + 1/4
    assert validate_presentation(pf).ok
    with pytest.raises(SpaceError):
        pushforward_presentation(pf, f)  # no double twist


def test_switch_pushforward():
    f = SwitchHomeo(switch_pair(3))
    pf = pushforward_presentation(baire(), f)
    base = baire()
    for i in range(6):
        for j in range(6):
            assert dist(pf, i, j) == dist(base, i, j)
    # membership is tested through the map: the pulled-back point sits in
    # the pulled-back ball
    x = pf.point(3)
    assert pf.contains_point(BallId(3, 2), x)
    with pytest.raises(SpaceError):
        pushforward_presentation(presentation(RealLine()), f)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 10), st.integers(0, 4), st.integers(0, 10), st.integers(0, 4)
)
def test_interval_below_implies_distance_bound(i, k, j, l):
    # if n is strictly below m then every point of m's closed ball is
    # within n's radius of n's center, so centers are close
    p = presentation(unit_interval())
    m, n = BallId(i, k), BallId(j, l)
    if ball_strictly_below(p, m, n):
        assert dist(p, i, j) < p.radius(l)
        assert not ball_apart(p, m, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 14), st.integers(0, 14))
def test_word_metric_is_ultrametric(i, j):
    p = baire()
    x, y, z = p.point(i), p.point(j), p.point((i + j) % 15)
    b = BaireSpace()
    assert metric(b, x, y) <= max(metric(b, x, z), metric(b, z, y))
