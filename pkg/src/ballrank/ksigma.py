"""Sigma-compactness rank of the catalog space families.

Removing the locally compact part of a space and repeating yields a
decreasing chain of closed remainders X_0 = X, X_{a+1} = non-locally-compact
points of X_a.  The chain stabilizes after finitely many steps on every
catalog family; the step count is the space's rank here, and the space is a
countable union of compacts exactly when the chain stabilizes at the empty
set.  Deciders are closed form per family: compactness of arbitrary derived
subspaces is not computed from balls, the algebra of reachable remainders is
written down instead, which keeps every answer exact.

Supported families: FiniteSpace, IntervalSpace, RealLine, Hedgehog,
BaireSpace, AmalgamSum over these, and Scaled wrappers (scaling does not
move any point's compact neighborhoods).
"""

from dataclasses import dataclass

from .ordinal import from_int
from .spaces import (
    AmalgamSum,
    BaireSpace,
    FiniteSpace,
    Hedgehog,
    IntervalSpace,
    RealLine,
    Scaled,
)


class KsigmaError(Exception):
    pass


# form values: "all", "center" (hedgehog spine origin), "none";
# amalgam regions carry one form per part instead.
_SCALAR_FORMS = ("all", "center", "none")


@dataclass(frozen=True)
class Region:
    """One remainder in the iterated chain, as a closed-form descriptor."""

    space: object
    form: object

    def is_empty(self):
        if isinstance(self.form, tuple):
            return all(f == "none" for f in self.form)
        return self.form == "none"


def _strip(space):
    while isinstance(space, Scaled):
        space = space.inner
    return space


def _supported(space):
    space = _strip(space)
    if isinstance(space, AmalgamSum):
        return all(_supported(inner) for inner, _, _ in space.parts)
    return isinstance(
        space, (FiniteSpace, IntervalSpace, RealLine, Hedgehog, BaireSpace)
    )


def _whole_form(space):
    space = _strip(space)
    if isinstance(space, AmalgamSum):
        return tuple(_whole_form(inner) for inner, _, _ in space.parts)
    if isinstance(space, FiniteSpace) and space.size() == 0:
        return "none"
    if isinstance(space, IntervalSpace) and not space.pieces:
        return "none"
    return "all"


def whole(space):
    """The full space as the chain's starting descriptor."""
    if not _supported(space):
        raise KsigmaError("no local compactness decider for %r" % (space,))
    return Region(space, _whole_form(space))


def _check_form(space, form):
    space = _strip(space)
    if isinstance(space, AmalgamSum):
        if not isinstance(form, tuple) or len(form) != len(space.parts):
            raise KsigmaError("descriptor outside the remainder algebra")
        for (inner, _, _), f in zip(space.parts, form):
            _check_form(inner, f)
        return
    if form not in _SCALAR_FORMS:
        raise KsigmaError("descriptor outside the remainder algebra")
    if form == "center" and not isinstance(space, Hedgehog):
        raise KsigmaError("descriptor outside the remainder algebra")


def _remainder_form(space, form):
    space = _strip(space)
    if isinstance(space, AmalgamSum):
        # positive bridge lengths make every part clopen, so a point's
        # compact neighborhoods live entirely inside its own part
        return tuple(
            _remainder_form(inner, f)
            for (inner, _, _), f in zip(space.parts, form)
        )
    if form == "none":
        return "none"
    if isinstance(space, BaireSpace):
        # every ball splits into infinitely many disjoint balls of the
        # same radius, so no closed neighborhood is compact anywhere
        return form
    if isinstance(space, Hedgehog) and form == "all":
        # the center's neighborhoods meet infinitely many spines, and one
        # point per spine is a sequence with no convergent subsequence;
        # every other point sits inside one spine, a compact arc
        return "center"
    # finite spaces, closed interval unions, the line, a lone hedgehog
    # center: every point has a compact neighborhood
    return "none"


def _as_region(space, Y):
    if Y is None:
        return whole(space)
    if isinstance(Y, Region):
        if Y.space != space:
            raise KsigmaError("descriptor belongs to a different space")
        _check_form(space, Y.form)
        return Y
    if Y == space:
        return whole(space)
    raise KsigmaError("descriptor outside the remainder algebra")


def remainder(space, Y=None):
    """Points of Y with no compact neighborhood inside Y."""
    region = _as_region(space, Y)
    return Region(space, _remainder_form(space, region.form))


def locally_compact_points(space, Y=None):
    """Points of Y owning a compact neighborhood inside Y.

    The result descriptor names Y minus its remainder; together with
    remainder() it splits Y exactly.
    """
    region = _as_region(space, Y)
    rem = _remainder_form(space, region.form)
    return Region(space, _diff_form(region.form, rem))


def _diff_form(form, rem):
    if isinstance(form, tuple):
        return tuple(_diff_form(f, r) for f, r in zip(form, rem))
    if form == rem:
        return "none"
    if rem == "none":
        return form
    # form == "all", rem == "center": the spines without their origin
    # still carry the "all but center" content; the algebra only needs
    # this split transiently, name it by what survives
    return "spines"


@dataclass(frozen=True)
class LocalCompactnessProfile:
    """Remainder chain of one space, stabilization included.

    regions holds X_0 down to the first repeated descriptor; rank is the
    index of that fixed point and sigma_compact reports whether it is the
    empty region.
    """

    space: object
    regions: tuple

    @property
    def rank(self):
        return len(self.regions) - 1

    @property
    def sigma_compact(self):
        return self.regions[-1].is_empty()


def profile(space):
    chain = [whole(space)]
    # scalar forms only ever move all -> center -> none, so any chain
    # stabilizes within two steps per amalgam part
    for _ in range(2 * max(1, _part_count(space)) + 1):
        nxt = remainder(space, chain[-1])
        if nxt == chain[-1]:
            return LocalCompactnessProfile(space, tuple(chain))
        chain.append(nxt)
    raise KsigmaError("remainder chain failed to stabilize")


def _part_count(space):
    space = _strip(space)
    if isinstance(space, AmalgamSum):
        return sum(_part_count(inner) for inner, _, _ in space.parts)
    return 1


def declared_sigma_compact(space):
    """Closed-form flag, independent of the chain computation."""
    space = _strip(space)
    if not _supported(space):
        raise KsigmaError("no local compactness decider for %r" % (space,))
    if isinstance(space, AmalgamSum):
        return all(
            declared_sigma_compact(inner) for inner, _, _ in space.parts
        )
    return not isinstance(space, BaireSpace)


def ksigma_rank(space):
    """Chain length until stabilization plus the emptiness verdict."""
    prof = profile(space)
    return from_int(prof.rank), prof.sigma_compact


__all__ = [
    "KsigmaError",
    "LocalCompactnessProfile",
    "Region",
    "declared_sigma_compact",
    "ksigma_rank",
    "locally_compact_points",
    "profile",
    "remainder",
    "whole",
]
