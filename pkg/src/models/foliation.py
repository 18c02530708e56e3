"""Radial foliations, angle classes and the abstract angle tau.

A foliation is stored as the pushforward m(V) of the vertical foliation by
a MapSpec m. Leaf coordinates (xi, eta) = m~^-1(z) linearize the leaf
order: xi labels the leaf, eta moves up along it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..constants import (
    MAX_PATH_STEP,
    MAX_TURN,
    MIN_PATH_STEP,
    RAY_TOL,
    SAME_LEAF_TOL,
    VANISHING_NORM,
)
from ..errors import (
    CoincidentPoints,
    InvalidParameter,
    PairOutsideDomain,
    PathRefinementExhausted,
    VanishingDifference,
)
from .annulus_maps import IDENTITY, Inverse, IsotopyHandle, LiftedPoint, MapSpec, compose
from .digital_line import AngleClass, discretize_winding

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoliationRef:
    """The radial foliation m(V)."""

    pushforward: MapSpec = IDENTITY

    @property
    def isotopy(self) -> IsotopyHandle:
        return IsotopyHandle(self.pushforward)

    @property
    def is_vertical(self) -> bool:
        return self.pushforward == IDENTITY

    def coordinates(self, z: LiftedPoint) -> tuple[float, float]:
        return self.pushforward.unlift(z.x, z.y)

    def leaf_point(self, xi: float, eta: float) -> LiftedPoint:
        """Point at height eta on the leaf labelled xi."""
        return LiftedPoint(*self.pushforward.lift(xi, eta))


VERTICAL = FoliationRef()


def pulled_back(F: FoliationRef, m: MapSpec) -> FoliationRef:
    """m^-1(F)."""
    return FoliationRef(compose(F.pushforward, Inverse(m)))


def pushed(F: FoliationRef, m: MapSpec) -> FoliationRef:
    """m(F)."""
    return FoliationRef(compose(F.pushforward, m))


def leaf_coordinates(F: FoliationRef, z: LiftedPoint) -> tuple[float, float]:
    return F.coordinates(z)


def leaf_difference(
    z: LiftedPoint, z2: LiftedPoint, F: FoliationRef
) -> tuple[float, float]:
    xi, eta = F.coordinates(z)
    xi2, eta2 = F.coordinates(z2)
    return xi2 - xi, eta2 - eta


def classify_difference(dxi: float, deta: float, tol: float = SAME_LEAF_TOL) -> AngleClass:
    if dxi > tol:
        return AngleClass.LEFT
    if dxi < -tol:
        return AngleClass.RIGHT
    if deta > 0.0:
        return AngleClass.BELOW
    if deta < 0.0:
        return AngleClass.ABOVE
    raise CoincidentPoints("pair has identical leaf coordinates")


def angle_class(
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef = VERTICAL,
    tol: float = SAME_LEAF_TOL,
) -> AngleClass:
    """theta-dot of the pair (z, z2) with respect to F."""
    if z.distance(z2) <= tol:
        raise CoincidentPoints(f"{z} and {z2} coincide within {tol}")
    return classify_difference(*leaf_difference(z, z2, F), tol=tol)


def is_boundary_pair(z: LiftedPoint, z2: LiftedPoint) -> bool:
    """z on C~0 and z2 on C~1."""
    return z.y == 0.0 and z2.y == 1.0


def boundary_lift(z: LiftedPoint, z2: LiftedPoint, F: FoliationRef) -> int:
    """Natural lift on C~0 x C~1, where theta-dot never takes the value 2."""
    if not is_boundary_pair(z, z2):
        raise PairOutsideDomain("pair is not in C~0 x C~1", pair=(z, z2))
    return angle_class(z, z2, F).value


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def winding_lift(
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef,
    max_turn: float = MAX_TURN,
    min_step: float = MIN_PATH_STEP,
    ray_tol: float = RAY_TOL,
) -> int:
    """Lift of theta at F minus its lift at V, along the isotopy of F.

    The difference vector of the pair in F_s-coordinates is followed with
    steps that halve until it turns by less than ``max_turn``.
    """
    m = F.pushforward

    def difference(s: float) -> tuple[float, float]:
        ax, ay = m.unlift_at(s, z.x, z.y)
        bx, by = m.unlift_at(s, z2.x, z2.y)
        vx, vy = bx - ax, by - ay
        if math.hypot(vx, vy) < VANISHING_NORM:
            raise VanishingDifference(f"difference vector vanishes at s={s}")
        return vx, vy

    vx, vy = difference(0.0)
    start = math.atan2(vy, vx)
    psi = start
    s, step = 0.0, MAX_PATH_STEP
    while s < 1.0:
        h = min(step, 1.0 - s)
        s_next = 1.0 if h >= 1.0 - s else s + h
        wx, wy = difference(s_next)
        turn = _wrap(math.atan2(wy, wx) - math.atan2(vy, vx))
        if abs(turn) > max_turn:
            if h <= min_step:
                raise PathRefinementExhausted(
                    f"winding turns by {turn:.3g} over a step of {h:.3g} at s={s}"
                )
            step = h / 2.0
            continue
        psi += turn
        s, (vx, vy) = s_next, (wx, wy)
        step = min(2.0 * step, MAX_PATH_STEP)
    return discretize_winding(psi, ray_tol) - discretize_winding(start, ray_tol)


def tau(
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef,
    F2: FoliationRef,
    method: str = "auto",
) -> int:
    """Abstract angle tau(z, z2, F, F2): the change of the lifted angle from F to F2.

    ``auto`` uses the exact boundary lift on C~0 x C~1 pairs (either order)
    and winding otherwise; ``winding`` and ``lift`` force one method.
    """
    if method not in ("auto", "winding", "lift"):
        raise InvalidParameter(f"unknown tau method {method!r}")
    if z.distance(z2) <= SAME_LEAF_TOL:
        raise CoincidentPoints(f"tau needs distinct points, got {z} twice")
    if F == F2:
        return 0
    if method != "winding":
        if is_boundary_pair(z, z2):
            return boundary_lift(z, z2, F2) - boundary_lift(z, z2, F)
        if is_boundary_pair(z2, z):
            return boundary_lift(z2, z, F2) - boundary_lift(z2, z, F)
        if method == "lift":
            raise PairOutsideDomain("no canonical domain for this pair", pair=(z, z2))
    return winding_lift(z, z2, F2) - winding_lift(z, z2, F)
