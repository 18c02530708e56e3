"""Natural lifts of the angle class on canonical pair domains.

On a simply connected set of pairs the class map lifts to the digital line;
the natural lift is the lift matching a fixed normalization on an anchor
set. It is computed here by Khalimsky continuation: classes are sampled
along a path of pairs from the anchor, the step halving until consecutive
classes are adjacent and the difference vector turns by less than pi/4.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..constants import (
    DEFAULT_EXHAUSTION,
    MAX_PATH_STEP,
    MAX_TURN,
    MEMBERSHIP_NX,
    MEMBERSHIP_NY,
    MEMBERSHIP_WIDTH,
    MIN_PATH_STEP,
    SAME_LEAF_TOL,
)
from ..errors import (
    BaseMismatch,
    GridExhausted,
    InvalidParameter,
    PairOutsideDomain,
    PathRefinementExhausted,
    RefinementError,
)
from ..states import Membership, Side
from .annulus_maps import LiftedPoint
from .digital_line import AngleClass, class_step, is_adjacent, project
from .foliation import (
    VERTICAL,
    FoliationRef,
    _wrap,
    angle_class,
    boundary_lift,
    classify_difference,
    leaf_difference,
)

logger = logging.getLogger(__name__)

Pair = tuple[LiftedPoint, LiftedPoint]


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubAnnulus:
    """T x [0, y_high) when y_low = 0, T x (y_low, 1] when y_high = 1."""

    y_low: float
    y_high: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.y_low < self.y_high <= 1.0:
            raise InvalidParameter(f"bad sub-annulus [{self.y_low}, {self.y_high}]")

    @property
    def side(self) -> Side | None:
        if self.y_low <= 0.0:
            return Side.LOWER
        if self.y_high >= 1.0:
            return Side.UPPER
        return None

    @property
    def is_disk(self) -> bool:
        return False

    def frontier(self, x: float) -> float:
        return self.y_high if self.side is Side.LOWER else self.y_low

    def contains(self, z: LiftedPoint) -> bool:
        if self.side is Side.LOWER:
            return z.y < self.y_high
        if self.side is Side.UPPER:
            return z.y > self.y_low
        return self.y_low < z.y < self.y_high

    def exhaustion(self, count: int = DEFAULT_EXHAUSTION) -> tuple[SubAnnulus, ...]:
        if self.side is Side.LOWER:
            return tuple(SubAnnulus(0.0, self.y_high * (k + 1) / count) for k in range(count))
        if self.side is Side.UPPER:
            return tuple(
                SubAnnulus(1.0 - (1.0 - self.y_low) * (k + 1) / count, 1.0)
                for k in range(count)
            )
        raise InvalidParameter("a middle sub-annulus has no lower or upper exhaustion")


@dataclass(frozen=True)
class GraphRegion:
    """{y < psi(x)} (lower) or {y > psi(x)} (upper) for a sampled periodic psi.

    psi is linear between the samples psi(k / n). A lower region whose psi
    touches 0 is a union of lower disks; otherwise it is a lower annulus.
    """

    values: tuple[float, ...]
    side: Side = Side.LOWER

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise InvalidParameter("GraphRegion needs at least two samples")
        if min(values) < 0.0 or max(values) > 1.0:
            raise InvalidParameter("graph samples must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def is_disk(self) -> bool:
        if self.side is Side.LOWER:
            return min(self.values) <= 0.0
        return max(self.values) >= 1.0

    def frontier(self, x: float) -> float:
        n = len(self.values)
        u = (x % 1.0) * n
        k = int(math.floor(u)) % n
        w = u - math.floor(u)
        return (1.0 - w) * self.values[k] + w * self.values[(k + 1) % n]

    def contains(self, z: LiftedPoint) -> bool:
        psi = self.frontier(z.x)
        return z.y < psi if self.side is Side.LOWER else z.y > psi

    def exhaustion(self, count: int = DEFAULT_EXHAUSTION) -> tuple[GraphRegion, ...]:
        psi = np.asarray(self.values)
        regions = []
        for k in range(count):
            frac = (k + 1) / count
            scaled = psi * frac if self.side is Side.LOWER else 1.0 - (1.0 - psi) * frac
            regions.append(GraphRegion(tuple(scaled), self.side))
        return tuple(regions)


Region = SubAnnulus | GraphRegion


# ---------------------------------------------------------------------------
# Pair domains
# ---------------------------------------------------------------------------

class DomainKind(enum.Enum):
    LEAF_COMPLEMENT = "LeafComplement"
    LOWER_HALF_ORDER = "LowerHalfOrder"
    BOUNDARY_PRODUCT = "BoundaryProduct"
    LOWER_ANNULUS = "LowerAnnulus"
    UPPER_ANNULUS = "UpperAnnulus"
    LOWER_DISK = "LowerDisk"
    UPPER_DISK = "UpperDisk"


_REGION_KINDS = {
    DomainKind.LOWER_ANNULUS: (Side.LOWER, False),
    DomainKind.UPPER_ANNULUS: (Side.UPPER, False),
    DomainKind.LOWER_DISK: (Side.LOWER, True),
    DomainKind.UPPER_DISK: (Side.UPPER, True),
}


@dataclass(frozen=True)
class PairDomain:
    """A simply connected set of pairs carrying a natural lift.

    LeafComplement(F0) holds the pairs whose F0-class is not 0 and is
    {1,2,3}-valued on F0; LowerHalfOrder(F0) holds classes -1 and 0 and is
    {-1,0}-valued; BoundaryProduct and the region domains are
    {-1,0,1}-valued on C~0 x C~1 ({1,2,3} on C~1 x C~0 for upper regions).
    """

    kind: DomainKind
    foliation: FoliationRef | None = None
    region: Region | None = None
    exhaustion_count: int = DEFAULT_EXHAUSTION

    def __post_init__(self) -> None:
        if self.kind in (DomainKind.LEAF_COMPLEMENT, DomainKind.LOWER_HALF_ORDER):
            if self.foliation is None:
                raise InvalidParameter(f"{self.kind.value} needs a foliation")
        elif self.kind in _REGION_KINDS:
            side, disk = _REGION_KINDS[self.kind]
            if self.region is None or self.region.side is not side:
                raise InvalidParameter(f"{self.kind.value} needs a {side.value} region")
            if self.region.is_disk != disk:
                raise InvalidParameter(f"region shape does not match {self.kind.value}")

    # ── Constructors ──────────────────────────────────────────────────

    @classmethod
    def leaf_complement(cls, foliation: FoliationRef = VERTICAL) -> PairDomain:
        return cls(DomainKind.LEAF_COMPLEMENT, foliation=foliation)

    @classmethod
    def lower_half_order(cls, foliation: FoliationRef = VERTICAL) -> PairDomain:
        return cls(DomainKind.LOWER_HALF_ORDER, foliation=foliation)

    @classmethod
    def boundary_product(cls) -> PairDomain:
        return cls(DomainKind.BOUNDARY_PRODUCT)

    @classmethod
    def for_region(cls, region: Region, **kwargs) -> PairDomain:
        """The annulus or disk domain matching the region's side and shape."""
        lower = region.side is Side.LOWER
        if region.is_disk:
            kind = DomainKind.LOWER_DISK if lower else DomainKind.UPPER_DISK
        else:
            kind = DomainKind.LOWER_ANNULUS if lower else DomainKind.UPPER_ANNULUS
        return cls(kind, region=region, **kwargs)

    # ── Anchors ───────────────────────────────────────────────────────

    @property
    def anchor_value(self) -> int | None:
        """Lift value on the deck anchor (z, Tz), for the leaf-order domains."""
        return {
            DomainKind.LEAF_COMPLEMENT: 3,
            DomainKind.LOWER_HALF_ORDER: -1,
        }.get(self.kind)

    def anchor(self, z: LiftedPoint, z2: LiftedPoint, F: FoliationRef = VERTICAL) -> tuple[Pair, int]:
        """Anchor pair used to reach (z, z2) and its lift value at F."""
        if self.anchor_value is not None:
            xi, eta = self.foliation.coordinates(z)
            a = self.foliation.leaf_point(xi, eta)
            return (a, a.translate(1)), self.anchor_value
        if self.kind is DomainKind.BOUNDARY_PRODUCT:
            return (z, z2), boundary_lift(z, z2, F)
        lower, upper = (z, z2) if self.region.side is Side.LOWER else (z2, z)
        pair = (LiftedPoint(lower.x, 0.0), LiftedPoint(upper.x, 1.0))
        value = boundary_lift(*pair, F)
        if self.region.side is Side.UPPER:
            pair, value = (pair[1], pair[0]), value + 2
        return pair, value

    def region_member(self, z: LiftedPoint) -> Region:
        """First member of the regular exhaustion containing z."""
        for member in self.region.exhaustion(self.exhaustion_count):
            if member.contains(z):
                return member
        raise PairOutsideDomain(f"{z} is not in the region", pair=(z, None))

    def contains(self, z: LiftedPoint, z2: LiftedPoint) -> bool:
        try:
            self._check(z, z2)
        except PairOutsideDomain:
            return False
        return True

    def _check(self, z: LiftedPoint, z2: LiftedPoint) -> None:
        if self.kind is DomainKind.BOUNDARY_PRODUCT:
            if not (z.y == 0.0 and z2.y == 1.0):
                raise PairOutsideDomain("pair is not in C~0 x C~1", pair=(z, z2))
        elif self.kind is DomainKind.LEAF_COMPLEMENT:
            if angle_class(z, z2, self.foliation) is AngleClass.BELOW:
                raise PairOutsideDomain("pair has class 0 for the domain foliation", pair=(z, z2))
        elif self.kind is DomainKind.LOWER_HALF_ORDER:
            if angle_class(z, z2, self.foliation) not in (AngleClass.LEFT, AngleClass.BELOW):
                raise PairOutsideDomain("pair class is not -1 or 0", pair=(z, z2))
        else:
            if not self.region.contains(z) or self.region.contains(z2):
                raise PairOutsideDomain("pair is not in U~ x U~c", pair=(z, z2))


# ---------------------------------------------------------------------------
# Continuation
# ---------------------------------------------------------------------------

PairPath = Callable[[float], Pair]


def polyline(
    waypoints: list[tuple[tuple[float, float], tuple[float, float]]],
    to_world: Callable[[float, float], LiftedPoint] = LiftedPoint,
) -> PairPath:
    """Piecewise-linear path of pairs through coordinate waypoints."""
    segments = len(waypoints) - 1

    def path(s: float) -> Pair:
        k = min(int(s * segments), segments - 1)
        w = s * segments - k
        (a0, b0), (a1, b1) = waypoints[k], waypoints[k + 1]
        a = (a0[0] + w * (a1[0] - a0[0]), a0[1] + w * (a1[1] - a0[1]))
        b = (b0[0] + w * (b1[0] - b0[0]), b0[1] + w * (b1[1] - b0[1]))
        return to_world(*a), to_world(*b)

    return path


def continue_lift(
    path: PairPath,
    F: FoliationRef,
    base: int,
    tol: float = SAME_LEAF_TOL,
    trace: list[tuple[float, int]] | None = None,
) -> int:
    """Lift of the class of path(1) at F, continued from ``base`` at path(0)."""
    z, z2 = path(0.0)
    prev_v = leaf_difference(z, z2, F)
    prev_c = classify_difference(*prev_v, tol=tol)
    if project(base) is not prev_c:
        raise BaseMismatch(f"anchor value {base} does not project to {prev_c}")
    value = base
    if trace is not None:
        trace.append((0.0, value))
    s, step = 0.0, MAX_PATH_STEP
    while s < 1.0:
        h = min(step, 1.0 - s)
        s_next = 1.0 if h >= 1.0 - s else s + h
        v = leaf_difference(*path(s_next), F)
        c = classify_difference(*v, tol=tol)
        turn = _wrap(math.atan2(v[1], v[0]) - math.atan2(prev_v[1], prev_v[0]))
        if not is_adjacent(prev_c, c) or abs(turn) > MAX_TURN:
            if h <= MIN_PATH_STEP:
                raise PathRefinementExhausted(
                    f"classes {prev_c} -> {c} still not adjacent at step {h:.3g} (s={s:.6g})"
                )
            step = h / 2.0
            continue
        value += class_step(prev_c, c)
        s, prev_v, prev_c = s_next, v, c
        step = min(2.0 * step, MAX_PATH_STEP)
        if trace is not None:
            trace.append((s, value))
    return value


def _vertical_lift(
    low: LiftedPoint,
    high: LiftedPoint,
    F: FoliationRef,
    tol: float,
    trace: list | None = None,
) -> int:
    """Lift for a pair whose first point is reached vertically from C~0 and
    whose second point is reached vertically from C~1."""
    anchor = (LiftedPoint(low.x, 0.0), LiftedPoint(high.x, 1.0))
    base = boundary_lift(*anchor, F)
    path = polyline(
        [
            ((low.x, 0.0), (high.x, 1.0)),
            ((low.x, 0.0), (high.x, high.y)),
            ((low.x, low.y), (high.x, high.y)),
        ]
    )
    return continue_lift(path, F, base, tol=tol, trace=trace)


def member_lift(
    member: Region,
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef = VERTICAL,
    tol: float = SAME_LEAF_TOL,
) -> int:
    """Lift on member~ x member~c, continued from C~0 x C~1 through the
    frontier of ``member``.

    The point outside the member first travels to the member's frontier
    while the other stays on its boundary circle; upper members add 2.
    """
    if not member.contains(z) or member.contains(z2):
        raise PairOutsideDomain("pair is not in member~ x member~c", pair=(z, z2))
    if member.side is Side.LOWER:
        low, high = z, z2
        via = member.frontier(high.x)
        waypoints = [
            ((low.x, 0.0), (high.x, 1.0)),
            ((low.x, 0.0), (high.x, via)),
            ((low.x, low.y), (high.x, via)),
            ((low.x, low.y), (high.x, high.y)),
        ]
        offset = 0
    else:
        low, high = z2, z
        via = member.frontier(low.x)
        waypoints = [
            ((low.x, 0.0), (high.x, 1.0)),
            ((low.x, via), (high.x, 1.0)),
            ((low.x, via), (high.x, high.y)),
            ((low.x, low.y), (high.x, high.y)),
        ]
        offset = 2
    base = boundary_lift(LiftedPoint(low.x, 0.0), LiftedPoint(high.x, 1.0), F)
    return continue_lift(polyline(waypoints), F, base, tol=tol) + offset


def natural_lift(
    domain: PairDomain,
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef = VERTICAL,
    tol: float = SAME_LEAF_TOL,
) -> int:
    """The natural lift of theta-dot on ``domain`` at the pair (z, z2) and F."""
    domain._check(z, z2)
    kind = domain.kind

    if kind is DomainKind.BOUNDARY_PRODUCT:
        return boundary_lift(z, z2, F)

    if kind in (DomainKind.LEAF_COMPLEMENT, DomainKind.LOWER_HALF_ORDER):
        F0 = domain.foliation
        w = F0.coordinates(z)
        w2 = F0.coordinates(z2)
        dxi = w2[0] - w[0]
        start = (w, (w[0] + 1.0, w[1]))
        if kind is DomainKind.LOWER_HALF_ORDER or dxi > tol:
            waypoints = [start, (w, w2)]
        else:
            # go round the excluded class-0 pairs on the 2 side
            waypoints = [
                start,
                ((w[0], 0.75), (w[0] + 1.0, 0.25)),
                ((w[0], 0.75), (w[0] + dxi, 0.25)),
                (w, w2),
            ]
        return continue_lift(polyline(waypoints, F0.leaf_point), F, domain.anchor_value, tol=tol)

    member = domain.region_member(z)
    logger.debug("natural lift in exhaustion member %s", member)
    return member_lift(member, z, z2, F, tol)


def lift_across(
    low: LiftedPoint,
    high: LiftedPoint,
    F: FoliationRef = VERTICAL,
    tol: float = SAME_LEAF_TOL,
) -> int:
    """Natural lift on X0 x X1 for a lower set X0 and an upper set X1 that are
    both vertically convex; {-1,0,1}-valued on C~0 x C~1."""
    return _vertical_lift(low, high, F, tol)


def tau_by_natural_lift(
    domain: PairDomain,
    z: LiftedPoint,
    z2: LiftedPoint,
    F: FoliationRef,
    F2: FoliationRef,
) -> int:
    """tau as the difference of natural lifts on a canonical domain."""
    return natural_lift(domain, z, z2, F2) - natural_lift(domain, z, z2, F)


# ---------------------------------------------------------------------------
# Membership search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchGrid:
    """Grid of candidate partners: nx columns over [x - width, x + width],
    ny heights per column between the frontier and C~1."""

    nx: int = MEMBERSHIP_NX
    ny: int = MEMBERSHIP_NY
    width: float = MEMBERSHIP_WIDTH


@dataclass
class MembershipResult:
    status: Membership
    exactly2: Pair | None = None
    above2: Pair | None = None
    grid: SearchGrid = field(default_factory=SearchGrid)


def _exactly_two_along(
    z: LiftedPoint, z2: LiftedPoint, value: int, F: FoliationRef, tol: float
) -> Pair:
    """Walk z2 up to C~1 inside U~c; the lift drops from value to at most 1
    and, by the intermediate value property, passes through 2."""
    x2, y2 = z2.x, z2.y

    def partner(s: float) -> LiftedPoint:
        return LiftedPoint(x2, y2 + s * (1.0 - y2))

    trace: list[tuple[float, int]] = []
    continue_lift(lambda s: (z, partner(s)), F, value, tol=tol, trace=trace)
    def dxi(s: float) -> float:
        return leaf_difference(z, partner(s), F)[0]

    for i, (s_i, v_i) in enumerate(trace):
        if v_i != 2:
            continue
        # polish onto the leaf when the sample sits between classes -1 and 1
        if 0 < i < len(trace) - 1 and trace[i - 1][1] == 3 and trace[i + 1][1] == 1:
            s_star = brentq(dxi, trace[i - 1][0], trace[i + 1][0], xtol=1e-14)
            candidate = partner(s_star)
            if angle_class(z, candidate, F, tol) is AngleClass.ABOVE:
                return z, candidate
        return z, partner(s_i)
    raise RefinementError("lift never reached 2 along the complement")


def membership_class(
    z: LiftedPoint,
    U: Region,
    F: FoliationRef = VERTICAL,
    grid: SearchGrid = SearchGrid(),
    strict: bool = False,
    tol: float = SAME_LEAF_TOL,
) -> MembershipResult:
    """Search partners z2 in U~c with natural lift >= 2 at the pair (z, z2).

    "none" is only asserted at the grid resolution; with ``strict`` an
    empty search raises GridExhausted instead.
    """
    if U.side is not Side.LOWER:
        raise InvalidParameter("membership search needs a lower annulus or disk")
    domain = PairDomain.for_region(U)
    if not U.contains(z):
        raise PairOutsideDomain(f"{z} is not in U", pair=(z, None))

    for x2 in np.linspace(z.x - grid.width, z.x + grid.width, grid.nx):
        floor = U.frontier(float(x2))
        for j in range(grid.ny):
            z2 = LiftedPoint(float(x2), floor + (1.0 - floor) * (j + 1) / grid.ny)
            if U.contains(z2):
                continue
            try:
                value = natural_lift(domain, z, z2, F, tol)
            except RefinementError as exc:
                logger.debug("membership probe %s skipped: %s", z2, exc)
                continue
            if value < 2:
                continue
            logger.info("lift %d >= 2 at partner %s", value, z2)
            if value == 2:
                return MembershipResult(Membership.EXACTLY_TWO, exactly2=(z, z2), grid=grid)
            exact = _exactly_two_along(z, z2, value, F, tol)
            return MembershipResult(
                Membership.ABOVE_TWO, exactly2=exact, above2=(z, z2), grid=grid
            )

    if strict:
        raise GridExhausted(
            f"no partner with lift >= 2 on a {grid.nx}x{grid.ny} grid"
        )
    return MembershipResult(Membership.NONE, grid=grid)
