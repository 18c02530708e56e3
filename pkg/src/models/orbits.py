"""Rotation numbers and periodic orbits of type (p, q).

Orbits of type (p, q) are fixed points of g~ = f~^q o T^-p. The finder
follows the separating-set argument: along every vertical leaf the
displacement class of (z, g~(z)) runs from -1 on C~0 to 1 on C~1, so it
passes through 0 or 2; those crossings are labelled Y0 / Y2 and a change of
label between neighbouring leaves brackets a fixed point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..constants import (
    BRACKET_STEPS,
    DEDUP_FACTOR,
    LEAF_GRID,
    LEAF_SAMPLES,
    MAX_ORBITS,
    ORBIT_TOL,
    ROTATION_ITERATIONS,
    SAME_LEAF_TOL,
)
from ..errors import (
    BaseMismatch,
    BracketLost,
    CoincidentPoints,
    FixedPointOnPath,
    InvalidParameter,
    NoIntersectionFound,
    NonAdjacentStep,
    OnlyOneFound,
    PathRefinementExhausted,
    TwistConditionFailed,
    UncertifiedMap,
    VanishingDifference,
)
from ..states import Circle, OrbitLabel
from .annulus_maps import Deck, Inverse, LiftedPoint, MapSpec, Power, circle_distance, compose, iterate
from .digital_line import AngleClass, interval_hull, lift_class_path, project
from .foliation import VERTICAL, FoliationRef, angle_class, pulled_back, tau
from .natural_lift import Pair, continue_lift

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Rotation numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RotationNumber:
    value: float
    half_width: float


@dataclass(frozen=True)
class TwistInterval:
    """Boundary rotation numbers; ``reversed`` when rho0 > rho1."""

    rho0: float
    rho1: float
    half_width: float

    @property
    def reversed(self) -> bool:
        return self.rho0 > self.rho1

    def contains(self, ratio: float) -> bool:
        lo, hi = sorted((self.rho0, self.rho1))
        return lo < ratio < hi


def rotation_number(
    m: MapSpec,
    circle: Circle | str | LiftedPoint = Circle.C0,
    iterations: int = ROTATION_ITERATIONS,
) -> RotationNumber:
    """Mean lifted advance of an orbit, accurate to 1/iterations.

    ``circle`` picks a boundary circle; an interior LiftedPoint measures the
    rotation number of its own orbit.
    """
    if iterations < 1:
        raise InvalidParameter("iterations must be >= 1")
    if isinstance(circle, LiftedPoint):
        start = circle
    else:
        start = LiftedPoint(0.0, Circle(circle).height)
    x, y = start.x, start.y
    for _ in range(iterations):
        x, y = m.lift(x, y)
    return RotationNumber((x - start.x) / iterations, 1.0 / iterations)


def twist_interval(m: MapSpec, iterations: int = ROTATION_ITERATIONS) -> TwistInterval:
    rho0 = rotation_number(m, Circle.C0, iterations)
    rho1 = rotation_number(m, Circle.C1, iterations)
    interval = TwistInterval(rho0.value, rho1.value, rho0.half_width)
    if interval.reversed:
        logger.info(
            "rho(C0)=%.6g > rho(C1)=%.6g: the map twists negatively", rho0.value, rho1.value
        )
    return interval


# ---------------------------------------------------------------------------
# Return map of type (p, q)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReturnMap:
    """g~ = f~^q o T^-p oriented so that C~0 moves right and C~1 left.

    ``inverted`` means the search runs on g~^-1 = (f~^-1)^q o T^p, which has
    the same fixed points.
    """

    m: MapSpec
    p: int
    q: int
    inverted: bool

    @property
    def forward(self) -> MapSpec:
        return compose(Deck(-self.p), Power(self.m, self.q))

    @property
    def search(self) -> MapSpec:
        if self.inverted:
            return compose(Deck(self.p), Power(Inverse(self.m), self.q))
        return self.forward

    def displacement(self, x: float, y: float) -> tuple[float, float]:
        gx, gy = self.search.lift(x, y)
        return gx - x, gy - y


def return_map(
    m: MapSpec,
    p: int,
    q: int,
    samples: int = 16,
    tol: float = ORBIT_TOL,
    iterations: int = ROTATION_ITERATIONS,
) -> ReturnMap:
    """Orient g~ for the boundary twist condition or raise TwistConditionFailed."""
    if q < 1:
        raise InvalidParameter("q must be >= 1")
    g = compose(Deck(-p), Power(m, q))
    xs = np.arange(samples) / samples
    d0 = np.array([g.lift(x, 0.0)[0] - x for x in xs])
    d1 = np.array([g.lift(x, 1.0)[0] - x for x in xs])
    if np.all(d0 > tol) and np.all(d1 < -tol):
        return ReturnMap(m, p, q, inverted=False)
    if np.all(d0 < -tol) and np.all(d1 > tol):
        return ReturnMap(m, p, q, inverted=True)

    # name the circle that breaks the orientation the boundary rotation predicts
    interval = twist_interval(m, iterations)
    sign = -1.0 if not interval.reversed else 1.0
    if not np.all(sign * d0 > tol):
        circle = Circle.C0
    else:
        circle = Circle.C1
    raise TwistConditionFailed(
        f"{p}/{q} is outside the twist interval ({interval.rho0:.6g}, {interval.rho1:.6g}); "
        f"boundary condition fails on {circle.value}",
        circle=circle.value,
    )


# ---------------------------------------------------------------------------
# Separating set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    """A point of a leaf where (z, g~(z)) has class 0 or 2, or g~ fixes z."""

    point: LiftedPoint
    label: OrbitLabel
    leaf: int


@dataclass
class LeafScan:
    x: float
    candidates: list[Candidate] = field(default_factory=list)
    lift_range: tuple[int, int] | None = None


@dataclass
class CandidateSet:
    p: int
    q: int
    inverted: bool
    leaves: list[LeafScan] = field(default_factory=list)

    @property
    def candidates(self) -> list[Candidate]:
        return [c for leaf in self.leaves for c in leaf.candidates]


def _label(dy: float, tol: float) -> OrbitLabel:
    if dy > tol:
        return OrbitLabel.Y0
    if dy < -tol:
        return OrbitLabel.Y2
    return OrbitLabel.FIXED


def _displacement_class(dx: float, dy: float, tol: float) -> AngleClass | None:
    if dx > tol:
        return AngleClass.LEFT
    if dx < -tol:
        return AngleClass.RIGHT
    if dy > tol:
        return AngleClass.BELOW
    if dy < -tol:
        return AngleClass.ABOVE
    return None


_LABEL_CLASS = {OrbitLabel.Y0: AngleClass.BELOW, OrbitLabel.Y2: AngleClass.ABOVE}


def _scan_leaf(g: ReturnMap, index: int, x: float, samples: int, tol: float) -> LeafScan:
    scan = LeafScan(x)
    ys = np.linspace(0.0, 1.0, samples)
    disp = [g.displacement(x, float(y)) for y in ys]
    path: list[AngleClass | None] = []

    def dx(y: float) -> float:
        return g.displacement(x, y)[0]

    for j, (y, (dxj, dyj)) in enumerate(zip(ys, disp)):
        if abs(dxj) <= tol:
            label = _label(dyj, tol)
            scan.candidates.append(Candidate(LiftedPoint(x, y), label, index))
            path.append(_LABEL_CLASS.get(label))
        else:
            path.append(_displacement_class(dxj, dyj, tol))
        if j + 1 == samples:
            break
        nxt = disp[j + 1][0]
        if (dxj > tol and nxt < -tol) or (dxj < -tol and nxt > tol):
            y_root = brentq(dx, float(y), float(ys[j + 1]), xtol=1e-14)
            label = _label(g.displacement(x, y_root)[1], tol)
            scan.candidates.append(Candidate(LiftedPoint(x, y_root), label, index))
            path.append(_LABEL_CLASS.get(label))

    if None not in path:
        try:
            scan.lift_range = interval_hull(lift_class_path(path, -1))
        except (BaseMismatch, NonAdjacentStep) as exc:
            logger.debug("leaf x=%.6g: displacement classes do not lift (%s)", x, exc)
    return scan


def pb_candidates(
    m: MapSpec,
    p: int,
    q: int,
    leaf_grid: int = LEAF_GRID,
    samples: int = LEAF_SAMPLES,
    tol: float = ORBIT_TOL,
) -> CandidateSet:
    """Sample the separating set of g~ on ``leaf_grid`` vertical leaves."""
    g = return_map(m, p, q, tol=tol)
    result = CandidateSet(p, q, g.inverted)
    for i in range(leaf_grid):
        result.leaves.append(_scan_leaf(g, i, i / leaf_grid, samples, tol))
    logger.debug(
        "(%d,%d): %d candidates on %d leaves", p, q, len(result.candidates), leaf_grid
    )
    return result


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------


@dataclass
class OrbitRecord:
    """One period of a periodic orbit, projected to x in [0, 1)."""

    points: list[LiftedPoint]
    type_pq: tuple[int, int]
    residual: float
    well_ordered: bool
    certified: bool = True


def _leaf_root(g: ReturnMap, x: float, y_guess: float, step: float) -> float:
    """Root of the x-displacement on leaf x nearest to y_guess."""

    def dx(y: float) -> float:
        return g.displacement(x, y)[0]

    here = dx(y_guess)
    if here == 0.0:
        return y_guess
    k = 0
    while True:
        lo_a, lo_b = max(y_guess - (k + 1) * step, 0.0), max(y_guess - k * step, 0.0)
        hi_a, hi_b = min(y_guess + k * step, 1.0), min(y_guess + (k + 1) * step, 1.0)
        if lo_a == lo_b and hi_a == hi_b:
            raise BracketLost(f"no x-displacement root on leaf x={x:.9g}")
        for a, b in ((lo_a, lo_b), (hi_a, hi_b)):
            if a < b and dx(a) * dx(b) <= 0.0:
                return brentq(dx, a, b, xtol=1e-15)
        k += 1


def _orbit_residual(g: ReturnMap, points: list[LiftedPoint]) -> float:
    forward = g.forward
    return max(z.distance(forward.apply(z)) for z in points)


def refine_orbit(
    m: MapSpec,
    p: int,
    q: int,
    seed: Candidate | LiftedPoint,
    tol: float = ORBIT_TOL,
    step: float = 1.0 / (2 * LEAF_GRID),
) -> OrbitRecord:
    """Shrink a bracket around ``seed`` to a fixed point of g~ and return its orbit.

    Along each leaf the point is kept on the curve where the x-displacement
    vanishes; across leaves the vertical displacement changes sign between
    the Y0 and Y2 branches.
    """
    g = return_map(m, p, q, tol=tol)
    z0 = seed.point if isinstance(seed, Candidate) else seed
    y_step = 1.0 / (4 * LEAF_SAMPLES)

    def on_leaf(x: float) -> float:
        return _leaf_root(g, x, z0.y, y_step)

    def vertical(x: float) -> float:
        return g.displacement(x, on_leaf(x))[1]

    x_star = z0.x
    d0 = vertical(x_star)
    if abs(d0) > tol:
        bracket = None
        for direction in (-1.0, 1.0):
            prev_x, prev_d = z0.x, d0
            for k in range(1, BRACKET_STEPS + 1):
                x_k = z0.x + direction * k * step
                d_k = vertical(x_k)
                if prev_d * d_k <= 0.0:
                    bracket = tuple(sorted((prev_x, x_k)))
                    break
                prev_x, prev_d = x_k, d_k
            if bracket:
                break
        if bracket is None:
            raise BracketLost(f"Y0/Y2 labels never flip within {BRACKET_STEPS} steps of {z0}")
        logger.debug("seed %s bracketed in [%.9g, %.9g]", z0, *bracket)
        x_star = brentq(vertical, *bracket, xtol=1e-15)

    z = LiftedPoint(x_star, on_leaf(x_star))
    points = iterate(m, z, q - 1)
    residual = _orbit_residual(g, points)
    if residual > tol:
        raise BracketLost(f"refined point {z} has residual {residual:.3g} > {tol:.3g}")
    record = OrbitRecord(
        points=[w.projected() for w in points],
        type_pq=(p, q),
        residual=residual,
        well_ordered=False,
        certified=m.non_wandering_certified,
    )
    record.well_ordered = well_ordered_check(record, m)
    return record


def orbit_distance(a: OrbitRecord, b: OrbitRecord) -> float:
    """Hausdorff distance of two orbit sets on the annulus."""

    def one_sided(u: list[LiftedPoint], v: list[LiftedPoint]) -> float:
        return max(min(circle_distance(s, t) for t in v) for s in u)

    return max(one_sided(a.points, b.points), one_sided(b.points, a.points))


def _seeds(candidates: CandidateSet) -> list[Candidate]:
    leaves = candidates.leaves
    seeds: list[Candidate] = []
    for i, leaf in enumerate(leaves):
        nxt = leaves[(i + 1) % len(leaves)]
        for c in leaf.candidates:
            if c.label is OrbitLabel.FIXED:
                seeds.append(c)
                continue
            if not nxt.candidates:
                continue
            partner = min(nxt.candidates, key=lambda d: abs(d.point.y - c.point.y))
            if partner.label not in (c.label, OrbitLabel.FIXED):
                seeds.append(c)
    return seeds


def find_pq_orbits(
    m: MapSpec,
    p: int,
    q: int,
    tol: float = ORBIT_TOL,
    leaf_grid: int = LEAF_GRID,
    samples: int = LEAF_SAMPLES,
    max_orbits: int = MAX_ORBITS,
    exploratory: bool = False,
) -> list[OrbitRecord]:
    """At least two distinct periodic orbits of type (p, q).

    Orbits closer than DEDUP_FACTOR * tol in Hausdorff distance count as one;
    a continuum of orbits is cut off after ``max_orbits``. Maps without an
    invariant-measure certificate are refused unless ``exploratory`` is set.
    """
    if not m.non_wandering_certified:
        if not exploratory:
            raise UncertifiedMap(
                f"({p},{q}) search needs a non-wandering certificate; pass exploratory=True to run anyway"
            )
        logger.warning("map has no invariant-measure certificate; orbits are exploratory")
    candidates = pb_candidates(m, p, q, leaf_grid, samples, tol)
    orbits: list[OrbitRecord] = []
    for seed in _seeds(candidates):
        if any(circle_distance(seed.point, z) <= DEDUP_FACTOR * tol for o in orbits for z in o.points):
            continue
        try:
            record = refine_orbit(m, p, q, seed, tol, step=1.0 / (2 * leaf_grid))
        except BracketLost as exc:
            logger.debug("seed %s rejected: %s", seed.point, exc)
            continue
        if all(orbit_distance(record, o) > DEDUP_FACTOR * tol for o in orbits):
            orbits.append(record)
        if len(orbits) >= max_orbits:
            break
    if len(orbits) < 2:
        raise OnlyOneFound(
            f"found {len(orbits)} orbit(s) of type ({p},{q}) at grid {leaf_grid}x{samples}"
        )
    logger.info("(%d,%d): %d distinct orbits", p, q, len(orbits))
    return orbits


def well_ordered_check(orbit: OrbitRecord, m: MapSpec) -> bool:
    """x-coordinates distinct mod 1 and lifted order preserved by f~."""
    xs = sorted(z.x % 1.0 for z in orbit.points)
    gaps = np.diff(xs + [xs[0] + 1.0])
    if len(xs) > 1 and np.any(gaps <= SAME_LEAF_TOL):
        return False
    lifts = sorted(
        (LiftedPoint(z.x + k, z.y) for z in orbit.points for k in (-1, 0, 1)),
        key=lambda z: z.x,
    )
    images = [m.lift(z.x, z.y)[0] for z in lifts]
    return bool(np.all(np.diff(images) > 0.0))


# ---------------------------------------------------------------------------
# Displacement lift delta
# ---------------------------------------------------------------------------


def _displacement_path(m: MapSpec, x: float, y0: float, y1: float):
    def path(s: float) -> Pair:
        w = LiftedPoint(x, y0 + s * (y1 - y0))
        return w, m.apply(w)

    return path


_BOUNDARY_DELTA = {Circle.C0: -1, Circle.C1: 1}


def _boundary_delta(m: MapSpec, F: FoliationRef, x: float, circle: Circle, tol: float) -> int | None:
    """Normalized delta at (x, circle), or None when that boundary point is fixed."""
    w = LiftedPoint(x, circle.height)
    try:
        found = angle_class(w, m.apply(w), F, tol)
    except CoincidentPoints:
        return None
    value = _BOUNDARY_DELTA[circle]
    if found is not project(value):
        raise TwistConditionFailed(
            f"displacement class on {circle.value} at x={x:.6g} is {found.value}, "
            f"expected {project(value).value}",
            circle=circle.value,
        )
    return value


def delta_lift(
    m: MapSpec,
    F: FoliationRef = VERTICAL,
    probes: list[LiftedPoint] | tuple[LiftedPoint, ...] = (),
    base: Circle | str = Circle.C0,
    tol: float = SAME_LEAF_TOL,
) -> dict[LiftedPoint, int]:
    """Integer lift of the class of (z, f~(z)) at F, -1 on C~0 and 1 on C~1.

    Each probe is reached along its vertical from ``base``. When that path
    runs through a fixed point, or the base point itself is fixed, it is
    re-routed from the other circle. The displacement class at the boundary
    point must match the normalization there.
    """
    base = Circle(base)
    order = (base, Circle.C1 if base is Circle.C0 else Circle.C0)
    result: dict[LiftedPoint, int] = {}
    for z in probes:
        if z.distance(m.apply(z)) < tol:
            raise FixedPointOnPath(f"probe {z} is a fixed point")
        result[z] = _delta_at(m, F, z, order, tol)
    return result


def _delta_at(m: MapSpec, F: FoliationRef, z: LiftedPoint, order: tuple[Circle, ...], tol: float) -> int:
    anchors = {circle: _boundary_delta(m, F, z.x, circle, tol) for circle in order}
    for circle in order:
        anchor = anchors[circle]
        if anchor is None:
            logger.debug("delta at %s: boundary point on %s is fixed", z, circle.value)
            continue
        if z.y == circle.height:
            return anchor
        try:
            return continue_lift(_displacement_path(m, z.x, circle.height, z.y), F, anchor, tol)
        except (CoincidentPoints, PathRefinementExhausted, VanishingDifference) as exc:
            logger.debug("delta at %s: path from %s blocked (%s)", z, circle.value, exc)
    raise FixedPointOnPath(f"both verticals through {z} meet a fixed point")


# ---------------------------------------------------------------------------
# Leaf against its preimage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafExtremes:
    z0: LiftedPoint
    z1: LiftedPoint
    tau_check: int | None
    intersections: tuple[LiftedPoint, ...]


def leaf_intersection_extremes(
    m: MapSpec,
    leaf_param: float,
    tol: float = ORBIT_TOL,
    samples: int = 4 * LEAF_SAMPLES,
) -> LeafExtremes:
    """Extreme points of phi ∩ f~^-1(phi) for the vertical leaf phi at x.

    z0 is the lowest intersection along phi; z1 the one whose image sits
    highest, i.e. the top one in the order of f^-1(V).
    """
    x = leaf_param

    def dx(y: float) -> float:
        return m.lift(x, y)[0] - x

    ys = np.linspace(0.0, 1.0, samples)
    values = [dx(float(y)) for y in ys]
    roots: list[float] = []
    for j, (y, v) in enumerate(zip(ys, values)):
        if abs(v) <= tol:
            roots.append(float(y))
        elif j + 1 < samples and abs(values[j + 1]) > tol and v * values[j + 1] < 0.0:
            roots.append(brentq(dx, float(y), float(ys[j + 1]), xtol=1e-15))
    if not roots:
        raise NoIntersectionFound(f"leaf x={x} misses its preimage at {samples} samples")

    merged: list[float] = []
    for y in sorted(roots):
        if not merged or y - merged[-1] > tol:
            merged.append(y)
    points = tuple(LiftedPoint(x, y) for y in merged)
    z0 = points[0]
    z1 = max(points, key=lambda z: m.lift(z.x, z.y)[1])
    check = None
    if z0 != z1:
        check = tau(z0, z1, VERTICAL, pulled_back(VERTICAL, m))
        if check != 0:
            logger.warning("leaf x=%.6g: tau(z0, z1, V, f^-1 V) = %d", x, check)
    return LeafExtremes(z0, z1, check, points)
