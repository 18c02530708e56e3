"""Sampled checks of the supporting estimates behind the orbit theorems.

Each check draws seeded samples, evaluates the relevant lifts and returns a
small report with the raw values, so tests and the CLI can assert on them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..constants import DEFAULT_SEED, SAME_LEAF_TOL
from ..errors import InvalidParameter, PairOutsideDomain
from .annulus_maps import LiftedPoint, MapSpec
from .digital_line import AngleClass
from .foliation import VERTICAL, FoliationRef, angle_class, pulled_back, pushed, tau
from .natural_lift import PairDomain, SubAnnulus, natural_lift
from .orbits import delta_lift

logger = logging.getLogger(__name__)


# ── Twist near a class-2 pair ─────────────────────────────────────────

@dataclass
class NeighborhoodReport:
    holds: bool
    samples: list[tuple[LiftedPoint, AngleClass, int]] = field(default_factory=list)


def neighborhood_tau_check(
    m: MapSpec,
    base: LiftedPoint,
    target: LiftedPoint,
    F: FoliationRef = VERTICAL,
    radius: float = 0.05,
    count: int = 64,
    seed: int = DEFAULT_SEED,
) -> NeighborhoodReport:
    """Perturb ``base`` where (base, target) has class 2 under an F-increasing map.

    Perturbed points of class 1 must have tau(., target, F, f^-1 F) > 1 and
    points of class -1 must have tau(., target, F, f F) < -1.
    """
    if angle_class(base, target, F) is not AngleClass.ABOVE:
        raise PairOutsideDomain("base must sit above target on its leaf", pair=(base, target))
    rng = np.random.default_rng(seed)
    xi, eta = F.coordinates(base)
    back, forward = pulled_back(F, m), pushed(F, m)
    report = NeighborhoodReport(holds=True)
    for u, v in rng.uniform(-radius, radius, size=(count, 2)):
        z = F.leaf_point(xi + u, float(np.clip(eta + v, 0.0, 1.0)))
        c = angle_class(z, target, F)
        if c is AngleClass.RIGHT:
            value = tau(z, target, F, back)
            ok = value > 1
        elif c is AngleClass.LEFT:
            value = tau(z, target, F, forward)
            ok = value < -1
        else:
            continue
        report.samples.append((z, c, value))
        report.holds &= ok
    return report


# ── Invariant lower annulus ───────────────────────────────────────────

@dataclass
class BoundReport:
    backward_invariant: bool
    values: list[int] = field(default_factory=list)

    @property
    def within(self) -> bool:
        return all(-2 < v < 2 for v in self.values)


def _split_pairs(
    rng: np.random.Generator, low: tuple[float, float], high: tuple[float, float], count: int
) -> list[tuple[LiftedPoint, LiftedPoint]]:
    pairs = []
    for _ in range(count):
        x = float(rng.uniform(0.0, 1.0))
        shift = float(rng.uniform(-1.5, 1.5))
        pairs.append(
            (
                LiftedPoint(x, float(rng.uniform(*low))),
                LiftedPoint(x + shift, float(rng.uniform(*high))),
            )
        )
    return pairs


def backward_invariant_bound(
    m: MapSpec,
    U: SubAnnulus,
    F: FoliationRef = VERTICAL,
    count: int = 200,
    seed: int = DEFAULT_SEED,
    tol: float = SAME_LEAF_TOL,
) -> BoundReport:
    """Natural lifts over U~ x U~c at F and f^-1(F) for a lower annulus U."""
    domain = PairDomain.for_region(U)
    rng = np.random.default_rng(seed)
    top = U.y_high
    pairs = _split_pairs(rng, (0.0, top * (1.0 - 1e-9)), (top, 1.0), count)

    invariant = all(m.apply_inverse(z).y < top + tol for z, _ in pairs)
    if not invariant:
        logger.warning("U = T x [0, %.6g) is not backward invariant on the samples", top)
    report = BoundReport(backward_invariant=invariant)
    for G in (F, pulled_back(F, m)):
        report.values.extend(natural_lift(domain, z, z2, G) for z, z2 in pairs)
    return report


# ── Gap between invariant sub-annuli ──────────────────────────────────

@dataclass
class GapReport:
    values: list[int] = field(default_factory=list)
    mismatches: int = 0
    class_two: int = 0

    @property
    def holds(self) -> bool:
        return self.mismatches == 0 and self.class_two == 0 and all(-2 < v < 2 for v in self.values)


def gap_class_check(
    m: MapSpec,
    low_top: float,
    high_bottom: float,
    F: FoliationRef = VERTICAL,
    count: int = 200,
    seed: int = DEFAULT_SEED,
) -> GapReport:
    """Pairs from T x [0, low_top) and T x [high_bottom, 1] across the gap.

    Each pair is lifted twice: on T x [0, high_bottom) and, swapped, on
    T x (low_top, 1] shifted back by 2. The two must agree, stay inside
    (-2, 2) and never give class 2.
    """
    if not 0.0 < low_top < high_bottom < 1.0:
        raise InvalidParameter("need 0 < low_top < high_bottom < 1")
    lower = PairDomain.for_region(SubAnnulus(0.0, high_bottom))
    upper = PairDomain.for_region(SubAnnulus(low_top, 1.0))
    rng = np.random.default_rng(seed)
    report = GapReport()
    for z0, z1 in _split_pairs(rng, (0.0, low_top), (high_bottom, 1.0), count):
        for G in (F, pulled_back(F, m)):
            below = natural_lift(lower, z0, z1, G)
            above = natural_lift(upper, z1, z0, G) - 2
            report.values.append(below)
            report.mismatches += below != above
            report.class_two += angle_class(z0, z1, G) is AngleClass.ABOVE
    return report


# ── Displacement lift as a Lyapunov function ──────────────────────────

def lyapunov_check(
    m: MapSpec,
    probes: list[LiftedPoint],
    F: FoliationRef = VERTICAL,
) -> list[tuple[LiftedPoint, int, int, bool]]:
    """delta(f z) >= delta(z), strictly when delta(z) is even."""
    before = delta_lift(m, F, probes)
    images = [m.apply(z) for z in probes]
    after = delta_lift(m, F, images)
    out = []
    for z, w in zip(probes, images):
        d0, d1 = before[z], after[w]
        ok = d1 > d0 if d0 % 2 == 0 else d1 >= d0
        out.append((z, d0, d1, ok))
    return out
