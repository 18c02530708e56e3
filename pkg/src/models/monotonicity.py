"""F-monotonicity certificates on sampled pairs.

A map f is F-increasing when tau(z, z', F, f^-1(F)) >= 0 for every pair,
with equality only when both classes are odd; F-decreasing is the mirror
statement. Certificates here are resolution-qualified: they hold on the
sampled pairs only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..constants import (
    DEFAULT_BOUNDARY_PAIRS,
    DEFAULT_PAIRS,
    DEFAULT_SAME_LEAF_PAIRS,
    DEFAULT_SEED,
)
from ..errors import AnnulusLabError, InvalidParameter
from ..states import Direction
from .annulus_maps import LiftedPoint, MapSpec
from .digital_line import AngleClass
from .foliation import VERTICAL, FoliationRef, angle_class, pulled_back, tau

logger = logging.getLogger(__name__)

SAME_LEAF = "same-leaf"
CROSS_LEAF = "cross-leaf"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class PairSampler:
    """Seeded sampler of pairs drawn in the leaf coordinates of a foliation."""

    pairs: int = DEFAULT_PAIRS
    same_leaf: int = DEFAULT_SAME_LEAF_PAIRS
    boundary: int = DEFAULT_BOUNDARY_PAIRS
    seed: int = DEFAULT_SEED
    min_gap: float = 1e-3

    def __post_init__(self) -> None:
        if self.same_leaf + self.boundary > self.pairs:
            raise InvalidParameter("same-leaf and boundary counts exceed the total")
        if self.same_leaf < 1 or self.boundary < 1:
            raise InvalidParameter("sampler needs same-leaf and boundary pairs")

    def sample(
        self, F: FoliationRef = VERTICAL
    ) -> list[tuple[str, LiftedPoint, LiftedPoint]]:
        rng = np.random.default_rng(self.seed)
        out: list[tuple[str, LiftedPoint, LiftedPoint]] = []

        def draw_heights() -> tuple[float, float]:
            while True:
                a, b = rng.uniform(0.0, 1.0, size=2)
                if abs(a - b) > self.min_gap:
                    return float(a), float(b)

        for _ in range(self.same_leaf):
            xi = float(rng.uniform(0.0, 1.0))
            a, b = draw_heights()
            out.append((SAME_LEAF, F.leaf_point(xi, a), F.leaf_point(xi, b)))

        for _ in range(self.boundary):
            xi, xi2 = rng.uniform(0.0, 1.0, size=2)
            pair = (F.leaf_point(float(xi), 0.0), F.leaf_point(float(xi2), 1.0))
            if rng.uniform() < 0.5:
                pair = pair[::-1]
            out.append((BOUNDARY, *pair))

        for _ in range(self.pairs - self.same_leaf - self.boundary):
            xi = float(rng.uniform(0.0, 1.0))
            shift = 0.0
            while abs(shift) <= self.min_gap:
                shift = float(rng.uniform(-1.5, 1.5))
            a, b = rng.uniform(0.0, 1.0, size=2)
            out.append(
                (CROSS_LEAF, F.leaf_point(xi, float(a)), F.leaf_point(xi + shift, float(b)))
            )
        return out


@dataclass
class PairRecord:
    category: str
    pair: tuple[LiftedPoint, LiftedPoint]
    tau: int
    classes: tuple[AngleClass, AngleClass]


@dataclass
class MonotonicityReport:
    """Verdict on the sampled pairs.

    ``records`` holds every evaluated pair, ``counterexamples`` the ones
    violating the requested direction and ``failures`` the pairs whose tau
    could not be computed.
    """

    direction: Direction
    samples: int
    counterexamples: list[PairRecord] = field(default_factory=list)
    records: list[PairRecord] = field(default_factory=list)
    failures: list[tuple[tuple[LiftedPoint, LiftedPoint], str]] = field(default_factory=list)

    def taus(self, category: str | None = None) -> list[int]:
        return [r.tau for r in self.records if category in (None, r.category)]


def _satisfies(sign: int, value: int, classes: tuple[AngleClass, AngleClass]) -> bool:
    if sign * value > 0:
        return True
    return value == 0 and all(c.is_open for c in classes)


def is_monotone(
    m: MapSpec,
    F: FoliationRef = VERTICAL,
    direction: Direction | str = Direction.INCREASING,
    sampler: PairSampler = PairSampler(),
) -> MonotonicityReport:
    """Check whether m is F-increasing or F-decreasing on sampled pairs."""
    direction = Direction(direction)
    if direction is Direction.NEITHER:
        raise InvalidParameter("ask for increasing or decreasing")
    sign = 1 if direction is Direction.INCREASING else -1
    back = pulled_back(F, m)
    report = MonotonicityReport(direction=direction, samples=0)

    for category, z, z2 in sampler.sample(F):
        try:
            value = tau(z, z2, F, back)
            classes = (angle_class(z, z2, F), angle_class(z, z2, back))
        except AnnulusLabError as exc:
            report.failures.append(((z, z2), f"{type(exc).__name__}: {exc}"))
            continue
        record = PairRecord(category, (z, z2), value, classes)
        report.records.append(record)
        if not _satisfies(sign, value, classes):
            report.counterexamples.append(record)

    report.samples = len(report.records)
    if report.counterexamples:
        report.direction = Direction.NEITHER
    if report.failures:
        logger.warning("%d of %d pairs failed to evaluate", len(report.failures), sampler.pairs)
    logger.info(
        "monotonicity: %s on %d pairs (%d counterexamples)",
        report.direction.value, report.samples, len(report.counterexamples),
    )
    return report
