"""Annulus homeomorphisms with designated lifts.

Every map is a small immutable tree: primitives (integrable twists,
pinned kicks, billiards, deck translations) combined with Compose, Inverse
and Power. Each node evaluates its lift f~ on R x [0, 1], the inverse lift,
and a canonical isotopy from the identity (t = 0) to f~ (t = 1).

Compose applies its items in order: the first item is applied first.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.optimize import brentq, root

from ..constants import (
    INVERSE_TOL,
    JACOBIAN_STEP,
    PROBE_GRID,
    TANGENT_TOL,
    Y_CLAMP_TOL,
)
from ..errors import InvalidParameter, InversionFailure, NonInjectiveSample
from .billiards import ConvexCurve, billiard_step

logger = logging.getLogger(__name__)

ANY_MEASURE = "any"
LEBESGUE = "lebesgue"


# ---------------------------------------------------------------------------
# Points of the universal cover
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftedPoint:
    """A point (x~, y) of R x [0, 1]."""

    x: float
    y: float

    def __post_init__(self) -> None:
        x, y = float(self.x), float(self.y)
        if not -Y_CLAMP_TOL <= y <= 1.0 + Y_CLAMP_TOL:
            raise InvalidParameter(f"y={y} outside [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", min(max(y, 0.0), 1.0))

    @property
    def p1(self) -> float:
        return self.x

    @property
    def p2(self) -> float:
        return self.y

    @property
    def on_boundary(self) -> bool:
        return self.y == 0.0 or self.y == 1.0

    def translate(self, n: float = 1) -> LiftedPoint:
        """Deck translation T^n."""
        return LiftedPoint(self.x + n, self.y)

    def projected(self) -> LiftedPoint:
        """Representative with x in [0, 1)."""
        return LiftedPoint(self.x % 1.0, self.y)

    def distance(self, other: LiftedPoint) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def as_tuple(self) -> tuple[float, float]:
        return self.x, self.y


def circle_distance(a: LiftedPoint, b: LiftedPoint) -> float:
    """Distance between the projections of two points to the annulus."""
    dx = abs(a.x - b.x) % 1.0
    return math.hypot(min(dx, 1.0 - dx), a.y - b.y)


def _clip(y: float) -> float:
    return min(max(y, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Map nodes
# ---------------------------------------------------------------------------

class MapSpec(ABC):
    """A lifted annulus homeomorphism isotopic to the identity."""

    kind: ClassVar[str]

    @abstractmethod
    def lift(self, x: float, y: float) -> tuple[float, float]:
        """f~(x, y)."""

    @abstractmethod
    def unlift(self, x: float, y: float) -> tuple[float, float]:
        """f~^-1(x, y)."""

    @abstractmethod
    def lift_at(self, t: float, x: float, y: float) -> tuple[float, float]:
        """Canonical isotopy at time t."""

    @abstractmethod
    def unlift_at(self, t: float, x: float, y: float) -> tuple[float, float]:
        """Inverse of the canonical isotopy at time t."""

    @property
    @abstractmethod
    def invariant_measure(self) -> object | None:
        """Tag of a fully supported invariant measure, or None."""

    @property
    def non_wandering_certified(self) -> bool:
        return self.invariant_measure is not None

    def apply(self, z: LiftedPoint) -> LiftedPoint:
        return LiftedPoint(*self.lift(z.x, z.y))

    def apply_inverse(self, z: LiftedPoint) -> LiftedPoint:
        return LiftedPoint(*self.unlift(z.x, z.y))


@dataclass(frozen=True)
class IntegrableTwist(MapSpec):
    """(x, y) -> (x + a + b y, y)."""

    a: float
    b: float
    kind: ClassVar[str] = "IntegrableTwist"

    def lift(self, x, y):
        return x + self.a + self.b * y, y

    def unlift(self, x, y):
        return x - self.a - self.b * y, y

    def lift_at(self, t, x, y):
        return x + t * (self.a + self.b * y), y

    def unlift_at(self, t, x, y):
        return x - t * (self.a + self.b * y), y

    @property
    def invariant_measure(self):
        return LEBESGUE


@dataclass(frozen=True)
class PinnedKick(MapSpec):
    """(x, y) -> (x, y + eps y (1 - y) (drift + sum_k c_k sin(2 pi k x))).

    The vertical factor y (1 - y) pins both boundary circles pointwise. A
    nonzero ``drift`` pushes every interior point the same way.
    """

    eps: float
    harmonics: tuple[float, ...] = (1.0,)
    drift: float = 0.0
    kind: ClassVar[str] = "PinnedKick"

    def __post_init__(self) -> None:
        object.__setattr__(self, "harmonics", tuple(float(c) for c in self.harmonics))
        bound = abs(self.eps) * (abs(self.drift) + sum(abs(c) for c in self.harmonics))
        if bound >= 1.0:
            raise InvalidParameter(
                f"kick amplitude {bound:.3f} >= 1: the vertical map would fold"
            )

    def modulation(self, x: float) -> float:
        return self.drift + sum(
            c * math.sin(2.0 * math.pi * k * x)
            for k, c in enumerate(self.harmonics, start=1)
        )

    def _kick(self, eps: float, x: float, y: float) -> float:
        return y + eps * y * (1.0 - y) * self.modulation(x)

    def _unkick(self, eps: float, x: float, y: float) -> float:
        c = eps * self.modulation(x)
        if c == 0.0:
            return y
        try:
            return brentq(lambda u: u + c * u * (1.0 - u) - y, 0.0, 1.0, xtol=1e-15)
        except (ValueError, RuntimeError) as exc:
            raise InversionFailure(f"kick inversion failed at ({x}, {y}): {exc}") from exc

    def lift(self, x, y):
        return x, self._kick(self.eps, x, y)

    def unlift(self, x, y):
        return x, self._unkick(self.eps, x, _clip(y))

    def lift_at(self, t, x, y):
        return x, self._kick(t * self.eps, x, y)

    def unlift_at(self, t, x, y):
        return x, self._unkick(t * self.eps, x, _clip(y))

    @property
    def invariant_measure(self):
        return None


@dataclass(frozen=True)
class Deck(MapSpec):
    """The deck translation T^n."""

    n: int
    kind: ClassVar[str] = "Deck"

    def lift(self, x, y):
        return x + self.n, y

    def unlift(self, x, y):
        return x - self.n, y

    def lift_at(self, t, x, y):
        return x + t * self.n, y

    def unlift_at(self, t, x, y):
        return x - t * self.n, y

    @property
    def invariant_measure(self):
        return ANY_MEASURE


@dataclass(frozen=True)
class BilliardMap(MapSpec):
    """Bounce map of a convex table in lifted Birkhoff coordinates (s~, theta/pi)."""

    curve: ConvexCurve
    kind: ClassVar[str] = "BilliardMap"

    def lift(self, x, y):
        bounce = billiard_step(self.curve, x % 1.0, math.pi * _clip(y), tangent_tol=TANGENT_TOL)
        return x + bounce.shift, bounce.theta / math.pi

    def unlift(self, x, y):
        # time reversal R(s, y) = (s, 1 - y) conjugates f~ to T f~^-1
        x2, y2 = self.lift(x, 1.0 - _clip(y))
        return x2 - 1.0, 1.0 - y2

    def lift_at(self, t, x, y):
        x2, y2 = self.lift(x, y)
        return x + t * (x2 - x), y + t * (y2 - y)

    def unlift_at(self, t, x, y):
        if t == 0.0:
            return x, y
        if t == 1.0:
            return self.unlift(x, y)
        gx, gy = self.unlift(x, y)
        guess = np.array([(1.0 - t) * x + t * gx, (1.0 - t) * y + t * gy])

        def residual(w):
            wx, wy = self.lift_at(t, float(w[0]), _clip(float(w[1])))
            return [wx - x, wy - y]

        sol = root(residual, guess, method="hybr", tol=1e-14)
        err = max(abs(v) for v in residual(sol.x))
        if not sol.success and err > INVERSE_TOL:
            raise InversionFailure(
                f"billiard isotopy inversion at t={t} failed: {sol.message}"
            )
        return float(sol.x[0]), _clip(float(sol.x[1]))

    @property
    def invariant_measure(self):
        return ("birkhoff", self.curve)


def _merge_measures(tags) -> object | None:
    kinds = set()
    for tag in tags:
        if tag is None:
            return None
        if tag != ANY_MEASURE:
            kinds.add(tag)
    if not kinds:
        return ANY_MEASURE
    return kinds.pop() if len(kinds) == 1 else None


@dataclass(frozen=True)
class Compose(MapSpec):
    """items[-1] o ... o items[0]; the empty composition is the identity."""

    items: tuple[MapSpec, ...] = ()
    kind: ClassVar[str] = "Compose"

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))

    def lift(self, x, y):
        for m in self.items:
            x, y = m.lift(x, y)
        return x, y

    def unlift(self, x, y):
        for m in reversed(self.items):
            x, y = m.unlift(x, y)
        return x, y

    def lift_at(self, t, x, y):
        for m in self.items:
            x, y = m.lift_at(t, x, y)
        return x, y

    def unlift_at(self, t, x, y):
        for m in reversed(self.items):
            x, y = m.unlift_at(t, x, y)
        return x, y

    @property
    def invariant_measure(self):
        return _merge_measures(m.invariant_measure for m in self.items)


@dataclass(frozen=True)
class Inverse(MapSpec):
    item: MapSpec
    kind: ClassVar[str] = "Inverse"

    def lift(self, x, y):
        return self.item.unlift(x, y)

    def unlift(self, x, y):
        return self.item.lift(x, y)

    def lift_at(self, t, x, y):
        return self.item.unlift_at(t, x, y)

    def unlift_at(self, t, x, y):
        return self.item.lift_at(t, x, y)

    @property
    def invariant_measure(self):
        return self.item.invariant_measure


@dataclass(frozen=True)
class Power(MapSpec):
    """item^n; negative n iterates the inverse."""

    item: MapSpec
    n: int
    kind: ClassVar[str] = "Power"

    def _run(self, forward, backward, x, y):
        step = forward if self.n >= 0 else backward
        for _ in range(abs(self.n)):
            x, y = step(x, y)
        return x, y

    def lift(self, x, y):
        return self._run(self.item.lift, self.item.unlift, x, y)

    def unlift(self, x, y):
        return self._run(self.item.unlift, self.item.lift, x, y)

    def lift_at(self, t, x, y):
        return self._run(
            lambda u, v: self.item.lift_at(t, u, v),
            lambda u, v: self.item.unlift_at(t, u, v),
            x, y,
        )

    def unlift_at(self, t, x, y):
        return self._run(
            lambda u, v: self.item.unlift_at(t, u, v),
            lambda u, v: self.item.lift_at(t, u, v),
            x, y,
        )

    @property
    def invariant_measure(self):
        return self.item.invariant_measure


IDENTITY = Compose(())


def compose(*maps: MapSpec) -> MapSpec:
    """Compose maps (first applied first), dropping identity factors."""
    items: list[MapSpec] = []
    for m in maps:
        if isinstance(m, Compose):
            items.extend(m.items)
        else:
            items.append(m)
    if len(items) == 1:
        return items[0]
    return Compose(tuple(items))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def apply_lift(m: MapSpec, z: LiftedPoint) -> LiftedPoint:
    return m.apply(z)


def iterate(m: MapSpec, z: LiftedPoint, n: int) -> list[LiftedPoint]:
    """The lifted orbit z, f~(z), ..., f~^n(z)."""
    points = [z]
    x, y = z.x, z.y
    for _ in range(n):
        x, y = m.lift(x, y)
        points.append(LiftedPoint(x, y))
    return points


def default_probes(count: int = PROBE_GRID) -> tuple[LiftedPoint, ...]:
    return tuple(
        LiftedPoint((i + 0.5) / count, (j + 0.5) / count)
        for i in range(count)
        for j in range(count)
    )


@dataclass(frozen=True)
class IsotopyHandle:
    """The canonical isotopy of ``source`` together with its probe set."""

    source: MapSpec
    probes: tuple[LiftedPoint, ...] = default_probes()

    def at(self, t: float, z: LiftedPoint) -> LiftedPoint:
        return LiftedPoint(*self.source.lift_at(t, z.x, z.y))

    def inverse_at(self, t: float, z: LiftedPoint) -> LiftedPoint:
        return LiftedPoint(*self.source.unlift_at(t, z.x, z.y))

    def check_injective(self, t: float, extra: tuple[LiftedPoint, ...] = ()) -> None:
        """Runtime injectivity probe at time t.

        Looks for folds (non-positive Jacobian) and for distinct probes
        landing on the same image.
        """
        h = JACOBIAN_STEP
        points = self.probes + tuple(extra)
        images = []
        for z in points:
            x, y = z.x, min(max(z.y, h), 1.0 - h)
            fx_p = self.source.lift_at(t, x + h, y)
            fx_m = self.source.lift_at(t, x - h, y)
            fy_p = self.source.lift_at(t, x, y + h)
            fy_m = self.source.lift_at(t, x, y - h)
            det = (
                (fx_p[0] - fx_m[0]) * (fy_p[1] - fy_m[1])
                - (fx_p[1] - fx_m[1]) * (fy_p[0] - fy_m[0])
            ) / (4.0 * h * h)
            if det <= 0.0:
                raise NonInjectiveSample(
                    f"isotopy folds near ({z.x:.6g}, {z.y:.6g}) at t={t}", t=t
                )
            images.append(self.source.lift_at(t, z.x, z.y))
        arr = np.asarray(images)
        src = np.asarray([z.as_tuple() for z in points])
        gaps = np.hypot(*(arr[:, None, :] - arr[None, :, :]).transpose(2, 0, 1))
        apart = np.hypot(*(src[:, None, :] - src[None, :, :]).transpose(2, 0, 1)) > 0.0
        if np.any((gaps < 1e-12) & apart):
            raise NonInjectiveSample(f"two probes collide at t={t}", t=t)


def isotopy_eval(h: IsotopyHandle, t: float, z: LiftedPoint) -> LiftedPoint:
    """Evaluate the isotopy at time t after probing injectivity."""
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"t={t} outside [0, 1]")
    h.check_injective(t, (z,))
    return h.at(t, z)


# ---------------------------------------------------------------------------
# Twist cone
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwistCone:
    """Smallest angle beta between the vertical and its image under Df.

    ``positive`` means every probed image of the vertical leans right.
    """

    beta: float
    positive: bool

    @property
    def lipschitz_bound(self) -> float:
        return math.inf if self.beta <= 0.0 else 1.0 / math.tan(self.beta)


def twist_cone(
    m: MapSpec,
    probes: tuple[LiftedPoint, ...] | None = None,
    h: float = JACOBIAN_STEP,
) -> TwistCone:
    """Measure the twist cone of m by finite differences in y."""
    if probes is None:
        probes = tuple(
            LiftedPoint((i + 0.5) / 16, 0.02 + 0.96 * j / 15)
            for i in range(16)
            for j in range(16)
        )
    beta = math.pi / 2
    signs = set()
    for z in probes:
        lo, hi = max(z.y - h, 0.0), min(z.y + h, 1.0)
        xa, ya = m.lift(z.x, lo)
        xb, yb = m.lift(z.x, hi)
        dx, dy = (xb - xa) / (hi - lo), (yb - ya) / (hi - lo)
        angle = math.atan2(abs(dx), dy)  # from the upward vertical
        beta = min(beta, angle, math.pi - angle)
        signs.add(dx > 0.0)
    positive = signs == {True}
    if len(signs) > 1:
        beta = 0.0
    return TwistCone(beta=beta, positive=positive)
