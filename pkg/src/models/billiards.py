"""Convex billiard tables and the bounce map in Birkhoff coordinates.

A table is a strictly convex closed curve traversed counter-clockwise and
parameterized by normalized arclength s in [0, 1). A shot leaves the
boundary point s making the angle theta in [0, pi] with the positive
tangent; the bounce map sends it to the next impact point s' and the angle
theta' the reflected shot makes with the tangent there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from ..constants import (
    ARCLENGTH_SAMPLES,
    CHORD_SCAN_POINTS,
    CHORD_TOL,
    TANGENT_TOL,
)
from ..errors import DegenerateChord, InvalidParameter, RefinementError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Boundary shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ellipse:
    """x = a cos(phi), y = b sin(phi)."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameter("ellipse semi-axes must be positive")

    @property
    def is_circle(self) -> bool:
        return self.a == self.b

    def position(self, phi: float) -> tuple[float, float]:
        return self.a * math.cos(phi), self.b * math.sin(phi)

    def velocity(self, phi: float) -> tuple[float, float]:
        return -self.a * math.sin(phi), self.b * math.cos(phi)

    def speed_array(self, phi: np.ndarray) -> np.ndarray:
        return np.hypot(self.a * np.sin(phi), self.b * np.cos(phi))


@dataclass(frozen=True)
class FourierBoundary:
    """Polar table r(phi) = radius + sum(cos[k] cos((k+1)phi) + sin[k] sin((k+1)phi))."""

    radius: float = 1.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin))
        if self.radius <= 0:
            raise InvalidParameter("radius must be positive")

    @property
    def is_circle(self) -> bool:
        return not any(self.cos) and not any(self.sin)

    def _radius_terms(self, phi):
        """r, r' and r'' at phi (scalar or array)."""
        r = self.radius + 0.0 * phi
        dr = 0.0 * phi
        d2r = 0.0 * phi
        for k, c in enumerate(self.cos, start=1):
            r = r + c * np.cos(k * phi)
            dr = dr - k * c * np.sin(k * phi)
            d2r = d2r - k * k * c * np.cos(k * phi)
        for k, c in enumerate(self.sin, start=1):
            r = r + c * np.sin(k * phi)
            dr = dr + k * c * np.cos(k * phi)
            d2r = d2r - k * k * c * np.sin(k * phi)
        return r, dr, d2r

    def radius_at(self, phi: float) -> float:
        return float(self._radius_terms(phi)[0])

    def position(self, phi: float) -> tuple[float, float]:
        r = self.radius_at(phi)
        return r * math.cos(phi), r * math.sin(phi)

    def velocity(self, phi: float) -> tuple[float, float]:
        r, dr, _ = self._radius_terms(phi)
        r, dr = float(r), float(dr)
        return (
            dr * math.cos(phi) - r * math.sin(phi),
            dr * math.sin(phi) + r * math.cos(phi),
        )

    def speed_array(self, phi: np.ndarray) -> np.ndarray:
        r, dr, _ = self._radius_terms(phi)
        return np.hypot(r, dr)

    def curvature_numerator(self, phi: np.ndarray) -> np.ndarray:
        r, dr, d2r = self._radius_terms(phi)
        return r * r + 2.0 * dr * dr - r * d2r


Shape = Ellipse | FourierBoundary


# ---------------------------------------------------------------------------
# Arclength-parameterized curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexCurve:
    """A strictly convex table with a precomputed arclength table.

    Equality and hashing only look at the shape; the tables are derived.
    """

    shape: Shape
    samples: int = ARCLENGTH_SAMPLES
    _length: float = field(init=False, repr=False, compare=False)
    _arclength: CubicSpline | None = field(init=False, repr=False, compare=False)
    _speed: CubicSpline | None = field(init=False, repr=False, compare=False)
    _inverse: CubicSpline | None = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.is_circle:
            radius = self.shape.a if isinstance(self.shape, Ellipse) else self.shape.radius
            object.__setattr__(self, "_length", TWO_PI * radius)
            for name in ("_arclength", "_speed", "_inverse"):
                object.__setattr__(self, name, None)
            return

        phi = np.linspace(0.0, TWO_PI, self.samples + 1)
        if isinstance(self.shape, FourierBoundary):
            if np.any(self.shape.curvature_numerator(phi) <= 0.0):
                raise InvalidParameter("FourierBoundary is not strictly convex")
        speed = self.shape.speed_array(phi)
        speed[-1] = speed[0]
        speed_spline = CubicSpline(phi, speed, bc_type="periodic")
        arclength = speed_spline.antiderivative()
        length = float(arclength(TWO_PI))
        s_grid = arclength(phi) / length
        object.__setattr__(self, "_length", length)
        object.__setattr__(self, "_speed", speed_spline)
        object.__setattr__(self, "_arclength", arclength)
        object.__setattr__(self, "_inverse", CubicSpline(s_grid, phi))

    @property
    def is_circle(self) -> bool:
        return self.shape.is_circle

    @property
    def length(self) -> float:
        return self._length

    # ── Parameter conversion ──────────────────────────────────────────

    def s_of_phi(self, phi: float) -> float:
        """Normalized arclength of parameter phi, continuous in phi."""
        turns = math.floor(phi / TWO_PI)
        rest = phi - turns * TWO_PI
        if self.is_circle:
            return turns + rest / TWO_PI
        return turns + float(self._arclength(rest)) / self._length

    def phi_of_s(self, s: float) -> float:
        turns = math.floor(s)
        rest = s - turns
        if self.is_circle:
            return TWO_PI * (turns + rest)
        phi = float(self._inverse(rest))
        # one Newton step on s(phi) = rest
        phi -= (float(self._arclength(phi)) / self._length - rest) * self._length / float(
            self._speed(phi)
        )
        return TWO_PI * turns + phi

    # ── Geometry ──────────────────────────────────────────────────────

    def point(self, s: float) -> tuple[float, float]:
        return self.shape.position(self.phi_of_s(s))

    def tangent(self, s: float) -> tuple[float, float]:
        """Unit tangent in the direction of increasing s."""
        return _unit(self.shape.velocity(self.phi_of_s(s)))

    def chord_normality(self, s0: float, s1: float) -> float:
        """Largest |cos| between the chord s0 -> s1 and the tangents at its ends."""
        x0, y0 = self.point(s0)
        x1, y1 = self.point(s1)
        chord = _unit((x1 - x0, y1 - y0))
        return max(abs(_dot(chord, self.tangent(s0))), abs(_dot(chord, self.tangent(s1))))


def _dot(u, v) -> float:
    return u[0] * v[0] + u[1] * v[1]


def _cross(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def _unit(v) -> tuple[float, float]:
    n = math.hypot(v[0], v[1])
    return v[0] / n, v[1] / n


# ---------------------------------------------------------------------------
# Bounce map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bounce:
    """One application of the bounce map.

    ``shift`` is the lifted arclength advance in [0, 1]; tangential shots are
    flagged ``degenerate`` and keep their point, with shift 0 at theta = 0
    and 1 at theta = pi.
    """

    s: float
    theta: float
    shift: float
    degenerate: bool = False


def _next_phi_ellipse(shape: Ellipse, p, d) -> float:
    a2, b2 = shape.a * shape.a, shape.b * shape.b
    lam = -2.0 * (p[0] * d[0] / a2 + p[1] * d[1] / b2) / (d[0] * d[0] / a2 + d[1] * d[1] / b2)
    qx, qy = p[0] + lam * d[0], p[1] + lam * d[1]
    return math.atan2(qy / shape.b, qx / shape.a)


def _next_phi_polar(shape: FourierBoundary, p, d) -> float:
    reach = 2.2 * (shape.radius + sum(map(abs, shape.cos)) + sum(map(abs, shape.sin)))

    def outside(lam: float) -> float:
        qx, qy = p[0] + lam * d[0], p[1] + lam * d[1]
        return math.hypot(qx, qy) - shape.radius_at(math.atan2(qy, qx))

    grid = reach * np.logspace(-12, 0, CHORD_SCAN_POINTS)
    prev = grid[0]
    for lam in grid[1:]:
        if outside(lam) > 0.0:
            break
        prev = lam
    else:
        raise RefinementError("chord never leaves the table")
    lam = brentq(outside, prev, lam, xtol=CHORD_TOL * reach, rtol=4 * np.finfo(float).eps)
    phi = math.atan2(p[1] + lam * d[1], p[0] + lam * d[0])
    # Newton polish: put the impact point exactly on the shot line
    x, y = shape.position(phi)
    vx, vy = shape.velocity(phi)
    slope = _cross(d, (vx, vy))
    if slope != 0.0:
        phi -= _cross(d, (x - p[0], y - p[1])) / slope
    return phi


def billiard_step(
    curve: ConvexCurve,
    s: float,
    theta: float,
    strict: bool = False,
    tangent_tol: float = TANGENT_TOL,
) -> Bounce:
    """Next bounce from (s, theta).

    Shots within ``tangent_tol`` of the tangent are returned unchanged and
    flagged; with ``strict`` they raise DegenerateChord instead.
    """
    if not 0.0 <= theta <= math.pi:
        raise InvalidParameter(f"theta={theta} outside [0, pi]")
    s = s % 1.0
    if theta <= tangent_tol or math.pi - theta <= tangent_tol:
        if strict:
            raise DegenerateChord(f"shot at theta={theta} is tangent to the table")
        return Bounce(s, theta, 0.0 if theta <= tangent_tol else 1.0, degenerate=True)

    if curve.is_circle:
        shift = theta / math.pi
        return Bounce((s + shift) % 1.0, theta, shift)

    phi0 = curve.phi_of_s(s)
    p = curve.shape.position(phi0)
    t0 = _unit(curve.shape.velocity(phi0))
    n0 = (-t0[1], t0[0])
    d = (
        math.cos(theta) * t0[0] + math.sin(theta) * n0[0],
        math.cos(theta) * t0[1] + math.sin(theta) * n0[1],
    )
    if isinstance(curve.shape, Ellipse):
        phi1 = _next_phi_ellipse(curve.shape, p, d)
    else:
        phi1 = _next_phi_polar(curve.shape, p, d)

    dphi = (phi1 - phi0) % TWO_PI
    shift = curve.s_of_phi(phi0 + dphi) - curve.s_of_phi(phi0)
    t1 = _unit(curve.shape.velocity(phi1))
    theta1 = math.atan2(abs(_cross(t1, d)), _dot(t1, d))
    return Bounce((s + shift) % 1.0, theta1, shift)
