"""Exception hierarchy for annulus-lab.

Each family carries the exit code the CLI maps it to.
"""

from __future__ import annotations


class AnnulusLabError(Exception):
    """Root of every library error."""

    exit_code = 3


# ── Configuration ─────────────────────────────────────────────────────

class ConfigError(AnnulusLabError):
    """Malformed experiment configuration or map document."""

    exit_code = 1


class UnsupportedKind(ConfigError):
    """Plot kind that cannot be produced from the given result."""


class InvalidParameter(ConfigError, ValueError):
    """Argument outside the range an operation accepts."""


# ── Preconditions ─────────────────────────────────────────────────────

class PreconditionError(AnnulusLabError):
    """An operation was called outside its hypotheses."""

    exit_code = 2


class BaseMismatch(PreconditionError):
    """Base of a lift does not project to the first class of the path."""


class CoincidentPoints(PreconditionError):
    """Angle class requested for two (numerically) equal points."""


class PairOutsideDomain(PreconditionError):
    """Pair does not belong to the requested pair domain."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class UncertifiedMap(PreconditionError):
    """Theorem-level search on a map without an invariant-measure certificate."""


class TwistConditionFailed(PreconditionError):
    """Boundary twist condition fails on one of the boundary circles."""

    def __init__(self, message: str, circle: str):
        super().__init__(message)
        self.circle = circle


# ── Numeric refinement ────────────────────────────────────────────────

class RefinementError(AnnulusLabError):
    """A numeric search or continuation could not be completed."""

    exit_code = 3


class NonAdjacentStep(RefinementError):
    """Consecutive angle classes are neither equal nor adjacent."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class InversionFailure(RefinementError):
    """Numeric inversion of a map did not converge."""


class NonInjectiveSample(RefinementError):
    """An isotopy probe found a fold or a collision at some time t."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


class DegenerateChord(RefinementError):
    """Billiard shot tangent to the boundary."""


class PathRefinementExhausted(RefinementError):
    """Continuation step fell below the floor without adjacent classes."""


class VanishingDifference(RefinementError):
    """Difference vector vanished along an isotopy."""


class GridExhausted(RefinementError):
    """No witness found at the requested grid resolution."""


class BracketLost(RefinementError):
    """Class labels stopped alternating while refining an orbit."""


class OnlyOneFound(RefinementError):
    """Fewer than two distinct periodic orbits were found."""


class FixedPointOnPath(RefinementError):
    """Continuation path passed through a fixed point."""


class NoIntersectionFound(RefinementError):
    """A leaf and its image did not meet at the sampling resolution."""
