"""Enumerations shared across annulus-lab."""

import enum


class Circle(enum.Enum):
    """Boundary circles of the annulus."""

    C0 = "C0"
    C1 = "C1"

    @property
    def height(self) -> float:
        return 0.0 if self is Circle.C0 else 1.0


class Direction(enum.Enum):
    """Monotonicity verdicts."""

    INCREASING = "increasing"
    DECREASING = "decreasing"
    NEITHER = "neither"


class Side(enum.Enum):
    """Which boundary circle a region is attached to."""

    LOWER = "lower"
    UPPER = "upper"


class OrbitLabel(enum.Enum):
    """Branch labels of the separating set along a leaf."""

    Y0 = "Y0"
    Y2 = "Y2"
    FIXED = "fixed"


class Membership(enum.Enum):
    """Outcome of a natural-lift membership search."""

    NONE = "none"
    EXACTLY_TWO = "exactly2"
    ABOVE_TWO = "above2"


class ConnectStatus(enum.Enum):
    """Outcome of a connecting-orbit search."""

    CONNECTED = "connected"
    BLOCKED = "blocked"
    INCONCLUSIVE = "inconclusive"


class Command(enum.Enum):
    """CLI commands."""

    ANGLE = "angle"
    TAU = "tau"
    MONOTONE = "monotone"
    ROTATION = "rotation"
    FIND_ORBITS = "find-orbits"
    GRAPH_SCAN = "graph-scan"
    CONNECT = "connect"
    EXTREMES = "extremes"
    SWEEP = "sweep"


class PlotKind(enum.Enum):
    """CSV plot exports."""

    PHASE_PORTRAIT = "phase-portrait"
    GRAPH_OVERLAY = "graph-overlay"
    TAU_FIELD = "tau-field"
