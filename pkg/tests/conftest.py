"""Shared maps and foliations for the test suite."""

from __future__ import annotations

import pytest

from src.models.annulus_maps import BilliardMap, IntegrableTwist, PinnedKick, compose
from src.models.billiards import ConvexCurve, Ellipse
from src.models.foliation import VERTICAL, pulled_back


@pytest.fixture
def twist():
    """Positive twist (x, y) -> (x + y, y); decreasing with respect to V."""
    return IntegrableTwist(0.0, 1.0)


@pytest.fixture
def rising():
    """Negative twist with a circle of fixed points at y = 1/2."""
    return IntegrableTwist(0.25, -0.5)


@pytest.fixture
def kicked():
    return compose(IntegrableTwist(0.0, 1.0), PinnedKick(0.9, (1.0,)))


@pytest.fixture(scope="session")
def ellipse_table():
    return BilliardMap(ConvexCurve(Ellipse(1.0, 0.5)))


@pytest.fixture(scope="session")
def circle_table():
    return BilliardMap(ConvexCurve(Ellipse(1.0, 1.0)))


@pytest.fixture
def twist_back(twist):
    """f^-1(V) for the positive twist."""
    return pulled_back(VERTICAL, twist)


@pytest.fixture
def drifting():
    """Negative twist followed by an upward drift: V-increasing with no fixed points.

    Points on y = 1/2 have horizontal displacement exactly 0, so the
    displacement lift takes the even value 0 there.
    """
    return compose(IntegrableTwist(0.25, -0.5), PinnedKick(0.6, (0.3,), drift=1.0))
