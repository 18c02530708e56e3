"""The Khalimsky digital line and its four-point quotient.

Integers carry the digital line topology (odd points open, even points
closed). Angle classes are integers mod 4 with canonical representatives
-1, 0, 1, 2; the projection k -> k mod 4 is a covering map, so class paths
lift uniquely once a base is fixed.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from itertools import pairwise

from ..constants import RAY_TOL
from ..errors import BaseMismatch, InvalidParameter, NonAdjacentStep


class AngleClass(enum.Enum):
    """Relative position of a lifted pair with respect to a foliation."""

    LEFT = -1  # leaf of z strictly left of leaf of z'
    BELOW = 0  # same leaf, z below z'
    RIGHT = 1
    ABOVE = 2

    @property
    def is_open(self) -> bool:
        return self.value % 2 == 1

    def __str__(self) -> str:
        return f"{self.value}̇"


def project(k: int) -> AngleClass:
    """Projection of the digital line onto Z/4Z."""
    return AngleClass((k + 1) % 4 - 1)


def is_closed_point(k: int) -> bool:
    return k % 2 == 0


def is_adjacent(a: AngleClass, b: AngleClass) -> bool:
    """True when one class lies in every neighbourhood of the other."""
    if a is b:
        return True
    return a.is_open != b.is_open


def class_step(a: AngleClass, b: AngleClass) -> int:
    """Signed step in {-1, 0, 1} between adjacent classes, 2 otherwise."""
    return (b.value - a.value + 1) % 4 - 1


def lift_class_path(path: Sequence[AngleClass], base: int) -> list[int]:
    """Unique lift of a class path starting at ``base``.

    Raises NonAdjacentStep at the first pair of consecutive classes that are
    neither equal nor adjacent; the caller is expected to refine its
    sampling there.
    """
    if not path:
        return []
    if project(base) is not path[0]:
        raise BaseMismatch(
            f"base {base} projects to {project(base)}, path starts at {path[0]}"
        )
    lifted = [base]
    for i, (prev, cur) in enumerate(pairwise(path)):
        step = class_step(prev, cur)
        if step == 2:
            raise NonAdjacentStep(
                f"classes {prev} and {cur} at step {i} are not adjacent", step=i
            )
        lifted.append(lifted[-1] + step)
    return lifted


def is_continuous_sequence(values: Sequence[int]) -> bool:
    """Khalimsky continuity of an integer sequence sampled on a path."""
    return all(abs(b - a) <= 1 for a, b in pairwise(values))


def interval_hull(values: Iterable[int]) -> tuple[int, int]:
    """Smallest integer interval containing the values."""
    values = list(values)
    if not values:
        raise InvalidParameter("interval_hull needs at least one value")
    return min(values), max(values)


def discretize_winding(psi: float, tol: float = RAY_TOL) -> int:
    """Digital lift of a continuous angle.

    The up ray psi = pi/2 maps to 0; rays pi/2 + k*pi map to 2k and the open
    half-planes between them to the odd values.
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    u = (psi - math.pi / 2) / math.pi
    k = round(u)
    if abs(u - k) * math.pi <= tol:
        return 2 * int(k)
    return 2 * math.floor(u) + 1
