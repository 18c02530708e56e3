"""Khalimsky line: projection, adjacency, path lifting and winding."""

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import BaseMismatch, NonAdjacentStep
from src.models.digital_line import (
    AngleClass,
    class_step,
    discretize_winding,
    interval_hull,
    is_adjacent,
    is_closed_point,
    is_continuous_sequence,
    lift_class_path,
    project,
)

L, B, R, A = AngleClass.LEFT, AngleClass.BELOW, AngleClass.RIGHT, AngleClass.ABOVE


class TestProject:
    @pytest.mark.parametrize(
        "k, expected",
        [(5, R), (-2, A), (0, B), (-1, L), (2, A), (3, L), (4, B)],
    )
    def test_examples(self, k, expected):
        assert project(k) is expected

    @given(st.integers(-10_000, 10_000))
    def test_period_four(self, k):
        assert project(k + 4) is project(k)

    @given(st.integers(-10_000, 10_000))
    def test_parity_matches_openness(self, k):
        assert project(k).is_open == (not is_closed_point(k))


class TestAdjacency:
    @pytest.mark.parametrize(
        "a, b, adjacent",
        [
            (B, R, True),
            (R, A, True),
            (A, L, True),
            (L, B, True),
            (B, A, False),
            (L, R, False),
            (R, R, True),
        ],
    )
    def test_examples(self, a, b, adjacent):
        assert is_adjacent(a, b) is adjacent
        assert is_adjacent(b, a) is adjacent

    def test_class_step(self):
        assert class_step(B, R) == 1
        assert class_step(B, L) == -1
        assert class_step(A, L) == 1
        assert class_step(L, A) == -1
        assert class_step(R, R) == 0
        assert class_step(B, A) == 2


class TestLiftClassPath:
    def test_descending_path(self):
        assert lift_class_path([B, L, L], 0) == [0, -1, -1]

    def test_full_turn(self):
        assert lift_class_path([B, R, A, L], 0) == [0, 1, 2, 3]

    def test_non_adjacent_step(self):
        with pytest.raises(NonAdjacentStep) as excinfo:
            lift_class_path([B, A], 0)
        assert excinfo.value.step == 0

    def test_base_must_project_to_first_class(self):
        with pytest.raises(BaseMismatch):
            lift_class_path([B, R], 1)

    def test_empty_path(self):
        assert lift_class_path([], 7) == []

    @given(
        st.lists(st.sampled_from([-1, 0, 1]), max_size=30),
        st.integers(-50, 50),
    )
    def test_lifts_recover_continuous_sequences(self, steps, start):
        values = list(itertools.accumulate(steps, initial=start))
        path = [project(v) for v in values]
        assert lift_class_path(path, start) == values

    @given(st.lists(st.sampled_from([-1, 0, 1]), max_size=20), st.integers(-5, 5))
    def test_changing_base_by_four_shifts_the_lift(self, steps, n):
        values = list(itertools.accumulate(steps, initial=0))
        path = [project(v) for v in values]
        shifted = lift_class_path(path, 4 * n)
        assert shifted == [v + 4 * n for v in values]


class TestIntervalHull:
    def test_examples(self):
        assert interval_hull([-1, 0, 1, 2, 3]) == (-1, 3)
        assert interval_hull([4]) == (4, 4)

    def test_empty(self):
        with pytest.raises(ValueError):
            interval_hull([])

    @pytest.mark.parametrize("length", range(1, 9))
    def test_continuous_sequences_fill_their_hull(self, length):
        for steps in itertools.product([-1, 0, 1], repeat=length - 1):
            values = list(itertools.accumulate(steps, initial=0))
            assert is_continuous_sequence(values)
            lo, hi = interval_hull(values)
            assert set(values) == set(range(lo, hi + 1))

    def test_jump_is_not_continuous(self):
        assert not is_continuous_sequence([0, 1, 3])


class TestDiscretizeWinding:
    @pytest.mark.parametrize(
        "psi, expected",
        [
            (math.pi / 2, 0),
            (math.pi, 1),
            (-math.pi / 2, -2),
            (0.0, -1),
            (3 * math.pi / 2, 2),
            (5 * math.pi / 2, 4),
        ],
    )
    def test_examples(self, psi, expected):
        assert discretize_winding(psi) == expected

    def test_near_ray_is_even(self):
        assert discretize_winding(math.pi / 2 + 1e-12) == 0
        assert discretize_winding(math.pi / 2 + 1e-3) == 1

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            discretize_winding(1.0, tol=0.0)

    @given(st.floats(-50.0, 50.0, allow_nan=False))
    def test_half_turn_adds_two(self, psi):
        u = (psi - math.pi / 2) / math.pi
        if abs(u - round(u)) < 1e-6:
            return
        assert discretize_winding(psi + math.pi) == discretize_winding(psi) + 2

    @given(st.floats(-50.0, 50.0, allow_nan=False))
    def test_projects_to_the_geometric_class(self, psi):
        u = (psi - math.pi / 2) / math.pi
        if abs(u - round(u)) < 1e-6:
            return
        k = discretize_winding(psi)
        # odd values: open half-planes; right half-plane is class -1
        right_half = math.cos(psi) > 0
        assert project(k) is (L if right_half else R)
