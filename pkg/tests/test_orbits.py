"""Rotation numbers, the separating set and periodic orbit refinement."""

import numpy as np
import pytest

from src.constants import MAX_ORBITS
from src.errors import (
    FixedPointOnPath,
    NoIntersectionFound,
    OnlyOneFound,
    TwistConditionFailed,
    UncertifiedMap,
)
from src.models.annulus_maps import (
    IDENTITY,
    IntegrableTwist,
    LiftedPoint,
    PinnedKick,
    circle_distance,
    compose,
)
from src.models.orbits import (
    OrbitRecord,
    delta_lift,
    find_pq_orbits,
    leaf_intersection_extremes,
    pb_candidates,
    refine_orbit,
    return_map,
    rotation_number,
    twist_interval,
    well_ordered_check,
)
from src.states import Circle, OrbitLabel


class TestRotationNumber:
    def test_twist_boundaries(self, twist):
        assert rotation_number(twist, Circle.C0).value == pytest.approx(0.0)
        assert rotation_number(twist, "C1").value == pytest.approx(1.0)

    def test_interior_orbit(self, twist):
        rho = rotation_number(twist, LiftedPoint(0.0, 0.3), iterations=100)
        assert rho.value == pytest.approx(0.3)
        assert rho.half_width == pytest.approx(0.01)

    def test_circle_billiard(self, circle_table):
        assert rotation_number(circle_table, Circle.C0, 50).value == pytest.approx(0.0)
        assert rotation_number(circle_table, Circle.C1, 50).value == pytest.approx(1.0)

    def test_circle_billiard_interior(self, circle_table):
        rho = rotation_number(circle_table, LiftedPoint(0.0, 1.0 / 3.0), iterations=300)
        assert rho.value == pytest.approx(1.0 / 3.0, abs=rho.half_width + 1e-9)

    def test_needs_iterations(self, twist):
        with pytest.raises(ValueError):
            rotation_number(twist, Circle.C0, 0)

    def test_twist_interval(self, twist, rising):
        forward = twist_interval(twist)
        assert (forward.rho0, forward.rho1) == pytest.approx((0.0, 1.0))
        assert not forward.reversed
        assert forward.contains(0.5)
        assert not forward.contains(1.5)
        assert twist_interval(rising).reversed


class TestReturnMap:
    def test_orientation(self, rising, twist):
        assert not return_map(rising, 0, 1).inverted
        assert return_map(twist, 1, 2).inverted

    def test_ratio_outside_the_interval(self, twist):
        with pytest.raises(TwistConditionFailed) as excinfo:
            return_map(twist, 3, 2)
        assert excinfo.value.circle == "C1"

    def test_bad_period(self, twist):
        with pytest.raises(ValueError):
            return_map(twist, 1, 0)


class TestCandidates:
    def test_fixed_circle(self, rising):
        candidates = pb_candidates(rising, 0, 1, leaf_grid=8, samples=64)
        assert len(candidates.leaves) == 8
        for leaf in candidates.leaves:
            assert len(leaf.candidates) == 1
            (c,) = leaf.candidates
            assert c.label is OrbitLabel.FIXED
            assert c.point.y == pytest.approx(0.5, abs=1e-12)

    def test_twist_condition_failure(self, twist):
        with pytest.raises(TwistConditionFailed):
            pb_candidates(twist, 3, 2)


class TestRefineOrbit:
    def test_seed_on_the_fixed_circle(self, rising):
        record = refine_orbit(rising, 0, 1, LiftedPoint(0.3, 0.5))
        (z,) = record.points
        assert (z.x, z.y) == pytest.approx((0.3, 0.5))
        assert record.residual <= 1e-8
        assert record.well_ordered
        assert record.certified

    def test_seed_off_the_circle(self, rising):
        record = refine_orbit(rising, 0, 1, LiftedPoint(0.3, 0.45))
        assert record.points[0].y == pytest.approx(0.5, abs=1e-10)

    def test_uncertified_map(self):
        kicked = compose(IntegrableTwist(0.25, -0.5), PinnedKick(0.2))
        record = refine_orbit(kicked, 0, 1, LiftedPoint(0.0, 0.5))
        assert not record.certified


class TestFindOrbits:
    def test_circle_table_third_orbits(self, circle_table):
        orbits = find_pq_orbits(circle_table, 1, 3, leaf_grid=16, samples=64)
        assert 2 <= len(orbits) <= MAX_ORBITS
        for orbit in orbits:
            assert orbit.type_pq == (1, 3)
            assert len(orbit.points) == 3
            assert all(z.y == pytest.approx(1 / 3, abs=1e-9) for z in orbit.points)
            assert orbit.residual <= 1e-8
            assert orbit.well_ordered
            xs = np.sort([z.x % 1.0 for z in orbit.points])
            gaps = np.diff(np.append(xs, xs[0] + 1.0))
            assert gaps == pytest.approx([1 / 3] * 3, abs=1e-6)

    def test_integrable_twist_continuum_is_capped(self, twist):
        orbits = find_pq_orbits(twist, 1, 2, max_orbits=4)
        assert len(orbits) == 4
        assert all(z.y == pytest.approx(0.5, abs=1e-9) for o in orbits for z in o.points)

    def test_single_orbit_is_an_error(self, rising):
        with pytest.raises(OnlyOneFound):
            find_pq_orbits(rising, 0, 1, max_orbits=1)

    def test_uncertified_map_needs_opt_in(self, kicked):
        with pytest.raises(UncertifiedMap):
            find_pq_orbits(kicked, 1, 2)

    @pytest.mark.slow
    def test_ellipse_axes(self, ellipse_table):
        orbits = find_pq_orbits(ellipse_table, 1, 2)
        assert len(orbits) == 2
        axes = [
            (LiftedPoint(0.0, 0.5), LiftedPoint(0.5, 0.5)),
            (LiftedPoint(0.25, 0.5), LiftedPoint(0.75, 0.5)),
        ]
        for a, b in axes:
            assert any(
                all(min(circle_distance(z, a), circle_distance(z, b)) < 1e-6 for z in o.points)
                for o in orbits
            )


class TestWellOrdered:
    def _record(self, *points):
        return OrbitRecord([LiftedPoint(*z) for z in points], (1, 2), 0.0, False)

    def test_twist_orbit(self, twist):
        assert well_ordered_check(self._record((0.0, 0.5), (0.5, 0.5)), twist)
        assert not well_ordered_check(self._record((0.2, 0.3), (1.2, 0.6)), twist)
        assert not well_ordered_check(self._record((0.0, 0.9), (0.1, 0.1)), twist)


class TestDeltaLift:
    def test_boundary_normalization(self, rising):
        points = [LiftedPoint(0.2, 0.0), LiftedPoint(0.7, 1.0)]
        assert delta_lift(rising, probes=points) == {points[0]: -1, points[1]: 1}

    def test_interior_on_both_sides_of_the_fixed_circle(self, rising):
        low, high = LiftedPoint(0.3, 0.25), LiftedPoint(0.3, 0.75)
        assert delta_lift(rising, probes=[low, high]) == {low: -1, high: 1}

    def test_fixed_point_in_the_sample(self, rising):
        with pytest.raises(FixedPointOnPath):
            delta_lift(rising, probes=[LiftedPoint(0.3, 0.5)])

    def test_identity(self):
        with pytest.raises(FixedPointOnPath):
            delta_lift(IDENTITY, probes=[LiftedPoint(0.3, 0.5)])

    def test_boundary_motion_against_the_twist(self):
        # C1 moves right as well, so its displacement class is -1, not 1
        with pytest.raises(TwistConditionFailed) as excinfo:
            delta_lift(IntegrableTwist(0.25, 0.5), probes=[LiftedPoint(0.3, 1.0)])
        assert excinfo.value.circle == "C1"

    def test_twist_failure_on_c0(self):
        with pytest.raises(TwistConditionFailed) as excinfo:
            delta_lift(IntegrableTwist(-0.25, 0.5), probes=[LiftedPoint(0.3, 0.8)])
        assert excinfo.value.circle == "C0"

    def test_base_on_c1(self, rising):
        low, high = LiftedPoint(0.3, 0.25), LiftedPoint(0.3, 0.75)
        assert delta_lift(rising, probes=[low, high], base=Circle.C1) == {low: -1, high: 1}
        assert delta_lift(rising, probes=[high], base="C1") == {high: 1}

    def test_unknown_base(self, rising):
        with pytest.raises(ValueError):
            delta_lift(rising, probes=[LiftedPoint(0.3, 0.25)], base="C2")

    def test_even_value_on_the_vertical_displacement_circle(self, drifting):
        points = [LiftedPoint(x, 0.5) for x in (0.0, 0.3, 0.55, 0.9)]
        assert set(delta_lift(drifting, probes=points).values()) == {0}

    def test_same_values_from_either_circle(self, drifting):
        points = [LiftedPoint(0.1, 0.2), LiftedPoint(0.4, 0.5), LiftedPoint(0.8, 0.9)]
        assert delta_lift(drifting, probes=points) == delta_lift(drifting, probes=points, base=Circle.C1)
        assert list(delta_lift(drifting, probes=points).values()) == [-1, 0, 1]


class TestLeafExtremes:
    def test_folded_leaf(self):
        m = compose(IntegrableTwist(0.0, 1.0), PinnedKick(0.9, (1.0,)), IntegrableTwist(0.05, -1.0))
        extremes = leaf_intersection_extremes(m, 0.75)
        assert len(extremes.intersections) == 2
        assert extremes.z0.y == pytest.approx(0.293, abs=5e-3)
        assert extremes.z1.y == pytest.approx(0.707, abs=5e-3)
        assert extremes.tau_check == 0

    def test_single_intersection(self, rising):
        extremes = leaf_intersection_extremes(rising, 0.0)
        assert extremes.z0 == extremes.z1
        assert extremes.tau_check is None
        assert extremes.z0.y == pytest.approx(0.5)

    def test_no_intersection(self):
        with pytest.raises(NoIntersectionFound):
            leaf_intersection_extremes(IntegrableTwist(0.1, 0.5), 0.0)
