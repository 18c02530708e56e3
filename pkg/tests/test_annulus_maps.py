"""Lifted annulus maps, billiards, isotopies and twist cones."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import DegenerateChord
from src.models.annulus_maps import (
    IDENTITY,
    BilliardMap,
    Compose,
    Deck,
    IntegrableTwist,
    Inverse,
    IsotopyHandle,
    LiftedPoint,
    PinnedKick,
    Power,
    apply_lift,
    circle_distance,
    compose,
    isotopy_eval,
    iterate,
    twist_cone,
)
from src.models.billiards import ConvexCurve, Ellipse, FourierBoundary, billiard_step

MAP_ZOO = [
    IntegrableTwist(0.0, 1.0),
    IntegrableTwist(0.25, -0.5),
    PinnedKick(0.5, (1.0, 0.3)),
    compose(IntegrableTwist(0.0, 1.0), PinnedKick(0.9, (1.0,))),
    Deck(2),
    Inverse(IntegrableTwist(0.1, 0.7)),
    Power(compose(PinnedKick(0.4), IntegrableTwist(0.2, 1.0)), 3),
    Power(IntegrableTwist(0.0, 1.0), -2),
]

xs = st.floats(-3.0, 3.0, allow_nan=False)
ys = st.floats(0.0, 1.0, allow_nan=False)


def close(a: LiftedPoint, b: LiftedPoint, tol: float = 1e-10) -> bool:
    return abs(a.x - b.x) <= tol and abs(a.y - b.y) <= tol


class TestLiftedPoint:
    def test_clamps_rounding_noise(self):
        assert LiftedPoint(0.0, 1.0 + 1e-13).y == 1.0
        assert LiftedPoint(0.0, -1e-13).y == 0.0

    def test_rejects_heights_outside_the_strip(self):
        with pytest.raises(ValueError):
            LiftedPoint(0.0, 1.1)

    def test_translate_and_project(self):
        z = LiftedPoint(2.25, 0.5)
        assert z.translate(-3) == LiftedPoint(-0.75, 0.5)
        assert z.projected() == LiftedPoint(0.25, 0.5)
        assert circle_distance(z, LiftedPoint(-0.75, 0.5)) == pytest.approx(0.0)


class TestApplyLift:
    def test_integrable_twist(self):
        z = apply_lift(IntegrableTwist(0.0, 1.0), LiftedPoint(0.0, 0.2))
        assert z.x == pytest.approx(0.2)
        assert z.y == pytest.approx(0.2)

    def test_deck(self):
        assert apply_lift(Deck(1), LiftedPoint(0.3, 0.4)) == LiftedPoint(1.3, 0.4)

    def test_compose_applies_first_item_first(self):
        m = compose(IntegrableTwist(0.0, 1.0), PinnedKick(0.5))
        z = LiftedPoint(0.0, 0.5)
        kicked = PinnedKick(0.5).apply(IntegrableTwist(0.0, 1.0).apply(z))
        assert close(m.apply(z), kicked)

    def test_compose_flattens_and_drops_identity(self):
        t = IntegrableTwist(0.0, 1.0)
        assert compose(IDENTITY, t) is t
        assert compose(compose(t, Deck(1)), Deck(2)) == Compose((t, Deck(1), Deck(2)))

    def test_iterate(self):
        orbit = iterate(IntegrableTwist(0.0, 1.0), LiftedPoint(0.0, 0.25), 4)
        assert [z.x for z in orbit] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_ellipse_major_axis_bounces_to_the_antipode(self, ellipse_table):
        z = apply_lift(ellipse_table, LiftedPoint(0.0, 0.5))
        assert z.x == pytest.approx(0.5, abs=1e-8)
        assert z.y == pytest.approx(0.5, abs=1e-8)

    def test_pinned_kick_rejects_folding_amplitude(self):
        with pytest.raises(ValueError, match="fold"):
            PinnedKick(1.0, (1.0,))

    def test_drift_counts_towards_the_amplitude(self):
        with pytest.raises(ValueError, match="fold"):
            PinnedKick(0.6, (0.3,), drift=1.5)

    def test_drift_pushes_every_interior_point(self):
        m = PinnedKick(0.6, (0.3,), drift=1.0)
        for x in (0.0, 0.25, 0.5, 0.75):
            assert m.apply(LiftedPoint(x, 0.5)).y > 0.5
        assert m.apply(LiftedPoint(0.3, 0.0)).y == 0.0


class TestBilliardStep:
    def test_circle_third_of_a_turn(self):
        curve = ConvexCurve(Ellipse(1.0, 1.0))
        bounce = billiard_step(curve, 0.0, math.pi / 3)
        assert bounce.s == pytest.approx(1 / 3)
        assert bounce.theta == pytest.approx(math.pi / 3)
        assert not bounce.degenerate

    def test_circle_diameter(self):
        bounce = billiard_step(ConvexCurve(Ellipse(1.0, 1.0)), 0.25, math.pi / 2)
        assert bounce.s == pytest.approx(0.75)

    def test_tangent_shot_is_flagged(self, ellipse_table):
        bounce = billiard_step(ellipse_table.curve, 0.1, 1e-12)
        assert bounce.degenerate
        assert bounce.s == pytest.approx(0.1)
        assert bounce.shift == 0.0

    def test_tangent_shot_strict(self, ellipse_table):
        with pytest.raises(DegenerateChord):
            billiard_step(ellipse_table.curve, 0.1, 1e-12, strict=True)

    def test_angle_out_of_range(self, ellipse_table):
        with pytest.raises(ValueError):
            billiard_step(ellipse_table.curve, 0.0, 4.0)

    def test_non_convex_fourier_table(self):
        with pytest.raises(ValueError, match="convex"):
            ConvexCurve(FourierBoundary(1.0, (0.0, 0.5)))

    def test_mild_fourier_table_bounces(self):
        m = BilliardMap(ConvexCurve(FourierBoundary(1.0, (0.0, 0.05))))
        z = m.apply(LiftedPoint(0.0, 0.5))
        assert 0.0 < z.x < 1.0
        assert 0.0 < z.y < 1.0


class TestDeckEquivariance:
    @given(st.sampled_from(MAP_ZOO), xs, ys)
    def test_commutes_with_deck(self, m, x, y):
        z = LiftedPoint(x, y)
        assert close(m.apply(z.translate(1)), m.apply(z).translate(1), 1e-9)

    @given(st.sampled_from(MAP_ZOO), xs, ys)
    def test_inverse_is_consistent(self, m, x, y):
        z = LiftedPoint(x, y)
        assert close(m.apply_inverse(m.apply(z)), z, 1e-8)

    @given(st.sampled_from(MAP_ZOO), xs, st.sampled_from([0.0, 1.0]))
    def test_boundary_circles_are_invariant(self, m, x, y):
        assert m.apply(LiftedPoint(x, y)).y == y

    @settings(deadline=None, max_examples=40)
    @given(xs, st.floats(0.05, 0.95))
    def test_billiard_commutes_with_deck(self, ellipse_table, x, y):
        z = LiftedPoint(x, y)
        assert close(ellipse_table.apply(z.translate(1)), ellipse_table.apply(z).translate(1), 1e-9)

    @settings(deadline=None, max_examples=40)
    @given(xs, st.floats(0.05, 0.95))
    def test_billiard_time_reversal_inverts(self, ellipse_table, x, y):
        z = LiftedPoint(x, y)
        assert close(ellipse_table.apply_inverse(ellipse_table.apply(z)), z, 1e-8)


class TestIsotopy:
    def test_midpoint_of_a_twist(self):
        h = IsotopyHandle(IntegrableTwist(0.0, 1.0))
        z = isotopy_eval(h, 0.5, LiftedPoint(0.0, 0.7))
        assert z.x == pytest.approx(0.35)
        assert z.y == pytest.approx(0.7)

    def test_endpoints(self, circle_table):
        h = IsotopyHandle(circle_table)
        z = LiftedPoint(0.0, 1 / 3)
        assert isotopy_eval(h, 0.0, z) == z
        assert close(isotopy_eval(h, 1.0, z), circle_table.apply(z))

    def test_time_out_of_range(self):
        with pytest.raises(ValueError):
            isotopy_eval(IsotopyHandle(IDENTITY), 1.5, LiftedPoint(0.0, 0.5))

    def test_inverse_isotopy(self, kicked):
        h = IsotopyHandle(kicked)
        z = LiftedPoint(0.3, 0.4)
        assert close(h.inverse_at(0.6, h.at(0.6, z)), z, 1e-9)


class TestMeasures:
    def test_certification_tags(self, twist, kicked, ellipse_table):
        assert twist.non_wandering_certified
        assert ellipse_table.non_wandering_certified
        assert not kicked.non_wandering_certified
        assert compose(twist, Deck(1)).non_wandering_certified


class TestTwistCone:
    def test_positive_twist(self, twist):
        cone = twist_cone(twist)
        assert cone.positive
        assert cone.beta == pytest.approx(math.pi / 4)
        assert cone.lipschitz_bound == pytest.approx(1.0)

    def test_negative_twist_is_not_positive(self, rising):
        assert not twist_cone(rising).positive

    def test_identity_has_no_cone(self):
        cone = twist_cone(IDENTITY)
        assert cone.beta == 0.0
        assert cone.lipschitz_bound == math.inf
