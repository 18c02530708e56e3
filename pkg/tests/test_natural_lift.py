"""Pair domains, natural lifts and the membership search."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import GridExhausted, PairOutsideDomain
from src.models.annulus_maps import IntegrableTwist, LiftedPoint, PinnedKick, compose
from src.models.foliation import VERTICAL, FoliationRef, pulled_back, tau
from src.models.natural_lift import (
    DomainKind,
    GraphRegion,
    PairDomain,
    SearchGrid,
    SubAnnulus,
    lift_across,
    member_lift,
    membership_class,
    natural_lift,
    tau_by_natural_lift,
)
from src.states import Membership, Side

LOWER_QUARTER = SubAnnulus(0.0, 0.25)
TWIST_BACK = pulled_back(VERTICAL, IntegrableTwist(0.0, 1.0))
KICK_BACK = pulled_back(VERTICAL, compose(IntegrableTwist(0.0, 1.0), PinnedKick(0.9, (1.0,))))

low_points = st.builds(LiftedPoint, st.floats(-1.0, 1.0), st.floats(0.01, 0.24))
high_points = st.builds(LiftedPoint, st.floats(-1.0, 1.0), st.floats(0.26, 0.99))


@pytest.fixture
def folded():
    """Leaves of a strong twist followed by a kick fold back below themselves."""
    return FoliationRef(compose(IntegrableTwist(0.0, 4.0), PinnedKick(0.9, (1.0,))))


class TestRegions:
    def test_sub_annulus_sides(self):
        assert SubAnnulus(0.0, 0.3).side is Side.LOWER
        assert SubAnnulus(0.7, 1.0).side is Side.UPPER
        assert SubAnnulus(0.2, 0.3).side is None

    def test_bad_sub_annulus(self):
        with pytest.raises(ValueError):
            SubAnnulus(0.5, 0.5)

    def test_exhaustion_member(self):
        domain = PairDomain.for_region(SubAnnulus(0.0, 0.5), exhaustion_count=4)
        assert domain.region_member(LiftedPoint(0.0, 0.2)) == SubAnnulus(0.0, 0.25)
        with pytest.raises(PairOutsideDomain):
            domain.region_member(LiftedPoint(0.0, 0.6))

    def test_graph_frontier_is_piecewise_linear(self):
        region = GraphRegion((0.2, 0.4))
        assert region.frontier(0.0) == pytest.approx(0.2)
        assert region.frontier(0.25) == pytest.approx(0.3)
        assert region.frontier(0.5) == pytest.approx(0.4)
        assert region.frontier(1.75) == pytest.approx(0.3)

    def test_graph_touching_the_boundary_is_a_disk(self):
        domain = PairDomain.for_region(GraphRegion((0.0, 0.4)))
        assert domain.kind is DomainKind.LOWER_DISK
        assert PairDomain.for_region(GraphRegion((0.1, 0.4))).kind is DomainKind.LOWER_ANNULUS

    def test_region_kind_must_match(self):
        with pytest.raises(ValueError):
            PairDomain(DomainKind.UPPER_ANNULUS, region=LOWER_QUARTER)
        with pytest.raises(ValueError):
            PairDomain(DomainKind.LEAF_COMPLEMENT)


class TestNaturalLift:
    def test_boundary_product(self):
        domain = PairDomain.boundary_product()
        assert natural_lift(domain, LiftedPoint(0.0, 0.0), LiftedPoint(0.5, 1.0)) == -1

    def test_boundary_product_rejects_interior_pairs(self):
        with pytest.raises(PairOutsideDomain):
            natural_lift(PairDomain.boundary_product(), LiftedPoint(0.0, 0.1), LiftedPoint(0.5, 1.0))

    def test_leaf_complement_above(self):
        domain = PairDomain.leaf_complement(VERTICAL)
        assert natural_lift(domain, LiftedPoint(0.5, 0.5), LiftedPoint(0.5, 0.2)) == 2

    def test_leaf_complement_right(self):
        domain = PairDomain.leaf_complement(VERTICAL)
        assert natural_lift(domain, LiftedPoint(0.5, 0.5), LiftedPoint(0.2, 0.5)) == 1

    def test_leaf_complement_deck_anchor(self):
        domain = PairDomain.leaf_complement(VERTICAL)
        z = LiftedPoint(0.5, 0.5)
        assert natural_lift(domain, z, z.translate(1)) == 3

    def test_leaf_complement_excludes_class_zero(self):
        with pytest.raises(PairOutsideDomain):
            natural_lift(
                PairDomain.leaf_complement(VERTICAL), LiftedPoint(0.5, 0.2), LiftedPoint(0.5, 0.5)
            )

    def test_lower_half_order(self):
        domain = PairDomain.lower_half_order(VERTICAL)
        assert natural_lift(domain, LiftedPoint(0.0, 0.5), LiftedPoint(0.3, 0.5)) == -1
        assert natural_lift(domain, LiftedPoint(0.0, 0.2), LiftedPoint(0.0, 0.7)) == 0

    def test_lower_annulus(self):
        domain = PairDomain.for_region(LOWER_QUARTER)
        assert natural_lift(domain, LiftedPoint(0.0, 0.1), LiftedPoint(0.0, 0.9)) == 0

    def test_upper_annulus_is_shifted_by_two(self):
        domain = PairDomain.for_region(SubAnnulus(0.75, 1.0))
        assert natural_lift(domain, LiftedPoint(0.0, 0.9), LiftedPoint(0.0, 0.1)) == 2

    def test_lower_annulus_needs_the_first_point_inside(self):
        with pytest.raises(PairOutsideDomain):
            natural_lift(PairDomain.for_region(LOWER_QUARTER), LiftedPoint(0.0, 0.5), LiftedPoint(0.0, 0.9))

    def test_folded_foliation_exceeds_two(self, folded):
        domain = PairDomain.for_region(LOWER_QUARTER)
        z, z2 = LiftedPoint(0.75, 0.2), LiftedPoint(0.25, 0.3)
        assert natural_lift(domain, z, z2, folded) == 3

    def test_lift_across_vertical(self):
        assert lift_across(LiftedPoint(0.3, 0.1), LiftedPoint(0.0, 0.8)) == 1


class TestMemberLift:
    def test_every_member_agrees_on_a_folded_foliation(self, folded):
        z, z2 = LiftedPoint(0.75, 0.2), LiftedPoint(0.25, 0.3)
        members = [m for m in LOWER_QUARTER.exhaustion(32) if m.contains(z)]
        assert len(members) >= 5
        assert {member_lift(m, z, z2, folded) for m in members} == {3}

    def test_every_member_agrees_on_a_graph_region(self):
        region = GraphRegion((0.3, 0.5, 0.4, 0.35))
        z, z2 = LiftedPoint(0.1, 0.05), LiftedPoint(0.6, 0.8)
        members = [m for m in region.exhaustion(16) if m.contains(z)]
        values = {member_lift(m, z, z2, KICK_BACK) for m in members}
        assert values == {natural_lift(PairDomain.for_region(region), z, z2, KICK_BACK)}

    def test_upper_members_add_two(self):
        z, z2 = LiftedPoint(0.2, 0.9), LiftedPoint(0.5, 0.1)
        members = [m for m in SubAnnulus(0.6, 1.0).exhaustion(8) if m.contains(z)]
        assert {member_lift(m, z, z2) for m in members} == {3}

    def test_pair_must_straddle_the_member(self):
        with pytest.raises(PairOutsideDomain):
            member_lift(LOWER_QUARTER, LiftedPoint(0.0, 0.1), LiftedPoint(0.5, 0.2))
        with pytest.raises(PairOutsideDomain):
            member_lift(LOWER_QUARTER, LiftedPoint(0.0, 0.5), LiftedPoint(0.5, 0.9))

    def test_lower_and_upper_routes_agree(self, folded):
        z, z2 = LiftedPoint(0.75, 0.2), LiftedPoint(0.25, 0.3)
        upper = PairDomain.for_region(SubAnnulus(0.25, 1.0))
        assert natural_lift(upper, z2, z, folded) - 2 == 3

    @settings(deadline=None, max_examples=60)
    @given(low_points, high_points)
    def test_routes_agree_on_random_pairs(self, z, z2):
        lower = PairDomain.for_region(LOWER_QUARTER)
        upper = PairDomain.for_region(SubAnnulus(0.25, 1.0))
        assert natural_lift(upper, z2, z, KICK_BACK) - 2 == natural_lift(lower, z, z2, KICK_BACK)


class TestTauByNaturalLift:
    @pytest.mark.parametrize(
        "z, z2, expected",
        [
            ((0.0, 0.1), (0.3, 0.9), 0),
            ((0.5, 0.1), (0.2, 0.9), -2),
            ((0.6, 0.2), (0.1, 0.6), -4),
            ((0.9, 0.05), (0.1, 0.95), -2),
        ],
    )
    def test_agrees_with_winding(self, twist_back, z, z2, expected):
        domain = PairDomain.for_region(LOWER_QUARTER)
        z, z2 = LiftedPoint(*z), LiftedPoint(*z2)
        assert tau_by_natural_lift(domain, z, z2, VERTICAL, twist_back) == expected
        assert tau(z, z2, VERTICAL, twist_back) == expected

    @settings(deadline=None, max_examples=60)
    @given(low_points, high_points, st.sampled_from([TWIST_BACK, KICK_BACK]))
    def test_winding_oracle_on_random_pairs(self, z, z2, F2):
        domain = PairDomain.for_region(LOWER_QUARTER)
        assert tau_by_natural_lift(domain, z, z2, VERTICAL, F2) == tau(z, z2, VERTICAL, F2)


class TestMembership:
    def test_vertical_has_no_witness(self):
        result = membership_class(LiftedPoint(0.3, 0.1), LOWER_QUARTER, VERTICAL, SearchGrid(32, 8))
        assert result.status is Membership.NONE
        assert result.exactly2 is None

    def test_strict_search_raises(self):
        with pytest.raises(GridExhausted):
            membership_class(
                LiftedPoint(0.3, 0.1), LOWER_QUARTER, VERTICAL, SearchGrid(16, 4), strict=True
            )

    def test_point_outside_region(self):
        with pytest.raises(PairOutsideDomain):
            membership_class(LiftedPoint(0.3, 0.5), LOWER_QUARTER)

    def test_upper_region_rejected(self):
        with pytest.raises(ValueError):
            membership_class(LiftedPoint(0.3, 0.9), SubAnnulus(0.75, 1.0))

    def test_folded_foliation_has_an_exact_witness(self, folded):
        domain = PairDomain.for_region(LOWER_QUARTER)
        result = membership_class(LiftedPoint(0.75, 0.2), LOWER_QUARTER, folded)
        assert result.status is not Membership.NONE
        assert result.exactly2 is not None
        assert natural_lift(domain, *result.exactly2, folded) == 2
        if result.status is Membership.ABOVE_TWO:
            assert natural_lift(domain, *result.above2, folded) > 2
