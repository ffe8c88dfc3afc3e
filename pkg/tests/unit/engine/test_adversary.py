"""Tests for attacker policies."""

import numpy as np
import pytest

from lvs_sim.core.errors import AttackerSpecError
from lvs_sim.core.geometry import Position, UserId, area_of
from lvs_sim.core.scenario import AreaGrid, CollusionSpec, FraudCoveringSpec, LsaSpec
from lvs_sim.engine.adversary import (
    Adversary,
    collusion_fabrications,
    fraud_covering_fabrications,
    lsa_declaration,
    spoof_region,
)

X, Y, Z = UserId("X"), UserId("Y"), UserId("Z")
W = UserId("W")


class TestSpoofRegion:
    """Test where spoofers physically live."""

    def test_prefers_cells_not_touching_fake_area(self, three_cell_grid: AreaGrid) -> None:
        """With cells 0-1-2 in a row, spoofers of 0 live in 2."""
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert spoof_region(0, three_cell_grid, rng) == three_cell_grid.cell_bounds(2)

    def test_falls_back_to_neighbors(self) -> None:
        """On a two-cell grid the only other cell is used."""
        grid = AreaGrid(cell_size=100.0, columns=2)
        assert spoof_region(0, grid, np.random.default_rng(0)) == grid.cell_bounds(1)

    def test_single_area_grid(self) -> None:
        """Spoofing needs a second area."""
        with pytest.raises(AttackerSpecError):
            spoof_region(0, AreaGrid(cell_size=100.0), np.random.default_rng(0))


class TestLsaDeclaration:
    """Test spoofed declarations."""

    def test_declares_point_in_fake_area(self, three_cell_grid: AreaGrid) -> None:
        """A spoofer elsewhere declares a uniform point of the fake area."""
        rng = np.random.default_rng(1)
        for _ in range(100):
            position, area = lsa_declaration(0, Position(700.0, 50.0), three_cell_grid, rng)
            assert area == 0
            assert area_of(position, three_cell_grid) == 0

    def test_inside_fake_area_declares_adjacent(self, three_cell_grid: AreaGrid) -> None:
        """A spoofer standing in its fake area claims the neighboring cell."""
        position, area = lsa_declaration(
            0, Position(50.0, 50.0), three_cell_grid, np.random.default_rng(2)
        )
        assert area == 1
        assert area_of(position, three_cell_grid) == 1

    def test_fixed_point_used(self, three_cell_grid: AreaGrid) -> None:
        """A fixed point is declared verbatim."""
        point = Position(120.0, 130.0)
        declared = lsa_declaration(
            0, Position(700.0, 50.0), three_cell_grid, np.random.default_rng(3), point
        )
        assert declared == (point, 0)


class TestFabrications:
    """Test forged validation events."""

    def test_collusion_all_ordered_pairs(self) -> None:
        """Three colluders forge six events in their fake area."""
        events = collusion_fabrications(CollusionSpec(members=(Z, X, Y), fake_area=1), 7)
        assert len(events) == 6
        assert {(e.mhs, e.neighbor) for e in events} == {
            (a, b) for a in (X, Y, Z) for b in (X, Y, Z) if a != b
        }
        assert all(e.fabricated and e.area == 1 and e.round == 7 for e in events)

    def test_fraud_covering_single_event(self) -> None:
        """The coverer forges one validation of the spoofer."""
        spec = FraudCoveringSpec(spoofer=X, coverer=Y, covered_area=0)
        (event,) = fraud_covering_fabrications(spec, 3, coverer_area=0)
        assert (event.mhs, event.neighbor, event.area) == (Y, X, 0)
        assert event.fabricated

    def test_coverer_must_be_resident(self) -> None:
        """A coverer outside the covered area is a spec error."""
        spec = FraudCoveringSpec(spoofer=X, coverer=Y, covered_area=0)
        with pytest.raises(AttackerSpecError, match="not in covered area"):
            fraud_covering_fabrications(spec, 3, coverer_area=2)


class TestAdversary:
    """Test the scenario-wide adversary."""

    @pytest.fixture
    def adversary(self, three_cell_grid: AreaGrid) -> Adversary:
        return Adversary(
            (
                CollusionSpec(members=(X, Y), fake_area=0),
                FraudCoveringSpec(spoofer=Z, coverer=W, covered_area=0),
            ),
            three_cell_grid,
            seed=4,
        )

    def test_roles(self, adversary: Adversary) -> None:
        """Spoofers have a fake area, coverers a resident area."""
        assert adversary.members == {X, Y, Z, W}
        assert adversary.is_attacker(W)
        assert not adversary.is_attacker(UserId("Q"))
        assert adversary.fake_area(Z) == 0
        assert adversary.fake_area(W) is None
        assert adversary.resident_area(W) == 0
        assert adversary.resident_area(Z) is None

    def test_home_regions(self, adversary: Adversary, three_cell_grid: AreaGrid) -> None:
        """Spoofers start away from the fake area, coverers inside it."""
        rng = np.random.default_rng(0)
        assert adversary.home_region(X, rng) == three_cell_grid.cell_bounds(2)
        assert adversary.home_region(W, rng) == three_cell_grid.cell_bounds(0)
        assert adversary.home_region(UserId("Q"), rng) is None

    def test_truthful_users_declare_truth(self, adversary: Adversary) -> None:
        """Honest users and coverers declare their true position."""
        here = Position(40.0, 40.0)
        declared = adversary.declare(W, here)
        assert (declared.position, declared.area) == (here, 0)

    def test_fresh_point_each_round(self, adversary: Adversary) -> None:
        """Without a fixed point spoofers move their claim every round."""
        first = adversary.declare(X, Position(700.0, 50.0))
        second = adversary.declare(X, Position(700.0, 50.0))
        assert first.area == second.area == 0
        assert first.position != second.position

    def test_fixed_point_repeated(self, three_cell_grid: AreaGrid) -> None:
        """With fixed_point the same claim is repeated."""
        adversary = Adversary(
            (LsaSpec(member=X, fake_area=0),), three_cell_grid, seed=4, fixed_point=True
        )
        claims = {adversary.declare(X, Position(700.0, 50.0)).position for _ in range(5)}
        assert len(claims) == 1

    def test_fabrications_in_spec_order(self, adversary: Adversary) -> None:
        """Collusion events come first, then the fraud-covering event."""
        events = adversary.fabrications(2, {X: 2, Y: 2, Z: 2, W: 0})
        assert [(e.mhs, e.neighbor) for e in events] == [(X, Y), (Y, X), (W, Z)]

    def test_closed_areas_dropped(self, adversary: Adversary) -> None:
        """Events for areas no longer validating are discarded."""
        assert adversary.fabrications(2, {W: 0}, open_areas={1}) == []

    def test_reproducible_per_seed(self, three_cell_grid: AreaGrid) -> None:
        """Two adversaries with one seed make the same claims."""
        specs = (LsaSpec(member=X, fake_area=0),)
        a = Adversary(specs, three_cell_grid, seed=9)
        b = Adversary(specs, three_cell_grid, seed=9)
        here = Position(700.0, 50.0)
        assert [a.declare(X, here) for _ in range(3)] == [b.declare(X, here) for _ in range(3)]
