"""Tests for geometry primitives and area lookup."""

import math

import numpy as np
import pytest

from lvs_sim.core.errors import OutOfBoundsError
from lvs_sim.core.geometry import (
    Box,
    Position,
    area_of,
    areas_within,
    make_user_id,
    uniform_point,
)
from lvs_sim.core.scenario import AreaGrid


class TestUserIds:
    """Test simulated user identities."""

    def test_fixed_width(self) -> None:
        """Ids are zero-padded to a fixed width."""
        assert make_user_id(0) == "U000000"
        assert make_user_id(42) == "U000042"

    def test_lexical_order_is_creation_order(self) -> None:
        """Sorting ids sorts users by creation index."""
        ids = [make_user_id(i) for i in (3, 10, 200, 1)]
        assert sorted(ids) == [make_user_id(i) for i in (1, 3, 10, 200)]

    def test_negative_index_rejected(self) -> None:
        """Negative indices are invalid."""
        with pytest.raises(ValueError):
            make_user_id(-1)


class TestAreaOf:
    """Test mapping positions to area ids."""

    def test_origin_is_area_zero(self) -> None:
        """The origin lies in the first cell."""
        assert area_of(Position(0.0, 0.0), AreaGrid(cell_size=2000.0)) == 0

    def test_just_below_edge_stays_in_cell(self) -> None:
        """A point just inside the far edge belongs to the cell."""
        assert area_of(Position(1999.99, 0.0), AreaGrid(cell_size=2000.0)) == 0

    def test_shared_edge_belongs_to_next_cell(self) -> None:
        """Cells are half-open: x = S starts the second column."""
        grid = AreaGrid(cell_size=2000.0, columns=2, rows=1)
        assert area_of(Position(2000.0, 0.0), grid) == 1

    def test_row_major_numbering(self) -> None:
        """Ids grow along a row first."""
        grid = AreaGrid(cell_size=100.0, columns=3, rows=2)
        assert area_of(Position(250.0, 50.0), grid) == 2
        assert area_of(Position(50.0, 150.0), grid) == 3
        assert area_of(Position(299.0, 199.0), grid) == 5

    def test_origin_offset(self) -> None:
        """Cells are measured from the grid origin."""
        grid = AreaGrid(cell_size=100.0, columns=2, rows=1, origin=Position(-100.0, -50.0))
        assert area_of(Position(-100.0, -50.0), grid) == 0
        assert area_of(Position(0.0, 0.0), grid) == 1

    @pytest.mark.parametrize(
        "point",
        [
            Position(2000.0, 0.0),
            Position(-0.001, 10.0),
            Position(10.0, 2000.0),
            Position(math.nan, 0.0),
            Position(0.0, math.inf),
        ],
    )
    def test_out_of_bounds(self, point: Position) -> None:
        """Positions outside the grid or not finite raise."""
        with pytest.raises(OutOfBoundsError):
            area_of(point, AreaGrid(cell_size=2000.0))

    def test_every_cell_center_maps_to_its_id(self) -> None:
        """cell_bounds and area_of agree on every cell."""
        grid = AreaGrid(cell_size=50.0, columns=4, rows=3)
        for area in range(grid.n_areas):
            box = grid.cell_bounds(area)
            center = Position((box.x_min + box.x_max) / 2, (box.y_min + box.y_max) / 2)
            assert area_of(center, grid) == area

    def test_matches_brute_force_oracle(self) -> None:
        """Ten thousand random points, a quarter of them on cell edges."""
        grid = AreaGrid(cell_size=75.0, columns=4, rows=3, origin=Position(-20.0, 35.0))
        boxes = [grid.cell_bounds(a) for a in range(grid.n_areas)]
        bounds = grid.bounds()
        rng = np.random.default_rng(2024)
        for i in range(10_000):
            x = float(rng.uniform(bounds.x_min, bounds.x_max))
            y = float(rng.uniform(bounds.y_min, bounds.y_max))
            if i % 4 == 0:
                x = bounds.x_min + 75.0 * int(rng.integers(grid.columns))
            point = Position(x, y)
            expected = [a for a, box in enumerate(boxes) if box.contains(point)]
            assert [area_of(point, grid)] == expected, point


class TestBoxes:
    """Test boxes and uniform sampling."""

    def test_half_open_contains(self) -> None:
        """The lower edges are inside, the upper edges are not."""
        box = Box(0.0, 0.0, 10.0, 10.0)
        assert box.contains(Position(0.0, 0.0))
        assert not box.contains(Position(10.0, 5.0))
        assert box.width == 10.0 and box.height == 10.0

    def test_uniform_point_inside(self) -> None:
        """Sampled points always fall in the box."""
        rng = np.random.default_rng(1)
        box = Box(100.0, 200.0, 110.0, 205.0)
        for _ in range(1000):
            assert box.contains(uniform_point(rng, box))

    def test_distance(self) -> None:
        """Euclidean distance in meters."""
        assert Position(0.0, 0.0).distance_to(Position(3.0, 4.0)) == 5.0

    def test_box_distance(self) -> None:
        """Zero inside, straight or corner distance outside."""
        box = Box(0.0, 0.0, 10.0, 10.0)
        assert box.distance_to(Position(5.0, 5.0)) == 0.0
        assert box.distance_to(Position(15.0, 5.0)) == 5.0
        assert box.distance_to(Position(13.0, -4.0)) == 5.0


class TestAreasWithin:
    """Test finding the areas in WiFi reach of a position."""

    @pytest.fixture
    def grid(self) -> AreaGrid:
        return AreaGrid(cell_size=300.0, columns=3, rows=2)

    def test_interior_point(self, grid: AreaGrid) -> None:
        """Far from every edge only the own cell is in reach."""
        assert areas_within(Position(150.0, 150.0), grid, 50.0) == [0]

    def test_near_edge_and_corner(self, grid: AreaGrid) -> None:
        """Cells across a nearby edge or corner are in reach."""
        assert areas_within(Position(290.0, 150.0), grid, 50.0) == [0, 1]
        assert areas_within(Position(290.0, 290.0), grid, 50.0) == [0, 1, 3, 4]
        # the diagonal cell is farther than the radius
        assert areas_within(Position(260.0, 260.0), grid, 50.0) == [0, 1, 3]

    def test_point_outside_grid(self, grid: AreaGrid) -> None:
        """A point beyond the grid still reaches the cells next to it."""
        assert areas_within(Position(920.0, 100.0), grid, 50.0) == [2]
        assert areas_within(Position(1000.0, 100.0), grid, 50.0) == []

    def test_matches_brute_force(self, grid: AreaGrid) -> None:
        """Agrees with checking every cell."""
        rng = np.random.default_rng(8)
        for _ in range(500):
            p = Position(float(rng.uniform(-100.0, 1000.0)), float(rng.uniform(-100.0, 700.0)))
            radius = float(rng.uniform(1.0, 400.0))
            expected = [
                a for a in range(grid.n_areas) if grid.cell_bounds(a).distance_to(p) <= radius
            ]
            assert areas_within(p, grid, radius) == expected
