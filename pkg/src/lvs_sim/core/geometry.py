"""
Planar geometry for LVS Sim.

Positions are Cartesian meters. The area grid partitions its bounding box
into half-open S x S cells numbered row-major from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NewType

from .errors import OutOfBoundsError

if TYPE_CHECKING:
    import numpy as np

    from .scenario import AreaGrid

UserId = NewType("UserId", str)

USER_ID_WIDTH = 6


def make_user_id(index: int) -> UserId:
    """Return the opaque identity token of the index-th simulated user.

    Tokens are fixed width so lexical order equals creation order.
    """
    if index < 0:
        raise ValueError("User index must be non-negative")
    return UserId(f"U{index:0{USER_ID_WIDTH}d}")


@dataclass(frozen=True, slots=True)
class Position:
    """Point in the scenario plane (meters)."""

    x: float
    y: float

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Box:
    """Half-open axis-aligned rectangle [x_min, x_max) x [y_min, y_max)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, p: Position) -> bool:
        return self.x_min <= p.x < self.x_max and self.y_min <= p.y < self.y_max

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def distance_to(self, p: Position) -> float:
        """Distance from p to the nearest point of the box; 0 inside."""
        dx = max(self.x_min - p.x, 0.0, p.x - self.x_max)
        dy = max(self.y_min - p.y, 0.0, p.y - self.y_max)
        return math.hypot(dx, dy)


def area_of(p: Position, g: AreaGrid) -> int:
    """Map a position to the id of the grid cell containing it.

    Cells are half-open [x, x + S), so a point on a shared edge belongs to
    the cell that starts there.

    Args:
        p: Position to locate.
        g: Area grid.

    Returns:
        Row-major area id in [0, W).

    Raises:
        OutOfBoundsError: If p is not finite or lies outside the grid.
    """
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise OutOfBoundsError(f"Position ({p.x}, {p.y}) is not finite")

    col = math.floor((p.x - g.origin.x) / g.cell_size)
    row = math.floor((p.y - g.origin.y) / g.cell_size)
    if not (0 <= col < g.columns and 0 <= row < g.rows):
        raise OutOfBoundsError(
            f"Position ({p.x}, {p.y}) is outside the {g.columns}x{g.rows} grid "
            f"of cell size {g.cell_size} at ({g.origin.x}, {g.origin.y})"
        )
    return row * g.columns + col


def areas_within(p: Position, g: AreaGrid, radius: float) -> list[int]:
    """Ids of the cells within radius of p, in ascending order.

    p may lie outside the grid.
    """
    s = g.cell_size
    col_lo = max(math.floor((p.x - radius - g.origin.x) / s), 0)
    col_hi = min(math.floor((p.x + radius - g.origin.x) / s), g.columns - 1)
    row_lo = max(math.floor((p.y - radius - g.origin.y) / s), 0)
    row_hi = min(math.floor((p.y + radius - g.origin.y) / s), g.rows - 1)
    areas: list[int] = []
    for row in range(row_lo, row_hi + 1):
        for col in range(col_lo, col_hi + 1):
            area = row * g.columns + col
            if g.cell_bounds(area).distance_to(p) <= radius:
                areas.append(area)
    return areas


def uniform_point(rng: np.random.Generator, box: Box) -> Position:
    """Draw a position uniformly inside a half-open box."""
    x = min(float(rng.uniform(box.x_min, box.x_max)), math.nextafter(box.x_max, box.x_min))
    y = min(float(rng.uniform(box.y_min, box.y_max)), math.nextafter(box.y_max, box.y_min))
    return Position(x, y)
