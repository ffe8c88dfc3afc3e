"""
Attacker policies for LVS Sim.

Three non-adaptive behaviours are supported: location spoofing (LSA),
collusion (a group fabricating mutual validations in a shared fake area)
and fraud covering (a genuine resident fabricating validations of one
spoofer). Policies are evaluated once per round.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping

import numpy as np

from ..core.errors import AttackerSpecError
from ..core.geometry import Box, Position, UserId, area_of, uniform_point
from ..core.scenario import (
    AreaGrid,
    AttackerSpec,
    CollusionSpec,
    FraudCoveringSpec,
    LsaSpec,
)
from .events import Declaration, SpotEvent
from .mobility import user_rng

logger = logging.getLogger(__name__)

__all__ = [
    "Adversary",
    "AttackerSpec",
    "CollusionSpec",
    "FraudCoveringSpec",
    "LsaSpec",
    "collusion_fabrications",
    "fraud_covering_fabrications",
    "lsa_declaration",
    "spoof_region",
]


def spoof_region(fake_area: int, grid: AreaGrid, rng: np.random.Generator) -> Box:
    """Cell where a spoofer of fake_area physically lives.

    Prefers cells that do not touch the fake area, so that a spoofer is
    never within WiFi reach of its victims across a shared edge.
    """
    others = [a for a in range(grid.n_areas) if a != fake_area]
    if not others:
        raise AttackerSpecError(
            f"Spoofing area {fake_area} needs at least two areas in the grid"
        )
    touching = set(grid.neighbors_of(fake_area))
    remote = [a for a in others if a not in touching]
    pool = remote or others
    return grid.cell_bounds(pool[int(rng.integers(len(pool)))])


def lsa_declaration(
    fake_area: int,
    true_position: Position,
    grid: AreaGrid,
    rng: np.random.Generator,
    fixed_point: Position | None = None,
) -> tuple[Position, int]:
    """Declared position of a spoofer for one round.

    A fresh uniform point inside fake_area, or fixed_point when given. If
    the spoofer is physically inside fake_area, an adjacent area is
    declared instead so the declared area always differs from the true one.

    Raises:
        AttackerSpecError: If the grid has a single area.
    """
    target = fake_area
    if area_of(true_position, grid) == fake_area:
        adjacent = grid.neighbors_of(fake_area)
        if not adjacent:
            raise AttackerSpecError(
                f"Spoofer inside area {fake_area} has no other area to declare"
            )
        target = adjacent[0]
        fixed_point = None

    if fixed_point is not None:
        return fixed_point, target
    return uniform_point(rng, grid.cell_bounds(target)), target


def collusion_fabrications(spec: CollusionSpec, round_index: int) -> list[SpotEvent]:
    """Fabricated validations among all colluders, both directions."""
    return [
        SpotEvent(round_index, a, b, spec.fake_area, fabricated=True)
        for a, b in itertools.permutations(sorted(spec.members), 2)
    ]


def fraud_covering_fabrications(
    spec: FraudCoveringSpec, round_index: int, coverer_area: int
) -> list[SpotEvent]:
    """The coverer's fabricated validation of the spoofer.

    Args:
        spec: Fraud covering attack.
        round_index: Current round.
        coverer_area: True area of the coverer this round.

    Raises:
        AttackerSpecError: If the coverer is not a resident of the covered area.
    """
    if coverer_area != spec.covered_area:
        raise AttackerSpecError(
            f"Coverer {spec.coverer} is in area {coverer_area}, "
            f"not in covered area {spec.covered_area}"
        )
    return [SpotEvent(round_index, spec.coverer, spec.spoofer, spec.covered_area, fabricated=True)]


class Adversary:
    """All attacker specs of a scenario, evaluated round by round."""

    def __init__(
        self,
        specs: Iterable[AttackerSpec],
        grid: AreaGrid,
        seed: int,
        fixed_point: bool = False,
    ):
        """Initialize the adversary.

        Args:
            specs: Attacker specifications.
            grid: Scenario area grid.
            seed: Scenario seed, for per-spoofer generators.
            fixed_point: Declare one fixed point per spoofer instead of a
                fresh point every round.
        """
        self.specs = tuple(specs)
        self.grid = grid
        self.seed = seed
        self.fixed_point = fixed_point
        self._fake_area: dict[UserId, int] = {}
        self._resident_area: dict[UserId, int] = {}
        self._rngs: dict[UserId, np.random.Generator] = {}
        self._points: dict[UserId, Position] = {}

        for spec in self.specs:
            if isinstance(spec, LsaSpec):
                self._fake_area[spec.member] = spec.fake_area
            elif isinstance(spec, CollusionSpec):
                for member in spec.members:
                    self._fake_area[member] = spec.fake_area
            else:
                self._fake_area[spec.spoofer] = spec.covered_area
                self._resident_area[spec.coverer] = spec.covered_area

    @property
    def members(self) -> frozenset[UserId]:
        return frozenset(self._fake_area) | frozenset(self._resident_area)

    def is_attacker(self, user: UserId) -> bool:
        return user in self._fake_area or user in self._resident_area

    def fake_area(self, user: UserId) -> int | None:
        return self._fake_area.get(user)

    def resident_area(self, user: UserId) -> int | None:
        """Area a coverer must never leave."""
        return self._resident_area.get(user)

    def home_region(self, user: UserId, rng: np.random.Generator) -> Box | None:
        """Cell an attacker is initially placed in; None for honest users."""
        if user in self._fake_area:
            return spoof_region(self._fake_area[user], self.grid, rng)
        if user in self._resident_area:
            return self.grid.cell_bounds(self._resident_area[user])
        return None

    def _rng(self, user: UserId) -> np.random.Generator:
        if user not in self._rngs:
            self._rngs[user] = user_rng(self.seed, user, stream="spoof")
        return self._rngs[user]

    def declare(self, user: UserId, true_position: Position) -> Declaration:
        """Declaration of one user; honest users and coverers tell the truth."""
        fake = self._fake_area.get(user)
        if fake is None:
            return Declaration(true_position, area_of(true_position, self.grid))

        rng = self._rng(user)
        point = None
        if self.fixed_point:
            if user not in self._points:
                self._points[user] = uniform_point(rng, self.grid.cell_bounds(fake))
            point = self._points[user]
        position, area = lsa_declaration(fake, true_position, self.grid, rng, point)
        return Declaration(position, area)

    def fabrications(
        self,
        round_index: int,
        true_areas: Mapping[UserId, int],
        open_areas: set[int] | None = None,
    ) -> list[SpotEvent]:
        """Every fabricated event of this round, in attacker-spec order.

        Args:
            round_index: Current round.
            true_areas: True area of every user this round.
            open_areas: Areas still validating; events elsewhere are dropped.
        """
        events: list[SpotEvent] = []
        for spec in self.specs:
            if isinstance(spec, CollusionSpec):
                events.extend(collusion_fabrications(spec, round_index))
            elif isinstance(spec, FraudCoveringSpec):
                events.extend(
                    fraud_covering_fabrications(spec, round_index, true_areas[spec.coverer])
                )
        if open_areas is not None:
            events = [e for e in events if e.area in open_areas]
        return events
