"""
Per-round records exchanged between the protocol, adversary and CoS layers.
"""

from dataclasses import dataclass

from ..core.geometry import Position, UserId


@dataclass(frozen=True, slots=True)
class Declaration:
    """Position a user advertises to the platform in one round."""

    position: Position
    area: int


@dataclass(frozen=True, slots=True)
class SpotEvent:
    """One mutual validation between an MHS and a neighbor.

    fabricated is ground truth for metrics only; the platform treats every
    event the same way.
    """

    round: int
    mhs: UserId
    neighbor: UserId
    area: int
    fabricated: bool = False

    def __post_init__(self) -> None:
        if self.mhs == self.neighbor:
            raise ValueError(f"SpotEvent needs two distinct users, got {self.mhs} twice")

    @property
    def parties(self) -> tuple[UserId, UserId]:
        return self.mhs, self.neighbor
