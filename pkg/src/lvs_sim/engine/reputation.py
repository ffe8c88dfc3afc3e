"""
Subjective-logic reputation for LVS Sim.

Every user holds an opinion (belief, disbelief, uncertainty) summing to 1.
At each epoch end the user's location claim is classified and the opinion
moves by fixed increments; reports are accepted while rho = b - d - u
stays at or above theta.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

from ..core.geometry import UserId
from ..core.scenario import ReputationParams

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9

__all__ = [
    "OpinionTriple",
    "ReputationBook",
    "ReputationParams",
    "Verdict",
    "accept_report",
    "classify",
    "rho",
    "update_opinion",
]


class Verdict(str, Enum):
    """Epoch-end classification of a user's declared location."""

    VERIFIED = "verified"
    NOT_VERIFIED = "not_verified"
    FAKE = "fake"


@dataclass(frozen=True, slots=True)
class OpinionTriple:
    """Belief, disbelief and uncertainty about one user's honesty."""

    b: float
    d: float
    u: float

    def __post_init__(self) -> None:
        for name in ("b", "d", "u"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Opinion component {name}={value} outside [0, 1]")
        if abs(self.b + self.d + self.u - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"Opinion {self} does not sum to 1")

    @classmethod
    def initial(cls) -> OpinionTriple:
        """Full uncertainty."""
        return cls(0.0, 0.0, 1.0)

    @property
    def rho(self) -> float:
        return self.b - self.d - self.u


def rho(o: OpinionTriple) -> float:
    """Reputation level in [-1, 1]."""
    return o.rho


def classify(
    declared_area: int,
    validator_counts: Mapping[int, int],
    q: int,
    flagged: bool = False,
) -> Verdict:
    """Classify one user's claim at the end of an epoch.

    Args:
        declared_area: Area the user declared.
        validator_counts: Distinct validators of the user per area.
        q: Required validators.
        flagged: Whether a detector flagged the user this epoch.

    Returns:
        FAKE when flagged or when more than q users validated the user in
        another area, VERIFIED when at least q validated it in the declared
        area, NOT_VERIFIED otherwise.
    """
    if flagged:
        return Verdict.FAKE
    if any(area != declared_area and n > q for area, n in validator_counts.items()):
        return Verdict.FAKE
    if validator_counts.get(declared_area, 0) >= q:
        return Verdict.VERIFIED
    return Verdict.NOT_VERIFIED


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def update_opinion(o: OpinionTriple, v: Verdict, p: ReputationParams) -> OpinionTriple:
    """Apply one verdict.

    The branch increments are applied first, then each component is
    clamped to [0, 1], then the triple is renormalized to sum 1.
    """
    b, d, u = o.b, o.d, o.u
    if v is Verdict.VERIFIED:
        b += p.delta_b
        u -= p.delta_b / 2
        d -= p.delta_b / 2
    elif v is Verdict.NOT_VERIFIED:
        u += p.delta_u
        b -= p.delta_u
    else:
        d += p.delta_d
        b -= p.delta_d / 2
        u -= p.delta_d / 2

    b, d, u = _clamp(b), _clamp(d), _clamp(u)
    total = b + d + u
    if total <= 0.0:
        # unreachable with increments in (0, 1)
        return OpinionTriple.initial()
    return OpinionTriple(b / total, d / total, u / total)


def accept_report(o: OpinionTriple, theta: float) -> bool:
    """Reports are accepted when rho >= theta (boundary inclusive)."""
    return o.rho >= theta


class ReputationBook:
    """Opinions of every user of a scenario."""

    def __init__(self, users: Iterable[UserId], params: ReputationParams):
        self.params = params
        self._opinions: dict[UserId, OpinionTriple] = {
            user: OpinionTriple.initial() for user in users
        }

    def __contains__(self, user: object) -> bool:
        return user in self._opinions

    def __len__(self) -> int:
        return len(self._opinions)

    def opinion(self, user: UserId) -> OpinionTriple:
        return self._opinions.get(user, OpinionTriple.initial())

    def rho(self, user: UserId) -> float:
        return self.opinion(user).rho

    def accepted(self, user: UserId) -> bool:
        return accept_report(self.opinion(user), self.params.theta)

    def record(self, user: UserId, verdict: Verdict) -> OpinionTriple:
        """Apply a verdict to a user's opinion and return the new opinion."""
        updated = update_opinion(self.opinion(user), verdict, self.params)
        self._opinions[user] = updated
        return updated

    def mean_rho(self, users: Iterable[UserId]) -> float | None:
        """Average rho over users; None for an empty population."""
        values = [self.rho(u) for u in users]
        if not values:
            return None
        return sum(values) / len(values)
