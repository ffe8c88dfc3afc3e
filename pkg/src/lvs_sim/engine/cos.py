"""
Chains of Sight for LVS Sim.

A chain "owner->v1/v2/spotted" records that owner saw spotted through the
relays v1, v2. Each spot event makes both parties merge the other's area
knowledge, re-rooted at themselves. At epoch end the accumulated
knowledge is searched for two attack signatures:

- collusion: a small group whose members have all sighted each other
  and are only ever mentioned by each other;
- fraud covering: a user every one of whose chains arrives through the
  same immediate predecessor.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from typing import TypeVar

import networkx as nx

from ..core.errors import ChainError
from ..core.geometry import UserId
from ..core.scenario import DetectorParams
from .events import SpotEvent

logger = logging.getLogger(__name__)

__all__ = [
    "AreaKnowledge",
    "Chain",
    "DetectorHistory",
    "DetectorParams",
    "average_chain_length",
    "chain_is_valid",
    "collusion_candidates",
    "detect_collusion",
    "detect_collusion_by_area",
    "detect_fraud_covering",
    "detect_fraud_covering_by_area",
    "direct_chain",
    "exchange_round",
    "fraud_candidates",
    "merge_knowledge",
]


@dataclass(frozen=True, slots=True, order=True)
class Chain:
    """One chain of sight."""

    owner: UserId
    via: tuple[UserId, ...]
    spotted: UserId

    def __post_init__(self) -> None:
        members = self.members
        if len(set(members)) != len(members):
            raise ChainError(f"Chain {self} repeats a user")

    @property
    def members(self) -> tuple[UserId, ...]:
        return (self.owner, *self.via, self.spotted)

    @property
    def length(self) -> int:
        """Number of users in the chain."""
        return len(self.via) + 2

    @property
    def predecessor(self) -> UserId:
        """User the spotted node was seen through (owner for direct chains)."""
        return self.via[-1] if self.via else self.owner

    def __str__(self) -> str:
        return f"{self.owner}->{'/'.join((*self.via, self.spotted))}"

    @classmethod
    def parse(cls, text: str) -> Chain:
        """Parse the owner->via1/.../spotted form."""
        owner, sep, path = text.partition("->")
        parts = path.split("/") if path else []
        if not sep or not owner or not parts or any(not p for p in parts):
            raise ChainError(f"Malformed chain '{text}'")
        return cls(UserId(owner), tuple(UserId(p) for p in parts[:-1]), UserId(parts[-1]))


def direct_chain(owner: UserId, spotted: UserId) -> Chain:
    """Chain of a direct sighting.

    Raises:
        ChainError: If a user would sight itself.
    """
    if owner == spotted:
        raise ChainError(f"User {owner} cannot spot itself")
    return Chain(owner, (), spotted)


def chain_is_valid(chain: Chain, psi_max: int) -> bool:
    members = chain.members
    return chain.length <= psi_max and len(set(members)) == len(members)


@dataclass(frozen=True)
class AreaKnowledge:
    """The chains one user holds in the current epoch."""

    owner: UserId
    chains: frozenset[Chain] = field(default_factory=frozenset)
    epoch: int = 0

    @classmethod
    def empty(cls, owner: UserId, epoch: int = 0) -> AreaKnowledge:
        return cls(owner, frozenset(), epoch)

    def spotted(self) -> set[UserId]:
        return {c.spotted for c in self.chains}

    def __len__(self) -> int:
        return len(self.chains)


def merge_knowledge(
    omega_l: AreaKnowledge, omega_r: AreaKnowledge, psi_max: int
) -> AreaKnowledge:
    """Update l's knowledge after l directly spotted r.

    l gains the direct chain l->r and every chain of r re-rooted at l
    (r->p1/.../s becomes l->r/p1/.../s). Re-rooted chains longer than
    psi_max or that would revisit a user are dropped.
    """
    l, r = omega_l.owner, omega_r.owner
    gained: set[Chain] = set()
    if psi_max >= 2:
        gained.add(direct_chain(l, r))

    for c in omega_r.chains:
        if c.length + 1 > psi_max or l in c.members:
            continue
        gained.add(Chain(l, (r, *c.via), c.spotted))

    fresh = gained - omega_l.chains
    if not fresh:
        return omega_l
    return replace(omega_l, chains=omega_l.chains | fresh)


def exchange_round(
    events: Iterable[SpotEvent],
    knowledge: Mapping[UserId, AreaKnowledge],
    psi_max: int,
    epoch: int = 0,
) -> dict[UserId, AreaKnowledge]:
    """Mutual knowledge exchange for every event of one round.

    All merges read the knowledge as it was before the round, then the
    results are committed together.
    """
    snapshot = dict(knowledge)
    updated = dict(knowledge)

    def before(user: UserId) -> AreaKnowledge:
        return snapshot.get(user) or AreaKnowledge.empty(user, epoch)

    for event in events:
        m, n = event.parties
        updated[n] = merge_knowledge(updated.get(n) or before(n), before(m), psi_max)
        updated[m] = merge_knowledge(updated.get(m) or before(m), before(n), psi_max)
    return updated


def average_chain_length(knowledge: Iterable[AreaKnowledge]) -> float:
    total = count = 0
    for omega in knowledge:
        for c in omega.chains:
            total += c.length
            count += 1
    return total / count if count else 0.0


# =============================================================================
# Detectors
# =============================================================================

K = TypeVar("K")

MIN_COLLUSION_GROUP = 3


@dataclass
class DetectorHistory:
    """Consecutive-epoch streaks of detector candidates.

    A candidate absent from an epoch loses its streak.
    """

    collusion: dict[frozenset[UserId], int] = field(default_factory=dict)
    fraud: dict[tuple[UserId, UserId], int] = field(default_factory=dict)

    @staticmethod
    def _advance(streaks: dict[K, int], candidates: Iterable[K]) -> dict[K, int]:
        return {key: streaks.get(key, 0) + 1 for key in candidates}

    def observe_collusion(self, candidates: Iterable[frozenset[UserId]]) -> None:
        self.collusion = self._advance(self.collusion, candidates)

    def observe_fraud(self, candidates: Iterable[tuple[UserId, UserId]]) -> None:
        self.fraud = self._advance(self.fraud, candidates)


def _mentions_graph(knowledge: Iterable[AreaKnowledge], users: set[UserId]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(sorted(users))
    for omega in knowledge:
        for c in omega.chains:
            for other in (*c.via, c.spotted):
                if c.owner in users and other in users:
                    graph.add_edge(c.owner, other)
    return graph


def _sighted_each_other(
    group: frozenset[UserId], knowledge: Mapping[UserId, AreaKnowledge]
) -> bool:
    """Whether every member holds a direct chain to every other member."""
    for member in group:
        omega = knowledge.get(member)
        direct = {c.spotted for c in omega.chains if not c.via} if omega else set()
        if not group - {member} <= direct:
            return False
    return True


def collusion_candidates(
    knowledge: Mapping[UserId, AreaKnowledge], declared_users: Iterable[UserId]
) -> list[frozenset[UserId]]:
    """Isolated groups that validate each other and are smaller than the chains.

    Users are linked when one owns a chain mentioning the other. A
    connected component is a candidate when nobody outside it has seen its
    members, directly or indirectly, every member has directly sighted
    every other one, and it has at least MIN_COLLUSION_GROUP members but
    fewer than the area's average chain length.
    """
    users = set(declared_users)
    area_knowledge = [knowledge[u] for u in sorted(users) if u in knowledge]
    avg_length = average_chain_length(area_knowledge)
    graph = _mentions_graph(area_knowledge, users)

    components = [frozenset(c) for c in nx.connected_components(graph)]
    if len(components) < 2:
        return []
    candidates = [
        c
        for c in components
        if MIN_COLLUSION_GROUP <= len(c) < avg_length and _sighted_each_other(c, knowledge)
    ]
    return sorted(candidates, key=lambda c: sorted(c))


def detect_collusion(
    knowledge: Mapping[UserId, AreaKnowledge],
    declared_users: Iterable[UserId],
    history: DetectorHistory,
    params: DetectorParams,
) -> list[frozenset[UserId]]:
    """Groups isolated for at least theta_c consecutive epochs.

    Call once per epoch end; history is updated in place.
    """
    return detect_collusion_by_area(knowledge, [declared_users], history, params)


def detect_collusion_by_area(
    knowledge: Mapping[UserId, AreaKnowledge],
    declared_by_area: Iterable[Iterable[UserId]],
    history: DetectorHistory,
    params: DetectorParams,
) -> list[frozenset[UserId]]:
    """detect_collusion() over several areas with one shared history update."""
    candidates = [
        group
        for declared in declared_by_area
        for group in collusion_candidates(knowledge, declared)
    ]
    history.observe_collusion(candidates)
    flagged = [c for c in candidates if history.collusion[c] >= params.theta_c]
    for group in flagged:
        logger.warning(f"Collusion flagged: {sorted(group)} ({history.collusion[group]} epochs)")
    return flagged


def fraud_candidates(
    knowledge: Mapping[UserId, AreaKnowledge],
    targets: Iterable[UserId] | None = None,
) -> list[tuple[UserId, UserId]]:
    """(spoofer, coverer) pairs: every chain to the spoofer ends through the coverer.

    Args:
        knowledge: Area knowledge to search, usually that of one area's
            declared users.
        targets: Users examined as possible spoofers, usually the users
            validated in that area. Everyone spotted when None.
    """
    predecessors: dict[UserId, set[UserId]] = defaultdict(set)
    for omega in knowledge.values():
        for c in omega.chains:
            predecessors[c.spotted].add(c.predecessor)

    wanted = set(targets) if targets is not None else None
    pairs = []
    for spotted in sorted(predecessors):
        if wanted is not None and spotted not in wanted:
            continue
        preds = predecessors[spotted]
        if len(preds) == 1:
            pairs.append((spotted, next(iter(preds))))
    return pairs


def detect_fraud_covering(
    knowledge: Mapping[UserId, AreaKnowledge],
    history: DetectorHistory,
    params: DetectorParams,
    targets: Iterable[UserId] | None = None,
) -> list[tuple[UserId, UserId]]:
    """Pairs recurring for more than theta_f consecutive epochs.

    Call once per epoch end; history is updated in place.
    """
    return detect_fraud_covering_by_area([(knowledge, targets)], history, params)


def detect_fraud_covering_by_area(
    areas: Iterable[tuple[Mapping[UserId, AreaKnowledge], Iterable[UserId] | None]],
    history: DetectorHistory,
    params: DetectorParams,
) -> list[tuple[UserId, UserId]]:
    """detect_fraud_covering() over several areas with one shared history update.

    Args:
        areas: Per area, the knowledge of its declared users and the users
            it validated.
        history: Streaks, updated in place.
        params: Detector thresholds.
    """
    candidates = list(
        dict.fromkeys(
            pair for knowledge, targets in areas for pair in fraud_candidates(knowledge, targets)
        )
    )
    history.observe_fraud(candidates)
    flagged = [p for p in candidates if history.fraud[p] > params.theta_f]
    for spoofer, coverer in flagged:
        logger.warning(
            f"Fraud covering flagged: {spoofer} covered by {coverer} "
            f"({history.fraud[(spoofer, coverer)]} epochs)"
        )
    return flagged
