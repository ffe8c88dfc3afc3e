"""
Validation rounds and epochs for LVS Sim.

Each round the platform collects declared positions, selects MHSs per
declared area from those declarations, and records the mutual spot events
that physics allows: an MHS spots every user in WiFi range of its true
position who declared the same area. Users just over a cell border still
take part; users farther than the WiFi range from the area never do. An
area's epoch ends once M of its declared users have at least q distinct
validators, or after e_max rounds.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Collection, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from ..core.geometry import Position, UserId
from ..core.scenario import RoundSchedule
from .adversary import Adversary
from .cos import AreaKnowledge
from .events import Declaration, SpotEvent
from .topology import NeighborGraph, greedy_mhs_select, neighbor_graph

logger = logging.getLogger(__name__)

__all__ = [
    "Declaration",
    "EpochState",
    "RoundResult",
    "SpotEvent",
    "ValidationLedger",
    "collect_declarations",
    "epoch_finished",
    "genuine_events",
    "required_validated",
    "run_round",
]


@dataclass
class EpochState:
    """Validation progress of one area in the current epoch.

    validators[target] holds the distinct users that validated target in
    this area, directly or through a chain of sight.
    """

    area: int
    started_at: int
    round_in_epoch: int = 0
    declared_users: frozenset[UserId] = frozenset()
    validators: dict[UserId, set[UserId]] = field(default_factory=lambda: defaultdict(set))
    finished_at: int | None = None

    @property
    def closed(self) -> bool:
        return self.finished_at is not None

    @property
    def validator_count(self) -> dict[UserId, int]:
        """Distinct validator counts of the declared users."""
        return {u: len(self.validators.get(u, ())) for u in self.declared_users}

    def add_validator(self, target: UserId, validator: UserId) -> None:
        if target != validator:
            self.validators[target].add(validator)

    def validated_users(self, q: int) -> set[UserId]:
        return {u for u, n in self.validator_count.items() if n >= q}


@dataclass(frozen=True)
class RoundResult:
    """Outcome of one round."""

    events: list[SpotEvent]
    mhs_by_area: dict[int, set[UserId]]
    epochs: dict[int, EpochState]

    @property
    def n_mhs(self) -> int:
        return sum(len(s) for s in self.mhs_by_area.values())


def collect_declarations(
    true_positions: Mapping[UserId, Position],
    adversary: Adversary,
) -> dict[UserId, Declaration]:
    """Declared position and area of every active user for this round."""
    return {user: adversary.declare(user, pos) for user, pos in sorted(true_positions.items())}


def _users_by_area(declarations: Mapping[UserId, Declaration]) -> dict[int, set[UserId]]:
    by_area: dict[int, set[UserId]] = defaultdict(set)
    for user, decl in declarations.items():
        by_area[decl.area].add(user)
    return by_area


def genuine_events(
    round_index: int,
    area: int,
    mhs: Iterable[UserId],
    present: frozenset[UserId],
    graph: NeighborGraph,
) -> list[SpotEvent]:
    """Spot events between the selected MHSs and their true neighbors.

    One event per unordered pair; when both parties are MHSs the smaller
    id is recorded as the MHS.

    Args:
        round_index: Global round counter.
        area: Area the MHSs were selected for.
        mhs: Selected hotspots.
        present: Users declaring the area and within WiFi range of it;
            hotspots outside this set stay silent and other users are
            never spotted.
        graph: Neighbor graph of true positions.
    """
    selected = set(mhs)
    seen: set[tuple[UserId, UserId]] = set()
    events = []
    for m in sorted(selected & present):
        for n in sorted(graph.neighbors(m) & present):
            key = (min(m, n), max(m, n))
            if key in seen:
                continue
            seen.add(key)
            hotspot, other = (key if n in selected else (m, n))
            events.append(SpotEvent(round_index, hotspot, other, area))
    return events


def run_round(
    round_index: int,
    epochs: dict[int, EpochState],
    declarations: Mapping[UserId, Declaration],
    graph: NeighborGraph,
    wifi_range: float,
    fabricated: Sequence[SpotEvent] = (),
    reach: Mapping[UserId, Collection[int]] | None = None,
) -> RoundResult:
    """Execute one validation round in every open area.

    Args:
        round_index: Global round counter.
        epochs: Epoch state per area, updated in place. Areas without a
            state get a fresh one.
        declarations: This round's declarations.
        graph: Neighbor graph of the true positions of this round.
        wifi_range: Disc radius used to rebuild the declared-position graph.
        fabricated: Adversary events, appended after the genuine ones.
        reach: Areas each user is physically within WiFi range of. When
            given, a user declaring an area out of its reach takes no part
            in that area's spotting. Otherwise every declaring user does.

    Returns:
        Events, MHS selection per area, and the updated epoch states.
    """
    by_area = _users_by_area(declarations)
    events: list[SpotEvent] = []
    mhs_by_area: dict[int, set[UserId]] = {}

    for area in sorted(by_area):
        state = epochs.setdefault(area, EpochState(area=area, started_at=round_index))
        if state.closed:
            continue

        declared = frozenset(by_area[area])
        state.declared_users = declared
        state.round_in_epoch += 1

        # the platform only knows declared positions
        declared_graph = neighbor_graph(
            {u: declarations[u].position for u in declared}, wifi_range
        )
        selected = greedy_mhs_select(declared_graph)
        mhs_by_area[area] = selected
        present = (
            declared
            if reach is None
            else frozenset(u for u in declared if area in reach.get(u, ()))
        )
        events.extend(genuine_events(round_index, area, selected, present, graph))

    open_areas = set(mhs_by_area)
    events.extend(e for e in fabricated if e.area in open_areas)

    for event in events:
        state = epochs[event.area]
        state.add_validator(event.neighbor, event.mhs)
        state.add_validator(event.mhs, event.neighbor)

    logger.debug(
        f"Round {round_index}: {len(events)} events, "
        f"{sum(len(s) for s in mhs_by_area.values())} MHSs in {len(open_areas)} areas"
    )
    return RoundResult(events, mhs_by_area, epochs)


def required_validated(n_declared: int, m_fraction: float) -> int:
    """ceil(M * |D_i|), robust to binary rounding of M."""
    return math.ceil(m_fraction * n_declared - 1e-9)


def epoch_finished(e: EpochState, schedule: RoundSchedule) -> bool:
    """Whether an area's epoch is over (M condition or e_max cap)."""
    if e.round_in_epoch >= schedule.e_max:
        return True
    validated = len(e.validated_users(schedule.q))
    return validated >= required_validated(len(e.declared_users), schedule.m_fraction)


class ValidationLedger:
    """Validator sets of the current epoch, across all areas.

    Direct validations are recorded by run_round(). Chains a user gains
    through the knowledge exchange are credited here: the owner of a new
    chain becomes a validator of its spotted user in the owner's declared
    area.
    """

    def __init__(self, epochs: dict[int, EpochState] | None = None):
        self.epochs: dict[int, EpochState] = epochs if epochs is not None else {}

    def credit(
        self,
        declarations: Mapping[UserId, Declaration],
        before: Mapping[UserId, AreaKnowledge],
        after: Mapping[UserId, AreaKnowledge],
    ) -> int:
        """Credit the chains gained in one exchange.

        Returns:
            Number of (target, validator) pairs newly recorded.
        """
        credited = 0
        for owner, omega in after.items():
            previous = before.get(owner)
            if previous is omega or owner not in declarations:
                continue
            state = self.epochs.get(declarations[owner].area)
            if state is None or state.closed:
                continue
            old_chains = previous.chains if previous is not None else frozenset()
            for chain in omega.chains - old_chains:
                known = state.validators.get(chain.spotted, set())
                if owner != chain.spotted and owner not in known:
                    state.add_validator(chain.spotted, owner)
                    credited += 1
        return credited

    def counts_for(self, user: UserId) -> dict[int, int]:
        """Distinct validators of user in every area where it has any."""
        return {
            area: len(state.validators[user])
            for area, state in sorted(self.epochs.items())
            if state.validators.get(user)
        }

    def reset(self) -> None:
        self.epochs.clear()
