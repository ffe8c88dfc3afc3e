"""
Scenario driver for LVS Sim.

A run is a sequence of epochs. Every round advances the mobility model,
collects declarations, builds the true neighbor graph, runs the
validation round and the chain exchange. An epoch ends when every area
with declared users has finished its own epoch (or after e_max rounds);
the detectors then run, every declared user is classified and opinions
are updated.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping

from ..core.audit import audit_run
from ..core.errors import ScenarioConfigError
from ..core.geometry import Box, Position, UserId, area_of, areas_within
from ..core.scenario import ScenarioConfig, validate_config
from ..engine.adversary import Adversary
from ..engine.cos import (
    AreaKnowledge,
    DetectorHistory,
    detect_collusion_by_area,
    detect_fraud_covering_by_area,
    exchange_round,
)
from ..engine.events import Declaration
from ..engine.mobility import MobilityState, advance, initial_state, user_rng
from ..engine.protocol import (
    EpochState,
    ValidationLedger,
    collect_declarations,
    epoch_finished,
    run_round,
)
from ..engine.reputation import ReputationBook, Verdict, classify
from ..engine.topology import neighbor_graph
from .metrics import MetricsRecord, MetricsSeries, ReputationRow, TrajectoryRow

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """Stateful coordinator of one scenario run.

    Deterministic for a given configuration: every user draws from its own
    generator derived from the scenario seed, and every collection is
    walked in sorted order.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        record_events: bool = False,
        record_trajectory: bool = False,
    ):
        """Initialize the runner and place every user.

        Args:
            config: Scenario to run.
            record_events: Keep every spot event in the output series.
            record_trajectory: Keep every position and declaration.

        Raises:
            ScenarioConfigError: If the scenario violates any invariant.
        """
        violations = validate_config(config)
        if violations:
            raise ScenarioConfigError("Invalid scenario", violations)

        self.config = config
        self.record_events = record_events
        self.record_trajectory = record_trajectory
        self.grid = config.grid
        self.users: list[UserId] = config.user_ids()
        self.adversary = Adversary(
            config.attacker_spec, config.grid, config.seed, config.spoof_fixed_point
        )
        self.attackers = frozenset(self.adversary.members)
        self.honest = [u for u in self.users if u not in self.attackers]

        self.book = ReputationBook(self.users, config.reputation_params)
        self.history = DetectorHistory()
        self.ledger = ValidationLedger()
        self.knowledge: dict[UserId, AreaKnowledge] = {}
        self.round_index = 0
        self.epoch_index = 0

        self._rngs = {u: user_rng(config.seed, u) for u in self.users}
        self._mobility: dict[UserId, MobilityState] = {}
        self._bounds: dict[UserId, Box] = {}
        for user in self.users:
            rng = self._rngs[user]
            region = self.adversary.home_region(user, rng) or self._honest_region()
            self._mobility[user] = initial_state(region, config.mobility_params, rng)

        self.series = MetricsSeries(digest=config.digest(), seed=config.seed)

    def _honest_region(self) -> Box:
        if self.config.monitored_area is not None:
            return self.grid.cell_bounds(self.config.monitored_area)
        return self.grid.bounds()

    # =========================================================================
    # Mobility
    # =========================================================================

    def positions(self) -> dict[UserId, Position]:
        return {u: self._mobility[u].position for u in self.users}

    def _confine(self) -> None:
        """Fix the region every user reflects in for the coming epoch."""
        for user in self.users:
            resident = self.adversary.resident_area(user)
            if resident is not None:
                self._bounds[user] = self.grid.cell_bounds(resident)
            elif self.config.lock_area_per_epoch:
                area = area_of(self._mobility[user].position, self.grid)
                self._bounds[user] = self.grid.cell_bounds(area)
            else:
                self._bounds[user] = self.grid.bounds()

    def _advance_all(self, dt: float) -> None:
        params = self.config.mobility_params
        for user in self.users:
            self._mobility[user] = advance(
                self._mobility[user], dt, params, self._bounds[user], self._rngs[user]
            )

    # =========================================================================
    # Rounds and epochs
    # =========================================================================

    def _round(
        self, declared_last: dict[UserId, Declaration], mhs_counts: list[tuple[int, int]]
    ) -> None:
        config = self.config
        epochs = self.ledger.epochs
        self.round_index += 1
        if not config.freeze_positions:
            self._advance_all(config.schedule.t_r)

        positions = self.positions()
        true_areas = {u: area_of(p, self.grid) for u, p in positions.items()}
        declarations = collect_declarations(positions, self.adversary)
        declared_last.update(declarations)

        open_areas = {
            d.area for d in declarations.values()
            if not (d.area in epochs and epochs[d.area].closed)
        }
        fabricated = self.adversary.fabrications(self.round_index, true_areas, open_areas)
        graph = neighbor_graph(positions, config.wifi_range)
        reach = {u: areas_within(p, self.grid, config.wifi_range) for u, p in positions.items()}
        result = run_round(
            self.round_index, epochs, declarations, graph, config.wifi_range, fabricated, reach
        )

        before = self.knowledge
        self.knowledge = exchange_round(
            result.events, before, config.detector_params.psi_max, self.epoch_index
        )
        self.ledger.credit(declarations, before, self.knowledge)

        in_open = sum(len(epochs[a].declared_users) for a in result.mhs_by_area)
        mhs_counts.append((result.n_mhs, in_open))

        for area in sorted(result.mhs_by_area):
            state = epochs[area]
            if epoch_finished(state, config.schedule):
                state.finished_at = self.round_index

        if self.record_events:
            self.series.events.extend(result.events)
        if self.record_trajectory:
            self.series.trajectory.extend(
                TrajectoryRow(
                    self.round_index,
                    u,
                    positions[u].x,
                    positions[u].y,
                    declarations[u].position.x,
                    declarations[u].position.y,
                    declarations[u].area,
                )
                for u in self.users
            )

    def run_epoch(self) -> MetricsRecord:
        """Run one epoch up to its barrier and record it."""
        config = self.config
        schedule = config.schedule
        self.epoch_index += 1
        self.knowledge = {}
        self.ledger.reset()
        self._confine()

        declared_last: dict[UserId, Declaration] = {}
        mhs_counts: list[tuple[int, int]] = []
        rounds = 0
        while rounds < schedule.e_max:
            self._round(declared_last, mhs_counts)
            rounds += 1
            if all(s.closed for s in self.ledger.epochs.values()):
                break

        for state in self.ledger.epochs.values():
            if not state.closed:
                state.finished_at = self.round_index

        if config.freeze_positions:
            self._advance_all(rounds * schedule.t_r)

        record = self._close_epoch(declared_last, mhs_counts, rounds)
        self.series.records.append(record)
        logger.debug(
            f"Epoch {record.epoch}: {rounds} rounds, honest rho {record.avg_rho_honest}, "
            f"attacker rho {record.avg_rho_attackers}"
        )
        return record

    def _knowledge_of(self, users: frozenset[UserId]) -> dict[UserId, AreaKnowledge]:
        return {u: self.knowledge[u] for u in sorted(users) if u in self.knowledge}

    def _close_epoch(
        self,
        declared_last: Mapping[UserId, Declaration],
        mhs_counts: list[tuple[int, int]],
        rounds: int,
    ) -> MetricsRecord:
        config = self.config
        params = config.detector_params
        epochs: dict[int, EpochState] = self.ledger.epochs

        areas = [epochs[a] for a in sorted(epochs)]
        collusion = detect_collusion_by_area(
            self.knowledge, [s.declared_users for s in areas], self.history, params
        )
        fraud = detect_fraud_covering_by_area(
            [
                (self._knowledge_of(s.declared_users), s.validated_users(q=1))
                for s in areas
            ],
            self.history,
            params,
        )
        self.series.flagged_collusion.extend(sorted(g) for g in collusion)
        self.series.flagged_fraud.extend(fraud)
        flagged = {u for group in collusion for u in group} | {u for pair in fraud for u in pair}

        declared = sorted(declared_last)
        accepted = validated = 0
        for user in declared:
            decl = declared_last[user]
            counts = self.ledger.counts_for(user)
            verdict = classify(decl.area, counts, config.schedule.q, user in flagged)
            if verdict is Verdict.VERIFIED:
                validated += 1
            opinion = self.book.record(user, verdict)
            is_accepted = self.book.accepted(user)
            accepted += is_accepted
            self.series.reputation.append(
                ReputationRow(
                    self.epoch_index,
                    user,
                    opinion.b,
                    opinion.d,
                    opinion.u,
                    opinion.rho,
                    verdict.value,
                    is_accepted,
                )
            )

        durations = [
            (s.finished_at or s.started_at) - s.started_at + 1
            for s in epochs.values()
            if s.declared_users
        ]
        selected = sum(n for n, _ in mhs_counts)
        eligible = sum(n for _, n in mhs_counts)
        n_attackers = sum(1 for u in declared if u in self.attackers)

        return MetricsRecord(
            epoch=self.epoch_index,
            avg_rho_honest=self.book.mean_rho(u for u in declared if u not in self.attackers),
            avg_rho_attackers=self.book.mean_rho(u for u in declared if u in self.attackers),
            epoch_duration_rounds=sum(durations) / len(durations) if durations else 0.0,
            epoch_rounds_max=rounds,
            epoch_duration_s=rounds * config.schedule.t_r,
            pct_mhs=100.0 * selected / eligible if eligible else None,
            pct_validated=100.0 * validated / len(declared) if declared else None,
            collusion_flags=len(collusion),
            fraud_flags=len(fraud),
            reports_accepted=accepted,
            reports_rejected=len(declared) - accepted,
            n_declared=len(declared),
            n_honest=len(declared) - n_attackers,
            n_attackers=n_attackers,
        )

    def run(self) -> MetricsSeries:
        """Run every epoch of the scenario."""
        for _ in range(self.config.n_epochs):
            self.run_epoch()
        final = self.series.final()
        logger.info(
            f"Scenario {self.series.digest[:12]} finished: {len(self.series)} epochs, "
            f"{self.round_index} rounds, final honest rho "
            f"{_fmt(final.avg_rho_honest if final else None)}"
        )
        return self.series


def _fmt(value: float | None) -> str:
    return "n/a" if value is None or math.isnan(value) else f"{value:.3f}"


@audit_run("run_scenario")
def run_scenario(
    config: ScenarioConfig,
    record_events: bool = False,
    record_trajectory: bool = False,
) -> MetricsSeries:
    """Run a scenario from start to finish.

    Raises:
        ScenarioConfigError: If the scenario violates any invariant.
    """
    return ScenarioRunner(config, record_events, record_trajectory).run()
