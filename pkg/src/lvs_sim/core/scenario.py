"""
Scenario configuration for LVS Sim.

A scenario document is JSON whose field names match the model attributes
below. Parsing is strict (unknown fields are rejected); invariants are not
enforced at parse time so that validate_config() can report every
violation at once.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ScenarioConfigError
from .geometry import Box, Position, UserId, make_user_id

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# =============================================================================
# Space and time
# =============================================================================


class AreaGrid(_Model):
    """W = columns x rows location areas of size S x S."""

    cell_size: float = 2000.0
    columns: int = 1
    rows: int = 1
    origin: Position = Position(0.0, 0.0)

    @property
    def n_areas(self) -> int:
        return self.columns * self.rows

    @property
    def area_km2(self) -> float:
        """Surface of the whole grid in square kilometers."""
        return self.n_areas * self.cell_size**2 / 1e6

    @property
    def cell_km2(self) -> float:
        return self.cell_size**2 / 1e6

    def bounds(self) -> Box:
        return Box(
            self.origin.x,
            self.origin.y,
            self.origin.x + self.columns * self.cell_size,
            self.origin.y + self.rows * self.cell_size,
        )

    def cell_bounds(self, area: int) -> Box:
        """Half-open box of one area id."""
        if not 0 <= area < self.n_areas:
            raise ValueError(f"Area id {area} outside [0, {self.n_areas})")
        row, col = divmod(area, self.columns)
        x0 = self.origin.x + col * self.cell_size
        y0 = self.origin.y + row * self.cell_size
        return Box(x0, y0, x0 + self.cell_size, y0 + self.cell_size)

    def neighbors_of(self, area: int) -> list[int]:
        """Edge-adjacent area ids, in ascending order."""
        row, col = divmod(area, self.columns)
        result = []
        for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            r, c = row + dr, col + dc
            if 0 <= r < self.rows and 0 <= c < self.columns:
                result.append(r * self.columns + c)
        return result


class RoundSchedule(_Model):
    """Validation round timing and epoch termination parameters."""

    t_r: float = 15.0
    t_sw: float = 7.0
    t_vt: float = 8.0
    e_max: int = 60
    m_fraction: float = 0.9
    q: int = 2


# =============================================================================
# Sub-model parameters
# =============================================================================


class TlwParams(_Model):
    """Truncated Levy Walk parameters."""

    flight_exponent: float = 1.5
    pause_exponent: float = 1.38
    min_flight: float = 10.0
    max_flight: float = 1000.0
    min_pause: float = 10.0
    max_pause: float = 300.0
    speed: float = 1.5


class ReputationParams(_Model):
    """Algorithm increments and the report acceptance threshold."""

    delta_b: float = 0.25
    delta_d: float = 0.6
    delta_u: float = 0.15
    theta: float = 0.8


class DetectorParams(_Model):
    """Chain length bound and detector persistence thresholds (epochs)."""

    psi_max: int = 5
    theta_c: int = 2
    theta_f: int = 2


# =============================================================================
# Attackers
# =============================================================================


class LsaSpec(_Model):
    """A single spoofer continuously declaring a position in fake_area."""

    kind: Literal["lsa"] = "lsa"
    member: UserId
    fake_area: int

    @property
    def users(self) -> tuple[UserId, ...]:
        return (self.member,)


class CollusionSpec(_Model):
    """A group mutually fabricating validations in a shared fake area."""

    kind: Literal["collusion"] = "collusion"
    members: tuple[UserId, ...]
    fake_area: int

    @property
    def users(self) -> tuple[UserId, ...]:
        return self.members


class FraudCoveringSpec(_Model):
    """A genuine resident (coverer) validating one spoofer every round."""

    kind: Literal["fraud_covering"] = "fraud_covering"
    spoofer: UserId
    coverer: UserId
    covered_area: int

    @property
    def users(self) -> tuple[UserId, ...]:
        return (self.spoofer, self.coverer)


AttackerSpec = Annotated[
    LsaSpec | CollusionSpec | FraudCoveringSpec, Field(discriminator="kind")
]


# =============================================================================
# Scenario
# =============================================================================


class ScenarioConfig(_Model):
    """Complete simulation input."""

    grid: AreaGrid = AreaGrid()
    n_users: int = 200
    attacker_spec: tuple[AttackerSpec, ...] = ()
    wifi_range: float = 50.0
    schedule: RoundSchedule = RoundSchedule()
    reputation_params: ReputationParams = ReputationParams()
    detector_params: DetectorParams = DetectorParams()
    mobility_params: TlwParams = TlwParams()
    n_epochs: int = 50
    seed: int = 0
    monitored_area: int | None = None
    lock_area_per_epoch: bool = True
    freeze_positions: bool = False
    spoof_fixed_point: bool = False

    def user_ids(self) -> list[UserId]:
        return [make_user_id(i) for i in range(self.n_users)]

    def attacker_ids(self) -> set[UserId]:
        return {u for spec in self.attacker_spec for u in spec.users}

    @property
    def population_km2(self) -> float:
        """Surface the density axis refers to."""
        if self.monitored_area is not None:
            return self.grid.cell_km2
        return self.grid.area_km2

    @property
    def density(self) -> float:
        """Users per square kilometer of the population surface."""
        return self.n_users / self.population_km2

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse a scenario JSON document without checking invariants.

    Raises:
        ScenarioConfigError: If the document is not valid JSON, has unknown
            fields, or has fields of the wrong type.
    """
    try:
        return ScenarioConfig.model_validate_json(text)
    except ValidationError as e:
        violations = [
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        ]
        raise ScenarioConfigError("Malformed scenario document", violations) from e


def load_scenario(path: Path, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    """Read, parse and validate a scenario document.

    Args:
        path: JSON file.
        overrides: Top-level fields replaced after parsing (e.g. seed).

    Raises:
        ScenarioConfigError: On parse failure or any invariant violation.
    """
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioConfigError(f"Cannot read scenario {path}: {e}") from e

    config = parse_scenario(text)
    if overrides:
        config = config.model_copy(update=overrides)
    violations = validate_config(config)
    if violations:
        raise ScenarioConfigError(f"Invalid scenario {path}", violations)
    logger.info(f"Loaded scenario {path} (digest {config.digest()[:12]})")
    return config


def validate_config(c: ScenarioConfig) -> list[str]:
    """Check every scenario invariant.

    Returns:
        All violations found; an empty list means the scenario is valid.
    """
    violations: list[str] = []
    violations.extend(_grid_violations(c.grid))
    violations.extend(_schedule_violations(c.schedule))
    violations.extend(_mobility_violations(c.mobility_params))
    violations.extend(_reputation_violations(c.reputation_params))
    violations.extend(_detector_violations(c.detector_params))

    if c.n_users < 0:
        violations.append("n_users must be >= 0")
    if not (math.isfinite(c.wifi_range) and c.wifi_range > 0):
        violations.append("wifi_range must be > 0")
    if c.n_epochs < 1:
        violations.append("n_epochs must be >= 1")
    if not 0 <= c.seed < SEED_LIMIT:
        violations.append("seed must be a 64-bit unsigned integer")
    if c.monitored_area is not None and not 0 <= c.monitored_area < c.grid.n_areas:
        violations.append(f"monitored_area {c.monitored_area} outside the grid")

    violations.extend(_attacker_violations(c))
    return violations


def _grid_violations(g: AreaGrid) -> list[str]:
    violations = []
    if not (math.isfinite(g.cell_size) and g.cell_size > 0):
        violations.append("grid.cell_size S must be > 0")
    if g.columns < 1 or g.rows < 1:
        violations.append("grid must have W >= 1 areas (columns, rows >= 1)")
    if not (math.isfinite(g.origin.x) and math.isfinite(g.origin.y)):
        violations.append("grid.origin must be finite")
    return violations


def _schedule_violations(s: RoundSchedule) -> list[str]:
    violations = []
    if s.t_r <= 0 or s.t_sw <= 0 or s.t_vt <= 0:
        violations.append("schedule times T_r, T_sw, T_vt must be > 0")
    if s.t_sw + s.t_vt > s.t_r:
        violations.append("T_sw+T_vt > T_r")
    if s.e_max < 1:
        violations.append("e_max must be >= 1")
    if not 0 < s.m_fraction <= 1:
        violations.append("M must be in (0, 1]")
    if s.q < 1:
        violations.append("q must be >= 1")
    return violations


def _mobility_violations(p: TlwParams) -> list[str]:
    violations = []
    if not 0 < p.min_flight < p.max_flight:
        violations.append("mobility: require 0 < min_flight < max_flight")
    if not 0 < p.min_pause < p.max_pause:
        violations.append("mobility: require 0 < min_pause < max_pause")
    if p.flight_exponent <= 0 or p.pause_exponent <= 0:
        violations.append("mobility: exponents must be > 0")
    if p.speed <= 0:
        violations.append("mobility: speed must be > 0")
    return violations


def _reputation_violations(p: ReputationParams) -> list[str]:
    violations = []
    for name in ("delta_b", "delta_d", "delta_u"):
        value = getattr(p, name)
        if not 0 < value < 1:
            violations.append(f"reputation: {name} must be in (0, 1)")
    if not -1 < p.theta < 1:
        violations.append("reputation: theta must be in (-1, 1)")
    return violations


def _detector_violations(p: DetectorParams) -> list[str]:
    violations = []
    for name in ("psi_max", "theta_c", "theta_f"):
        if getattr(p, name) < 1:
            violations.append(f"detector: {name} must be >= 1")
    return violations


def _attacker_violations(c: ScenarioConfig) -> list[str]:
    violations: list[str] = []
    known = set(c.user_ids())
    seen: set[UserId] = set()
    n_areas = c.grid.n_areas
    attackers = 0

    for index, spec in enumerate(c.attacker_spec):
        label = f"attacker_spec[{index}] ({spec.kind})"
        users = spec.users
        attackers += len(users)

        for user in users:
            if user not in known:
                violations.append(f"{label}: unknown user {user}")
            if user in seen:
                violations.append(f"{label}: user {user} appears in more than one spec")
            seen.add(user)

        area = spec.covered_area if isinstance(spec, FraudCoveringSpec) else spec.fake_area
        if not 0 <= area < n_areas:
            violations.append(f"{label}: area {area} outside the grid")
        if n_areas < 2:
            violations.append(
                f"{label}: a single-area grid cannot hold a fake area different "
                "from the true area"
            )

        if isinstance(spec, CollusionSpec):
            if len(spec.members) < 2:
                violations.append(f"{label}: collusion needs at least 2 members")
            if len(set(spec.members)) != len(spec.members):
                violations.append(f"{label}: collusion members must be distinct")
        elif isinstance(spec, FraudCoveringSpec):
            if spec.spoofer == spec.coverer:
                violations.append(f"{label}: spoofer and coverer must differ")
            if not (c.lock_area_per_epoch or c.freeze_positions):
                violations.append(
                    f"{label}: the coverer must stay resident "
                    "(enable lock_area_per_epoch or freeze_positions)"
                )

    if attackers > c.n_users:
        violations.append(f"attacker count {attackers} exceeds n_users {c.n_users}")
    return violations
