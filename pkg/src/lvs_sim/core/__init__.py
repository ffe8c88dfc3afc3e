"""
Core modules for LVS Sim.

- geometry: identities, positions and area lookup
- scenario: scenario documents and their validation
- errors: exception hierarchy
- audit: run logging
"""

from .audit import AuditLogger, audit_run, get_audit_logger
from .errors import (
    AttackerSpecError,
    ChainError,
    LvsError,
    OutOfBoundsError,
    ScenarioConfigError,
    SearchLimitError,
    UnknownAxisError,
)
from .geometry import Box, Position, UserId, area_of, make_user_id
from .scenario import (
    AreaGrid,
    AttackerSpec,
    CollusionSpec,
    DetectorParams,
    FraudCoveringSpec,
    LsaSpec,
    ReputationParams,
    RoundSchedule,
    ScenarioConfig,
    TlwParams,
    load_scenario,
    parse_scenario,
    validate_config,
)

__all__ = [
    "AreaGrid",
    "AttackerSpec",
    "AttackerSpecError",
    "AuditLogger",
    "Box",
    "ChainError",
    "CollusionSpec",
    "DetectorParams",
    "FraudCoveringSpec",
    "LsaSpec",
    "LvsError",
    "OutOfBoundsError",
    "Position",
    "ReputationParams",
    "RoundSchedule",
    "ScenarioConfig",
    "ScenarioConfigError",
    "SearchLimitError",
    "TlwParams",
    "UnknownAxisError",
    "UserId",
    "area_of",
    "audit_run",
    "get_audit_logger",
    "load_scenario",
    "make_user_id",
    "parse_scenario",
    "validate_config",
]
