"""
Exception hierarchy for LVS Sim.

Every error raised on purpose by the library derives from LvsError so the
CLI can map failures to exit codes in one place.
"""


class LvsError(Exception):
    """Base exception for LVS Sim errors."""

    pass


class ScenarioConfigError(LvsError):
    """Scenario document failed parsing or invariant validation."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []

    def __str__(self) -> str:
        if not self.violations:
            return super().__str__()
        details = "\n".join(f"  - {v}" for v in self.violations)
        return f"{super().__str__()}\n{details}"


class OutOfBoundsError(LvsError):
    """Position lies outside the area grid."""

    pass


class ChainError(LvsError):
    """Chain of sight violates its structural invariants."""

    pass


class SearchLimitError(LvsError):
    """Exhaustive search refused because the instance is too large."""

    pass


class AttackerSpecError(LvsError):
    """Attacker specification cannot be honoured by the scenario."""

    pass


class UnknownAxisError(LvsError):
    """Sweep axis does not name a numeric scenario field."""

    def __init__(self, axis: str, valid_axes: list[str]):
        super().__init__(
            f"Unknown sweep axis '{axis}'. Valid axes: {', '.join(valid_axes)}"
        )
        self.axis = axis
        self.valid_axes = valid_axes
