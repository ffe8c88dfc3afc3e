"""Shared test fixtures for LVS Sim tests.

This module provides small scenarios, hand-built neighbor graphs and the
singleton isolation used by every test.
"""

from collections.abc import Callable, Generator
from pathlib import Path

import pytest

from lvs_sim.core.geometry import Position, UserId
from lvs_sim.core.scenario import (
    AreaGrid,
    RoundSchedule,
    ScenarioConfig,
    TlwParams,
    parse_scenario,
)
from lvs_sim.engine.topology import NeighborGraph

PROJECT_ROOT = Path(__file__).parent.parent
SCENARIO_DIR = PROJECT_ROOT / "config" / "scenarios"


# =============================================================================
# Scenario Fixtures
# =============================================================================


@pytest.fixture
def scenario_dir() -> Path:
    """Directory of the bundled example scenarios."""
    return SCENARIO_DIR


@pytest.fixture
def default_scenario() -> ScenarioConfig:
    """Scenario with every field at its default value."""
    return ScenarioConfig()


@pytest.fixture
def three_cell_grid() -> AreaGrid:
    """Three 300 m cells in a row (areas 0, 1, 2)."""
    return AreaGrid(cell_size=300.0, columns=3, rows=1)


@pytest.fixture
def small_scenario(three_cell_grid: AreaGrid) -> ScenarioConfig:
    """Fast honest-only scenario: 30 users in a 300 m cell, 3 epochs."""
    return ScenarioConfig(
        grid=three_cell_grid,
        monitored_area=0,
        n_users=30,
        n_epochs=3,
        seed=5,
        schedule=RoundSchedule(e_max=8),
    )


@pytest.fixture
def fast_mobility() -> TlwParams:
    """Short flights and pauses at a high speed, for well-mixed populations."""
    return TlwParams(
        min_flight=20.0, max_flight=200.0, min_pause=1.0, max_pause=5.0, speed=20.0
    )


@pytest.fixture
def load_example() -> Callable[[str], ScenarioConfig]:
    """Load a bundled scenario document by name."""

    def _load(name: str) -> ScenarioConfig:
        return parse_scenario((SCENARIO_DIR / f"{name}.json").read_text())

    return _load


# =============================================================================
# Graph Fixtures
# =============================================================================


def graph_of(edges: list[tuple[str, str]], nodes: list[str] | None = None) -> NeighborGraph:
    """Build a NeighborGraph from string ids."""
    all_nodes = set(nodes or [])
    for a, b in edges:
        all_nodes.update((a, b))
    return NeighborGraph.from_edges(
        [UserId(n) for n in all_nodes], [(UserId(a), UserId(b)) for a, b in edges]
    )


@pytest.fixture
def make_graph() -> Callable[..., NeighborGraph]:
    """Provide graph_of() to tests."""
    return graph_of


@pytest.fixture
def star_graph() -> NeighborGraph:
    """A center with four leaves."""
    return graph_of([("A", "B"), ("A", "C"), ("A", "D"), ("A", "E")])


@pytest.fixture
def line_positions() -> dict[UserId, Position]:
    """Five users 40 m apart on a line."""
    return {UserId(f"U{i}"): Position(10.0 + 40.0 * i, 10.0) for i in range(5)}


# =============================================================================
# Singleton Reset Fixtures
# =============================================================================


@pytest.fixture(autouse=True)
def reset_singletons(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> Generator[None, None, None]:
    """Reset singleton instances between tests.

    Audit entries of the test run go to a temporary directory.
    """
    import lvs_sim.config as config_module
    import lvs_sim.core.audit as audit_module

    monkeypatch.setenv("LVS_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("LVS_CONFIG_DIR", raising=False)
    monkeypatch.delenv("LVS_REPLICATES", raising=False)
    monkeypatch.delenv("LVS_AUDIT", raising=False)

    orig_audit = audit_module._audit_logger
    orig_config = config_module._config

    audit_module._audit_logger = None
    config_module._config = None

    yield

    audit_module._audit_logger = orig_audit
    config_module._config = orig_config
