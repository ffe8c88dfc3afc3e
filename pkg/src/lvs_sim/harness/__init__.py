"""
Scenario driver, metrics, sweeps and revenue model for LVS Sim.
"""

from .metrics import MetricsRecord, MetricsSeries, write_run_outputs
from .revenue import RewardModel, revenue_grid, revenue_loss
from .runner import ScenarioRunner, run_scenario
from .sweep import SweepRun, sign_test_decreasing, summarize, sweep

__all__ = [
    "MetricsRecord",
    "MetricsSeries",
    "RewardModel",
    "ScenarioRunner",
    "SweepRun",
    "revenue_grid",
    "revenue_loss",
    "run_scenario",
    "sign_test_decreasing",
    "summarize",
    "sweep",
    "write_run_outputs",
]
