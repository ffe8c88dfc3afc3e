"""
Parameter sweeps and replicate statistics for LVS Sim.

A sweep varies one scenario parameter over a list of values and runs
every point for a number of replicates. Each run gets its own seed,
derived from the base seed and its position in the sweep, so any single
run can be reproduced on its own.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
import scipy.stats

from ..core.audit import audit_run
from ..core.errors import UnknownAxisError
from ..core.geometry import UserId
from ..core.scenario import AttackerSpec, LsaSpec, ScenarioConfig
from .metrics import MetricsSeries, atomic_write_text, write_run_outputs
from .runner import ScenarioRunner

logger = logging.getLogger(__name__)

SUMMARY_METRICS = [
    "mean_epoch_rounds",
    "mean_pct_mhs",
    "final_rho_honest",
    "final_rho_attackers",
    "max_rho_attackers",
    "first_epoch_honest_above_theta",
]


# =============================================================================
# Axes
# =============================================================================


def _lsa_fake_area(config: ScenarioConfig) -> int:
    for spec in config.attacker_spec:
        if isinstance(spec, LsaSpec):
            return spec.fake_area
    return config.monitored_area if config.monitored_area is not None else 0


def _lsa_fraction(config: ScenarioConfig) -> float:
    n_lsa = sum(1 for s in config.attacker_spec if isinstance(s, LsaSpec))
    return n_lsa / config.n_users if config.n_users else 0.0


def with_lsa_attackers(
    config: ScenarioConfig, fraction: float, fake_area: int | None = None
) -> ScenarioConfig:
    """Replace the LSA specs by spoofers making up `fraction` of the users.

    The spoofers are the users with the highest ids; other attacker specs
    are kept as they are.
    """
    area = _lsa_fake_area(config) if fake_area is None else fake_area
    n_attackers = math.floor(fraction * config.n_users + 0.5)
    ids = config.user_ids()
    members: list[UserId] = ids[len(ids) - n_attackers :] if n_attackers else []
    kept = [s for s in config.attacker_spec if not isinstance(s, LsaSpec)]
    specs: list[AttackerSpec] = [*kept, *(LsaSpec(member=m, fake_area=area) for m in members)]
    return config.model_copy(update={"attacker_spec": tuple(specs)})


def _set_density(config: ScenarioConfig, value: float) -> ScenarioConfig:
    fraction = _lsa_fraction(config)
    fake_area = _lsa_fake_area(config)
    n_users = max(0, math.floor(value * config.population_km2 + 0.5))
    resized = config.model_copy(update={"n_users": n_users})
    if fraction > 0:
        return with_lsa_attackers(resized, fraction, fake_area)
    return resized


def _set_schedule(field_name: str) -> Callable[[ScenarioConfig, float], ScenarioConfig]:
    cast = int if field_name in ("q", "e_max") else float

    def apply(config: ScenarioConfig, value: float) -> ScenarioConfig:
        schedule = config.schedule.model_copy(update={field_name: cast(value)})
        return config.model_copy(update={"schedule": schedule})

    return apply


def _set_top(field_name: str, cast: type) -> Callable[[ScenarioConfig, float], ScenarioConfig]:
    def apply(config: ScenarioConfig, value: float) -> ScenarioConfig:
        return config.model_copy(update={field_name: cast(value)})

    return apply


AXES: dict[str, Callable[[ScenarioConfig, float], ScenarioConfig]] = {
    "density": _set_density,
    "attacker_fraction": lambda c, v: with_lsa_attackers(c, v),
    "m_fraction": _set_schedule("m_fraction"),
    "q": _set_schedule("q"),
    "e_max": _set_schedule("e_max"),
    "wifi_range": _set_top("wifi_range", float),
    "n_epochs": _set_top("n_epochs", int),
}


def apply_axis(base: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    """Scenario with one axis set to value.

    Raises:
        UnknownAxisError: If axis is not a sweepable parameter.
    """
    if axis not in AXES:
        raise UnknownAxisError(axis, sorted(AXES))
    return AXES[axis](base, value)


def derive_seed(base_seed: int, index: int) -> int:
    return base_seed ^ index


# =============================================================================
# Running
# =============================================================================


@dataclass(frozen=True)
class SweepRun:
    """One replicate of one sweep point."""

    axis: str
    value: float
    replicate: int
    seed: int
    series: MetricsSeries

    def row(self, theta: float) -> dict[str, float | int | str | None]:
        final = self.series.final()
        attacker_rhos = [
            r for r in self.series.column("avg_rho_attackers") if r is not None
        ]
        return {
            "axis": self.axis,
            "value": self.value,
            "replicate": self.replicate,
            "seed": self.seed,
            "mean_epoch_rounds": self.series.mean_of("epoch_duration_rounds"),
            "mean_pct_mhs": self.series.mean_of("pct_mhs"),
            "final_rho_honest": final.avg_rho_honest if final else None,
            "final_rho_attackers": final.avg_rho_attackers if final else None,
            "max_rho_attackers": max(attacker_rhos) if attacker_rhos else None,
            "first_epoch_honest_above_theta": self.series.first_epoch_honest_above(theta),
        }


def _run_one(config: ScenarioConfig) -> MetricsSeries:
    return ScenarioRunner(config).run()


@audit_run("sweep")
def sweep(
    base: ScenarioConfig,
    axis: str,
    values: Sequence[float],
    replicates: int = 1,
    out_dir: Path | None = None,
    workers: int = 1,
) -> list[SweepRun]:
    """Run base with axis set to each value, replicates times per value.

    Args:
        base: Scenario every point is derived from.
        axis: Parameter to vary (see AXES).
        values: Values of the parameter.
        replicates: Runs per value.
        out_dir: When given, every run's outputs go to
            out_dir/<axis>=<value>/rep<NNN>/ and the combined tables to
            out_dir/runs.csv and out_dir/summary.csv.
        workers: Parallel processes; runs are independent.

    Returns:
        One SweepRun per (value, replicate), in sweep order.

    Raises:
        UnknownAxisError: If axis is not a sweepable parameter.
    """
    if axis not in AXES:
        raise UnknownAxisError(axis, sorted(AXES))
    if replicates < 1:
        raise ValueError("replicates must be >= 1")

    points: list[tuple[float, int, ScenarioConfig]] = []
    for i, value in enumerate(values):
        point = apply_axis(base, axis, value)
        for r in range(replicates):
            seed = derive_seed(base.seed, i * replicates + r)
            points.append((value, r, point.model_copy(update={"seed": seed})))

    configs = [c for _, _, c in points]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, configs))
    else:
        results = [_run_one(c) for c in configs]

    runs = [
        SweepRun(axis, value, r, config.seed, series)
        for (value, r, config), series in zip(points, results, strict=True)
    ]
    logger.info(f"Sweep over {axis}: {len(values)} values x {replicates} replicates")

    if out_dir is not None:
        for run in runs:
            run_dir = out_dir / f"{axis}={run.value:g}" / f"rep{run.replicate:03d}"
            write_run_outputs(run.series, run_dir)
        theta = base.reputation_params.theta
        frame = runs_frame(runs, theta)
        atomic_write_text(out_dir / "runs.csv", frame.to_csv(index=False))
        atomic_write_text(out_dir / "summary.csv", summarize(frame).to_csv(index=False))
    return runs


# =============================================================================
# Statistics
# =============================================================================


def runs_frame(runs: Sequence[SweepRun], theta: float) -> pd.DataFrame:
    """One row per run with its headline measurements."""
    columns = ["axis", "value", "replicate", "seed", *SUMMARY_METRICS]
    return pd.DataFrame([run.row(theta) for run in runs], columns=columns)


def ci_half_width(samples: Sequence[float] | np.ndarray, confidence: float = 0.95) -> float:
    """Student-t confidence interval half-width of the mean.

    Returns NaN for fewer than two samples.
    """
    data = np.asarray(samples, dtype=float)
    data = data[~np.isnan(data)]
    n = len(data)
    if n < 2:
        return math.nan
    sem = float(scipy.stats.sem(data))
    if sem == 0.0:
        return 0.0
    return float(scipy.stats.t.ppf((1.0 + confidence) / 2.0, n - 1) * sem)


def summarize(frame: pd.DataFrame, confidence: float = 0.95) -> pd.DataFrame:
    """Per-value mean, CI half-width and replicate count of every metric."""
    rows = []
    for value, group in frame.groupby("value", sort=True):
        row: dict[str, float | int] = {"value": float(value), "n": len(group)}
        for metric in SUMMARY_METRICS:
            samples = pd.to_numeric(group[metric], errors="coerce").to_numpy(dtype=float)
            valid = samples[~np.isnan(samples)]
            row[f"{metric}_mean"] = float(valid.mean()) if len(valid) else math.nan
            row[f"{metric}_ci"] = ci_half_width(valid, confidence)
        rows.append(row)
    return pd.DataFrame(rows)


def sign_test_decreasing(samples_by_level: Sequence[Sequence[float]]) -> list[float]:
    """One-sided sign tests that a metric decreases from level to level.

    Replicates are paired by position. For each consecutive pair of levels
    the test counts replicates whose value dropped; ties are discarded.

    Returns:
        p-value of each consecutive pair (1.0 when every pair tied).
    """
    p_values = []
    for lower, higher in zip(samples_by_level, samples_by_level[1:], strict=False):
        diffs = [b - a for a, b in zip(lower, higher, strict=False) if b != a]
        if not diffs:
            p_values.append(1.0)
            continue
        decreases = sum(1 for d in diffs if d < 0)
        result = scipy.stats.binomtest(decreases, len(diffs), 0.5, alternative="greater")
        p_values.append(float(result.pvalue))
    return p_values
