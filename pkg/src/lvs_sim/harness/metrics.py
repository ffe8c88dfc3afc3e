"""
Per-epoch metrics and output writers for LVS Sim.

All writers are atomic: content goes to a temporary file in the target
directory which then replaces the destination.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from ..core.geometry import UserId
from ..engine.events import SpotEvent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricsRecord:
    """Measurements of one completed epoch.

    Averages over an empty population are None, never 0.
    """

    epoch: int
    avg_rho_honest: float | None
    avg_rho_attackers: float | None
    epoch_duration_rounds: float
    epoch_rounds_max: int
    epoch_duration_s: float
    pct_mhs: float | None
    pct_validated: float | None
    collusion_flags: int
    fraud_flags: int
    reports_accepted: int
    reports_rejected: int
    n_declared: int
    n_honest: int
    n_attackers: int

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ReputationRow:
    epoch: int
    user_id: UserId
    b: float
    d: float
    u: float
    rho: float
    verdict: str
    accepted: bool


@dataclass(frozen=True)
class TrajectoryRow:
    round: int
    user_id: UserId
    x: float
    y: float
    declared_x: float
    declared_y: float
    declared_area: int


@dataclass
class MetricsSeries:
    """Output of one scenario run."""

    digest: str
    seed: int
    records: list[MetricsRecord] = field(default_factory=list)
    flagged_collusion: list[list[UserId]] = field(default_factory=list)
    flagged_fraud: list[tuple[UserId, UserId]] = field(default_factory=list)
    reputation: list[ReputationRow] = field(default_factory=list)
    events: list[SpotEvent] = field(default_factory=list)
    trajectory: list[TrajectoryRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> list[Any]:
        return [getattr(r, name) for r in self.records]

    def final(self) -> MetricsRecord | None:
        return self.records[-1] if self.records else None

    def first_epoch_honest_above(self, theta: float) -> int | None:
        """First epoch whose honest average rho reaches theta."""
        for r in self.records:
            if r.avg_rho_honest is not None and r.avg_rho_honest >= theta:
                return r.epoch
        return None

    def mean_of(self, name: str) -> float | None:
        values = [v for v in self.column(name) if v is not None]
        return sum(values) / len(values) if values else None

    def summary(self) -> dict[str, Any]:
        """Digest, final averages and detector flags."""
        last = self.final()
        return {
            "digest": self.digest,
            "seed": self.seed,
            "epochs": len(self.records),
            "final": asdict(last) if last else None,
            "mean_epoch_duration_rounds": self.mean_of("epoch_duration_rounds"),
            "mean_pct_mhs": self.mean_of("pct_mhs"),
            "flagged_collusion": [sorted(g) for g in self.flagged_collusion],
            "flagged_fraud": [list(p) for p in self.flagged_fraud],
        }


# =============================================================================
# Writers
# =============================================================================


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def _format(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    return value


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) for v in row])
    return buffer.getvalue()


def write_metrics_csv(series: MetricsSeries, path: Path) -> Path:
    """Per-epoch records with a header row; nulls are empty fields."""
    columns = MetricsRecord.columns()
    rows = ([getattr(r, c) for c in columns] for r in series.records)
    atomic_write_text(path, _csv_text(columns, rows))
    logger.debug(f"Wrote {len(series.records)} metrics rows to {path}")
    return path


def write_summary_json(series: MetricsSeries, path: Path) -> Path:
    atomic_write_text(path, json.dumps(series.summary(), indent=2, sort_keys=True) + "\n")
    return path


def write_reputation_csv(series: MetricsSeries, path: Path) -> Path:
    columns = [f.name for f in fields(ReputationRow)]
    rows = ([getattr(r, c) for c in columns] for r in series.reputation)
    atomic_write_text(path, _csv_text(columns, rows))
    return path


def write_events_csv(series: MetricsSeries, path: Path) -> Path:
    columns = ["round", "mhs", "neighbor", "area", "fabricated"]
    rows = ([getattr(e, c) for c in columns] for e in series.events)
    atomic_write_text(path, _csv_text(columns, rows))
    return path


def write_trajectory_csv(series: MetricsSeries, path: Path) -> Path:
    columns = [f.name for f in fields(TrajectoryRow)]
    rows = ([getattr(r, c) for c in columns] for r in series.trajectory)
    atomic_write_text(path, _csv_text(columns, rows))
    return path


def write_run_outputs(series: MetricsSeries, out_dir: Path) -> list[Path]:
    """Write every output of a run into out_dir.

    Event and trajectory dumps are written only when the run recorded them.
    """
    written = [
        write_metrics_csv(series, out_dir / "metrics.csv"),
        write_summary_json(series, out_dir / "summary.json"),
        write_reputation_csv(series, out_dir / "reputation.csv"),
    ]
    if series.events:
        written.append(write_events_csv(series, out_dir / "events.csv"))
    if series.trajectory:
        written.append(write_trajectory_csv(series, out_dir / "trajectory.csv"))
    return written
