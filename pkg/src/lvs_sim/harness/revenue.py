"""
Revenue lost to location spoofers.

Each request pays a reward R shared among all users in proportion to the
time they declare. Spoofers declare time they did not spend in the area,
so their share is revenue taken from honest participants.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

SECONDS_PER_DAY = 86_400.0
SECONDS_PER_YEAR = 365 * SECONDS_PER_DAY


class RewardModel(BaseModel):
    """Parameters of the proportional-share reward."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    reward: float = Field(gt=0, description="R, paid per request")
    t_u: float = Field(gt=0, description="time units declared by each honest user")
    t_a: float = Field(gt=0, description="time units declared by each attacker")
    n_users: int = Field(gt=0)
    attacker_fraction: float = Field(ge=0, le=1)
    request_interval: float = Field(gt=0, description="seconds between requests")

    @property
    def n_attackers(self) -> int:
        """Attacker count, rounded half up."""
        return math.floor(self.attacker_fraction * self.n_users + 0.5)

    @property
    def n_honest(self) -> int:
        return self.n_users - self.n_attackers


def attacker_share(model: RewardModel) -> float:
    """Fraction of each reward paid to attackers."""
    attack_time = model.n_attackers * model.t_a
    total_time = attack_time + model.n_honest * model.t_u
    return attack_time / total_time


def revenue_loss(model: RewardModel, horizon: float) -> tuple[float, float]:
    """Revenue paid to attackers.

    Args:
        model: Reward parameters.
        horizon: Observation period in seconds.

    Returns:
        (loss per request, loss over the horizon).
    """
    per_request = model.reward * attacker_share(model)
    return per_request, per_request * (horizon / model.request_interval)


def revenue_grid(
    n_users: int,
    reward: float,
    t_u: float,
    fractions: Iterable[float],
    attacker_times: Iterable[float],
) -> pd.DataFrame:
    """Attacker revenue share over attacker fractions and declared times.

    Returns:
        One row per (attacker_fraction, t_a) with the attacker count, the
        per-request loss and the loss as a percentage of R.
    """
    times = list(attacker_times)
    rows = []
    for fraction in fractions:
        for t_a in times:
            model = RewardModel(
                reward=reward,
                t_u=t_u,
                t_a=t_a,
                n_users=n_users,
                attacker_fraction=fraction,
                request_interval=1.0,
            )
            per_request, _ = revenue_loss(model, 0.0)
            rows.append(
                {
                    "attacker_fraction": fraction,
                    "n_attackers": model.n_attackers,
                    "t_a": t_a,
                    "loss_per_request": per_request,
                    "share_pct": 100.0 * per_request / reward,
                }
            )
    return pd.DataFrame(
        rows, columns=["attacker_fraction", "n_attackers", "t_a", "loss_per_request", "share_pct"]
    )
