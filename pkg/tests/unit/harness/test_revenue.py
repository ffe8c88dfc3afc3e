"""Tests for the revenue-loss model."""

import pytest
from pydantic import ValidationError

from lvs_sim.harness.revenue import (
    SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
    RewardModel,
    attacker_share,
    revenue_grid,
    revenue_loss,
)


def model(**overrides: float) -> RewardModel:
    values: dict[str, float] = {
        "reward": 1.0,
        "t_u": 1.0,
        "t_a": 1.0,
        "n_users": 100,
        "attacker_fraction": 0.5,
        "request_interval": 60.0,
    }
    values.update(overrides)
    return RewardModel(**values)


class TestRevenueLoss:
    """Test the proportional-share loss."""

    def test_half_attackers_take_half(self) -> None:
        """With equal times, half the users take half of every reward."""
        per_request, per_day = revenue_loss(model(), SECONDS_PER_DAY)
        assert per_request == pytest.approx(0.5)
        assert per_day == pytest.approx(720.0)

    @pytest.mark.parametrize(
        ("horizon", "interval", "expected"),
        [
            (30 * SECONDS_PER_DAY, 60.0, 21_600.0),
            (SECONDS_PER_YEAR, 60.0, 262_800.0),
            (SECONDS_PER_YEAR, 600.0, 26_280.0),
        ],
    )
    def test_horizons(self, horizon: float, interval: float, expected: float) -> None:
        """Totals scale with the number of requests in the horizon."""
        _, total = revenue_loss(model(request_interval=interval), horizon)
        assert total == pytest.approx(expected)

    def test_no_attackers_no_loss(self) -> None:
        """Without attackers nothing is lost."""
        assert attacker_share(model(attacker_fraction=0.0)) == 0.0

    def test_only_attackers_take_everything(self) -> None:
        """Without honest users attackers take the whole reward."""
        m = model(attacker_fraction=1.0)
        assert m.n_honest == 0
        assert attacker_share(m) == 1.0

    def test_longer_claims_take_more(self) -> None:
        """Attackers declaring more time take a larger share."""
        assert attacker_share(model(t_a=4.0)) == pytest.approx(0.8)

    @pytest.mark.parametrize(
        ("n_users", "fraction", "expected"),
        [(4, 0.125, 1), (10, 0.25, 3), (10, 0.024, 0), (200, 0.1, 20)],
    )
    def test_attacker_count_rounds_half_up(
        self, n_users: int, fraction: float, expected: int
    ) -> None:
        """n_a = floor(f * n + 0.5)."""
        assert model(n_users=n_users, attacker_fraction=fraction).n_attackers == expected

    @pytest.mark.parametrize(
        "overrides",
        [{"reward": 0.0}, {"attacker_fraction": 1.5}, {"n_users": 0}, {"request_interval": -1.0}],
    )
    def test_invalid_parameters(self, overrides: dict[str, float]) -> None:
        """Out-of-range parameters are rejected by validation."""
        with pytest.raises(ValidationError):
            model(**overrides)


class TestRevenueGrid:
    """Test the share surface."""

    def test_shape_and_columns(self) -> None:
        """One row per (fraction, time) pair."""
        frame = revenue_grid(1000, 10.0, 1.0, [0.1, 0.2], [1.0, 2.0, 4.0])
        assert list(frame.columns) == [
            "attacker_fraction",
            "n_attackers",
            "t_a",
            "loss_per_request",
            "share_pct",
        ]
        assert len(frame) == 6

    def test_share_grows_with_time_and_fraction(self) -> None:
        """The share rises along both axes."""
        frame = revenue_grid(1000, 10.0, 1.0, [0.1, 0.2], [1.0, 2.0, 4.0])
        for _, group in frame.groupby("attacker_fraction"):
            assert group["share_pct"].is_monotonic_increasing
        for _, group in frame.groupby("t_a"):
            assert group["share_pct"].is_monotonic_increasing

    def test_equal_times_share_equals_fraction(self) -> None:
        """With t_a = t_u the share is the attacker fraction."""
        frame = revenue_grid(1000, 10.0, 1.0, [0.3], [1.0])
        row = frame.iloc[0]
        assert row["n_attackers"] == 300
        assert row["share_pct"] == pytest.approx(30.0)
        assert row["loss_per_request"] == pytest.approx(3.0)
