"""Tests for the lvs-sim command line."""

import json
from pathlib import Path

import pytest

from lvs_sim.cli import EXIT_CONFIG, EXIT_OK, build_parser, main
from lvs_sim.core.scenario import ScenarioConfig


@pytest.fixture
def scenario_file(small_scenario: ScenarioConfig, tmp_path: Path) -> Path:
    path = tmp_path / "small.json"
    path.write_text(small_scenario.to_json())
    return path


class TestReward:
    """Test the reward sub-command."""

    def test_half_attackers(self, capsys: pytest.CaptureFixture[str]) -> None:
        """100 users, half spoofing, reward 1 per request, one day."""
        code = main(["reward", "--users", "100", "--attackers", "0.5", "--reward", "1"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out) == {
            "n_attackers": 50,
            "per_request": 0.5,
            "total": 720.0,
        }

    def test_invalid_fraction(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Out-of-range parameters exit with the configuration code."""
        code = main(["reward", "--users", "100", "--attackers", "1.5", "--reward", "1"])
        assert code == EXIT_CONFIG
        assert "error" in capsys.readouterr().err


class TestGrid:
    """Test the grid sub-command."""

    def test_csv_to_stdout(self, capsys: pytest.CaptureFixture[str]) -> None:
        """A header and one line per (fraction, time) pair."""
        code = main(["grid", "--fractions", "0.1,0.2", "--times", "1,2"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "attacker_fraction,n_attackers,t_a,loss_per_request,share_pct"
        assert len(lines) == 5

    def test_csv_to_file(self, tmp_path: Path) -> None:
        """--out writes the table to a file."""
        out = tmp_path / "grid.csv"
        assert main(["grid", "--fractions", "0.3", "--times", "1", "--out", str(out)]) == EXIT_OK
        assert out.read_text().splitlines()[1].startswith("0.3,300,1.0")

    def test_bad_number_list(self) -> None:
        """Non-numeric lists are rejected by the parser."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["grid", "--times", "1,two"])


class TestValidate:
    """Test the validate sub-command."""

    def test_valid_scenario(
        self, scenario_file: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A valid document prints its size and digest."""
        assert main(["validate", "--config", str(scenario_file)]) == EXIT_OK
        assert capsys.readouterr().out.startswith("ok (30 users, 3 areas")

    def test_bundled_scenarios_valid(self, scenario_dir: Path) -> None:
        """Every shipped scenario passes validation."""
        for path in sorted(scenario_dir.glob("*.json")):
            assert main(["validate", "--config", str(path)]) == EXIT_OK, path.name

    def test_violations_listed(
        self, small_scenario: ScenarioConfig, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Each violation is printed on its own line."""
        path = tmp_path / "bad.json"
        path.write_text(small_scenario.model_copy(update={"n_epochs": 0}).to_json())
        assert main(["validate", "--config", str(path)]) == EXIT_CONFIG
        assert "n_epochs must be >= 1" in capsys.readouterr().out.splitlines()

    def test_missing_file(self, tmp_path: Path) -> None:
        """An unreadable document is a configuration error."""
        assert main(["validate", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG


class TestRunAndSweep:
    """Test the simulation sub-commands."""

    def test_run_writes_outputs(
        self, scenario_file: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A run writes its tables to --out."""
        out = tmp_path / "out"
        code = main(["run", "--config", str(scenario_file), "--out", str(out), "--events"])
        assert code == EXIT_OK
        assert (out / "metrics.csv").exists()
        assert (out / "events.csv").exists()
        assert "3 epochs" in capsys.readouterr().out

    def test_run_seed_override(self, scenario_file: Path, tmp_path: Path) -> None:
        """--seed replaces the document's seed."""
        out = tmp_path / "seeded"
        assert main(["run", "--config", str(scenario_file), "--seed", "11", "--out", str(out)]) == 0
        assert json.loads((out / "summary.json").read_text())["seed"] == 11

    def test_unknown_axis(self, scenario_file: Path, tmp_path: Path) -> None:
        """An unknown sweep axis exits with the configuration code."""
        code = main(
            [
                "sweep",
                "--config",
                str(scenario_file),
                "--axis",
                "colour",
                "--values",
                "1,2",
                "--out",
                str(tmp_path / "sweep"),
            ]
        )
        assert code == EXIT_CONFIG

    def test_sweep_prints_summary(
        self, scenario_file: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A sweep prints one summary line per value."""
        out = tmp_path / "sweep"
        args = ["sweep", "--config", str(scenario_file), "--axis", "n_epochs", "--values", "1,2"]
        assert main([*args, "--replicates", "2", "--out", str(out)]) == EXIT_OK
        assert len(capsys.readouterr().out.strip().splitlines()) == 3
        assert (out / "summary.csv").exists()
