"""
Command-line interface for LVS Sim.

Sub-commands:
    run       run one scenario and write its outputs
    sweep     vary one parameter over values and replicates
    reward    revenue lost to spoofers under the proportional-share reward
    grid      attacker revenue share over attacker fractions and times
    validate  list every invariant violation of a scenario document

Exit codes: 0 on success, 2 on a scenario, attacker or axis error, 1 on
any other simulator error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from .config import configure_logging, get_config
from .core.errors import AttackerSpecError, LvsError, ScenarioConfigError, UnknownAxisError
from .core.scenario import ScenarioConfig, load_scenario, parse_scenario, validate_config
from .harness.metrics import atomic_write_text, write_run_outputs
from .harness.revenue import RewardModel, revenue_grid, revenue_loss
from .harness.runner import run_scenario
from .harness.sweep import runs_frame, summarize, sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from e


def _scenario(path: Path | None, seed: int | None = None) -> ScenarioConfig:
    overrides = {"seed": seed} if seed is not None else None
    if path is not None:
        return load_scenario(path, overrides)

    config = get_config().default_scenario()
    if overrides:
        config = config.model_copy(update=overrides)
    violations = validate_config(config)
    if violations:
        raise ScenarioConfigError("Invalid default scenario", violations)
    return config


# =============================================================================
# Sub-commands
# =============================================================================


def cmd_run(args: argparse.Namespace) -> int:
    config = _scenario(args.config, args.seed)
    series = run_scenario(
        config, record_events=args.events, record_trajectory=args.trajectory
    )
    written = write_run_outputs(series, args.out)
    final = series.final()
    print(f"{len(series)} epochs, digest {series.digest[:12]}")
    if final is not None:
        print(
            f"final avg rho: honest={final.avg_rho_honest} attackers={final.avg_rho_attackers}"
        )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _scenario(args.config, args.seed)
    replicates = args.replicates or get_config().replicates
    runs = sweep(
        config,
        args.axis,
        args.values,
        replicates=replicates,
        out_dir=args.out,
        workers=args.workers,
    )
    frame = summarize(runs_frame(runs, config.reputation_params.theta), get_config().confidence)
    print(frame.to_string(index=False))
    return EXIT_OK


def cmd_reward(args: argparse.Namespace) -> int:
    model = RewardModel(
        reward=args.reward,
        t_u=args.tu,
        t_a=args.ta,
        n_users=args.users,
        attacker_fraction=args.attackers,
        request_interval=args.interval_s,
    )
    per_request, total = revenue_loss(model, args.horizon_s)
    print(
        json.dumps(
            {
                "n_attackers": model.n_attackers,
                "per_request": round(per_request, 6),
                "total": round(total, 2),
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_grid(args: argparse.Namespace) -> int:
    frame = revenue_grid(args.users, args.reward, args.tu, args.fractions, args.times)
    text = frame.to_csv(index=False)
    if args.out is not None:
        atomic_write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = parse_scenario(args.config.read_text())
    except OSError as e:
        raise ScenarioConfigError(f"Cannot read scenario {args.config}: {e}") from e
    violations = validate_config(config)
    if violations:
        for v in violations:
            print(v)
        return EXIT_CONFIG
    digest = config.digest()[:12]
    print(f"ok ({config.n_users} users, {config.grid.n_areas} areas, digest {digest})")
    return EXIT_OK


# =============================================================================
# Entry point
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvs-sim", description="Location validation system simulator"
    )
    parser.add_argument("--log-level", help="Override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario")
    run.add_argument("--config", type=Path, help="Scenario JSON (default: settings.yaml defaults)")
    run.add_argument("--seed", type=int, help="Override the scenario seed")
    run.add_argument(
        "--out", type=Path, default=Path("out"), help="Output directory (default: out)"
    )
    run.add_argument("--events", action="store_true", help="Also write events.csv")
    run.add_argument("--trajectory", action="store_true", help="Also write trajectory.csv")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="Sweep one parameter")
    sw.add_argument("--config", type=Path, help="Base scenario JSON")
    sw.add_argument("--seed", type=int, help="Override the base seed")
    sw.add_argument("--axis", required=True, help="Parameter to vary")
    sw.add_argument("--values", type=_float_list, required=True, help="Comma-separated values")
    sw.add_argument("--replicates", type=int, help="Runs per value (default: settings)")
    sw.add_argument("--workers", type=int, default=1, help="Parallel processes (default: 1)")
    sw.add_argument("--out", type=Path, default=Path("out"), help="Output directory (default: out)")
    sw.set_defaults(func=cmd_sweep)

    rw = sub.add_parser("reward", help="Revenue lost to spoofers")
    rw.add_argument("--users", type=int, required=True)
    rw.add_argument("--attackers", type=float, required=True, help="Attacker fraction in [0, 1]")
    rw.add_argument("--reward", type=float, required=True, help="R per request")
    rw.add_argument("--ta", type=float, default=1.0, help="Attacker declared time")
    rw.add_argument("--tu", type=float, default=1.0, help="Honest declared time")
    rw.add_argument("--interval-s", type=float, default=60.0, help="Seconds between requests")
    rw.add_argument("--horizon-s", type=float, default=86_400.0, help="Horizon in seconds")
    rw.set_defaults(func=cmd_reward)

    gr = sub.add_parser("grid", help="Attacker revenue share surface as CSV")
    gr.add_argument("--users", type=int, default=1000)
    gr.add_argument("--reward", type=float, default=10.0)
    gr.add_argument("--tu", type=float, default=1.0)
    gr.add_argument("--fractions", type=_float_list, default=[0.05, 0.1, 0.2, 0.3, 0.4])
    gr.add_argument("--times", type=_float_list, default=[1.0, 2.0, 4.0, 8.0])
    gr.add_argument("--out", type=Path, help="CSV file (default: stdout)")
    gr.set_defaults(func=cmd_grid)

    va = sub.add_parser("validate", help="Check a scenario document")
    va.add_argument("--config", type=Path, required=True)
    va.set_defaults(func=cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point with argument parsing."""
    parser = build_parser()
    args = parser.parse_args(argv)

    config = get_config()
    if args.log_level:
        logging.basicConfig(level=args.log_level.upper(), format=config.log_format)
    else:
        configure_logging(config)

    try:
        return int(args.func(args))
    except (ScenarioConfigError, AttackerSpecError, UnknownAxisError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except LvsError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
