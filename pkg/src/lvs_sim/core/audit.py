"""
Run audit trail for LVS Sim.

Every audited harness call appends one JSON line to runs.jsonl, so any
published number can be traced back to the parameters and scenario
digest that produced it.
"""

import functools
import inspect
import json
import logging
import time
from collections.abc import Callable, Sized
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, ParamSpec, TypeVar

UTC = timezone.utc

logger = logging.getLogger(__name__)

P = ParamSpec("P")
R = TypeVar("R")

MAX_TEXT = 200
MAX_LIST = 100


def _loggable(value: Any) -> Any:
    """JSON-safe, bounded form of one call argument."""
    digest = getattr(value, "digest", None)
    if callable(digest):
        return f"<scenario {digest()[:12]}>"
    if isinstance(value, Path):
        return str(value)
    if value is None or isinstance(value, str | int | float | bool):
        return value
    if isinstance(value, list | tuple) and len(value) <= MAX_LIST:
        return [v if isinstance(v, str | int | float) else str(v) for v in value]
    text = str(value)
    return text[:MAX_TEXT] + "... [truncated]" if len(text) > MAX_TEXT else text


def _scenario_digest(arguments: dict[str, Any]) -> str | None:
    for value in arguments.values():
        digest = getattr(value, "digest", None)
        if callable(digest):
            return str(digest())
    return None


class AuditLogger:
    """Appends simulator runs to <log_dir>/runs.jsonl."""

    def __init__(self, log_dir: Path | None = None, enabled: bool = True):
        """Set up the audit file.

        Args:
            log_dir: Directory of runs.jsonl. Defaults to the configured log_dir.
            enabled: When False, nothing is written.
        """
        if log_dir is None:
            from ..config import get_config

            log_dir = get_config().log_dir

        self.log_dir = log_dir
        self.enabled = enabled
        self.log_file = log_dir / "runs.jsonl"
        if enabled:
            log_dir.mkdir(parents=True, exist_ok=True)

    def log_run(
        self,
        command: str,
        params: dict[str, Any],
        result_summary: str | None = None,
        success: bool = True,
        error: str | None = None,
        digest: str | None = None,
        duration_ms: float | None = None,
    ) -> None:
        """Append one run.

        Args:
            command: Harness entry point or CLI sub-command.
            params: Arguments it was called with.
            result_summary: Short description of what it returned.
            success: False when it raised.
            error: Message of the exception it raised.
            digest: Scenario digest, when a scenario was involved.
            duration_ms: Wall-clock duration in milliseconds.
        """
        entry: dict[str, Any] = {
            "timestamp": datetime.now(UTC).isoformat(),
            "command": command,
            "params": self._sanitize_params(params),
            "success": success,
        }
        optional = {
            "result_summary": result_summary,
            "error": error,
            "digest": digest,
            "duration_ms": None if duration_ms is None else round(duration_ms, 2),
        }
        entry.update({k: v for k, v in optional.items() if v not in (None, "")})
        self._append(entry)

    def _sanitize_params(self, params: dict[str, Any]) -> dict[str, Any]:
        return {key: _loggable(value) for key, value in params.items()}

    def _append(self, entry: dict[str, Any]) -> None:
        if not self.enabled:
            return
        try:
            with self.log_file.open("a") as f:
                f.write(json.dumps(entry) + "\n")
        except OSError as e:
            logger.error(f"Cannot append to {self.log_file}: {e}")

    def read_entries(self, limit: int = 100) -> list[dict[str, Any]]:
        """The last `limit` entries, newest first."""
        if not self.log_file.exists():
            return []
        try:
            lines = self.log_file.read_text().splitlines()
            entries = [json.loads(line) for line in lines if line.strip()]
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Cannot read {self.log_file}: {e}")
            return []
        return entries[::-1][:limit]


_audit_logger: AuditLogger | None = None


def get_audit_logger() -> AuditLogger:
    """Process-wide audit logger built from the runtime settings."""
    global _audit_logger
    if _audit_logger is None:
        from ..config import get_config

        config = get_config()
        _audit_logger = AuditLogger(log_dir=config.log_dir, enabled=config.audit_enabled)
    return _audit_logger


def audit_run(command: str) -> Callable[[Callable[P, R]], Callable[P, R]]:
    """Audit every call of a harness entry point under `command`.

    Arguments are logged by parameter name; a scenario argument also
    supplies the entry's digest.
    """

    def decorator(func: Callable[P, R]) -> Callable[P, R]:
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
            arguments = dict(signature.bind_partial(*args, **kwargs).arguments)
            digest = _scenario_digest(arguments)
            audit = get_audit_logger()
            started = time.perf_counter()

            def elapsed_ms() -> float:
                return (time.perf_counter() - started) * 1000

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                audit.log_run(
                    command,
                    arguments,
                    success=False,
                    error=str(e),
                    digest=digest,
                    duration_ms=elapsed_ms(),
                )
                raise

            summary = f"{len(result)} items" if isinstance(result, Sized) else type(result).__name__
            audit.log_run(
                command, arguments, result_summary=summary, digest=digest, duration_ms=elapsed_ms()
            )
            return result

        return wrapper

    return decorator
