"""
Configuration loading for LVS Sim.

Loads the YAML runtime settings and environment variables.

Settings are resolved with the following priority:
1. Environment variables with the LVS_ prefix (also read from .env) - highest
2. config/settings.yaml
3. Built-in defaults - lowest
"""

import json
import logging
import os
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

from .core.scenario import ScenarioConfig, parse_scenario

logger = logging.getLogger(__name__)

_TRUE_VALUES = ("true", "1", "yes", "on")


class Config:
    """Runtime settings for LVS Sim.

    Holds everything that is not part of a scenario document: logging,
    the audit trail, output locations, sweep replication and the
    scenario defaults used when no document is given.
    """

    def __init__(self, config_dir: Path | None = None):
        """Initialize configuration from YAML files and environment.

        Args:
            config_dir: Path to config directory. Defaults to LVS_CONFIG_DIR
                or the project config/.
        """
        load_dotenv()

        if config_dir is None:
            env_dir = os.getenv("LVS_CONFIG_DIR")
            if env_dir:
                config_dir = Path(env_dir)
            else:
                # __file__ = src/lvs_sim/config.py
                project_root = Path(__file__).parent.parent.parent
                config_dir = project_root / "config"

        self.config_dir = config_dir
        self._settings: dict[str, Any] = self._load_yaml("settings.yaml")

    def _load_yaml(self, filename: str) -> dict[str, Any]:
        """Load a YAML file from the config directory.

        Args:
            filename: Name of the YAML file to load.

        Returns:
            Parsed YAML content, or an empty dict when the file is missing.
        """
        filepath = self.config_dir / filename
        if not filepath.exists():
            logger.debug(f"No {filename} in {self.config_dir}, using built-in defaults")
            return {}

        with filepath.open() as f:
            return yaml.safe_load(f) or {}

    @property
    def logging_settings(self) -> dict[str, Any]:
        return self._settings.get("logging", {})

    @property
    def log_level(self) -> str:
        return os.getenv("LVS_LOG_LEVEL", self.logging_settings.get("level", "INFO")).upper()

    @property
    def log_format(self) -> str:
        return self.logging_settings.get(
            "format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

    @property
    def log_dir(self) -> Path:
        env_dir = os.getenv("LVS_LOG_DIR")
        if env_dir:
            return Path(env_dir)
        configured = self.logging_settings.get("dir", "logs")
        path = Path(configured)
        if not path.is_absolute():
            path = self.config_dir.parent / path
        return path

    @property
    def audit_enabled(self) -> bool:
        default = str(self._settings.get("audit", {}).get("enabled", True))
        return os.getenv("LVS_AUDIT", default).lower() in _TRUE_VALUES

    @property
    def sweep_settings(self) -> dict[str, Any]:
        return self._settings.get("sweep", {"replicates": 30, "confidence": 0.95})

    @property
    def replicates(self) -> int:
        return int(os.getenv("LVS_REPLICATES", str(self.sweep_settings.get("replicates", 30))))

    @property
    def confidence(self) -> float:
        return float(self.sweep_settings.get("confidence", 0.95))

    @property
    def scenario_defaults(self) -> dict[str, Any]:
        return self._settings.get("scenario_defaults", {})

    def default_scenario(self) -> ScenarioConfig:
        """Build the default scenario from the scenario_defaults block.

        Returns:
            ScenarioConfig with YAML overrides applied on top of the
            built-in defaults.
        """
        return parse_scenario(json.dumps(self.scenario_defaults))


# Global config instance
_config: Config | None = None


def get_config() -> Config:
    """Get the global configuration instance.

    Returns:
        The Config singleton instance.
    """
    global _config
    if _config is None:
        _config = Config()
    return _config


def reload_config() -> Config:
    """Reload configuration from files.

    Returns:
        Fresh Config instance.
    """
    global _config
    _config = Config()
    return _config


def configure_logging(config: Config | None = None) -> None:
    """Configure root logging from the runtime settings."""
    config = config or get_config()
    logging.basicConfig(level=config.log_level, format=config.log_format)
