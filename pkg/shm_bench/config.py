"""Configuration management: user preferences and scenario documents."""

import json
import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from .models import AppConfig, OutputFormat, ScenarioConfig

logger = logging.getLogger(__name__)


class ConfigManager:
    """Manages user preferences and scenario files."""

    def __init__(self, config_dir: Optional[Path] = None):
        """
        Initialize the configuration manager.

        Args:
            config_dir: Directory to store configuration files
        """
        if config_dir is None:
            config_dir = Path.home() / ".shm-bench"

        self.config_dir = config_dir
        self.config_file = config_dir / "config.json"
        self.scenario_file = config_dir / "scenario.json"

        self.config_dir.mkdir(parents=True, exist_ok=True)

        self._config: Optional[AppConfig] = None

    def load_config(self) -> AppConfig:
        """
        Load preferences from file or create defaults.

        Returns:
            AppConfig object
        """
        if self._config is not None:
            return self._config

        if self.config_file.exists():
            try:
                with open(self.config_file, "r") as f:
                    config_data = json.load(f)
                self._config = AppConfig.model_validate(config_data)
            except (json.JSONDecodeError, ValidationError) as e:
                logger.warning("Could not load config file %s: %s", self.config_file, e)
                self._config = AppConfig()
        else:
            self._config = AppConfig()

        return self._config

    def save_config(self, config: Optional[AppConfig] = None) -> None:
        if config is not None:
            self._config = config

        if self._config is None:
            return

        try:
            with open(self.config_file, "w") as f:
                json.dump(self._config.model_dump(mode="json"), f, indent=2)
        except OSError as e:
            logger.warning("Could not save config file %s: %s", self.config_file, e)

    def update_config(self, **kwargs) -> AppConfig:
        """
        Update preferences with new values.

        Args:
            **kwargs: Preference values to update

        Returns:
            Updated AppConfig
        """
        config = self.load_config()
        config_data = config.model_dump()
        config_data.update(kwargs)

        self._config = AppConfig.model_validate(config_data)
        self.save_config()

        return self._config

    def get_config_info(self) -> dict:
        """Get information about configuration files."""
        return {
            "config_dir": str(self.config_dir),
            "config_file": str(self.config_file),
            "scenario_file": str(self.scenario_file),
            "config_exists": self.config_file.exists(),
            "scenario_exists": self.scenario_file.exists(),
            "config_size": self.config_file.stat().st_size if self.config_file.exists() else 0,
        }

    def reset_config(self) -> AppConfig:
        """Reset preferences to defaults."""
        self._config = AppConfig()
        self.save_config()
        return self._config

    def import_config(self, config_path: Path) -> AppConfig:
        """
        Import preferences from another file.

        Args:
            config_path: Path to configuration file to import

        Returns:
            Imported AppConfig

        Raises:
            FileNotFoundError: If config file doesn't exist
            ValueError: If config file is invalid
        """
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        try:
            with open(config_path, "r") as f:
                config_data = json.load(f)
            config = AppConfig.model_validate(config_data)
        except (json.JSONDecodeError, ValidationError) as e:
            raise ValueError(f"Invalid config file: {e}") from e

        self._config = config
        self.save_config()
        return config

    def export_config(self, export_path: Path) -> None:
        config = self.load_config()
        try:
            with open(export_path, "w") as f:
                json.dump(config.model_dump(mode="json"), f, indent=2)
        except OSError as e:
            raise ValueError(f"Could not export config: {e}") from e

    def load_scenario(self, path: Optional[Path] = None) -> ScenarioConfig:
        """Scenario from ``path``, else the stored default scenario, else built-in defaults."""
        if path is not None:
            return load_scenario(path)
        if self.scenario_file.exists():
            return load_scenario(self.scenario_file)
        return ScenarioConfig()


def load_scenario(path: Path) -> ScenarioConfig:
    """
    Read a scenario JSON document.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If the document is not a valid scenario
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    try:
        return ScenarioConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ValueError(f"Invalid scenario file {path}: {e}") from e


def save_scenario(scenario: ScenarioConfig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scenario.model_dump_json(indent=2), encoding="utf-8")
    return path


_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def load_config() -> AppConfig:
    return get_config_manager().load_config()


def save_config(config: AppConfig) -> None:
    get_config_manager().save_config(config)


def get_config_from_env() -> dict:
    """Get preference overrides from environment variables."""
    config_overrides = {}

    env_mappings = {
        "SHM_BENCH_WORKERS": ("default_workers", int),
        "SHM_BENCH_SEED": ("default_seed", int),
        "SHM_BENCH_OUTPUT_DIR": ("output_dir", str),
        "SHM_BENCH_OUTPUT_FORMAT": ("output_format", OutputFormat),
        "SHM_BENCH_VERBOSE": ("verbose", lambda x: x.lower() in ("true", "1", "yes")),
    }

    for env_var, (config_key, converter) in env_mappings.items():
        value = os.environ.get(env_var)
        if value is not None:
            try:
                config_overrides[config_key] = converter(value)
            except (ValueError, TypeError):
                logger.warning("Invalid value for %s: %s", env_var, value)

    return config_overrides


def load_config_with_env() -> AppConfig:
    """Load preferences with environment variable overrides."""
    config = load_config()
    env_overrides = get_config_from_env()

    if env_overrides:
        config_data = config.model_dump()
        config_data.update(env_overrides)
        try:
            config = AppConfig.model_validate(config_data)
        except ValidationError as e:
            logger.warning("Ignoring environment overrides: %s", e)

    return config
