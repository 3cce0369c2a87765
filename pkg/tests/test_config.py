"""Tests for preferences and scenario documents."""

import json
import pytest
from pathlib import Path
from tempfile import TemporaryDirectory

import shm_bench.config as config_module
from shm_bench.config import (
    ConfigManager,
    get_config_from_env,
    load_config_with_env,
    load_scenario,
    save_scenario,
)
from shm_bench.models import AppConfig, OutputFormat, ScenarioConfig, TimeGrid


class TestConfigManager:
    """Test configuration manager functionality."""

    def test_config_manager_creation(self):
        with TemporaryDirectory() as tmpdir:
            config_dir = Path(tmpdir) / "test_config"
            manager = ConfigManager(config_dir)

            assert manager.config_dir == config_dir
            assert manager.config_file == config_dir / "config.json"
            assert manager.scenario_file == config_dir / "scenario.json"
            assert config_dir.exists()

    def test_load_default_config(self):
        """Test loading default preferences."""
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")

            config = manager.load_config()

            assert isinstance(config, AppConfig)
            assert config.default_workers is None
            assert config.default_seed is None
            assert config.output_dir == "corpus"
            assert config.output_format == OutputFormat.TEXT
            assert config.verbose is False

    def test_save_and_load_config(self):
        with TemporaryDirectory() as tmpdir:
            config_dir = Path(tmpdir) / "test_config"
            manager = ConfigManager(config_dir)

            manager.save_config(AppConfig(default_workers=8, default_seed=42,
                                          output_format=OutputFormat.JSON, verbose=True))
            loaded = ConfigManager(config_dir).load_config()

            assert loaded.default_workers == 8
            assert loaded.default_seed == 42
            assert loaded.output_format == OutputFormat.JSON
            assert loaded.verbose is True

    def test_update_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")

            updated = manager.update_config(default_workers=4, output_dir="/data/corpus")

            assert updated.default_workers == 4
            assert updated.output_dir == "/data/corpus"
            assert updated.verbose is False  # Unchanged

    def test_update_config_rejects_invalid_values(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")

            with pytest.raises(ValueError):
                manager.update_config(default_workers=0)

    def test_load_invalid_config(self):
        """Invalid JSON falls back to defaults."""
        with TemporaryDirectory() as tmpdir:
            config_dir = Path(tmpdir) / "test_config"
            manager = ConfigManager(config_dir)
            (config_dir / "config.json").write_text("invalid json")

            config = manager.load_config()
            assert config.default_workers is None

    def test_get_config_info(self):
        with TemporaryDirectory() as tmpdir:
            config_dir = Path(tmpdir) / "test_config"
            manager = ConfigManager(config_dir)

            info = manager.get_config_info()

            assert info["config_dir"] == str(config_dir)
            assert info["config_exists"] is False
            assert info["scenario_exists"] is False
            assert info["config_size"] == 0

    def test_reset_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")
            manager.update_config(default_workers=16, default_seed=5)

            reset = manager.reset_config()

            assert reset.default_workers is None
            assert reset.default_seed is None

    def test_import_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")
            external = Path(tmpdir) / "external_config.json"
            external.write_text(json.dumps({"default_workers": 3, "default_seed": 123, "output_format": "json"}))

            imported = manager.import_config(external)

            assert imported.default_workers == 3
            assert imported.default_seed == 123
            assert imported.output_format == OutputFormat.JSON

    def test_import_nonexistent_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")

            with pytest.raises(FileNotFoundError):
                manager.import_config(Path(tmpdir) / "nonexistent.json")

    def test_import_invalid_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")
            invalid = Path(tmpdir) / "invalid_config.json"
            invalid.write_text(json.dumps({"default_workers": -1}))

            with pytest.raises(ValueError):
                manager.import_config(invalid)

    def test_export_config(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")
            manager.update_config(default_workers=6)

            export_file = Path(tmpdir) / "exported_config.json"
            manager.export_config(export_file)

            assert json.loads(export_file.read_text())["default_workers"] == 6


class TestScenarioDocuments:
    """Scenario JSON documents."""

    def test_save_and_load_round_trip(self):
        with TemporaryDirectory() as tmpdir:
            scenario = ScenarioConfig(master_seed=7, grid=TimeGrid(n_years=1), measurement_noise=True)
            path = save_scenario(scenario, Path(tmpdir) / "nested" / "scenario.json")

            assert load_scenario(path) == scenario

    def test_missing_scenario(self):
        with TemporaryDirectory() as tmpdir:
            with pytest.raises(FileNotFoundError):
                load_scenario(Path(tmpdir) / "nope.json")

    def test_invalid_scenario(self):
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "scenario.json"
            path.write_text(json.dumps({"master_seed": -3}))

            with pytest.raises(ValueError):
                load_scenario(path)

    def test_manager_prefers_explicit_then_stored_then_default(self):
        with TemporaryDirectory() as tmpdir:
            manager = ConfigManager(Path(tmpdir) / "test_config")
            assert manager.load_scenario() == ScenarioConfig()

            stored = ScenarioConfig(master_seed=11)
            save_scenario(stored, manager.scenario_file)
            assert manager.load_scenario().master_seed == 11

            explicit = save_scenario(ScenarioConfig(master_seed=12), Path(tmpdir) / "other.json")
            assert manager.load_scenario(explicit).master_seed == 12


class TestEnvironmentConfig:
    """Test environment variable configuration."""

    @pytest.fixture(autouse=True)
    def clean_env(self, monkeypatch, tmp_path):
        import os
        monkeypatch.setattr(config_module, "_config_manager", ConfigManager(tmp_path / "config"))
        for key in list(os.environ):
            if key.startswith("SHM_BENCH_"):
                monkeypatch.delenv(key)

    def test_get_config_from_env_empty(self):
        assert get_config_from_env() == {}

    def test_get_config_from_env_with_values(self, monkeypatch):
        monkeypatch.setenv("SHM_BENCH_WORKERS", "8")
        monkeypatch.setenv("SHM_BENCH_SEED", "999")
        monkeypatch.setenv("SHM_BENCH_OUTPUT_DIR", "/tmp/corpus")
        monkeypatch.setenv("SHM_BENCH_OUTPUT_FORMAT", "json")
        monkeypatch.setenv("SHM_BENCH_VERBOSE", "true")

        overrides = get_config_from_env()

        assert overrides["default_workers"] == 8
        assert overrides["default_seed"] == 999
        assert overrides["output_dir"] == "/tmp/corpus"
        assert overrides["output_format"] == OutputFormat.JSON
        assert overrides["verbose"] is True

    def test_get_config_from_env_invalid_values(self, monkeypatch):
        """Invalid values are ignored."""
        monkeypatch.setenv("SHM_BENCH_WORKERS", "many")
        monkeypatch.setenv("SHM_BENCH_OUTPUT_FORMAT", "xml")

        overrides = get_config_from_env()

        assert "default_workers" not in overrides
        assert "output_format" not in overrides

    def test_load_config_with_env(self, monkeypatch):
        monkeypatch.setenv("SHM_BENCH_WORKERS", "5")

        config = load_config_with_env()
        assert isinstance(config, AppConfig)
        assert config.default_workers == 5

    def test_load_config_with_env_ignores_out_of_range(self, monkeypatch):
        monkeypatch.setenv("SHM_BENCH_WORKERS", "0")

        config = load_config_with_env()
        assert config.default_workers is None
