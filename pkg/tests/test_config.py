"""Unit tests for the config module."""

import dataclasses
import os
import platform
from pathlib import Path
from unittest.mock import patch

import pytest

from stylearmor.config import (
    Settings,
    _default_config_path,
    _default_output_root,
    _expand,
    load_settings,
)


class TestExpand:
    """Tests for the _expand function."""

    def test_expand_user_path(self):
        """Test that ~ is expanded to home directory."""
        result = _expand("~/runs")
        assert result.startswith(os.path.expanduser("~"))
        assert result.endswith("/runs")

    def test_expand_env_var(self):
        """Test that environment variables are expanded."""
        with patch.dict(os.environ, {"TEST_VAR": "/tmp/test"}):
            assert _expand("$TEST_VAR/file") == "/tmp/test/file"

    def test_expand_unknown_env_var(self):
        """Test that unknown environment variables are preserved."""
        assert "$UNKNOWN_VAR" in _expand("$UNKNOWN_VAR/file")

    def test_expand_no_substitution(self):
        """Test that plain paths are returned unchanged."""
        assert _expand("/tmp/plain/path") == "/tmp/plain/path"


class TestDefaultPaths:
    """Tests for default path functions."""

    def test_default_config_path(self):
        """Test the default config path for this platform."""
        result = str(_default_config_path())
        if platform.system().lower().startswith("win"):
            assert "stylearmor" in result and result.endswith("config.toml")
        else:
            assert result == f"{Path.home()}/.config/stylearmor/config.toml"

    def test_default_output_root(self):
        """Test the default run directory root for this platform."""
        result = _default_output_root()
        if platform.system().lower().startswith("win"):
            assert "AppData" in result or "stylearmor" in result
        else:
            assert result == f"{Path.home()}/.local/share/stylearmor/runs"


class TestSettings:
    """Tests for the Settings dataclass."""

    def test_settings_defaults(self):
        """Test the built-in defaults."""
        settings = Settings(output_root="/tmp/runs")
        assert settings.fuel == 1_000_000
        assert settings.kappa == 10
        assert settings.subnetworks == 3
        assert settings.width_lower_bound == 0.8
        assert settings.hidden_sizes == (64, 64)
        assert settings.optimizer == "adam"

    def test_settings_immutable(self):
        """Test that Settings is immutable (frozen)."""
        settings = Settings(output_root="/tmp/runs")
        with pytest.raises(dataclasses.FrozenInstanceError):
            settings.output_root = "/tmp/other"

    def test_hyperparams(self):
        """Test that network settings carry over, with an optional seed override."""
        settings = Settings(output_root="/tmp/runs", epochs=7, hidden_sizes=(8,), seed=3)
        assert settings.hyperparams().seed == 3
        hp = settings.hyperparams(seed=9)
        assert (hp.epochs, hp.hidden_sizes, hp.seed) == (7, (8,), 9)


class TestLoadSettings:
    """Tests for the load_settings function."""

    def test_load_settings_without_config_file(self, tmp_path):
        """Test loading settings when no config file exists."""
        with patch("stylearmor.config._default_config_path") as mock_path, patch.dict(os.environ, clear=False) as env:
            env.pop("STYLEARMOR_OUTPUT_ROOT", None)
            mock_path.return_value = tmp_path / "config.toml"
            settings = load_settings()

        assert settings.output_root.endswith("runs")
        assert settings.epochs == 200
        assert settings.tau == 0.0

    def test_load_settings_with_config_file(self, config_file, tmp_path):
        """Test loading settings from an explicit file."""
        with patch.dict(os.environ, clear=False) as env:
            env.pop("STYLEARMOR_OUTPUT_ROOT", None)
            settings = load_settings(config_file)

        assert settings.output_root == (tmp_path / "runs").as_posix()
        assert settings.epochs == 3
        assert settings.batch_size == 16
        assert settings.hidden_sizes == (8, 8)
        assert settings.kappa == 2

    def test_missing_explicit_file(self, tmp_path):
        """Test that an explicit path must exist."""
        with pytest.raises(FileNotFoundError):
            load_settings(tmp_path / "absent.toml")

    def test_env_override(self, config_file):
        """Test that STYLEARMOR_OUTPUT_ROOT wins over the config file."""
        with patch.dict(os.environ, {"STYLEARMOR_OUTPUT_ROOT": "/tmp/env/runs"}):
            settings = load_settings(config_file)
        assert settings.output_root == "/tmp/env/runs"

    def test_empty_env_is_ignored(self, config_file, tmp_path):
        """Test that an empty override leaves the file value alone."""
        with patch.dict(os.environ, {"STYLEARMOR_OUTPUT_ROOT": ""}):
            settings = load_settings(config_file)
        assert settings.output_root == (tmp_path / "runs").as_posix()

    def test_tilde_and_env_vars_in_config(self, tmp_path):
        """Test that ~ and environment variables in the config file are expanded."""
        config = tmp_path / "config.toml"
        config.write_text('output_root = "$MY_RUNS/x"\n')
        with patch.dict(os.environ, {"MY_RUNS": "/tmp/env_runs"}) as env:
            env.pop("STYLEARMOR_OUTPUT_ROOT", None)
            assert load_settings(config).output_root == "/tmp/env_runs/x"
            config.write_text('output_root = "~/runs"\n')
            assert "~" not in load_settings(config).output_root

    def test_optimizer_is_case_insensitive(self, tmp_path):
        """Test that optimizer names are normalized."""
        config = tmp_path / "config.toml"
        config.write_text('optimizer = "SGD"\n')
        assert load_settings(config).optimizer == "sgd"

    @pytest.mark.parametrize(
        "line",
        [
            "fuel = 0",
            "epochs = -1",
            "tau = -0.5",
            "kappa = 1",
            "subnetworks = -2",
            "width_lower_bound = 1.0",
            "learning_rate = 0",
            "hidden_sizes = []",
            "hidden_sizes = [8, 0]",
            'optimizer = "rmsprop"',
        ],
    )
    def test_invalid_values(self, tmp_path, line):
        """Test that out-of-range values are rejected."""
        config = tmp_path / "config.toml"
        config.write_text(line + "\n")
        with pytest.raises(ValueError):
            load_settings(config)
