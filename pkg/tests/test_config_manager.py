# File: tests/test_config_manager.py
import pytest
import sys
import json
import logging
from fractions import Fraction
from pathlib import Path

import mpmath

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from analyzers.mc_oracle import estimate_T
from core.closed_form import EvalMode, eval_T
from core.region import curve_grid
from utils.config_manager import (THREADS_ENV_VAR, TOLERANCES, ConfigManager, apply_config,
                                  get_config, get_default_config, reset_config, resolve_threads)
from utils.logger import setup_logging


class TestConfigManager:
    def test_defaults(self):
        """Without a file the defaults are used"""
        manager = ConfigManager()
        assert manager.as_dict() == get_default_config()
        assert manager.get("monte_carlo", "n_sigma") == 5.0
        assert manager.get("missing", "key", 7) == 7

    def test_override_merge(self, tmp_path):
        """Nested keys are merged, untouched keys keep their defaults"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"verify": {"samples": 5000}, "monte_carlo": {"threads": 2}}),
                        encoding="utf-8")
        manager = ConfigManager(str(path))
        assert manager.get("verify", "samples") == 5000
        assert manager.get("verify", "optimality_trials") == 20
        assert manager.get("monte_carlo", "threads") == 2

    def test_missing_file(self, tmp_path, caplog):
        """A missing file logs a warning and keeps the defaults"""
        with caplog.at_level(logging.WARNING):
            manager = ConfigManager(str(tmp_path / "absent.json"))
        assert "not found" in caplog.text
        assert manager.as_dict() == get_default_config()

    def test_malformed_file(self, tmp_path, caplog):
        """Invalid JSON logs a warning and keeps the defaults"""
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            manager = ConfigManager(str(path))
        assert "Failed to load config" in caplog.text
        assert manager.get("verify", "samples") == 200_000

    def test_apply_installs_process_wide(self, tmp_path):
        """apply() makes the merged file the configuration every module reads"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"monte_carlo": {"min_samples": 10}}), encoding="utf-8")
        try:
            merged = ConfigManager(str(path)).apply()
            assert get_config() == merged
            assert get_config()["monte_carlo"]["n_sigma"] == 5.0
            assert estimate_T(2, 0.5, 100, seed=0).n_samples == 100
        finally:
            reset_config()
        assert get_config() == get_default_config()
        with pytest.raises(ValueError):
            estimate_T(2, 0.5, 100, seed=0)

    def test_overrides_reach_closed_forms_and_region(self):
        """extended_dps and curve_end_gap are read when the call is made"""
        try:
            apply_config({"closed_form": {"extended_dps": 80, "curve_end_gap": 0.001}})
            extended = eval_T(3, "2/7", EvalMode.EXTENDED)
            exact = eval_T(3, "2/7", EvalMode.EXACT)
            with mpmath.workdps(100):
                reference = mpmath.mpf(exact.numerator) / exact.denominator
                assert abs(extended - reference) < mpmath.mpf("1e-70")
            assert curve_grid(2, 3)[-1] == 1 - Fraction(1, 1000)
        finally:
            reset_config()
        assert curve_grid(2, 3)[-1] == 1 - Fraction(1, 10_000_000)

    def test_tolerances_are_read_only(self):
        """The tolerance table cannot be modified at runtime"""
        with pytest.raises(TypeError):
            TOLERANCES["membership"] = 1.0


class TestThreads:
    def test_explicit_wins(self, monkeypatch):
        """--threads beats the environment"""
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        assert resolve_threads(3) == 3

    def test_environment(self, monkeypatch):
        """JM_THREADS is used when no count is given"""
        monkeypatch.setenv(THREADS_ENV_VAR, "4")
        assert resolve_threads() == 4

    def test_invalid_environment(self, monkeypatch, caplog):
        """A bad JM_THREADS falls back to the CPU count"""
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        with caplog.at_level(logging.WARNING):
            assert resolve_threads() >= 1
        assert "Ignoring invalid" in caplog.text

    def test_rejects_zero(self):
        """At least one worker"""
        with pytest.raises(ValueError):
            resolve_threads(0)


class TestLogging:
    def test_setup_logging(self):
        """Returns the application logger"""
        logger = setup_logging(verbose=True)
        assert logger.name == "jmregion"
