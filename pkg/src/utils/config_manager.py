# File: src/utils/config_manager.py
"""Central configuration: tolerance table, defaults and JSON overrides."""

import copy
import json
import logging
import os
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

# Algebraic identities are checked at 1e-10, normalizations at 1e-12.
TOLERANCES = MappingProxyType({
    "normalization": 1e-12,
    "hermitian": 1e-12,
    "trace": 1e-12,
    "psd": 1e-10,
    "unitary": 1e-10,
    "povm_sum": 1e-10,
    "algebraic": 1e-10,
    "membership": 1e-10,
})

THREADS_ENV_VAR = "JM_THREADS"


def get_default_config() -> Dict[str, Any]:
    """Get default configuration"""
    return {
        "closed_form": {
            "extended_dps": 50,
            "curve_end_gap": 1e-7,
        },
        "region": {
            "bisection_xtol": 1e-12,
            "monotonicity_grid": 200,
            "nonconvexity_grid": 100,
            "nonconvexity_min_violation": 1e-4,
        },
        "monte_carlo": {
            "chunk_size": 100_000,
            "min_samples": 1_000,
            "n_sigma": 5.0,
            "threads": None,
        },
        "simulation": {
            "min_expected_count": 5,
            "significance": 1e-3,
        },
        "verify": {
            "samples": 200_000,
            "mc_t_grid": [round(0.05 * k, 2) for k in range(1, 20)],
            "povm_t_grid": [0.2, 0.5, 0.75],
            "optimality_t": {"2": 0.6, "3": 0.4},
            "optimality_trials": 20,
            "max_exact_dimension": 50,
        },
    }


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


_active_config: Dict[str, Any] = get_default_config()


def get_config() -> Dict[str, Any]:
    """Configuration in effect for this process: the defaults until one is applied"""
    return _active_config


def apply_config(overrides: Optional[Dict[str, Any]] = None):
    """Make defaults merged with overrides the configuration read by every module"""
    global _active_config
    _active_config = _deep_merge(get_default_config(), overrides or {})
    logger.debug(f"Active config sections: {sorted(_active_config)}")


def reset_config():
    apply_config(None)


class ConfigManager:
    """Default configuration with optional JSON overrides"""

    def __init__(self, path: Optional[str] = None):
        self.config = get_default_config()
        if path:
            self.load(path)

    def load(self, path: str):
        """Merge a JSON file onto the current configuration"""
        if not Path(path).exists():
            logger.warning(f"Config file {path} not found, using defaults")
            return
        try:
            with open(path, "r", encoding="utf-8") as f:
                override = json.load(f)
            self.config = _deep_merge(self.config, override)
            logger.info(f"Loaded config from {path}")
        except (OSError, ValueError) as e:
            logger.warning(f"Failed to load config: {e}")

    def get(self, section: str, key: str, default: Any = None) -> Any:
        return self.config.get(section, {}).get(key, default)

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self.config.get(name, {}))

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config)

    def apply(self) -> Dict[str, Any]:
        """Install this configuration process-wide and return a copy of it"""
        apply_config(self.config)
        return self.as_dict()


def resolve_threads(explicit: Optional[int] = None) -> int:
    """--threads beats JM_THREADS beats the CPU count"""
    if explicit is not None:
        if explicit < 1:
            raise ValueError(f"thread count must be >= 1, got {explicit}")
        return explicit
    env_value = os.environ.get(THREADS_ENV_VAR)
    if env_value:
        try:
            threads = int(env_value)
            if threads >= 1:
                return threads
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid {THREADS_ENV_VAR}={env_value!r}")
    return os.cpu_count() or 1
