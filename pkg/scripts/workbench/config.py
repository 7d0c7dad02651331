"""
Unified configuration management for the workbench.

Provides centralized configuration with:
- JSON file loading with defaults
- Environment variable overrides
- Dot-notation access
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Optional

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent.parent.parent / "config"


class WorkbenchConfig:
    """
    Singleton configuration manager for analysis defaults.

    Usage:
        from workbench.config import config

        depth = config.get('analysis.depth')
        seed = config.get('sampling.seed')
    """

    _instance = None
    _config = None
    _config_loaded = False

    def __new__(cls):
        """Singleton pattern."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def load(self, config_path: Optional[Path] = None):
        """
        Load configuration from file.

        Args:
            config_path: Path to workbench_config.json (optional)
        """
        if self._config_loaded:
            return

        if config_path is None:
            config_path = CONFIG_DIR / "workbench_config.json"

        defaults = self._get_defaults()
        if not config_path.exists():
            self._config = defaults
        else:
            try:
                with open(config_path) as f:
                    self._config = _merge(defaults, json.load(f))
            except Exception as e:
                logger.warning("Failed to load config from %s: %s", config_path, e)
                self._config = defaults

        self._apply_env_overrides()
        self._config_loaded = True

    def _get_defaults(self) -> dict:
        """
        Get default configuration.

        Returns:
            Dictionary with default settings
        """
        return {
            "version": "1.0.0",
            "analysis": {
                "depth": 10000,
                "pair_depth": 10000,
                "level_budget": 8,
                "epsilon": 1e-6,
                "m_matrix_depth": 200,
                "level_cap": 64,
            },
            "oracle": {
                "enabled": True,
                "quadrature_dps": 30,
            },
            "sampling": {
                "seed": 0,
                "battery_size": 24,
                "battery_terms": 512,
            },
            "witness": {
                "k_max": 50,
            },
            "convergence": {
                "grace_window": 10,
            },
            "logging": {
                "level": "WARNING",
                "run_log": "analysis_log.jsonl",
            },
        }

    def _apply_env_overrides(self):
        """Apply environment variable overrides to configuration."""
        # KOETHE_SEED=7 reseeds the idempotence sampling battery
        if "KOETHE_SEED" in os.environ:
            try:
                self._config["sampling"]["seed"] = int(os.environ["KOETHE_SEED"])
            except ValueError:
                logger.warning("Ignoring non-integer KOETHE_SEED=%r", os.environ["KOETHE_SEED"])

        if "KOETHE_LOG_LEVEL" in os.environ:
            self._config["logging"]["level"] = os.environ["KOETHE_LOG_LEVEL"].upper()

        for env_name, key in (("KOETHE_DEPTH", "depth"),
                              ("KOETHE_LEVEL_BUDGET", "level_budget")):
            if env_name in os.environ:
                try:
                    self._config["analysis"][key] = int(os.environ[env_name])
                except ValueError:
                    logger.warning("Ignoring non-integer %s=%r", env_name, os.environ[env_name])

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value with dot notation.

        Args:
            key: Configuration key (e.g., "analysis.depth")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        if not self._config_loaded:
            self.load()

        value = self._config
        for k in key.split('.'):
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default

        return value if value is not None else default

    def set(self, key: str, value: Any):
        """
        Set configuration value (runtime only, not persisted).

        Args:
            key: Configuration key (dot notation)
            value: Value to set
        """
        if not self._config_loaded:
            self.load()

        keys = key.split('.')
        node = self._config
        for k in keys[:-1]:
            if k not in node:
                node[k] = {}
            node = node[k]
        node[keys[-1]] = value

    def is_enabled(self, feature: str) -> bool:
        """Check if a feature is enabled."""
        return bool(self.get(f"{feature}.enabled", False))

    def reload(self):
        """Force reload configuration from file."""
        self._config_loaded = False
        self.load()

    def get_all(self) -> dict:
        """Get a deep copy of the entire configuration."""
        if not self._config_loaded:
            self.load()
        return copy.deepcopy(self._config)


def _merge(base: dict, override: dict) -> dict:
    """Recursively overlay override onto base."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


# Singleton instance for import
config = WorkbenchConfig()

# Auto-load on import
config.load()


def resolve_depth(depth: Optional[int] = None, pairs: bool = False) -> int:
    """Explicit depth, else the configured default for the index kind."""
    if depth is not None:
        return int(depth)
    return int(config.get("analysis.pair_depth" if pairs else "analysis.depth", 10000))


def resolve_budget(level_budget: Optional[int] = None) -> int:
    """Explicit level budget, else the configured default."""
    if level_budget is not None:
        return int(level_budget)
    return int(config.get("analysis.level_budget", 8))
