"""Configuration manager for the witness engine."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from .errors import ConfigurationError


class ConfigManager:
    """Manages configuration loading and caching"""

    _engine_config = None
    _figure_presets = None

    @classmethod
    def _load(cls, file_name: str, config_dir: Optional[str]) -> Dict[str, Any]:
        if config_dir:
            config_path = Path(config_dir) / file_name
        else:
            # modules/core/ → modules/ → project_root/ → config/
            config_path = Path(__file__).parent.parent.parent / "config" / file_name

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except Exception as e:
            logging.error(f"Failed to load {file_name}: {e}")
            raise ConfigurationError(f"Cannot load configuration {config_path}: {e}") from e

    @classmethod
    def get_engine_config(cls, config_dir: Optional[str] = None) -> Dict[str, Any]:
        """Load numeric defaults and output settings from JSON file"""
        if cls._engine_config is None:
            cls._engine_config = cls._load("engine_config.json", config_dir)
        return cls._engine_config

    @classmethod
    def get_figure_presets(cls, config_dir: Optional[str] = None) -> Dict[str, Any]:
        """Load figure preset bundles from JSON file"""
        if cls._figure_presets is None:
            cls._figure_presets = cls._load("figure_presets.json", config_dir)
        return cls._figure_presets

    @classmethod
    def setting(cls, section: str, key: str, default: Any = None) -> Any:
        """Look up a single engine setting, falling back to ``default``"""
        return cls.get_engine_config().get(section, {}).get(key, default)

    @classmethod
    def reload_configs(cls):
        """Force reload of configurations"""
        cls._engine_config = None
        cls._figure_presets = None
