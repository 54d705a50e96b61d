"""
Runtime settings.

Values come from (lowest to highest precedence): built-in defaults, a YAML file,
environment variables, and finally explicit arguments passed by the caller / CLI.

YAML file (optional), e.g. ~/.config/klball/config.yaml:

    k_max: 20
    workers: 4
    digits: 12
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from .errors import InputError

logger = logging.getLogger(__name__)

# exact enumeration holds 2^k_max float64 subset masses in memory (512 MiB at 26)
K_MAX_LIMIT = 26

ENV_PREFIX = "KLBALL_"


def _default_workers() -> int:
    return min(8, os.cpu_count() or 1)


def default_config_path() -> Path:
    return Path.home() / ".config" / "klball" / "config.yaml"


@dataclass(frozen=True)
class Settings:
    k_max: int = 24
    workers: int = field(default_factory=_default_workers)
    digits: int = 12

    def __post_init__(self):
        if not 1 <= self.k_max <= K_MAX_LIMIT:
            raise InputError(f"k_max must be in [1, {K_MAX_LIMIT}], got {self.k_max}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        if not 1 <= self.digits <= 17:
            raise InputError(f"digits must be in [1, 17], got {self.digits}")

    def override(self, **values) -> "Settings":
        """Return a copy with the given non-None values replaced."""
        changes = {k: v for k, v in values.items() if v is not None}
        return replace(self, **changes) if changes else self


def _as_int(name: str, raw) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise InputError(f"setting {name!r} must be an integer, got {raw!r}") from None


def _read_yaml(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a mapping of settings")
    return data


def load_settings(path: Optional[Path] = None, environ=None) -> Settings:
    """Build Settings from defaults, the YAML file and the environment."""
    environ = os.environ if environ is None else environ
    known = {f.name for f in fields(Settings)}
    values = {}

    config_path = path if path is not None else default_config_path()
    if path is not None and not config_path.exists():
        raise InputError(f"config file not found: {config_path}")
    if config_path.exists():
        logger.debug("reading settings from %s", config_path)
        for key, raw in _read_yaml(config_path).items():
            if key not in known:
                raise InputError(f"{config_path}: unknown setting {key!r}")
            values[key] = _as_int(key, raw)

    for name in known:
        env_name = ENV_PREFIX + name.upper()
        if env_name in environ:
            values[name] = _as_int(env_name, environ[env_name])

    return Settings(**values)


_settings_instance: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the process-wide settings instance."""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = load_settings()
    return _settings_instance


def set_settings(settings: Optional[Settings]) -> None:
    """Replace the process-wide settings (None resets to lazy loading)."""
    global _settings_instance
    _settings_instance = settings
