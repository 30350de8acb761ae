"""Load config/config.toml once.

The path can be redirected with SDPLOC_CONFIG (used by tests and by
deployments that keep their settings outside the checkout).
"""

import os
import tomllib
from pathlib import Path
from typing import Dict, Any, Optional

_DEFAULT_PATH = Path(__file__).parent.parent / "config" / "config.toml"
_config_cache: Optional[Dict[str, Any]] = None


def config_path() -> Path:
    override = os.getenv("SDPLOC_CONFIG")
    return Path(override) if override else _DEFAULT_PATH


def load() -> Dict[str, Any]:
    """Load config (called once during startup)."""
    global _config_cache
    if _config_cache is not None:
        return _config_cache

    try:
        with open(config_path(), "rb") as f:
            _config_cache = tomllib.load(f)
    except FileNotFoundError:
        _config_cache = {}
    except tomllib.TOMLDecodeError:
        _config_cache = {}

    return _config_cache


def reload() -> Dict[str, Any]:
    """Drop the cache and read the file again (tests)."""
    global _config_cache
    _config_cache = None
    return load()


def get(key: str, default: Any = None) -> Any:
    """Get a single setting

    Args:
        key: dotted key, e.g. "solver.tol_gap"
        default: value returned when the key is absent

    Returns:
        The setting or the default
    """
    cfg = load()
    value: Any = cfg

    for k in key.split("."):
        if isinstance(value, dict):
            value = value.get(k)
            if value is None:
                return default
        else:
            return default

    return value if value is not None else default


def section(name: str) -> Dict[str, Any]:
    """Return a whole table (empty dict when absent)."""
    value = get(name, {})
    return dict(value) if isinstance(value, dict) else {}
