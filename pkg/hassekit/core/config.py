"""Configuration management for hassekit.

Search bounds live in a frozen ``Bounds`` value.  A process establishes the
active bounds once at start-up (``configure_bounds``); every search accepts an
explicit ``bounds`` argument that wins over the process default.
"""

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .errors import DomainError

logger = logging.getLogger(__name__)

ENV_PREFIX = "HASSEKIT_"


def load_config(config_path: Union[str, Path, None]) -> Dict[str, Any]:
    """Load JSON configuration with environment variable overrides."""
    config: Dict[str, Any] = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        with path.open("r", encoding="utf-8") as f:
            config = json.load(f)
        if not isinstance(config, dict):
            raise DomainError(f"Config file {path} must hold a JSON object")

    # Override with environment variables
    for key, value in os.environ.items():
        if key.startswith(ENV_PREFIX):
            config_key = key[len(ENV_PREFIX):].lower()
            config[config_key] = value

    return config


def get_config_value(config: Dict[str, Any], key: str, default: Any = None) -> Any:
    """Get a configuration value with dot notation support."""
    keys = key.split(".")
    value: Any = config

    for k in keys:
        if isinstance(value, dict) and k in value:
            value = value[k]
        else:
            return default

    return value


@dataclass(frozen=True)
class Bounds:
    """Every search bound used by the library, with desk-scale defaults."""

    factor_bound: int = 10**7
    checkpoint_cap: int = 10**6
    prescribe_cap: int = 200_000
    witness_cap: int = 2**16
    diamond_probe_cap: int = 400
    sample_bound: int = 1000
    element_height: int = 4
    pool_cap: int = 24
    precision: int = 12

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DomainError(f"bound {f.name} must be a positive integer")

    def with_overrides(self, **overrides: Optional[int]) -> "Bounds":
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


def bounds_from_config(config: Dict[str, Any]) -> Bounds:
    """Build bounds from a config dict (``bounds`` section, then top-level keys)."""
    values: Dict[str, int] = {}
    for f in fields(Bounds):
        raw = config.get(f.name, get_config_value(config, f"bounds.{f.name}"))
        if raw is None:
            continue
        try:
            values[f.name] = int(raw)
        except (TypeError, ValueError) as e:
            raise DomainError(f"bound {f.name} must be an integer, got {raw!r}") from e
    return Bounds(**values)


def load_bounds(config_path: Union[str, Path, None] = None) -> Bounds:
    """Load bounds from an optional config file plus ``HASSEKIT_`` overrides."""
    bounds = bounds_from_config(load_config(config_path))
    logger.debug(f"Loaded bounds: {bounds}")
    return bounds


_active: Optional[Bounds] = None


def configure_bounds(bounds: Optional[Bounds]) -> None:
    """Install the process-wide bounds (``None`` restores lazy loading)."""
    global _active
    _active = bounds


def get_bounds() -> Bounds:
    """Return the process-wide bounds, loading them from the environment once."""
    global _active
    if _active is None:
        _active = load_bounds(os.environ.get(f"{ENV_PREFIX}CONFIG"))
    return _active


def resolve_bounds(bounds: Optional[Bounds]) -> Bounds:
    """Return ``bounds`` or the process default."""
    return bounds if bounds is not None else get_bounds()
