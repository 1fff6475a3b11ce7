"""Application wiring: configuration loading."""

from .config import ConfigError, apply_overrides, build_config, load_config

__all__ = ["ConfigError", "apply_overrides", "build_config", "load_config"]
