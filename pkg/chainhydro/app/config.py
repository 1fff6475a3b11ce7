"""Configuration utilities for chainhydro.

Experiment files are YAML (``.yaml``/``.yml``) or JSON (``.json``). Every key
is optional; the result is a validated :class:`ExperimentConfig`.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from chainhydro.domain.models.chain import ChainModelError
from chainhydro.services.experiments.config import ExperimentConfig, ExperimentKind


class ConfigError(ValueError):
    """Unreadable or invalid experiment configuration."""


def _read_mapping(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a mapping, got {type(data).__name__}")
    return data


def build_config(data: dict[str, Any], experiment: str | None = None) -> ExperimentConfig:
    """Validate a raw mapping; ``experiment`` overrides the file key when given."""
    payload = dict(data)
    if experiment is not None:
        declared = payload.get("experiment")
        if declared is not None and declared != experiment:
            raise ConfigError(
                f"Config declares experiment {declared!r} but {experiment!r} was requested"
            )
        payload["experiment"] = ExperimentKind(experiment)
    try:
        return ExperimentConfig.model_validate(payload)
    except (ValidationError, ChainModelError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None, experiment: str | None = None) -> ExperimentConfig:
    """Load and validate a configuration file (all defaults when ``path`` is None)."""
    data = _read_mapping(Path(path)) if path is not None else {}
    return build_config(data, experiment)


def apply_overrides(config: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Command-line overrides on top of a loaded config; ``None`` values are ignored."""
    try:
        return config.with_overrides(**overrides)
    except (ValidationError, ChainModelError) as exc:
        raise ConfigError(str(exc)) from exc


__all__ = ["ConfigError", "apply_overrides", "build_config", "load_config"]
