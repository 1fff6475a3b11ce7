"""Logging utilities for chainhydro.

The CLI calls :func:`configure_logging` once. The ensemble runner wraps every
(n, seed) cell in :func:`log_context`, so each line emitted by the numerical
services names the cell it belongs to, in text and JSON output alike.
"""

from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Iterator

_cell_fields: ContextVar[dict[str, Any]] = ContextVar("chainhydro_log_fields", default={})

_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Chatty libraries held at the third-party level.
_QUIET_LOGGERS = ("matplotlib", "matplotlib.font_manager", "PIL", "numexpr")

_configured = False


def current_context() -> dict[str, Any]:
    """Copy of the fields attached by the enclosing :func:`log_context` blocks."""
    return dict(_cell_fields.get())


@contextmanager
def log_context(**fields: Any) -> Iterator[None]:
    """Attach ``fields`` to every record logged inside the block.

    Nested blocks extend the outer fields::

        with log_context(experiment="classical-hydro"):
            with log_context(n=512, seed=7):
                logger.info("Evolving covariance")
    """
    token = _cell_fields.set({**_cell_fields.get(), **fields})
    try:
        yield
    finally:
        _cell_fields.reset(token)


class ContextualFormatter(logging.Formatter):
    """Plain-text formatter ending each line with ``[key=value ...]``."""

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        fields = _cell_fields.get()
        if not fields:
            return text
        suffix = " ".join(f"{key}={value}" for key, value in fields.items())
        return f"{text} [{suffix}]"


class JsonFormatter(logging.Formatter):
    """One JSON object per record, context fields merged at top level."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "time": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            **_cell_fields.get(),
        }
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str, sort_keys=True)


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time."""

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    @property  # type: ignore[override]
    def stream(self) -> Any:
        return sys.stderr

    @stream.setter
    def stream(self, value: Any) -> None:
        pass


def configure_logging(
    level: int | str = logging.INFO,
    third_party_level: int = logging.WARNING,
    use_json: bool = False,
) -> None:
    """Install the stderr handler on the root logger.

    Only the first call installs the handler; later calls adjust the level.

    Args:
        level: Level for chainhydro loggers, as a number or a name.
        third_party_level: Level for plotting and numeric libraries.
        use_json: Emit JSON lines instead of plain text.
    """
    global _configured
    root = logging.getLogger()
    root.setLevel(logging.getLevelName(level.upper()) if isinstance(level, str) else level)
    if _configured:
        return

    for existing in list(root.handlers):
        root.removeHandler(existing)
    handler = _StderrHandler()
    handler.setFormatter(JsonFormatter() if use_json else ContextualFormatter(_FORMAT))
    root.addHandler(handler)
    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(third_party_level)
    _configured = True


def get_logger(name: str) -> logging.Logger:
    """Logger for ``name``; usable from scripts that never configured logging."""
    logger = logging.getLogger(name)
    if _configured or logger.handlers or logging.getLogger().handlers:
        return logger
    fallback = logging.StreamHandler()
    fallback.setFormatter(ContextualFormatter(_FORMAT))
    logger.addHandler(fallback)
    logger.setLevel(logging.INFO)
    return logger


def log_exception(
    logger: logging.Logger,
    message: str,
    exc: BaseException,
    **context: Any,
) -> None:
    """Log ``exc`` with its traceback under extra context fields."""
    with log_context(**context):
        logger.error("%s: %s", message, exc, exc_info=exc)


__all__ = [
    "ContextualFormatter",
    "JsonFormatter",
    "configure_logging",
    "current_context",
    "get_logger",
    "log_context",
    "log_exception",
]
