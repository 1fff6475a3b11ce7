"""Shared helpers for composing CLI command contexts.

This is the only CLI module that touches infrastructure directly: it
configures logging once per invocation and hands commands a console.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import click
from rich.console import Console

from chainhydro.infrastructure.observability import configure_logging


@dataclass(frozen=True)
class CLIContext:
    """Logging settings and the consoles used by every command."""

    log_level: str = "INFO"
    log_json: bool = False
    console: Console = field(default_factory=Console)
    err_console: Console = field(default_factory=lambda: Console(stderr=True))


def build_cli_context(log_level: str = "INFO", log_json: bool = False) -> CLIContext:
    """Configure logging and return the context object for ``ctx.obj``."""
    configure_logging(level=log_level, use_json=log_json)
    return CLIContext(log_level=log_level, log_json=log_json)


def get_cli_context(ctx: click.Context) -> CLIContext:
    """Context of the enclosing group, built with defaults when a command runs standalone."""
    obj = ctx.find_object(CLIContext)
    if obj is None:
        obj = build_cli_context()
        ctx.obj = obj
    return obj


__all__ = ["CLIContext", "build_cli_context", "get_cli_context"]
