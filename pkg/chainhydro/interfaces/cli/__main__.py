"""Entry point for running the chainhydro CLI.

This module defines the top-level Click group: one subcommand per experiment
kind plus the ``chain`` helpers. ``python -m chainhydro.interfaces.cli``
invokes the same group as the ``chainhydro`` console script.
"""

import click

from .chain import chain
from .context import build_cli_context
from .experiments import EXPERIMENT_COMMANDS


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
    help="Log level for chainhydro loggers.",
)
@click.option("--log-json", is_flag=True, default=False, help="Emit log records as JSON lines.")
@click.pass_context
def cli(ctx: click.Context, log_level: str, log_json: bool) -> None:
    """Disordered harmonic chain experiments."""
    ctx.obj = build_cli_context(log_level=log_level.upper(), log_json=log_json)


for command in EXPERIMENT_COMMANDS:
    cli.add_command(command)
cli.add_command(chain)


if __name__ == "__main__":
    cli()
