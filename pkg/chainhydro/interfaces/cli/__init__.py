"""CLI interface facades for chainhydro.

This package is the home of all Click commands; ``python -m
chainhydro.interfaces.cli`` runs the top-level group.
"""

from .__main__ import cli
from .chain import chain
from .experiments import EXPERIMENT_COMMANDS, experiment_command

__all__ = ["EXPERIMENT_COMMANDS", "chain", "cli", "experiment_command"]
