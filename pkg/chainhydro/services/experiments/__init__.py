"""Experiment pipelines, the cell runner and report outputs."""

from .acceptance import evaluate_acceptance
from .base import Cell, CellOutcome, Pipeline, RunArtifacts, RunResult
from .config import ExperimentConfig, ExperimentKind, MassLawSpec, ProfileSpec, SeedSpec
from .outputs import write_run
from .pipelines import PIPELINES, build_pipeline
from .plots import emit_plots
from .runner import ExperimentRunner, run

__all__ = [
    "Cell",
    "CellOutcome",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentRunner",
    "MassLawSpec",
    "PIPELINES",
    "Pipeline",
    "ProfileSpec",
    "RunArtifacts",
    "RunResult",
    "SeedSpec",
    "build_pipeline",
    "emit_plots",
    "evaluate_acceptance",
    "run",
    "write_run",
]
