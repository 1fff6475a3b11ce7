"""Registry of experiment pipelines keyed by experiment kind."""

from __future__ import annotations

from ..spectral import SpectralService
from .base import Pipeline
from .config import ExperimentConfig, ExperimentKind
from .hydro import ClassicalHydroPipeline, EulerSolvePipeline, QuantumHydroPipeline
from .monte_carlo import MonteCarloPipeline
from .spectra import ConvergenceSweepPipeline, LocalizationPipeline, SpectrumPipeline

PIPELINES: dict[ExperimentKind, type[Pipeline]] = {
    ExperimentKind.SPECTRUM: SpectrumPipeline,
    ExperimentKind.LOCALIZATION: LocalizationPipeline,
    ExperimentKind.CLASSICAL_HYDRO: ClassicalHydroPipeline,
    ExperimentKind.QUANTUM_HYDRO: QuantumHydroPipeline,
    ExperimentKind.CONVERGENCE_SWEEP: ConvergenceSweepPipeline,
    ExperimentKind.EULER_SOLVE: EulerSolvePipeline,
    ExperimentKind.MONTE_CARLO_CHECK: MonteCarloPipeline,
}


def build_pipeline(config: ExperimentConfig, spectral: SpectralService) -> Pipeline:
    return PIPELINES[config.experiment](config, spectral)


__all__ = ["PIPELINES", "build_pipeline"]
