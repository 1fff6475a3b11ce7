"""Building blocks shared by the experiment pipelines."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import defaultdict
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from chainhydro.domain.analytics.convergence import disorder_average, metric_trend
from chainhydro.domain.models.chain import DisorderedChain
from chainhydro.domain.models.fields import MacroFields
from chainhydro.domain.models.results import (
    ConvergenceReport,
    FrequencyScan,
    LocalizationScan,
    MetricFit,
    ReportRow,
)
from chainhydro.infrastructure.observability import get_logger

from ..chain_model import sample_masses
from ..spectral import SpectralService
from .config import ExperimentConfig

NO_FUNCTION = "-"


@dataclass(frozen=True, order=True)
class Cell:
    """Unit of parallel work: one chain size and one disorder seed."""

    n: int
    seed: int


@dataclass
class CellOutcome:
    cell: Cell
    rows: list[ReportRow] = field(default_factory=list)
    payload: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Overlay:
    """Smoothed microscopic profile against its macroscopic field."""

    label: str
    n: int
    t: float
    y_micro: np.ndarray
    micro: np.ndarray
    y_macro: np.ndarray
    macro: np.ndarray


@dataclass
class RunArtifacts:
    """Non-tabular products of a run, written next to the report."""

    fields: list[MacroFields] = field(default_factory=list)
    scans: list[LocalizationScan] = field(default_factory=list)
    controls: dict[int, LocalizationScan] = field(default_factory=dict)
    frequency: FrequencyScan | None = None
    thermal: Any = None
    overlays: list[Overlay] = field(default_factory=list)
    series: dict[str, dict[str, tuple[list[int], list[float], list[float]]]] = field(
        default_factory=dict
    )


@dataclass
class RunResult:
    report: ConvergenceReport
    artifacts: RunArtifacts


class Pipeline(ABC):
    """One experiment kind: per-cell work plus an order-independent reduction."""

    name: str = ""

    def __init__(self, config: ExperimentConfig, spectral: SpectralService) -> None:
        self.config = config
        self.spectral = spectral
        self.profiles = config.build_profiles()
        self.law = config.build_mass_law()
        self.test_functions = config.build_test_functions()
        self._logger = get_logger(self.__class__.__module__)

    def cells(self) -> list[Cell]:
        return [Cell(n, seed) for n in sorted(set(self.config.n_list)) for seed in self.config.seed_list]

    def prepare(self, executor: Executor) -> None:
        """Work that every cell depends on; runs before the cells."""

    def chain(self, cell: Cell) -> DisorderedChain:
        return sample_masses(cell.n, self.law, cell.seed)

    def row(
        self,
        cell: Cell,
        metric: str,
        value: float,
        t: float = 0.0,
        f: str = NO_FUNCTION,
        stderr: float = float("nan"),
    ) -> ReportRow:
        return ReportRow(
            experiment=self.name,
            n=cell.n,
            seed=cell.seed,
            t=float(t),
            f=f,
            metric=metric,
            value=float(value),
            stderr=float(stderr),
        )

    @abstractmethod
    def run_cell(self, cell: Cell) -> CellOutcome:
        """Compute every row of one cell."""

    @abstractmethod
    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        """Fits and artifacts from the sorted cell outcomes."""


# ---------------------------------------------------------------------------
# Ensemble reductions
# ---------------------------------------------------------------------------


def ensemble_means(
    rows: Iterable[ReportRow], metric: str, f: str = NO_FUNCTION, t: float | None = None
) -> tuple[list[int], list[float], list[float]]:
    """Disorder average and standard error per n of one metric."""
    grouped: dict[int, list[float]] = defaultdict(list)
    for row in rows:
        if row.metric != metric or row.f != f or (t is not None and row.t != t):
            continue
        grouped[row.n].append(row.value)
    ns = sorted(grouped)
    means: list[float] = []
    errors: list[float] = []
    for n in ns:
        mean, err = disorder_average(sorted(grouped[n]))
        means.append(mean)
        errors.append(err)
    return ns, means, errors


def fit_key(metric: str, f: str = NO_FUNCTION, t: float | None = None) -> str:
    parts = [metric]
    if f != NO_FUNCTION:
        parts.append(f)
    if t is not None:
        parts.append(f"t={t:g}")
    return ":".join(parts)


def trend_fit(
    report: ConvergenceReport,
    artifacts: RunArtifacts,
    metric: str,
    f: str = NO_FUNCTION,
    t: float | None = None,
    required_ratio: float = 2.0,
    group: str | None = None,
) -> MetricFit | None:
    """Fit the disorder-averaged metric along n and file it under the report fits."""
    ns, means, errors = ensemble_means(report.rows, metric, f, t)
    if len(ns) < 2:
        return None
    key = fit_key(metric, f, t)
    fit = metric_trend(key, ns, means, required_ratio=required_ratio)
    report.fits[key] = fit
    artifacts.series.setdefault(group or metric, {})[key] = (ns, means, errors)
    return fit


def smoothed(values: np.ndarray, window: int) -> np.ndarray:
    """Moving average over ``window`` sites (valid part only)."""
    window = max(1, min(window, values.size))
    kernel = np.full(window, 1.0 / window)
    return np.convolve(values, kernel, mode="valid")


__all__ = [
    "Cell",
    "CellOutcome",
    "NO_FUNCTION",
    "Overlay",
    "Pipeline",
    "RunArtifacts",
    "RunResult",
    "ensemble_means",
    "fit_key",
    "smoothed",
    "trend_fit",
]
