"""Run a pipeline over its (n, seed) cells on a thread pool.

Cells are independent. Whatever order they finish in, their rows are merged
in cell order and every reduction runs on the sorted outcomes, so the thread
count never changes the report.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

from chainhydro import __version__
from chainhydro.domain.models.results import CellFailure, ConvergenceReport
from chainhydro.infrastructure.observability import (
    get_logger,
    get_metrics_summary,
    log_context,
    log_exception,
    record_cell,
)
from chainhydro.infrastructure.persistence import SpectralCache

from ..spectral import SpectralService
from .acceptance import evaluate_acceptance
from .base import Cell, CellOutcome, RunArtifacts, RunResult
from .config import ExperimentConfig
from .pipelines import build_pipeline


class ExperimentRunner:
    """Executes one configured experiment and assembles its report."""

    def __init__(
        self,
        config: ExperimentConfig,
        spectral: SpectralService | None = None,
        version: str | None = None,
    ) -> None:
        self.config = config
        if spectral is None:
            cache = SpectralCache(config.spectral_cache) if config.spectral_cache else None
            spectral = SpectralService(cache)
        self.spectral = spectral
        self.version = version or __version__
        self.pipeline = build_pipeline(config, spectral)
        self._logger = get_logger(__name__)

    @property
    def experiment(self) -> str:
        return self.config.experiment.value

    def _execute(self, cell: Cell) -> CellOutcome | CellFailure:
        with log_context(experiment=self.experiment, n=cell.n, seed=cell.seed):
            start = time.perf_counter()
            try:
                outcome = self.pipeline.run_cell(cell)
            except Exception as exc:
                record_cell(self.experiment, "failed", time.perf_counter() - start)
                log_exception(self._logger, "Cell failed", exc)
                return CellFailure(
                    experiment=self.experiment,
                    n=cell.n,
                    seed=cell.seed,
                    error_type=type(exc).__name__,
                    message=str(exc),
                )
            record_cell(self.experiment, "ok", time.perf_counter() - start)
            self._logger.debug("Cell produced %d rows", len(outcome.rows))
            return outcome

    def run(self) -> RunResult:
        config = self.config
        report = ConvergenceReport(
            experiment=self.experiment,
            config_hash=config.config_hash(),
            version=self.version,
            config=config.model_dump(mode="json"),
        )
        cells = self.pipeline.cells()
        self._logger.info(
            "Running %s: %d cells on %d threads (config %s)",
            self.experiment,
            len(cells),
            config.threads,
            report.config_hash,
        )
        started = time.perf_counter()
        artifacts = RunArtifacts()
        with ThreadPoolExecutor(max_workers=config.threads, thread_name_prefix="cell") as executor:
            with log_context(experiment=self.experiment):
                self.pipeline.prepare(executor)
            results = list(executor.map(self._execute, cells))

            outcomes = sorted(
                (r for r in results if isinstance(r, CellOutcome)), key=lambda o: o.cell
            )
            report.failures = [r for r in results if isinstance(r, CellFailure)]
            for outcome in outcomes:
                report.extend(outcome.rows)
            if outcomes:
                with log_context(experiment=self.experiment):
                    artifacts = self.pipeline.finalize(report, outcomes, executor)
            else:
                self._logger.error("Every cell failed; skipping the reduction")

        evaluate_acceptance(config, report)
        report.runtime = {
            "wall_seconds": time.perf_counter() - started,
            "threads": config.threads,
            "metrics": get_metrics_summary(),
        }
        if report.failures:
            self._logger.warning("%d of %d cells failed", len(report.failures), len(cells))
        return RunResult(report=report, artifacts=artifacts)


def run(config: ExperimentConfig) -> ConvergenceReport:
    """Run ``config`` and return the report only."""
    return ExperimentRunner(config).run().report


__all__ = ["ExperimentRunner", "run"]
