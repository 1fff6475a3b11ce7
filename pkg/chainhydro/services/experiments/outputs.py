"""Write every product of a run under one output directory."""

from __future__ import annotations

from pathlib import Path

from chainhydro.infrastructure.persistence import (
    write_fields,
    write_localization,
    write_report,
    write_thermal_profile,
)

from .base import RunResult
from .plots import emit_plots


def write_run(result: RunResult, out_dir: str | Path, plots: bool = True) -> dict[str, Path]:
    """rows.csv and summary.json always; fields, scans, thermal profile and plots when present."""
    directory = Path(out_dir)
    report, artifacts = result.report, result.artifacts
    written = write_report(report, directory)
    if artifacts.fields:
        written["fields"] = write_fields(artifacts.fields, directory / "fields.csv")
    frequency_rows: list[tuple[int, float, int, int, float]] = []
    if artifacts.frequency is not None:
        gamma = artifacts.frequency.gamma
        frequency_rows = [
            (n, gamma, k, seed, value) for n, seed, k, value in artifacts.frequency.rows
        ]
    if artifacts.scans or frequency_rows:
        written["localization"] = write_localization(
            artifacts.scans, directory / "localization.csv", extra_rows=frequency_rows
        )
    thermal = artifacts.thermal
    if thermal is not None:
        written["thermal_profile"] = write_thermal_profile(
            thermal.y,
            thermal.value,
            thermal.stderr,
            thermal.low,
            thermal.high,
            directory / "thermal_profile.csv",
        )
    if plots and report.rows:
        for path in emit_plots(result, directory):
            written[f"plot:{path.stem}"] = path
    return written


__all__ = ["write_run"]
