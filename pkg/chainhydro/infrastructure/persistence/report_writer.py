"""CSV/JSON exports of reports, macroscopic fields, scans and thermal profiles."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from chainhydro.domain.models.fields import MacroFields
from chainhydro.domain.models.results import ConvergenceReport, LocalizationScan
from chainhydro.infrastructure.observability import get_logger

logger = get_logger(__name__)

ROW_COLUMNS = ("experiment", "n", "seed", "t", "f", "metric", "value", "stderr")
FIELD_COLUMNS = ("y", "fr", "fp", "fe", "t")
SCAN_COLUMNS = ("n", "alpha_or_gamma", "distance_or_k", "seed", "value")
PROFILE_COLUMNS = ("y", "value", "stderr", "low", "high")


def _num(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return f"{float(value):.15g}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(payload: dict[str, Any], path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
    target.write_text(text + "\n", encoding="utf-8", newline="\n")
    return target


def write_report(report: ConvergenceReport, out_dir: str | Path) -> dict[str, Path]:
    """Write ``rows.csv`` and ``summary.json``; runtime figures go to ``runtime.json``."""
    directory = Path(out_dir)
    rows = (
        (
            row.experiment,
            row.n,
            row.seed,
            _num(row.t),
            row.f,
            row.metric,
            _num(row.value),
            _num(row.stderr),
        )
        for row in report.sorted_rows()
    )
    written = {
        "rows": _write_csv(directory / "rows.csv", ROW_COLUMNS, rows),
        "summary": write_json(report.summary(), directory / "summary.json"),
    }
    if report.runtime:
        written["runtime"] = write_json(report.runtime, directory / "runtime.json")
    logger.info("Wrote %d report rows to %s", len(report.rows), directory)
    return written


def write_fields(fields: Sequence[MacroFields], path: str | Path) -> Path:
    rows = (
        tuple(_num(v) for v in row)
        for snapshot in sorted(fields, key=lambda f: f.t)
        for row in snapshot.rows()
    )
    return _write_csv(Path(path), FIELD_COLUMNS, rows)


def write_localization(
    scans: Sequence[LocalizationScan],
    path: str | Path,
    extra_rows: Iterable[tuple[int, float, int, int, float]] = (),
) -> Path:
    rows: list[tuple[Any, ...]] = []
    for scan in scans:
        rows.extend(scan.rows())
    rows.extend(extra_rows)
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    formatted = ((n, _num(a), d, s, _num(v)) for n, a, d, s, v in rows)
    return _write_csv(Path(path), SCAN_COLUMNS, formatted)


def write_thermal_profile(
    y: np.ndarray,
    value: np.ndarray,
    stderr: np.ndarray,
    low: np.ndarray,
    high: np.ndarray,
    path: str | Path,
) -> Path:
    rows = (
        tuple(_num(v) for v in row) for row in zip(y, value, stderr, low, high)
    )
    return _write_csv(Path(path), PROFILE_COLUMNS, rows)


def read_thermal_profile(path: str | Path) -> dict[str, np.ndarray]:
    """Read a thermal profile back as columns (``y``, ``value``, ...)."""
    with Path(path).open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or tuple(reader.fieldnames) != PROFILE_COLUMNS:
            raise ValueError(f"{path}: unexpected thermal profile columns")
        columns: dict[str, list[float]] = {name: [] for name in PROFILE_COLUMNS}
        for record in reader:
            for name in PROFILE_COLUMNS:
                columns[name].append(float(record[name]))
    return {name: np.asarray(values) for name, values in columns.items()}


__all__ = [
    "FIELD_COLUMNS",
    "PROFILE_COLUMNS",
    "ROW_COLUMNS",
    "SCAN_COLUMNS",
    "read_thermal_profile",
    "write_fields",
    "write_json",
    "write_localization",
    "write_report",
    "write_thermal_profile",
]
