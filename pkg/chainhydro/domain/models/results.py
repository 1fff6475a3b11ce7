"""Result records produced by the numerical services and the experiment runner."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


class FunctionalKind(str, Enum):
    """Empirical functionals of a chain state against a test function."""

    MEAN_R = "mean_r"
    MEAN_P = "mean_p"
    MEAN_E = "mean_e"
    QUAD_VAR_R = "quadvar_r"
    QUAD_VAR_P = "quadvar_p"
    QUAD_VAR_E = "quadvar_e"

    @property
    def is_quad_var(self) -> bool:
        return self.value.startswith("quadvar")

    @property
    def field(self) -> str:
        return self.value[-1]


@dataclass(frozen=True)
class FunctionalResult:
    f_name: str
    kind: FunctionalKind
    value: float
    n: int
    t: float
    seed: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"{self.kind.value} value is not finite: {self.value}")
        if self.kind.is_quad_var and self.value < 0:
            raise ValueError(f"{self.kind.value} must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class LinearFit:
    """Least-squares line y = slope·x + intercept."""

    slope: float
    intercept: float
    rvalue: float
    stderr: float
    points: int

    @property
    def r_squared(self) -> float:
        return self.rvalue**2

    def to_dict(self) -> dict[str, float | int]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "rvalue": self.rvalue,
            "stderr": self.stderr,
            "points": self.points,
        }


@dataclass(frozen=True)
class LocalizationScan:
    """Disorder-averaged high-mode correlator on a ladder of site pairs.

    ``pairs`` holds (x, y, |x - y|) with 0-based sites; ``correlator`` is the
    seed average per pair, ``per_seed`` the raw values (seeds × pairs).
    ``distances``/``profile`` aggregate the correlator by distance and ``fit``
    is the line through log(profile) over the fit window.
    """

    alpha: float
    n: int
    n_seeds: int
    basis: str
    pairs: tuple[tuple[int, int, int], ...]
    correlator: np.ndarray
    per_seed: np.ndarray
    distances: np.ndarray
    profile: np.ndarray
    fit: LinearFit | None
    fit_window: tuple[float, float]
    seeds: tuple[int, ...] = ()

    def rows(self) -> list[tuple[int, float, int, int, float]]:
        """(n, alpha, distance, seed, value) rows of the distance profile per seed."""
        out: list[tuple[int, float, int, int, float]] = []
        d_of_pair = np.array([d for _, _, d in self.pairs])
        seeds = self.seeds or tuple(range(self.per_seed.shape[0]))
        for seed_index, seed in enumerate(seeds):
            for d in self.distances:
                value = float(self.per_seed[seed_index, d_of_pair == d].mean())
                out.append((self.n, self.alpha, int(d), int(seed), value))
        return out


@dataclass(frozen=True)
class FrequencyScan:
    """Maxima of 1/ωₖ over the high-mode window, per (n, seed)."""

    gamma: float
    rows: tuple[tuple[int, int, int, float], ...]
    fit: LinearFit | None

    def per_n_max(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for n, _seed, _k, value in self.rows:
            out[n] = max(out.get(n, 0.0), value)
        return dict(sorted(out.items()))


@dataclass(frozen=True)
class ModeSplit:
    """Low-, high- and cross-mode parts of a site-space covariance block."""

    block: str
    gamma: float
    high_modes: np.ndarray
    low: np.ndarray
    high: np.ndarray
    cross: np.ndarray

    def reassembled(self) -> np.ndarray:
        return self.low + self.high + self.cross


@dataclass(frozen=True)
class HighModeSplit:
    """Near (|x−y| ≤ 2n^θ) and far parts of the high-mode off-diagonal mass."""

    block: str
    gamma: float
    theta: float
    n: int
    u_less: float
    u_greater: float
    bound_less: float

    @property
    def within_bound(self) -> bool:
        return self.u_less <= self.bound_less


@dataclass(frozen=True)
class ClusteringReport:
    """Decay diagnostics of a quasi-free two-point function."""

    q: float
    fit: LinearFit | None
    square_decay_constant: float
    square_decay_by_block: dict[str, float]
    quartic_constant: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "fit": self.fit.to_dict() if self.fit else None,
            "square_decay_constant": self.square_decay_constant,
            "square_decay_by_block": dict(self.square_decay_by_block),
            "quartic_constant": self.quartic_constant,
        }


@dataclass(frozen=True)
class ReportRow:
    """One value in a convergence report (CSV schema row)."""

    experiment: str
    n: int
    seed: int
    t: float
    f: str
    metric: str
    value: float
    stderr: float = float("nan")

    def sort_key(self) -> tuple[str, str, str, int, float, int]:
        return (self.experiment, self.metric, self.f, self.n, self.t, self.seed)


@dataclass(frozen=True)
class CellFailure:
    experiment: str
    n: int
    seed: int
    error_type: str
    message: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "n": self.n,
            "seed": self.seed,
            "error_type": self.error_type,
            "message": self.message,
        }


@dataclass(frozen=True)
class MetricFit:
    """Trend of a disorder-averaged metric along an n-sweep."""

    metric: str
    n_values: tuple[int, ...]
    values: tuple[float, ...]
    slope: float
    ratio_first_last: float
    strictly_decreasing: bool
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": list(self.n_values),
            "values": list(self.values),
            "slope": self.slope,
            "ratio_first_last": self.ratio_first_last,
            "strictly_decreasing": self.strictly_decreasing,
            "pass": self.passed,
        }


@dataclass
class ConvergenceReport:
    """Rows, fits and provenance of one experiment run.

    Rows arrive in any order from worker threads; :meth:`sorted_rows` gives
    the canonical order used for every export.
    """

    experiment: str
    config_hash: str
    version: str
    config: dict[str, Any]
    rows: list[ReportRow] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)
    fits: dict[str, MetricFit] = field(default_factory=dict)
    acceptance: dict[str, bool] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    runtime: dict[str, Any] = field(default_factory=dict)

    def extend(self, rows: list[ReportRow]) -> None:
        self.rows.extend(rows)

    def sorted_rows(self) -> list[ReportRow]:
        return sorted(self.rows, key=ReportRow.sort_key)

    def metrics(self) -> list[str]:
        return sorted({row.metric for row in self.rows})

    def rows_for(self, metric: str, f: str | None = None) -> list[ReportRow]:
        return [
            row
            for row in self.sorted_rows()
            if row.metric == metric and (f is None or row.f == f)
        ]

    @property
    def failed(self) -> bool:
        return bool(self.failures)

    @property
    def accepted(self) -> bool:
        return all(self.acceptance.values())

    def summary(self) -> dict[str, Any]:
        """JSON-ready summary; ``runtime`` is kept apart from the reproducible part."""
        return {
            "experiment": self.experiment,
            "version": self.version,
            "config_hash": self.config_hash,
            "config": self.config,
            "fits": {name: fit.to_dict() for name, fit in sorted(self.fits.items())},
            "acceptance": dict(sorted(self.acceptance.items())),
            "failures": [
                failure.to_dict()
                for failure in sorted(self.failures, key=lambda f: (f.n, f.seed))
            ],
            "details": self.details,
            "rows": len(self.rows),
        }


__all__ = [
    "CellFailure",
    "ClusteringReport",
    "ConvergenceReport",
    "FrequencyScan",
    "FunctionalKind",
    "FunctionalResult",
    "HighModeSplit",
    "LinearFit",
    "LocalizationScan",
    "MetricFit",
    "ModeSplit",
    "ReportRow",
]
