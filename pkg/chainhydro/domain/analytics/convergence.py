"""Trend fits and probability bounds for n-sweeps."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats

from chainhydro.domain.models.results import LinearFit, MetricFit


def markov_bound(value: float, delta: float) -> float:
    """P(|O| > δ) ≤ ⟨O²⟩/δ² for a second moment ``value``."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return float(value) / float(delta) ** 2


def linear_fit(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.size < 2:
        raise ValueError("A linear fit needs at least two points")
    if np.ptp(xs) == 0.0:
        raise ValueError("A linear fit needs at least two distinct abscissae")
    result = stats.linregress(xs, ys)
    return LinearFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        rvalue=float(result.rvalue),
        stderr=float(result.stderr),
        points=int(xs.size),
    )


def loglog_fit(n_values: Sequence[float], values: Sequence[float]) -> LinearFit:
    """Fit log(value) against log(n)."""
    return linear_fit(np.log(np.asarray(n_values, dtype=np.float64)), np.log(values))


def strictly_decreasing(values: Sequence[float]) -> bool:
    arr = np.asarray(values, dtype=np.float64)
    return bool(arr.size >= 2 and np.all(np.diff(arr) < 0))


def ratio_first_last(values: Sequence[float]) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan")
    if arr[-1] == 0.0:
        return math.inf if arr[0] > 0 else float("nan")
    return float(arr[0] / arr[-1])


def disorder_average(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error over an ensemble of seeds."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), float("nan")
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def metric_trend(
    metric: str,
    n_values: Sequence[int],
    values: Sequence[float],
    required_ratio: float = 2.0,
) -> MetricFit:
    """Summarize a metric along increasing n.

    The trend passes when the values strictly decrease and the first value
    exceeds the last by more than ``required_ratio``.
    """
    order = np.argsort(np.asarray(n_values))
    ns = tuple(int(n_values[i]) for i in order)
    vals = tuple(float(values[i]) for i in order)
    positive = [v for v in vals if v > 0]
    slope = float("nan")
    if len(positive) == len(vals) and len(set(ns)) >= 2:
        slope = loglog_fit(ns, vals).slope
    ratio = ratio_first_last(vals)
    decreasing = strictly_decreasing(vals)
    return MetricFit(
        metric=metric,
        n_values=ns,
        values=vals,
        slope=slope,
        ratio_first_last=ratio,
        strictly_decreasing=decreasing,
        passed=bool(decreasing and ratio > required_ratio),
    )


__all__ = [
    "disorder_average",
    "linear_fit",
    "loglog_fit",
    "markov_bound",
    "metric_trend",
    "ratio_first_last",
    "strictly_decreasing",
]
