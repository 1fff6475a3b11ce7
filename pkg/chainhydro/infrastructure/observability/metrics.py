"""In-process run metrics.

Counters and duration histograms for the expensive steps of an experiment
(eigendecompositions, cells, cache lookups). Values live in memory for the
lifetime of the process and are summarised into the ``runtime`` section of a
report. Runtime figures never enter the reproducible part of a report.
"""

from __future__ import annotations

import threading
import time
from typing import Generic, Mapping, TypeVar

Labels = Mapping[str, str] | None
LabelKey = tuple[tuple[str, str], ...]

_V = TypeVar("_V")


def _label_key(labels: Labels) -> LabelKey:
    return tuple(sorted((k, str(v)) for k, v in (labels or {}).items()))


def _series_name(name: str, key: LabelKey) -> str:
    if not key:
        return name
    return name + "{" + ",".join(f"{k}={v}" for k, v in key) + "}"


class _Series(Generic[_V]):
    """Label-keyed values of one metric, guarded by a lock."""

    def __init__(self, name: str) -> None:
        self.name = name
        self._series: dict[LabelKey, _V] = {}
        self._lock = threading.Lock()

    def _snapshot(self) -> list[tuple[LabelKey, _V]]:
        with self._lock:
            return sorted(self._series.items())


class Counter(_Series[float]):
    """A monotonically increasing counter."""

    def inc(self, value: float = 1.0, labels: Labels = None) -> None:
        key = _label_key(labels)
        with self._lock:
            self._series[key] = self._series.get(key, 0.0) + value

    def get(self, labels: Labels = None) -> float:
        with self._lock:
            return self._series.get(_label_key(labels), 0.0)

    def items(self) -> list[tuple[LabelKey, float]]:
        return self._snapshot()


class Histogram(_Series[list[float]]):
    """Observations summarised as count, sum, mean and max."""

    def observe(self, value: float, labels: Labels = None) -> None:
        key = _label_key(labels)
        with self._lock:
            self._series.setdefault(key, []).append(value)

    def get_stats(self, labels: Labels = None) -> dict[str, float]:
        with self._lock:
            return _stats(self._series.get(_label_key(labels), []))

    def items(self) -> list[tuple[LabelKey, dict[str, float]]]:
        return [(key, _stats(values)) for key, values in self._snapshot()]


def _stats(values: list[float]) -> dict[str, float]:
    count = len(values)
    total = float(sum(values))
    return {
        "count": count,
        "sum": total,
        "avg": total / count if count else 0.0,
        "max": max(values) if count else 0.0,
    }


class MetricRegistry:
    """Every counter and histogram of the process, created on first use."""

    def __init__(self) -> None:
        self._counters: dict[str, Counter] = {}
        self._histograms: dict[str, Histogram] = {}
        self._lock = threading.Lock()

    def counter(self, name: str) -> Counter:
        with self._lock:
            return self._counters.setdefault(name, Counter(name))

    def histogram(self, name: str) -> Histogram:
        with self._lock:
            return self._histograms.setdefault(name, Histogram(name))

    def summary(self) -> dict[str, object]:
        with self._lock:
            metrics: list[Counter | Histogram] = [
                *(self._counters[name] for name in sorted(self._counters)),
                *(self._histograms[name] for name in sorted(self._histograms)),
            ]
        out: dict[str, object] = {}
        for metric in metrics:
            for key, value in metric.items():
                out[_series_name(metric.name, key)] = value
        return out

    def reset(self) -> None:
        with self._lock:
            self._counters.clear()
            self._histograms.clear()


_registry = MetricRegistry()


def get_registry() -> MetricRegistry:
    return _registry


def increment_counter(name: str, value: float = 1.0, labels: Labels = None) -> None:
    _registry.counter(name).inc(value, labels)


def observe_histogram(name: str, value: float, labels: Labels = None) -> None:
    _registry.histogram(name).observe(value, labels)


def get_metrics_summary() -> dict[str, object]:
    """Flat ``name{labels} -> value`` view of every metric."""
    return _registry.summary()


class Timer:
    """Times a ``with`` block into the histogram ``metric``."""

    def __init__(self, metric: str, labels: Labels = None) -> None:
        self.metric = metric
        self.labels = labels
        self.elapsed = 0.0
        self._started = 0.0

    def __enter__(self) -> "Timer":
        self._started = time.perf_counter()
        return self

    def __exit__(self, *exc: object) -> None:
        self.elapsed = time.perf_counter() - self._started
        observe_histogram(self.metric, self.elapsed, self.labels)


EIGENDECOMPOSITIONS = "eigendecompositions_total"
EIGENDECOMPOSITION_DURATION = "eigendecomposition_seconds"
CELLS = "cells_total"
CELL_DURATION = "cell_duration_seconds"
SPECTRAL_CACHE_HITS = "spectral_cache_hits_total"
SPECTRAL_CACHE_MISSES = "spectral_cache_misses_total"


def record_cell(experiment: str, status: str, duration: float) -> None:
    """Count one finished cell and record how long it took."""
    increment_counter(CELLS, labels={"experiment": experiment, "status": status})
    observe_histogram(CELL_DURATION, duration, labels={"experiment": experiment})


__all__ = [
    "CELLS",
    "CELL_DURATION",
    "Counter",
    "EIGENDECOMPOSITIONS",
    "EIGENDECOMPOSITION_DURATION",
    "Histogram",
    "MetricRegistry",
    "SPECTRAL_CACHE_HITS",
    "SPECTRAL_CACHE_MISSES",
    "Timer",
    "get_metrics_summary",
    "get_registry",
    "increment_counter",
    "observe_histogram",
    "record_cell",
]
