"""Numerical analytics shared by the services: quadrature and trend fits."""

from .quadrature import composite_rule, integrate, panel_edges
from .convergence import (
    disorder_average,
    linear_fit,
    loglog_fit,
    markov_bound,
    metric_trend,
    ratio_first_last,
    strictly_decreasing,
)

__all__ = [
    "composite_rule",
    "disorder_average",
    "integrate",
    "linear_fit",
    "loglog_fit",
    "markov_bound",
    "metric_trend",
    "panel_edges",
    "ratio_first_last",
    "strictly_decreasing",
]
