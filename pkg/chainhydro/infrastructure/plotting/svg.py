"""Deterministic SVG figures.

Figures are built on :class:`matplotlib.figure.Figure` directly (no pyplot
state) and saved with a fixed hash salt and without a date stamp, so the same
data always produces the same bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from chainhydro.infrastructure.observability import get_logger

logger = get_logger(__name__)

SVG_RC = {
    "svg.hashsalt": "chainhydro",
    "svg.fonttype": "none",
    "path.simplify": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

Series = tuple[Sequence[float], Sequence[float], Sequence[float] | None]


def save_svg(figure: Figure, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(SVG_RC):
        figure.savefig(target, format="svg", metadata={"Date": None})
    logger.debug("Saved figure %s", target)
    return target


def _figure() -> Figure:
    with matplotlib.rc_context(SVG_RC):
        return Figure(figsize=(6.4, 4.4), layout="constrained")


def convergence_figure(series: Mapping[str, Series], title: str) -> Figure:
    """Log-log plot of metric value against n, one line per metric."""
    figure = _figure()
    ax = figure.add_subplot()
    for label in sorted(series):
        ns, values, errors = series[label]
        x = np.asarray(ns, dtype=np.float64)
        y = np.asarray(values, dtype=np.float64)
        keep = y > 0
        if not np.any(keep):
            continue
        yerr = None
        if errors is not None:
            err = np.nan_to_num(np.asarray(errors, dtype=np.float64)[keep])
            yerr = np.minimum(err, 0.999 * y[keep])
        ax.errorbar(x[keep], y[keep], yerr=yerr, marker="o", capsize=3, label=label)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    return figure


def decay_figure(
    distances: Sequence[float],
    profile: Sequence[float],
    title: str,
    fit: tuple[float, float] | None = None,
    fit_window: tuple[float, float] | None = None,
    control: tuple[Sequence[float], Sequence[float]] | None = None,
) -> Figure:
    """Semilog plot of a correlator against distance with an optional fit line."""
    figure = _figure()
    ax = figure.add_subplot()
    d = np.asarray(distances, dtype=np.float64)
    s = np.asarray(profile, dtype=np.float64)
    ax.semilogy(d, s, "o-", label="disordered")
    if control is not None:
        ax.semilogy(control[0], control[1], "s--", label="equal masses")
    if fit is not None:
        slope, intercept = fit
        lo, hi = fit_window if fit_window else (float(d.min()), float(d.max()))
        xs = np.linspace(lo, hi, 32)
        ax.semilogy(xs, np.exp(intercept + slope * xs), "k:", label=f"fit slope {slope:.3g}")
    ax.set_xlabel("|x - y|")
    ax.set_ylabel("correlator")
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    return figure


def overlay_figure(
    y_micro: Sequence[float],
    micro: Sequence[float],
    y_macro: Sequence[float],
    macro: Sequence[float],
    title: str,
    ylabel: str,
) -> Figure:
    figure = _figure()
    ax = figure.add_subplot()
    ax.plot(y_micro, micro, ".", markersize=2, label="chain (smoothed)")
    ax.plot(y_macro, macro, "-", label="Euler")
    ax.set_xlabel("y")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    return figure


__all__ = [
    "convergence_figure",
    "decay_figure",
    "overlay_figure",
    "save_svg",
]
