"""SVG figures for a finished run."""

from __future__ import annotations

from pathlib import Path

from chainhydro.infrastructure.observability import get_logger
from chainhydro.infrastructure.plotting import (
    convergence_figure,
    decay_figure,
    overlay_figure,
    save_svg,
)

from .base import RunResult

logger = get_logger(__name__)

FIELD_LABELS = {"r": "elongation", "p": "momentum", "e": "energy"}


def _slug(value: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in value)


def emit_plots(result: RunResult, out_dir: str | Path) -> list[Path]:
    """Write convergence, decay and overlay plots; empty classes are skipped and logged."""
    report, artifacts = result.report, result.artifacts
    if not report.rows:
        raise ValueError("Cannot plot an empty report")
    directory = Path(out_dir) / "plots"
    written: list[Path] = []

    for group in sorted(artifacts.series):
        series = {
            key: value
            for key, value in artifacts.series[group].items()
            if any(v > 0 for v in value[1])
        }
        if not series:
            logger.warning("No positive values in metric class %r; plot omitted", group)
            continue
        figure = convergence_figure(series, f"{report.experiment}: {group}")
        written.append(save_svg(figure, directory / f"convergence_{_slug(group)}.svg"))

    for scan in sorted(artifacts.scans, key=lambda s: (s.n, s.basis)):
        keep = scan.profile > 0
        if not keep.any():
            logger.warning("Correlator for n=%d basis %s is empty; plot omitted", scan.n, scan.basis)
            continue
        control = None
        reference = artifacts.controls.get(scan.n)
        if scan.basis == "p" and reference is not None:
            positive = reference.profile > 0
            control = (reference.distances[positive], reference.profile[positive])
        fit = (scan.fit.slope, scan.fit.intercept) if scan.fit else None
        figure = decay_figure(
            scan.distances[keep],
            scan.profile[keep],
            f"alpha={scan.alpha:g}, n={scan.n}, basis {scan.basis}",
            fit=fit,
            fit_window=scan.fit_window,
            control=control,
        )
        written.append(save_svg(figure, directory / f"decay_{scan.basis}_n{scan.n}.svg"))

    for overlay in sorted(artifacts.overlays, key=lambda o: (o.label, o.n, o.t)):
        figure = overlay_figure(
            overlay.y_micro,
            overlay.micro,
            overlay.y_macro,
            overlay.macro,
            f"{FIELD_LABELS.get(overlay.label, overlay.label)}, n={overlay.n}, t={overlay.t:g}",
            overlay.label,
        )
        name = f"overlay_{overlay.label}_n{overlay.n}_t{overlay.t:g}.svg"
        written.append(save_svg(figure, directory / _slug(name)))

    if not written:
        logger.info("Run produced no plottable artifacts")
    return written


__all__ = ["emit_plots"]
