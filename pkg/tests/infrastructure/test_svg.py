import numpy as np

from chainhydro.infrastructure.plotting import (
    convergence_figure,
    decay_figure,
    overlay_figure,
    save_svg,
)


def _convergence(tmp_path, name):
    series = {
        "gap_p": ([64, 128, 256], [1e-2, 5e-3, 2.4e-3], [1e-3, 5e-4, 2e-4]),
        "quadvar_p": ([64, 128, 256], [4e-3, 1e-3, 2.6e-4], None),
    }
    return save_svg(convergence_figure(series, "trend"), tmp_path / name)


def test_same_data_same_bytes(tmp_path):
    first = _convergence(tmp_path, "a.svg")
    second = _convergence(tmp_path, "b.svg")
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text(encoding="utf-8")
    assert text.lstrip().startswith("<?xml")
    assert "<dc:date>" not in text


def test_non_positive_series_skipped(tmp_path):
    series = {"zero": ([8, 16], [0.0, 0.0], None), "ok": ([8, 16], [1.0, 0.5], [np.nan, 0.1])}
    path = save_svg(convergence_figure(series, "mixed"), tmp_path / "mixed.svg")
    assert path.stat().st_size > 0


def test_decay_and_overlay(tmp_path):
    d = np.arange(1, 20, dtype=float)
    decay = decay_figure(
        d,
        np.exp(-0.3 * d),
        "correlator",
        fit=(-0.3, 0.0),
        fit_window=(2.0, 18.0),
        control=(d, np.full_like(d, 0.5)),
    )
    y = np.linspace(0.0, 1.0, 33)
    overlay = overlay_figure(y, np.sin(np.pi * y), y, np.sin(np.pi * y), "p at t=0.5", "momentum")
    for figure, name in ((decay, "decay.svg"), (overlay, "overlay.svg")):
        path = save_svg(figure, tmp_path / "plots" / name)
        assert path.exists()
        assert "</svg>" in path.read_text(encoding="utf-8")
