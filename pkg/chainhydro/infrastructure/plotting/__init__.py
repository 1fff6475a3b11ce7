"""matplotlib figure builders with byte-stable SVG output."""

from .svg import convergence_figure, decay_figure, overlay_figure, save_svg

__all__ = ["convergence_figure", "decay_figure", "overlay_figure", "save_svg"]
