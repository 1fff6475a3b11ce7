"""Composite Gauss–Legendre quadrature on [0, 1]."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=16)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_edges(panels: int, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Uniform panel edges on [0, 1] refined by the given breakpoints."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    if len(breakpoints):
        extra = np.asarray(breakpoints, dtype=np.float64)
        extra = extra[(extra > 0.0) & (extra < 1.0)]
        edges = np.unique(np.concatenate([edges, extra]))
    return edges


def composite_rule(
    panels: int, order: int = 16, breakpoints: Sequence[float] = ()
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule with ``order`` points per panel."""
    edges = panel_edges(panels, breakpoints)
    ref_nodes, ref_weights = _reference_rule(order)
    left = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = left + half * (ref_nodes[None, :] + 1.0)
    weights = half * ref_weights[None, :]
    return nodes.ravel(), weights.ravel()


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    panels: int = 64,
    order: int = 16,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integral of a vectorized ``f`` over [0, 1]."""
    nodes, weights = composite_rule(panels, order, breakpoints)
    return float(np.dot(weights, f(nodes)))


__all__ = ["composite_rule", "integrate", "panel_edges"]
