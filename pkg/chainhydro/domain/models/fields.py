"""Macroscopic fields of the Lagrangian Euler system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainModelError


@dataclass(frozen=True)
class MacroFields:
    """Elongation, momentum and energy fields on a uniform grid at time ``t``.

    ``sine_coeffs[j]`` multiplies sin(jπy) in 𝔯 and ``cosine_coeffs[j]``
    multiplies cos(jπy) in 𝔭, both for j = 0..N_modes (``sine_coeffs[0]`` is
    always 0). ``slaving_const`` is C(y) on the grid.
    """

    t: float
    grid: np.ndarray
    fr: np.ndarray
    fp: np.ndarray
    fe: np.ndarray
    sine_coeffs: np.ndarray
    cosine_coeffs: np.ndarray
    mean_mass: float
    slaving_const: np.ndarray

    def __post_init__(self) -> None:
        size = np.shape(self.grid)
        for name in ("fr", "fp", "fe", "slaving_const"):
            if np.shape(getattr(self, name)) != size:
                raise ChainModelError(f"Field {name} does not match the grid")
        if np.shape(self.sine_coeffs) != np.shape(self.cosine_coeffs):
            raise ChainModelError("Sine and cosine coefficient vectors differ in length")
        for name in (
            "grid",
            "fr",
            "fp",
            "fe",
            "sine_coeffs",
            "cosine_coeffs",
            "slaving_const",
        ):
            array = np.array(getattr(self, name), dtype=np.float64)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def n_modes(self) -> int:
        return int(self.sine_coeffs.size - 1)

    @property
    def grid_points(self) -> int:
        return int(self.grid.size)

    def slaving_residual(self) -> float:
        """max |𝔢 − 𝔭²/(2m̄) − 𝔯²/2 − C|."""
        mech = self.fp**2 / (2.0 * self.mean_mass) + 0.5 * self.fr**2
        return float(np.max(np.abs(self.fe - mech - self.slaving_const)))

    def boundary_values(self) -> tuple[float, float]:
        return float(self.fr[0]), float(self.fr[-1])

    def rows(self) -> list[tuple[float, float, float, float, float]]:
        """(y, fr, fp, fe, t) tuples in grid order."""
        return [
            (float(y), float(r), float(p), float(e), float(self.t))
            for y, r, p, e in zip(self.grid, self.fr, self.fp, self.fe)
        ]


__all__ = ["MacroFields"]
