"""Macroscopic Euler system in Lagrangian coordinates.

    ∂_t 𝔯 = (1/m̄) ∂_y 𝔭,   ∂_t 𝔭 = ∂_y 𝔯,   ∂_t 𝔢 = (1/m̄) ∂_y(𝔯𝔭)

with 𝔯(0, t) = 𝔯(1, t) = 0. 𝔯 is expanded in sin(jπy) and 𝔭 in cos(jπy);
mode j rotates at ν_j = jπ/√m̄. The energy is slaved:
𝔢 = 𝔭²/(2m̄) + 𝔯²/2 + C(y), with C = 1/β classically and C = b̄ for the
quantum chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from chainhydro.domain.analytics.quadrature import composite_rule
from chainhydro.domain.models.fields import MacroFields
from chainhydro.domain.models.profiles import Profiles
from chainhydro.domain.models.state import StateFlavor
from chainhydro.infrastructure.observability import get_logger

logger = get_logger(__name__)

QUADRATURE_TOL = 1e-10
QUADRATURE_ORDER = 16
MAX_DOUBLINGS = 6
MIN_MODES = 64

ProfileFn = Callable[[np.ndarray], np.ndarray]


class QuadratureError(ArithmeticError):
    """Initial Fourier coefficients did not converge."""


def _coefficients(
    profiles: Profiles, n_modes: int, panels: int
) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = composite_rule(panels, QUADRATURE_ORDER, profiles.breakpoints)
    j = np.arange(n_modes + 1)[:, None]
    angle = j * np.pi * nodes[None, :]
    r_vals = np.asarray(profiles.r_bar(nodes), dtype=np.float64)
    p_vals = np.asarray(profiles.p_bar(nodes), dtype=np.float64)
    sine = 2.0 * (np.sin(angle) * r_vals) @ weights
    cosine = 2.0 * (np.cos(angle) * p_vals) @ weights
    sine[0] = 0.0
    cosine[0] *= 0.5
    return sine, cosine


def initial_coefficients(profiles: Profiles, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Sine coefficients of r̄ and cosine coefficients of p̄, j = 0..n_modes.

    The composite rule starts with ``n_modes`` panels and doubles until two
    successive estimates agree to 1e−10.
    """
    panels = max(n_modes, 16)
    previous = _coefficients(profiles, n_modes, panels)
    change = np.inf
    for _ in range(MAX_DOUBLINGS):
        panels *= 2
        current = _coefficients(profiles, n_modes, panels)
        change = max(
            float(np.max(np.abs(current[0] - previous[0]))),
            float(np.max(np.abs(current[1] - previous[1]))),
        )
        if change < QUADRATURE_TOL:
            return current
        previous = current
    raise QuadratureError(
        f"Initial coefficients of {profiles.name!r} did not converge to "
        f"{QUADRATURE_TOL:g} within {panels} panels (last change {change:.3e})"
    )


@dataclass(frozen=True)
class MacroSolution:
    """Exact spectral solution; evaluate at any (y, t)."""

    sine0: np.ndarray
    cosine0: np.ndarray
    mean_mass: float
    slaving: ProfileFn
    flavor: StateFlavor = StateFlavor.CLASSICAL

    @property
    def n_modes(self) -> int:
        return int(self.sine0.size - 1)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.n_modes + 1) * np.pi / np.sqrt(self.mean_mass)

    def coefficients(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        phase = self.frequencies * t
        c, s = np.cos(phase), np.sin(phase)
        root = np.sqrt(self.mean_mass)
        sine = self.sine0 * c - self.cosine0 * s / root
        cosine = self.cosine0 * c + root * self.sine0 * s
        sine[0] = 0.0
        return sine, cosine

    def evaluate(
        self, y: np.ndarray, t: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = np.asarray(y, dtype=np.float64)
        sine, cosine = self.coefficients(t)
        angle = np.pi * np.arange(self.n_modes + 1)[None, :] * y[:, None]
        fr = np.sin(angle) @ sine
        fp = np.cos(angle) @ cosine
        fr[(y == 0.0) | (y == 1.0)] = 0.0
        fe = fp**2 / (2.0 * self.mean_mass) + 0.5 * fr**2 + self.slaving(y)
        return fr, fp, fe

    def fields(self, t: float, grid_points: int = 513) -> MacroFields:
        grid = np.linspace(0.0, 1.0, grid_points)
        fr, fp, fe = self.evaluate(grid, t)
        sine, cosine = self.coefficients(t)
        return MacroFields(
            t=t,
            grid=grid,
            fr=fr,
            fp=fp,
            fe=fe,
            sine_coeffs=sine,
            cosine_coeffs=cosine,
            mean_mass=self.mean_mass,
            slaving_const=np.asarray(self.slaving(grid), dtype=np.float64),
        )

    def integral(self, f: ProfileFn, z: str, t: float, panels: int = 64) -> float:
        """∫₀¹ f(y) 𝔷(y, t) dy for z ∈ {r, p, e}."""
        nodes, weights = composite_rule(panels, QUADRATURE_ORDER)
        fr, fp, fe = self.evaluate(nodes, t)
        values = {"r": fr, "p": fp, "e": fe}[z]
        return float(np.dot(weights, np.asarray(f(nodes)) * values))

    def momentum(self, t: float) -> float:
        """∫𝔭 dy, which equals the j = 0 cosine coefficient."""
        return float(self.coefficients(t)[1][0])


def macro_solution(
    profiles: Profiles,
    mean_mass: float,
    n_modes: int = 128,
    flavor: StateFlavor = StateFlavor.CLASSICAL,
    b_bar: ProfileFn | None = None,
) -> MacroSolution:
    if n_modes < MIN_MODES:
        raise ValueError(f"n_modes must be at least {MIN_MODES}, got {n_modes}")
    if flavor is StateFlavor.QUANTUM:
        if b_bar is None:
            raise ValueError("The quantum macroscopic solve needs the thermal profile b̄")
        slaving = b_bar
    else:

        def slaving(y: np.ndarray) -> np.ndarray:
            return 1.0 / np.asarray(profiles.beta(y), dtype=np.float64)

    sine, cosine = initial_coefficients(profiles, n_modes)
    logger.debug(
        "Macro solution for %s: %d modes, m̄=%.6g, flavor=%s",
        profiles.name,
        n_modes,
        mean_mass,
        flavor.value,
    )
    return MacroSolution(sine, cosine, mean_mass, slaving, flavor)


def solve_macro(
    profiles: Profiles,
    mean_mass: float,
    t: float,
    n_modes: int = 128,
    flavor: StateFlavor = StateFlavor.CLASSICAL,
    b_bar: ProfileFn | None = None,
    grid_points: int = 513,
) -> MacroFields:
    """Fields on a uniform grid of ``grid_points`` points at time ``t``."""
    solution = macro_solution(profiles, mean_mass, n_modes, flavor, b_bar)
    return solution.fields(t, grid_points)


def standing_wave(
    r_amplitude: float, p_amplitude: float, mean_mass: float, y: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form (𝔯, 𝔭) for r̄ = a sin(πy), p̄ = b cos(πy)."""
    y = np.asarray(y, dtype=np.float64)
    root = np.sqrt(mean_mass)
    phase = np.pi * t / root
    a = r_amplitude * np.cos(phase) - p_amplitude * np.sin(phase) / root
    b = p_amplitude * np.cos(phase) + root * r_amplitude * np.sin(phase)
    return a * np.sin(np.pi * y), b * np.cos(np.pi * y)


def _spectral_derivatives(fields: MacroFields) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(fields.n_modes + 1)
    angle = np.pi * j[None, :] * fields.grid[:, None]
    dr = np.cos(angle) @ (np.pi * j * fields.sine_coeffs)
    dp = -np.sin(angle) @ (np.pi * j * fields.cosine_coeffs)
    return dr, dp


def _fd_derivatives(fields: MacroFields) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.gradient(fields.fr, fields.grid, edge_order=2),
        np.gradient(fields.fp, fields.grid, edge_order=2),
    )


def pde_residuals(
    first: MacroFields, second: MacroFields, derivative: str = "spectral"
) -> tuple[float, float, float]:
    """Max-norm residuals of the three equations between two snapshots.

    Time derivatives are (F₂ − F₁)/δ; space derivatives are averaged over both
    snapshots, so the check is centred at the midpoint.
    """
    delta = second.t - first.t
    if delta <= 0:
        raise ValueError("The second snapshot must be later than the first")
    if derivative == "spectral":
        deriv = _spectral_derivatives
    elif derivative in ("finite-difference", "fd"):
        deriv = _fd_derivatives
    else:
        raise ValueError(f"Unknown derivative scheme {derivative!r}")
    m = first.mean_mass
    dr1, dp1 = deriv(first)
    dr2, dp2 = deriv(second)
    flux1 = first.fr * dp1 + first.fp * dr1
    flux2 = second.fr * dp2 + second.fp * dr2
    res_r = (second.fr - first.fr) / delta - 0.5 * (dp1 + dp2) / m
    res_p = (second.fp - first.fp) / delta - 0.5 * (dr1 + dr2)
    res_e = (second.fe - first.fe) / delta - 0.5 * (flux1 + flux2) / m
    return (
        float(np.max(np.abs(res_r))),
        float(np.max(np.abs(res_p))),
        float(np.max(np.abs(res_e))),
    )


__all__ = [
    "MacroSolution",
    "QuadratureError",
    "initial_coefficients",
    "macro_solution",
    "pde_residuals",
    "solve_macro",
    "standing_wave",
]
