"""Macroscopic profiles and test functions.

A :class:`Profiles` bundles the temperature profile β(y), the momentum
profile p̄(y) and the elongation profile r̄(y) on [0, 1]. Profiles are only
built from named presets; arbitrary data enters through the ``tabulated``
preset (linear interpolation on at least 128 points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping

import numpy as np

from chainhydro.domain.analytics.quadrature import integrate

from .chain import ChainModelError

ProfileFn = Callable[[np.ndarray], np.ndarray]

_CHECK_GRID = np.linspace(0.0, 1.0, 1025)
_BOUNDARY_TOL = 1e-12
_MEAN_ZERO_TOL = 1e-10
MIN_TABLE_POINTS = 128


class ProfilePreset(str, Enum):
    """Named profile families."""

    EQUILIBRIUM = "equilibrium"
    COSINE_MOMENTUM = "cosine-momentum"
    SINE_ELONGATION = "sine-elongation"
    LINEAR_TEMPERATURE = "linear-temperature"
    GAUSSIAN_BUMP = "gaussian-bump"
    WAVE = "wave"
    TABULATED = "tabulated"

    @classmethod
    def from_string(cls, value: str) -> "ProfilePreset":
        normalized = value.lower().strip().replace("_", "-")
        if normalized == "constant":
            return cls.EQUILIBRIUM
        for preset in cls:
            if preset.value == normalized:
                return preset
        raise ChainModelError(f"Unknown profile preset: {value!r}")


def _constant(value: float) -> ProfileFn:
    def fn(y: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(y, dtype=np.float64), value)

    return fn


def _cosine(amplitude: float) -> ProfileFn:
    def fn(y: np.ndarray) -> np.ndarray:
        return amplitude * np.cos(np.pi * np.asarray(y, dtype=np.float64))

    return fn


def _sine(amplitude: float) -> ProfileFn:
    def fn(y: np.ndarray) -> np.ndarray:
        return amplitude * np.sin(np.pi * np.asarray(y, dtype=np.float64))

    return fn


def _linear(offset: float, slope: float) -> ProfileFn:
    def fn(y: np.ndarray) -> np.ndarray:
        return offset + slope * np.asarray(y, dtype=np.float64)

    return fn


@dataclass(frozen=True)
class Profiles:
    """Temperature, momentum and elongation profiles on [0, 1]."""

    name: str
    beta: ProfileFn
    p_bar: ProfileFn
    r_bar: ProfileFn
    params: Mapping[str, Any] = field(default_factory=dict)
    breakpoints: tuple[float, ...] = ()
    beta_minus: float = field(init=False)
    beta_plus: float = field(init=False)

    def __post_init__(self) -> None:
        grid = np.union1d(_CHECK_GRID, np.asarray(self.breakpoints, dtype=np.float64))
        beta = np.asarray(self.beta(grid), dtype=np.float64)
        if not np.all(np.isfinite(beta)) or np.any(beta <= 0.0):
            raise ChainModelError(f"Profile {self.name!r}: beta must be positive and finite")
        r_ends = np.asarray(self.r_bar(np.array([0.0, 1.0])), dtype=np.float64)
        if np.any(np.abs(r_ends) > _BOUNDARY_TOL):
            raise ChainModelError(
                f"Profile {self.name!r}: r_bar must vanish at y=0 and y=1, got {r_ends}"
            )
        for label, fn in (("p_bar", self.p_bar), ("r_bar", self.r_bar)):
            if not np.all(np.isfinite(fn(grid))):
                raise ChainModelError(f"Profile {self.name!r}: {label} is not finite")
        object.__setattr__(self, "beta_minus", float(beta.min()))
        object.__setattr__(self, "beta_plus", float(beta.max()))

    # -- site sampling -----------------------------------------------------

    def beta_sites(self, n: int) -> np.ndarray:
        """β(x/n) for x = 1..n."""
        return np.asarray(self.beta(np.arange(1, n + 1) / n), dtype=np.float64)

    def p_bar_sites(self, n: int) -> np.ndarray:
        """p̄(x/n) for x = 1..n."""
        return np.asarray(self.p_bar(np.arange(1, n + 1) / n), dtype=np.float64)

    def r_bar_sites(self, n: int) -> np.ndarray:
        """r̄(x/n) for x = 1..n-1."""
        return np.asarray(self.r_bar(np.arange(1, n) / n), dtype=np.float64)

    # -- integrals ---------------------------------------------------------

    def momentum_integral(self) -> float:
        return integrate(self.p_bar, panels=128, breakpoints=self.breakpoints)

    def require_zero_momentum(self) -> None:
        """Quantum states need ∫p̄ = 0 (total momentum vanishes identically)."""
        total = self.momentum_integral()
        if abs(total) > _MEAN_ZERO_TOL:
            raise ChainModelError(
                f"Profile {self.name!r}: quantum use requires zero mean momentum, "
                f"got {total:.3e}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "preset": self.name,
            "params": dict(self.params),
            "beta_minus": self.beta_minus,
            "beta_plus": self.beta_plus,
        }


def _gaussian(center: float, width: float) -> ProfileFn:
    return lambda y: np.exp(-0.5 * ((np.asarray(y, dtype=np.float64) - center) / width) ** 2)


def _gaussian_mean(center: float, width: float) -> float:
    s = width * math.sqrt(2.0)
    return width * math.sqrt(math.pi / 2.0) * (math.erf((1.0 - center) / s) + math.erf(center / s))


def _tabulated(params: Mapping[str, Any]) -> Profiles:
    y = np.asarray(params.get("y", ()), dtype=np.float64)
    if y.size < MIN_TABLE_POINTS:
        raise ChainModelError(
            f"Tabulated profile needs at least {MIN_TABLE_POINTS} points, got {y.size}"
        )
    if y[0] != 0.0 or y[-1] != 1.0 or np.any(np.diff(y) <= 0):
        raise ChainModelError("Tabulated grid must increase strictly from 0 to 1")

    def column(key: str, default: float) -> ProfileFn:
        values = np.asarray(params.get(key, np.full_like(y, default)), dtype=np.float64)
        if values.shape != y.shape:
            raise ChainModelError(f"Tabulated column {key!r} does not match the grid")
        return lambda z: np.interp(np.asarray(z, dtype=np.float64), y, values)

    return Profiles(
        name=ProfilePreset.TABULATED.value,
        beta=column("beta", 1.0),
        p_bar=column("p_bar", 0.0),
        r_bar=column("r_bar", 0.0),
        params={"points": int(y.size)},
        breakpoints=tuple(float(v) for v in y[1:-1]),
    )


def make_profiles(preset: str | ProfilePreset, params: Mapping[str, Any] | None = None) -> Profiles:
    """Build a :class:`Profiles` from a named preset and its parameters."""
    kind = preset if isinstance(preset, ProfilePreset) else ProfilePreset.from_string(preset)
    params = dict(params or {})
    if kind is ProfilePreset.TABULATED:
        return _tabulated(params)

    beta0 = float(params.get("beta", 1.0))
    zero = _constant(0.0)
    beta: ProfileFn = _constant(beta0)
    p_bar: ProfileFn = zero
    r_bar: ProfileFn = zero

    if kind is ProfilePreset.COSINE_MOMENTUM:
        a = float(params.get("amplitude", 1.0))
        p_bar = _cosine(a)
    elif kind is ProfilePreset.SINE_ELONGATION:
        a = float(params.get("amplitude", 1.0))
        r_bar = _sine(a)
    elif kind is ProfilePreset.LINEAR_TEMPERATURE:
        slope = float(params.get("slope", 1.0))
        beta = _linear(beta0, slope)
    elif kind is ProfilePreset.GAUSSIAN_BUMP:
        a = float(params.get("amplitude", 0.5))
        pa = float(params.get("momentum_amplitude", 0.0))
        center = float(params.get("center", 0.5))
        width = float(params.get("width", 0.1))
        if width <= 0:
            raise ChainModelError("gaussian-bump width must be positive")
        g = _gaussian(center, width)
        g0, g1 = float(g(np.array(0.0))), float(g(np.array(1.0)))
        g_mean = _gaussian_mean(center, width)

        def bump_r(y: np.ndarray) -> np.ndarray:
            y = np.asarray(y, dtype=np.float64)
            # subtract the chord so both ends are pinned
            return a * (g(y) - (1.0 - y) * g0 - y * g1)

        def bump_p(y: np.ndarray) -> np.ndarray:
            return pa * (g(y) - g_mean)

        r_bar, p_bar = bump_r, bump_p
    elif kind is ProfilePreset.WAVE:
        pa = float(params.get("p_amplitude", 0.3))
        ra = float(params.get("r_amplitude", 0.2))
        slope = float(params.get("beta_slope", 0.0))
        p_bar = _cosine(pa)
        r_bar = _sine(ra)
        if slope:
            beta = _linear(beta0, slope)

    return Profiles(name=kind.value, beta=beta, p_bar=p_bar, r_bar=r_bar, params=params)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A continuous test function f on [0, 1], identified by name."""

    __test__ = False  # keep pytest from collecting the class

    name: str
    fn: ProfileFn

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(y, dtype=np.float64)), dtype=np.float64)

    def on_sites(self, count: int, n: int) -> np.ndarray:
        """(f(x/n)) for x = 1..count."""
        return self(np.arange(1, count + 1) / n)


def _bump(y: np.ndarray) -> np.ndarray:
    u = 2.0 * y - 1.0
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


_TEST_FUNCTIONS: dict[str, ProfileFn] = {
    "constant": lambda y: np.ones_like(y),
    "sine": lambda y: np.sin(np.pi * y),
    "cosine": lambda y: np.cos(np.pi * y),
    "bump": _bump,
}


def get_test_function(name: str) -> TestFunction:
    """Look up a test-function preset by name."""
    key = name.lower().strip()
    if key in ("sin", "sin(pi y)"):
        key = "sine"
    if key not in _TEST_FUNCTIONS:
        raise ChainModelError(
            f"Unknown test function {name!r}; expected one of {sorted(_TEST_FUNCTIONS)}"
        )
    return TestFunction(name=key, fn=_TEST_FUNCTIONS[key])


__all__ = [
    "MIN_TABLE_POINTS",
    "ProfilePreset",
    "Profiles",
    "TestFunction",
    "make_profiles",
    "get_test_function",
]
