"""Chain domain models: mass laws, sampled chains and tridiagonal operators."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class ChainModelError(ValueError):
    """Raised when a chain, mass law or profile violates its invariants."""


class MassLawKind(str, Enum):
    """Supported i.i.d. mass distributions."""

    UNIFORM = "uniform"
    SCALED_BETA = "scaled-beta"

    @classmethod
    def from_string(cls, value: str | None) -> "MassLawKind":
        """Parse a law name; unknown names are an error, not a default."""
        if not value:
            return cls.SCALED_BETA
        normalized = value.lower().strip().replace("_", "-")
        if normalized in ("uniform", "uniform-interval", "uniforminterval"):
            return cls.UNIFORM
        if normalized in ("scaled-beta", "scaledbeta", "beta"):
            return cls.SCALED_BETA
        raise ChainModelError(f"Unknown mass law: {value!r}")


@dataclass(frozen=True)
class MassLaw:
    """Mass law with compact support ``[lower, upper]``.

    For :attr:`MassLawKind.SCALED_BETA` the masses are ``lower + (upper -
    lower) * B`` with ``B ~ Beta(a, b)``; ``a`` and ``b`` are ignored for the
    uniform law.
    """

    kind: MassLawKind = MassLawKind.SCALED_BETA
    lower: float = 1.0
    upper: float = 2.0
    a: float = 2.0
    b: float = 2.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ChainModelError("Mass law support must be finite")
        if self.lower <= 0:
            raise ChainModelError(f"Mass law lower bound must be > 0, got {self.lower}")
        if self.upper < self.lower:
            raise ChainModelError(
                f"Mass law upper bound {self.upper} below lower bound {self.lower}"
            )
        if self.kind is MassLawKind.SCALED_BETA and (self.a <= 0 or self.b <= 0):
            raise ChainModelError("Beta shape parameters must be positive")

    @classmethod
    def uniform(cls, lower: float, upper: float) -> "MassLaw":
        return cls(kind=MassLawKind.UNIFORM, lower=lower, upper=upper)

    @classmethod
    def point(cls, mass: float) -> "MassLaw":
        """Degenerate law: every mass equals ``mass`` (the clean chain)."""
        return cls(kind=MassLawKind.UNIFORM, lower=mass, upper=mass)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def mean(self) -> float:
        """Analytic mean of the law (the m̄ of the macroscopic equations)."""
        if self.kind is MassLawKind.UNIFORM:
            return 0.5 * (self.lower + self.upper)
        return self.lower + self.width * self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        if self.kind is MassLawKind.UNIFORM:
            return self.width**2 / 12.0
        s = self.a + self.b
        return self.width**2 * self.a * self.b / (s * s * (s + 1.0))

    @property
    def is_degenerate(self) -> bool:
        return self.width == 0.0

    def describe(self) -> str:
        """Single-line description used in file headers and cache keys."""
        return f"{self.kind.value} {self.lower!r} {self.upper!r} {self.a!r} {self.b!r}"

    def to_dict(self) -> dict[str, float | str]:
        return {
            "kind": self.kind.value,
            "lower": self.lower,
            "upper": self.upper,
            "a": self.a,
            "b": self.b,
        }


@dataclass(frozen=True)
class DisorderedChain:
    """A sampled chain of ``n`` particles.

    ``mean_mass`` is the analytic law mean, never the empirical one.
    """

    n: int
    masses: np.ndarray
    mean_mass: float
    seed: int
    mass_law: MassLaw = field(default_factory=MassLaw)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ChainModelError(f"A chain needs n >= 2 particles, got {self.n}")
        masses = np.array(self.masses, dtype=np.float64)
        if masses.shape != (self.n,):
            raise ChainModelError(
                f"Expected {self.n} masses, got array of shape {masses.shape}"
            )
        if np.any(masses < self.mass_law.lower) or np.any(masses > self.mass_law.upper):
            raise ChainModelError("Mass outside the declared support of the law")
        masses.setflags(write=False)
        object.__setattr__(self, "masses", masses)

    @property
    def m_minus(self) -> float:
        return self.mass_law.lower

    @property
    def sqrt_masses(self) -> np.ndarray:
        return np.sqrt(self.masses)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def ground_state(self) -> np.ndarray:
        """Normalized kernel vector of A_p, ``sqrt(m_x) / sqrt(sum m)``."""
        return self.sqrt_masses / np.sqrt(self.total_mass)

    def sites(self) -> np.ndarray:
        """Macroscopic positions ``x/n`` of the particles, x = 1..n."""
        return np.arange(1, self.n + 1, dtype=np.float64) / self.n

    def bond_sites(self) -> np.ndarray:
        """Macroscopic positions of the n-1 elongation variables."""
        return np.arange(1, self.n, dtype=np.float64) / self.n


@dataclass(frozen=True)
class TridiagSym:
    """Symmetric tridiagonal matrix stored as its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        diag = np.array(self.diag, dtype=np.float64)
        offdiag = np.array(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or offdiag.ndim != 1 or offdiag.size != max(diag.size - 1, 0):
            raise ChainModelError(
                f"Inconsistent tridiagonal shapes: diag {diag.shape}, offdiag {offdiag.shape}"
            )
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self) -> int:
        return int(self.diag.size)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply the matrix to a vector or to the columns of a matrix."""
        v = np.asarray(v)
        out = self.diag.reshape((-1,) + (1,) * (v.ndim - 1)) * v
        off = self.offdiag.reshape((-1,) + (1,) * (v.ndim - 1))
        out[:-1] += off * v[1:]
        out[1:] += off * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense copy, for oracles and small diagnostics only."""
        return (
            np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        )

    def shifted(self, shift: float) -> "TridiagSym":
        return TridiagSym(self.diag - shift, self.offdiag)

    def gershgorin_bound(self) -> float:
        """Upper bound on the spectral radius from Gershgorin discs."""
        radius = np.abs(self.diag).copy()
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(radius.max())


__all__ = [
    "ChainModelError",
    "DisorderedChain",
    "MassLaw",
    "MassLawKind",
    "TridiagSym",
]
