"""Gaussian (quasi-free) chain states.

A state is fully described by its means and its ordered two-point blocks

    C_rr[x, y] = ⟨r̃_x r̃_y⟩,  C_pp[x, y] = ⟨p̃_x p̃_y⟩,  C_rp[x, y] = ⟨r̃_x p̃_y⟩,

with r̃ = r - ⟨r⟩ and p̃ = p - ⟨p⟩. Classical blocks are real; quantum blocks
are complex and the ordered product ⟨p̃_y r̃_x⟩ is the complex conjugate of
⟨r̃_x p̃_y⟩.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class StateError(ValueError):
    """Raised when a state is ill-shaped or used with the wrong flavor."""


class StateFlavor(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"

    @classmethod
    def from_string(cls, value: str) -> "StateFlavor":
        normalized = value.lower().strip()
        if normalized in ("classical",):
            return cls.CLASSICAL
        if normalized in ("quantum", "quantum-quasi-free", "quantumquasifree"):
            return cls.QUANTUM
        raise StateError(f"Unknown state flavor: {value!r}")


def _frozen(array: np.ndarray, dtype: type) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GaussianChainState:
    """Means and two-point blocks of a chain state at microscopic ``time``."""

    flavor: StateFlavor
    masses: np.ndarray
    mean_r: np.ndarray
    mean_p: np.ndarray
    c_rr: np.ndarray
    c_pp: np.ndarray
    c_rp: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        n = int(np.asarray(self.masses).size)
        expected = {
            "mean_r": (n - 1,),
            "mean_p": (n,),
            "c_rr": (n - 1, n - 1),
            "c_pp": (n, n),
            "c_rp": (n - 1, n),
        }
        for name, shape in expected.items():
            actual = np.shape(getattr(self, name))
            if actual != shape:
                raise StateError(f"{name} has shape {actual}, expected {shape}")
        block_dtype = np.complex128 if self.flavor is StateFlavor.QUANTUM else np.float64
        if self.flavor is StateFlavor.CLASSICAL:
            for name in ("c_rr", "c_pp", "c_rp"):
                if np.iscomplexobj(getattr(self, name)):
                    raise StateError(f"Classical state with complex block {name}")
        object.__setattr__(self, "masses", _frozen(self.masses, np.float64))
        object.__setattr__(self, "mean_r", _frozen(self.mean_r, np.float64))
        object.__setattr__(self, "mean_p", _frozen(self.mean_p, np.float64))
        for name in ("c_rr", "c_pp", "c_rp"):
            object.__setattr__(self, name, _frozen(getattr(self, name), block_dtype))

    @property
    def n(self) -> int:
        return int(self.masses.size)

    @property
    def is_quantum(self) -> bool:
        return self.flavor is StateFlavor.QUANTUM

    @property
    def c_pr(self) -> np.ndarray:
        """⟨p̃_x r̃_y⟩, n×(n-1)."""
        return self.c_rp.conj().T

    def two_point_matrix(self) -> np.ndarray:
        """Ordered two-point matrix of ξ = (r_1..r_{n-1}, p_1..p_n)."""
        return np.block([[self.c_rr, self.c_rp], [self.c_pr, self.c_pp]])

    def padded_mean_r(self) -> np.ndarray:
        """Mean elongation with the r_n = 0 slot appended."""
        return np.append(self.mean_r, 0.0)

    def site_energy_means(self) -> np.ndarray:
        """⟨e_x⟩ = (⟨p_x⟩² + C_pp,xx)/(2 m_x) + (⟨r_x⟩² + C_rr,xx)/2, with r_n = 0."""
        kinetic = (self.mean_p**2 + np.real(np.diag(self.c_pp))) / (2.0 * self.masses)
        potential = np.zeros(self.n)
        potential[:-1] = 0.5 * (self.mean_r**2 + np.real(np.diag(self.c_rr)))
        return kinetic + potential

    def total_momentum(self) -> float:
        return float(self.mean_p.sum())

    def total_energy(self) -> float:
        return float(self.site_energy_means().sum())

    def with_time(
        self,
        time: float,
        mean_r: np.ndarray,
        mean_p: np.ndarray,
        c_rr: np.ndarray,
        c_pp: np.ndarray,
        c_rp: np.ndarray,
    ) -> "GaussianChainState":
        return replace(
            self, time=time, mean_r=mean_r, mean_p=mean_p, c_rr=c_rr, c_pp=c_pp, c_rp=c_rp
        )


@dataclass(frozen=True)
class QuantumCovariance:
    """Two-point functions of the quantum locally Gibbs state.

    ``zero_mode`` is the vector u with u uᵀ the contribution the k = 0 thermal
    mode would add to C_pp. It is excluded from ``c_pp`` (the state lives in
    the centre-of-mass frame, Σp = 0) but kept for clustering diagnostics.
    ``mode_weights[k]`` is (γₖ/2)coth(γₖ/2) for k >= 1 and 0 for k = 0.
    """

    c_pp: np.ndarray
    c_rr: np.ndarray
    c_rp: np.ndarray
    b_profile: np.ndarray
    zero_mode: np.ndarray
    mode_weights: np.ndarray

    def __post_init__(self) -> None:
        n = self.c_pp.shape[0]
        if self.c_rr.shape != (n - 1, n - 1) or self.c_rp.shape != (n - 1, n):
            raise StateError("Inconsistent quantum covariance block shapes")
        for name in ("c_pp", "c_rr", "b_profile", "zero_mode", "mode_weights"):
            object.__setattr__(self, name, _frozen(getattr(self, name), np.float64))
        object.__setattr__(self, "c_rp", _frozen(self.c_rp, np.complex128))

    @property
    def n(self) -> int:
        return int(self.c_pp.shape[0])

    def pp_kernel(self) -> np.ndarray:
        """C_pp with the zero-mode term restored (the full thermal kernel)."""
        return self.c_pp + np.outer(self.zero_mode, self.zero_mode)


__all__ = [
    "GaussianChainState",
    "QuantumCovariance",
    "StateError",
    "StateFlavor",
]
