"""Normal-mode data of a chain and of its thermal (β-weighted) operator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import DisorderedChain, TridiagSym


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(array, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpectralData:
    """Frequencies and the two orthonormal mode bases of a chain.

    ``phi_p[:, k]`` is φᵏ (eigenvector of A_p for ωₖ²). ``phi_r[:, k - 1]`` is
    the r-mode φᵏ_r for k = 1..n-1; the r-basis has no zero mode.
    """

    chain: DisorderedChain
    omega: np.ndarray
    phi_p: np.ndarray
    phi_r: np.ndarray
    degenerate_modes: tuple[int, ...] = ()
    phi_p_tilde: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", _frozen(self.omega))
        object.__setattr__(self, "phi_p", _frozen(self.phi_p))
        object.__setattr__(self, "phi_r", _frozen(self.phi_r))
        tilde = self.phi_p / self.chain.sqrt_masses[:, None]
        object.__setattr__(self, "phi_p_tilde", _frozen(tilde))

    @property
    def n(self) -> int:
        return self.chain.n

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.omega**2

    @property
    def phi_r_padded(self) -> np.ndarray:
        """(n-1)×n r-basis with an all-zero column for the k = 0 slot."""
        padded = np.zeros((self.n - 1, self.n))
        padded[:, 1:] = self.phi_r
        return padded

    @property
    def momentum_basis(self) -> np.ndarray:
        """Columns M^{1/2}φᵏ: the site-space momentum profile of mode k."""
        return self.phi_p * self.chain.sqrt_masses[:, None]

    def high_modes(self, exponent: float) -> np.ndarray:
        """Mode indices k with n^{1-exponent} < k <= n-1."""
        return high_mode_indices(self.n, exponent)


def high_mode_indices(n: int, exponent: float) -> np.ndarray:
    """Indices of the high-mode window ]n^{1-exponent}, n-1]."""
    cutoff = float(n) ** (1.0 - exponent)
    k = np.arange(n)
    return k[k > cutoff]


def low_mode_indices(n: int, exponent: float) -> np.ndarray:
    """Indices of the low-mode window [0, n^{1-exponent}]."""
    cutoff = float(n) ** (1.0 - exponent)
    k = np.arange(n)
    return k[k <= cutoff]


@dataclass(frozen=True)
class ThermalSpectral:
    """Diagonalization of the thermal operator A_p^β.

    ``beta_sites`` are β(x/n) for x = 1..n (the diagonal of β̃) and
    ``beta_bonds`` the first n-1 of them (β°). ``psi_r[:, k - 1]`` is ψ̃ᵏ.
    """

    chain: DisorderedChain
    beta_sites: np.ndarray
    a_p_beta: TridiagSym
    gamma: np.ndarray
    psi: np.ndarray
    psi_r: np.ndarray
    norm: float
    degenerate_modes: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for name in ("beta_sites", "gamma", "psi", "psi_r"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n(self) -> int:
        return self.chain.n

    @property
    def beta_bonds(self) -> np.ndarray:
        return self.beta_sites[:-1]

    @property
    def m_beta_sqrt(self) -> np.ndarray:
        """Diagonal of M_β^{1/2} = (M β̃^{-1})^{1/2}."""
        return np.sqrt(self.chain.masses / self.beta_sites)

    @property
    def beta_plus(self) -> float:
        return float(self.beta_sites.max())

    @property
    def norm_bound_linear(self) -> float:
        """Candidate constant 4 β_plus / m_minus."""
        return 4.0 * self.beta_plus / self.chain.m_minus

    @property
    def norm_bound_square(self) -> float:
        """Candidate constant 4 β_plus² / m_minus (Gershgorin-valid)."""
        return 4.0 * self.beta_plus**2 / self.chain.m_minus

    def norm_report(self) -> dict[str, float | bool]:
        return {
            "norm": self.norm,
            "bound_linear": self.norm_bound_linear,
            "bound_square": self.norm_bound_square,
            "within_linear": self.norm < self.norm_bound_linear,
            "within_square": self.norm <= self.norm_bound_square,
        }


__all__ = [
    "SpectralData",
    "ThermalSpectral",
    "high_mode_indices",
    "low_mode_indices",
]
