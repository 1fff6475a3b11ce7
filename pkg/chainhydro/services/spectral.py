"""Normal modes of the chain.

Diagonalizes A_p with the tridiagonal adapter, snaps the kernel mode to its
closed form √m/√Σm, derives the r-basis φᵏ_r = ∇₊M^{-1/2}φᵏ/ωₖ, restored to
exact orthonormality by its polar factor, and maps configurations to and from
mode coordinates.
"""

from __future__ import annotations

import numpy as np

from chainhydro.domain.models.chain import DisorderedChain, TridiagSym
from chainhydro.domain.models.spectral import SpectralData
from chainhydro.domain.models.state import StateError
from chainhydro.infrastructure.linalg import SpectralError, eig_sym_tridiag, nearest_orthonormal
from chainhydro.infrastructure.linalg.tridiagonal import degenerate_modes
from chainhydro.infrastructure.observability import get_logger
from chainhydro.infrastructure.persistence.spectral_cache import SpectralCache

from .chain_model import build_Ap, build_Ar

logger = get_logger(__name__)

R_BASIS_ORTHO_TOL = 1e-10
R_BASIS_RESIDUAL_TOL = 1e-8


def grad_plus(v: np.ndarray) -> np.ndarray:
    """(∇₊v)_x = v_{x+1} − v_x along the first axis."""
    return v[1:] - v[:-1]


def grad_minus(r: np.ndarray) -> np.ndarray:
    """(∇₋r)_x = r_x − r_{x−1} for x = 1..n, with r_0 = r_n = 0."""
    pad = [(1, 1)] + [(0, 0)] * (r.ndim - 1)
    padded = np.pad(r, pad)
    return padded[1:] - padded[:-1]


def clean_chain_eigenvalues(n: int, mass: float) -> np.ndarray:
    """ωₖ² = (2 − 2cos(kπ/n))/m for the equal-mass chain."""
    k = np.arange(n)
    return (2.0 - 2.0 * np.cos(k * np.pi / n)) / mass


def _check_r_basis(a_r: TridiagSym, phi_r: np.ndarray, eigenvalues: np.ndarray) -> None:
    gram = phi_r.T @ phi_r
    ortho = float(np.max(np.abs(gram - np.eye(phi_r.shape[1]))))
    if ortho >= R_BASIS_ORTHO_TOL:
        raise SpectralError(f"r-basis not orthonormal (max deviation {ortho:.3e})")
    residual = a_r.matvec(phi_r) - phi_r * eigenvalues[None, :]
    scale = max(a_r.gershgorin_bound(), 1.0)
    relative = np.linalg.norm(residual, axis=0) / scale
    worst = int(np.argmax(relative))
    if relative[worst] >= R_BASIS_RESIDUAL_TOL:
        raise SpectralError(
            f"r-basis eigen-residual {relative[worst]:.3e} at mode {worst + 1}",
            mode=worst + 1,
        )


def build_spectral(chain: DisorderedChain, validate: bool = True) -> SpectralData:
    """Frequencies and both mode bases of ``chain``."""
    label = f"A_p(n={chain.n}, seed={chain.seed})"
    eig = eig_sym_tridiag(build_Ap(chain), label=label, validate=validate)
    values = eig.eigenvalues.copy()
    phi_p = eig.eigenvectors.copy()

    values[0] = 0.0
    phi_p[:, 0] = chain.ground_state()
    if values[1] <= 0.0:
        raise SpectralError(f"{label}: second eigenvalue {values[1]:.3e} is not positive", mode=1)

    omega = np.sqrt(values)
    # Dividing by small ω amplifies eigenvector rounding; the polar factor
    # restores orthonormality without changing mode order or signs.
    derived = grad_plus(phi_p[:, 1:] / chain.sqrt_masses[:, None]) / omega[None, 1:]
    phi_r = nearest_orthonormal(derived)
    if validate:
        _check_r_basis(build_Ar(chain), phi_r, values[1:])
    return SpectralData(
        chain=chain,
        omega=omega,
        phi_p=phi_p,
        phi_r=phi_r,
        degenerate_modes=degenerate_modes(omega**2),
    )


def mode_transform(
    r: np.ndarray, p: np.ndarray, spec: SpectralData
) -> tuple[np.ndarray, np.ndarray]:
    """(r, p) ↦ (r̂, p̂) with p̂ₖ = ⟨φᵏ, M^{-1/2}p⟩ and r̂ₖ = ⟨φᵏ_r, r⟩, r̂₀ = 0.

    Works on vectors and on stacks of column vectors.
    """
    r = np.asarray(r)
    p = np.asarray(p)
    n = spec.n
    if r.shape[0] != n - 1 or p.shape[0] != n:
        raise StateError(
            f"Expected r of length {n - 1} and p of length {n}, got {r.shape[0]} and {p.shape[0]}"
        )
    p_hat = spec.phi_p_tilde.T @ p
    r_hat = np.zeros_like(p_hat, dtype=np.result_type(r, np.float64))
    r_hat[1:] = spec.phi_r.T @ r
    return r_hat, p_hat


def inverse_mode_transform(
    r_hat: np.ndarray, p_hat: np.ndarray, spec: SpectralData
) -> tuple[np.ndarray, np.ndarray]:
    """(r̂, p̂) ↦ (r, p); r̂₀ is ignored."""
    r_hat = np.asarray(r_hat)
    p_hat = np.asarray(p_hat)
    if r_hat.shape[0] != spec.n or p_hat.shape[0] != spec.n:
        raise StateError(f"Expected {spec.n} mode coefficients")
    p = spec.momentum_basis @ p_hat
    r = spec.phi_r @ r_hat[1:]
    return r, p


class SpectralService:
    """Spectra with an optional on-disk cache."""

    def __init__(self, cache: SpectralCache | None = None, validate: bool = True) -> None:
        self._cache = cache
        self._validate = validate
        self._logger = get_logger(__name__)

    def spectrum(self, chain: DisorderedChain) -> SpectralData:
        if self._cache is not None:
            cached = self._cache.load(chain)
            if cached is not None:
                return cached
        spectral = build_spectral(chain, validate=self._validate)
        if spectral.degenerate_modes:
            self._logger.debug(
                "Chain n=%d seed=%d flagged %d near-degenerate modes",
                chain.n,
                chain.seed,
                len(spectral.degenerate_modes),
            )
        if self._cache is not None:
            self._cache.store(spectral)
        return spectral


__all__ = [
    "SpectralService",
    "eig_sym_tridiag",
    "build_spectral",
    "clean_chain_eigenvalues",
    "grad_minus",
    "grad_plus",
    "inverse_mode_transform",
    "mode_transform",
]
