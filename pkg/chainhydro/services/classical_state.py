"""Classical local Gibbs state: exact moments and a Gaussian sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from chainhydro.domain.models.chain import DisorderedChain
from chainhydro.domain.models.profiles import Profiles
from chainhydro.domain.models.spectral import SpectralData
from chainhydro.domain.models.state import GaussianChainState, StateError, StateFlavor
from chainhydro.infrastructure.observability import get_logger

logger = get_logger(__name__)


def local_gibbs_moments(chain: DisorderedChain, profiles: Profiles) -> GaussianChainState:
    """Means and covariance blocks of the classical local Gibbs state at t = 0.

    ⟨r_x⟩ = r̄(x/n), ⟨p_x⟩ = p̄(x/n)·m_x/m̄, C_rr = diag(1/β), C_pp = diag(m/β),
    C_rp = 0.
    """
    n = chain.n
    beta = profiles.beta_sites(n)
    return GaussianChainState(
        flavor=StateFlavor.CLASSICAL,
        masses=chain.masses,
        mean_r=profiles.r_bar_sites(n),
        mean_p=profiles.p_bar_sites(n) * chain.masses / chain.mean_mass,
        c_rr=np.diag(1.0 / beta[:-1]),
        c_pp=np.diag(chain.masses / beta),
        c_rp=np.zeros((n - 1, n)),
    )


def replica_generator(experiment_seed: int, chain_seed: int, replica: int = 0) -> Generator:
    """Independent stream for one (experiment, chain, replica) triple."""
    sequence = SeedSequence(experiment_seed, spawn_key=(chain_seed, replica))
    return Generator(Philox(sequence))


def _is_diagonal(block: np.ndarray) -> bool:
    return bool(np.count_nonzero(block - np.diag(np.diag(block))) == 0)


def sample_state(
    state: GaussianChainState, rng: Generator, size: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (r, p) from a classical state with diagonal covariance.

    With ``size`` the result holds one replica per column: shapes (n−1, size)
    and (n, size).
    """
    if state.flavor is not StateFlavor.CLASSICAL:
        raise StateError("Quantum quasi-free states cannot be sampled")
    if not (
        _is_diagonal(state.c_rr)
        and _is_diagonal(state.c_pp)
        and np.count_nonzero(state.c_rp) == 0
    ):
        raise StateError("Sampling needs diagonal covariance blocks (t = 0 states)")

    shape_r: tuple[int, ...] = (state.n - 1,)
    shape_p: tuple[int, ...] = (state.n,)
    if size is not None:
        shape_r, shape_p = shape_r + (size,), shape_p + (size,)
    std_r = np.sqrt(np.diag(state.c_rr))
    std_p = np.sqrt(np.diag(state.c_pp))
    if size is not None:
        r = state.mean_r[:, None] + std_r[:, None] * rng.standard_normal(shape_r)
        p = state.mean_p[:, None] + std_p[:, None] * rng.standard_normal(shape_p)
    else:
        r = state.mean_r + std_r * rng.standard_normal(shape_r)
        p = state.mean_p + std_p * rng.standard_normal(shape_p)
    return r, p


def mode_space_initial_covariance(
    state: GaussianChainState, spec: SpectralData
) -> tuple[np.ndarray, np.ndarray]:
    """(⟨p̂ₖp̂ₖ′⟩, ⟨r̂ₖr̂ₖ′⟩) as n×n matrices; row and column 0 of the r part are 0."""
    tilde = spec.phi_p_tilde
    pp = tilde.T @ state.c_pp @ tilde
    rr = np.zeros((state.n, state.n), dtype=state.c_rr.dtype)
    rr[1:, 1:] = spec.phi_r.T @ state.c_rr @ spec.phi_r
    return pp, rr


@dataclass(frozen=True)
class InitialModeBound:
    max_pp: float
    max_rr: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.max_pp <= self.bound * (1 + 1e-12) and self.max_rr <= self.bound * (
            1 + 1e-12
        )


def initial_mode_bound(
    state: GaussianChainState, spec: SpectralData, beta_minus: float
) -> InitialModeBound:
    """Largest ⟨p̂ₖ²⟩ and ⟨r̂ₖ²⟩ against 1/β_minus."""
    pp, rr = mode_space_initial_covariance(state, spec)
    return InitialModeBound(
        max_pp=float(np.max(np.real(np.diag(pp)))),
        max_rr=float(np.max(np.real(np.diag(rr)))),
        bound=1.0 / beta_minus,
    )


__all__ = [
    "InitialModeBound",
    "initial_mode_bound",
    "local_gibbs_moments",
    "mode_space_initial_covariance",
    "replica_generator",
    "sample_state",
]
