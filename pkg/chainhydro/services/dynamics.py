"""Exact harmonic evolution through the normal-mode rotation.

Every mode k rotates at frequency ωₖ::

    r̂ₖ(τ) = cos(ωₖτ) r̂ₖ + sin(ωₖτ) p̂ₖ
    p̂ₖ(τ) = cos(ωₖτ) p̂ₖ − sin(ωₖτ) r̂ₖ

Samples, means and two-point blocks (real classical or ordered complex
quantum) are all pushed through this map. Callers pass microscopic times; the
``at_macro`` helpers multiply by n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from chainhydro.domain.models.profiles import TestFunction
from chainhydro.domain.models.results import ModeSplit
from chainhydro.domain.models.spectral import SpectralData, high_mode_indices
from chainhydro.domain.models.state import GaussianChainState, StateError
from chainhydro.infrastructure.observability import get_logger

from .spectral import inverse_mode_transform, mode_transform

logger = get_logger(__name__)

FIELDS = ("r", "p", "e")


@dataclass(frozen=True)
class EvolutionMap:
    """Per-mode rotation for microscopic time ``time``."""

    spec: SpectralData
    time: float
    cos: np.ndarray = field(init=False, repr=False)
    sin: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        phase = self.spec.omega * self.time
        cos, sin = np.cos(phase), np.sin(phase)
        cos.setflags(write=False)
        sin.setflags(write=False)
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "sin", sin)

    @classmethod
    def at_macro(cls, spec: SpectralData, t: float) -> "EvolutionMap":
        """Map for macroscopic time t (microscopic time n·t)."""
        return cls(spec, spec.n * t)

    def rotate(self, r_hat: np.ndarray, p_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        shape = (-1,) + (1,) * (np.ndim(r_hat) - 1)
        c = self.cos.reshape(shape)
        s = self.sin.reshape(shape)
        return c * r_hat + s * p_hat, c * p_hat - s * r_hat


def evolve_sample(
    r0: np.ndarray, p0: np.ndarray, emap: EvolutionMap
) -> tuple[np.ndarray, np.ndarray]:
    """(r(τ), p(τ)) for one configuration or a stack of column configurations."""
    r_hat, p_hat = mode_transform(r0, p0, emap.spec)
    r_hat, p_hat = emap.rotate(r_hat, p_hat)
    return inverse_mode_transform(r_hat, p_hat, emap.spec)


def evolve_means(
    state: GaussianChainState, emap: EvolutionMap
) -> tuple[np.ndarray, np.ndarray]:
    return evolve_sample(state.mean_r, state.mean_p, emap)


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[:, None] * b[None, :]


class CovariancePropagator:
    """Mode-space image of a state, reusable across many evolution times.

    The site-space blocks are mapped to mode space once; each requested time
    costs one Hadamard rotation plus the back-transform of the blocks asked
    for.
    """

    def __init__(self, state: GaussianChainState, spec: SpectralData) -> None:
        if state.n != spec.n:
            raise StateError(f"State has n={state.n}, spectrum has n={spec.n}")
        self.state = state
        self.spec = spec
        tilde = spec.phi_p_tilde
        r_basis = spec.phi_r_padded
        self._pp = tilde.T @ state.c_pp @ tilde
        self._rr = r_basis.T @ state.c_rr @ r_basis
        self._rp = r_basis.T @ state.c_rp @ tilde
        self._mean_hat = mode_transform(state.mean_r, state.mean_p, spec)

    @property
    def n(self) -> int:
        return self.spec.n

    def mode_blocks(self, tau: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(⟨r̂r̂⟩, ⟨p̂p̂⟩, ⟨r̂p̂⟩) after microscopic time ``tau``."""
        emap = EvolutionMap(self.spec, tau)
        c, s = emap.cos, emap.sin
        cc, cs, sc, ss = _outer(c, c), _outer(c, s), _outer(s, c), _outer(s, s)
        rr, pp, rp = self._rr, self._pp, self._rp
        pr = rp.conj().T
        rr_t = cc * rr + cs * rp + sc * pr + ss * pp
        pp_t = cc * pp - cs * pr - sc * rp + ss * rr
        rp_t = cc * rp - cs * rr + sc * pp - ss * pr
        return rr_t, pp_t, rp_t

    def means(self, tau: float) -> tuple[np.ndarray, np.ndarray]:
        emap = EvolutionMap(self.spec, tau)
        r_hat, p_hat = emap.rotate(*self._mean_hat)
        return inverse_mode_transform(r_hat, p_hat, self.spec)

    def state_at(self, tau: float) -> GaussianChainState:
        rr, pp, rp = self.mode_blocks(tau)
        v = self.spec.momentum_basis
        r_basis = self.spec.phi_r_padded
        mean_r, mean_p = self.means(tau)
        return self.state.with_time(
            time=self.state.time + tau,
            mean_r=mean_r,
            mean_p=mean_p,
            c_rr=_real_if_classical(self.state, r_basis @ rr @ r_basis.T),
            c_pp=_real_if_classical(self.state, v @ pp @ v.T),
            c_rp=_real_if_classical(self.state, r_basis @ rp @ v.T),
        )

    def state_at_macro(self, t: float) -> GaussianChainState:
        return self.state_at(self.n * t)

    def quadratic_form(self, block: str, weights: np.ndarray, tau: float) -> float:
        """wᵀC_zz(τ)w without forming the site block (z ∈ {r, p})."""
        rr, pp, _ = self.mode_blocks(tau)
        if block == "p":
            projected = self.spec.momentum_basis.T @ weights
            return float(np.real(projected @ pp @ projected))
        if block == "r":
            projected = self.spec.phi_r_padded.T @ weights
            return float(np.real(projected @ rr @ projected))
        raise StateError(f"Unknown block {block!r}")


def _real_if_classical(state: GaussianChainState, block: np.ndarray) -> np.ndarray:
    return block if state.is_quantum else np.real(block)


def evolve_covariance(state: GaussianChainState, emap: EvolutionMap) -> GaussianChainState:
    """State after microscopic time ``emap.time``: means and all blocks."""
    return CovariancePropagator(state, emap.spec).state_at(emap.time)


def site_space_map(emap: EvolutionMap) -> np.ndarray:
    """Matrix L(τ) acting on ξ = (r_1..r_{n−1}, p_1..p_n)."""
    n = emap.spec.n
    r0 = np.hstack([np.eye(n - 1), np.zeros((n - 1, n))])
    p0 = np.hstack([np.zeros((n, n - 1)), np.eye(n)])
    r, p = evolve_sample(r0, p0, emap)
    return np.vstack([r, p])


def symplectic_form(n: int) -> np.ndarray:
    """J with {r_x, p_y} = D_xy, D = ∇₊ as an (n−1)×n matrix."""
    d = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    d[idx, idx] = -1.0
    d[idx, idx + 1] = 1.0
    return np.block([[np.zeros((n - 1, n - 1)), d], [-d.T, np.zeros((n, n))]])


def symplectic_defect(emap: EvolutionMap) -> float:
    """‖L J Lᵀ − J‖_max."""
    lmat = site_space_map(emap)
    j = symplectic_form(emap.spec.n)
    return float(np.max(np.abs(lmat @ j @ lmat.T - j)))


# ---------------------------------------------------------------------------
# Functionals
# ---------------------------------------------------------------------------


def _field_values(z: str, state: GaussianChainState) -> np.ndarray:
    if z == "r":
        return state.mean_r
    if z == "p":
        return state.mean_p
    if z == "e":
        return state.site_energy_means()
    raise StateError(f"Unknown field selector {z!r}; expected one of {FIELDS}")


def empirical_mean_functional(
    f: TestFunction | Callable[[np.ndarray], np.ndarray],
    z: str,
    state: GaussianChainState,
) -> float:
    """(1/n) Σ_x f(x/n) ⟨z_x⟩."""
    values = _field_values(z, state)
    n = state.n
    weights = np.asarray(f(np.arange(1, values.size + 1) / n), dtype=np.float64)
    return float(np.dot(weights, values) / n)


def quad_var(
    f: TestFunction | Callable[[np.ndarray], np.ndarray],
    z: str,
    state: GaussianChainState,
) -> float:
    """(1/n²) fᵀ C_zz f for z ∈ {r, p}."""
    n = state.n
    if z == "r":
        block = state.c_rr
    elif z == "p":
        block = state.c_pp
    else:
        raise StateError(f"quad_var handles r and p, got {z!r}; use quad_var_energy")
    weights = np.asarray(f(np.arange(1, block.shape[0] + 1) / n), dtype=np.float64)
    return max(float(np.real(weights @ block @ weights)) / n**2, 0.0)


def _padded_blocks(state: GaussianChainState) -> dict[tuple[str, str], np.ndarray]:
    n = state.n
    dtype = np.complex128 if state.is_quantum else np.float64
    rr = np.zeros((n, n), dtype=dtype)
    rr[:-1, :-1] = state.c_rr
    rp = np.zeros((n, n), dtype=dtype)
    rp[:-1, :] = state.c_rp
    return {
        ("p", "p"): state.c_pp,
        ("r", "r"): rr,
        ("r", "p"): rp,
        ("p", "r"): rp.conj().T,
    }


def energy_covariance(state: GaussianChainState) -> np.ndarray:
    """Cov(e_x, e_y) by Wick pairing, n×n (complex for quantum states).

    e_x = p_x²/(2m_x) + r_x²/2 with r_n = 0. For a, b ∈ {p_x, r_x} × {p_y, r_y}
    with weights w_p = 1/(2m), w_r = 1/2 and ordered G_ab = ⟨ãb̃⟩::

        Cov(e_x, e_y) = Σ w_a w_b (2 G_ab² + 4 ā b̄ G_ab)

    The 2G² term collects the two crossing pairings of ⟨ãã b̃b̃⟩; the 4āb̄G term
    comes from the linear parts 2āã and 2b̄b̃. Odd pairings vanish.
    """
    weights = {"p": 1.0 / (2.0 * state.masses), "r": np.full(state.n, 0.5)}
    means = {"p": state.mean_p, "r": state.padded_mean_r()}
    cov = np.zeros((state.n, state.n), dtype=np.complex128 if state.is_quantum else np.float64)
    for (a, b), g in _padded_blocks(state).items():
        w = _outer(weights[a], weights[b])
        cov = cov + w * (2.0 * g**2 + 4.0 * _outer(means[a], means[b]) * g)
    return cov


def quad_var_energy(
    f: TestFunction | Callable[[np.ndarray], np.ndarray],
    state: GaussianChainState,
) -> float:
    """𝓔ₙ = (1/n²) Re Σ_{x,y} f(x/n) f(y/n) Cov(e_x, e_y)."""
    n = state.n
    weights = np.asarray(f(np.arange(1, n + 1) / n), dtype=np.float64)
    value = float(np.real(weights @ energy_covariance(state) @ weights)) / n**2
    return max(value, 0.0)


def full_quad_var(fluctuation: float, mean_functional: float, macro_integral: float) -> float:
    """Second moment of the gap: fluctuation part plus the squared mean gap."""
    return fluctuation + (mean_functional - macro_integral) ** 2


def wick_moment(indices: Sequence[int], two_point: np.ndarray) -> complex:
    """Ordered moment ⟨ξ_{i1} ⋯ ξ_{ik}⟩ of a centred quasi-free state.

    ``two_point[i, j]`` is ⟨ξ_i ξ_j⟩. Odd moments vanish; even moments are the
    sum over pairings that keep the order inside each pair.
    """
    if len(indices) == 0:
        return 1.0
    if len(indices) % 2:
        return 0.0
    first, rest = indices[0], list(indices[1:])
    total: complex = 0.0
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1 :]
        total += two_point[first, partner] * wick_moment(remaining, two_point)
    return total


# ---------------------------------------------------------------------------
# Mode splits
# ---------------------------------------------------------------------------


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 0.5:
        raise StateError(f"gamma must lie in (0, 1/2), got {gamma}")


def mode_split_covariance(
    state: GaussianChainState, spec: SpectralData, gamma: float, block: str = "p"
) -> ModeSplit:
    """Low/high/cross parts of C_pp or C_rr for I(γ) = ]n^{1−γ}, n−1]."""
    _check_gamma(gamma)
    n = state.n
    high = high_mode_indices(n, gamma)
    mask = np.zeros(n, dtype=bool)
    mask[high] = True
    if block == "p":
        basis = spec.momentum_basis
        coeff = spec.phi_p_tilde
        site = state.c_pp
    elif block == "r":
        basis = spec.phi_r_padded
        coeff = spec.phi_r_padded
        site = state.c_rr
    else:
        raise StateError(f"Unknown block {block!r}")
    modes = coeff.T @ site @ coeff
    hi = np.where(mask[:, None] & mask[None, :], modes, 0.0)
    lo = np.where(~mask[:, None] & ~mask[None, :], modes, 0.0)
    cross = modes - hi - lo
    return ModeSplit(
        block=block,
        gamma=gamma,
        high_modes=high,
        low=basis @ lo @ basis.T,
        high=basis @ hi @ basis.T,
        cross=basis @ cross @ basis.T,
    )


def low_mode_functional(
    state: GaussianChainState, spec: SpectralData, gamma: float, beta_minus: float
) -> tuple[float, float]:
    """((1/n)Σ_{k∉I(γ)} ⟨p̂ₖ²⟩, |Ĩ(γ)|/(n β_minus))."""
    _check_gamma(gamma)
    n = state.n
    high = set(high_mode_indices(n, gamma).tolist())
    low = np.array([k for k in range(n) if k not in high])
    tilde = spec.phi_p_tilde[:, low]
    diag = np.real(np.einsum("xk,xy,yk->k", tilde, state.c_pp, tilde))
    return float(diag.sum() / n), float(low.size / (n * beta_minus))


def conservation_drift(
    initial: GaussianChainState, evolved: GaussianChainState
) -> dict[str, float]:
    """Momentum drift, energy drift (relative) and max covariance change.

    The momentum drift is |ΔΣ⟨p⟩| over max(1, Σ|⟨p_x⟩|), so it is absolute for
    states at rest and relative to the momentum content otherwise.
    """
    e0 = initial.total_energy()
    p_scale = max(1.0, float(np.abs(initial.mean_p).sum()))
    return {
        "momentum_drift": abs(evolved.total_momentum() - initial.total_momentum()) / p_scale,
        "energy_drift": abs(evolved.total_energy() - e0) / max(abs(e0), 1e-300),
        "covariance_change": float(
            max(
                np.max(np.abs(evolved.c_pp - initial.c_pp)),
                np.max(np.abs(evolved.c_rr - initial.c_rr)),
                np.max(np.abs(evolved.c_rp - initial.c_rp)),
            )
        ),
    }


__all__ = [
    "CovariancePropagator",
    "EvolutionMap",
    "conservation_drift",
    "empirical_mean_functional",
    "energy_covariance",
    "evolve_covariance",
    "evolve_means",
    "evolve_sample",
    "full_quad_var",
    "low_mode_functional",
    "mode_split_covariance",
    "quad_var",
    "quad_var_energy",
    "site_space_map",
    "symplectic_defect",
    "symplectic_form",
    "wick_moment",
]
