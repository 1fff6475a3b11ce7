"""Quantum locally Gibbs (quasi-free) state of the chain.

The state is diagonalized by the thermal operator

    A_p^β = M_β^{-1/2}(−∇₋β°∇₊)M_β^{-1/2},   M_β = M β̃^{-1},

with eigenpairs (γₖ², ψᵏ). Thermal modes carry ⟨𝗉ₖ²⟩ = ⟨𝗋ₖ²⟩ =
(γₖ/2)coth(γₖ/2) = 𝔣(γₖ²/4), where 𝔣(z) = √z coth √z. Everything else about
the state follows from its means and ordered two-point functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse, stats

from chainhydro.domain.analytics.convergence import linear_fit
from chainhydro.domain.models.chain import DisorderedChain, MassLaw, TridiagSym
from chainhydro.domain.models.profiles import Profiles
from chainhydro.domain.models.results import ClusteringReport
from chainhydro.domain.models.spectral import ThermalSpectral
from chainhydro.domain.models.state import (
    GaussianChainState,
    QuantumCovariance,
    StateFlavor,
)
from chainhydro.infrastructure.linalg import SpectralError, eig_sym_tridiag
from chainhydro.infrastructure.linalg.tridiagonal import degenerate_modes
from chainhydro.infrastructure.observability import get_logger

from .chain_model import sample_masses
from .spectral import grad_plus

logger = get_logger(__name__)

SERIES_CUTOFF = 1e-4
THERMAL_R_RESIDUAL_TOL = 1e-8
CLUSTERING_FLOOR = 1e-13
FFT_POINTS = 256


# ---------------------------------------------------------------------------
# Thermal operators
# ---------------------------------------------------------------------------


def build_Ap_beta(chain: DisorderedChain, beta_sites: np.ndarray) -> TridiagSym:  # noqa: N802
    """A_p^β for site temperatures β̃ (β° is its first n−1 entries)."""
    bonds = beta_sites[:-1]
    ratio = beta_sites / chain.masses
    coupling = np.zeros(chain.n)
    coupling[:-1] += bonds
    coupling[1:] += bonds
    return TridiagSym(
        diag=ratio * coupling,
        offdiag=-bonds * np.sqrt(ratio[:-1] * ratio[1:]),
    )


def build_Ar_beta(chain: DisorderedChain, beta_sites: np.ndarray) -> TridiagSym:  # noqa: N802
    """A_r^β = (β°)^{1/2}(−∇₊M_β^{-1}∇₋)(β°)^{1/2} on the n−1 elongations."""
    bonds = beta_sites[:-1]
    ratio = beta_sites / chain.masses
    return TridiagSym(
        diag=(ratio[:-1] + ratio[1:]) * bonds,
        offdiag=-ratio[1:-1] * np.sqrt(bonds[:-1] * bonds[1:]),
    )


def build_thermal(
    chain: DisorderedChain, profiles: Profiles, validate: bool = True
) -> ThermalSpectral:
    """Diagonalize A_p^β and derive the r-side basis ψ̃ᵏ."""
    beta = profiles.beta_sites(chain.n)
    a_p_beta = build_Ap_beta(chain, beta)
    label = f"A_p^beta(n={chain.n}, seed={chain.seed})"
    eig = eig_sym_tridiag(a_p_beta, label=label, validate=validate)
    values = eig.eigenvalues.copy()
    psi = eig.eigenvectors.copy()

    kernel = np.sqrt(chain.masses / beta)
    values[0] = 0.0
    psi[:, 0] = kernel / np.linalg.norm(kernel)
    if values[1] <= 0.0:
        raise SpectralError(f"{label}: second eigenvalue is not positive", mode=1)
    gamma = np.sqrt(values)

    bonds = beta[:-1]
    scaled = psi[:, 1:] * np.sqrt(beta / chain.masses)[:, None]
    psi_r = np.sqrt(bonds)[:, None] * grad_plus(scaled) / gamma[None, 1:]
    if validate:
        a_r_beta = build_Ar_beta(chain, beta)
        residual = a_r_beta.matvec(psi_r) - psi_r * values[None, 1:]
        relative = np.linalg.norm(residual, axis=0) / max(a_r_beta.gershgorin_bound(), 1.0)
        worst = int(np.argmax(relative))
        if relative[worst] >= THERMAL_R_RESIDUAL_TOL:
            raise SpectralError(
                f"{label}: r-side residual {relative[worst]:.3e} at mode {worst + 1}",
                mode=worst + 1,
            )
    thermal = ThermalSpectral(
        chain=chain,
        beta_sites=beta,
        a_p_beta=a_p_beta,
        gamma=gamma,
        psi=psi,
        psi_r=psi_r,
        norm=float(values[-1]),
        degenerate_modes=degenerate_modes(values),
    )
    report = thermal.norm_report()
    if not report["within_square"]:
        logger.warning(
            "%s: norm %.6g exceeds 4 beta_plus^2/m_minus = %.6g",
            label,
            thermal.norm,
            thermal.norm_bound_square,
        )
    return thermal


# ---------------------------------------------------------------------------
# Spectral function
# ---------------------------------------------------------------------------


def f_spec(z: float | np.ndarray) -> float | np.ndarray:
    """𝔣(z) = √z coth √z, with 𝔣(0) = 1; a series is used below 1e−4."""
    arr = np.asarray(z, dtype=np.float64)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise ValueError("f_spec is defined for finite z >= 0")
    small = arr < SERIES_CUTOFF
    out = np.empty_like(arr)
    zs = arr[small]
    out[small] = 1.0 + zs / 3.0 - zs**2 / 45.0 + 2.0 * zs**3 / 945.0
    root = np.sqrt(arr[~small])
    out[~small] = root / np.tanh(root)
    if np.ndim(z) == 0:
        return float(out)
    return out


def mode_weights(gamma: np.ndarray) -> np.ndarray:
    """(γ/2)coth(γ/2) per thermal mode, 0 for the kernel mode."""
    weights = np.asarray(f_spec(np.asarray(gamma) ** 2 / 4.0))
    weights = weights.copy()
    weights[0] = 0.0
    return weights


def occupation(gamma: np.ndarray) -> np.ndarray:
    """Bose occupation 1/(e^γ − 1); infinite for γ = 0."""
    gamma = np.asarray(gamma, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return 1.0 / np.expm1(gamma)


# ---------------------------------------------------------------------------
# Covariance and state
# ---------------------------------------------------------------------------


def ccr_block(n: int) -> np.ndarray:
    """(i/2)D with D the (n−1)×n matrix of [r_x, p_y] = i D_xy."""
    d = np.zeros((n - 1, n), dtype=np.complex128)
    idx = np.arange(n - 1)
    d[idx, idx] = -0.5j
    d[idx, idx + 1] = 0.5j
    return d


def quantum_covariance(thermal: ThermalSpectral) -> QuantumCovariance:
    """Two-point blocks of the locally Gibbs state in the centre-of-mass frame."""
    chain = thermal.chain
    weights = mode_weights(thermal.gamma)
    u = thermal.psi * thermal.m_beta_sqrt[:, None]
    c_pp = (u[:, 1:] * weights[None, 1:]) @ u[:, 1:].T

    inv_root_bonds = 1.0 / np.sqrt(thermal.beta_bonds)
    v = thermal.psi_r * inv_root_bonds[:, None]
    c_rr = (v * weights[None, 1:]) @ v.T

    b_profile = 0.5 * np.diag(c_pp) / chain.masses
    b_profile[:-1] += 0.5 * np.diag(c_rr)
    return QuantumCovariance(
        c_pp=c_pp,
        c_rr=c_rr,
        c_rp=ccr_block(chain.n),
        b_profile=b_profile,
        zero_mode=u[:, 0],
        mode_weights=weights,
    )


def quantum_locally_gibbs_state(
    chain: DisorderedChain,
    profiles: Profiles,
    thermal: ThermalSpectral | None = None,
) -> tuple[GaussianChainState, QuantumCovariance]:
    """Means and ordered blocks of the quantum locally Gibbs state.

    The mean momentum is p̄(x/n)m_x/m̄ with its centre-of-mass part removed,
    so that Σ⟨p_x⟩ = 0 holds exactly.
    """
    profiles.require_zero_momentum()
    thermal = thermal or build_thermal(chain, profiles)
    qcov = quantum_covariance(thermal)
    n = chain.n
    raw_p = profiles.p_bar_sites(n) * chain.masses / chain.mean_mass
    mean_p = raw_p - chain.masses * raw_p.sum() / chain.total_mass
    state = GaussianChainState(
        flavor=StateFlavor.QUANTUM,
        masses=chain.masses,
        mean_r=profiles.r_bar_sites(n),
        mean_p=mean_p,
        c_rr=qcov.c_rr,
        c_pp=qcov.c_pp,
        c_rp=qcov.c_rp,
    )
    return state, qcov


def aa1_residual(state: GaussianChainState, chain: DisorderedChain, profiles: Profiles) -> float:
    """max_x |⟨p_x⟩/m_x − p̄(x/n)/m̄| plus max_x |⟨r_x⟩ − r̄(x/n)|."""
    n = chain.n
    eps_p = np.max(np.abs(state.mean_p / chain.masses - profiles.p_bar_sites(n) / chain.mean_mass))
    eps_r = np.max(np.abs(state.mean_r - profiles.r_bar_sites(n)))
    return float(eps_p + eps_r)


def classical_limit_gap(qcov: QuantumCovariance, thermal: ThermalSpectral) -> float:
    """Relative distance of C_pp and C_rr to their classical counterparts.

    The classical blocks are the same mode sums with every weight set to 1:
    diag(m/β̃) minus the zero-mode term, and (β°)^{-1}.
    """
    classical_pp = np.diag(thermal.m_beta_sqrt**2) - np.outer(qcov.zero_mode, qcov.zero_mode)
    classical_rr = np.diag(1.0 / thermal.beta_bonds)
    scale = max(np.max(np.abs(classical_pp)), np.max(np.abs(classical_rr)))
    gap = max(
        np.max(np.abs(qcov.c_pp - classical_pp)),
        np.max(np.abs(qcov.c_rr - classical_rr)),
    )
    return float(gap / scale)


@dataclass(frozen=True)
class ModeMoments:
    """Thermal-mode moments recovered from the site-space blocks."""

    pp: np.ndarray
    rr: np.ndarray
    commutator: np.ndarray
    weights: np.ndarray
    gamma: np.ndarray

    def max_error(self) -> float:
        """Largest deviation from ⟨𝗉𝗉⟩ = ⟨𝗋𝗋⟩ = diag(weights) and −i[𝗋ₖ, 𝗉ₖ] = γₖ."""
        pp_err = np.max(np.abs(self.pp - np.diag(self.weights)))
        rr_err = np.max(np.abs(self.rr - np.diag(self.weights[1:])))
        expected = np.zeros_like(self.commutator)
        k = np.arange(1, self.gamma.size)
        expected[k - 1, k] = self.gamma[1:]
        ccr_err = np.max(np.abs(self.commutator - expected))
        return float(max(pp_err, rr_err, ccr_err))


def mode_space_moments(qcov: QuantumCovariance, thermal: ThermalSpectral) -> ModeMoments:
    """⟨𝗉ₖ𝗉ₖ′⟩, ⟨𝗋ₖ𝗋ₖ′⟩ and −i[𝗋ₖ, 𝗉ₖ′].

    𝗉ₖ = ⟨ψᵏ, M_β^{-1/2} p̃⟩ and 𝗋ₖ = ⟨ψ̃ᵏ, (β°)^{1/2} r̃⟩.
    """
    w_p = thermal.psi / thermal.m_beta_sqrt[:, None]
    w_r = thermal.psi_r * np.sqrt(thermal.beta_bonds)[:, None]
    ordered = w_r.T @ qcov.c_rp @ w_p
    return ModeMoments(
        pp=w_p.T @ qcov.c_pp @ w_p,
        rr=w_r.T @ qcov.c_rr @ w_r,
        commutator=2.0 * np.imag(ordered),
        weights=qcov.mode_weights,
        gamma=thermal.gamma,
    )


# ---------------------------------------------------------------------------
# Taylor expansion of the covariance function
# ---------------------------------------------------------------------------


def _h(z: np.ndarray) -> np.ndarray:
    """𝔣(z/4) for complex z."""
    root = np.sqrt(z / 4.0)
    return root / np.tanh(root)


def taylor_coefficients(alpha: float, order: int, radius: float) -> np.ndarray:
    """a_k of 𝔣(z/4) = Σ a_k (z − α)^k, from an FFT on |z − α| = radius."""
    points = max(FFT_POINTS, 2 * (order + 1))
    theta = 2.0 * np.pi * np.arange(points) / points
    samples = _h(alpha + radius * np.exp(1j * theta))
    coeffs = np.fft.fft(samples) / points
    k = np.arange(order + 1)
    return np.real(coeffs[: order + 1]) / radius**k


@dataclass(frozen=True)
class TaylorKernel:
    """Truncated Taylor evaluation of √(m/β̃) 𝔣(A_p^β/4) √(m/β̃)."""

    order: int
    alpha: float
    radius: float
    coefficients: np.ndarray
    kernel: np.ndarray

    def band_mask(self) -> np.ndarray:
        n = self.kernel.shape[0]
        distance = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        return distance <= self.order

    def max_gap(self, reference: np.ndarray) -> float:
        """Largest entrywise gap to ``reference`` inside the band."""
        mask = self.band_mask()
        return float(np.max(np.abs(self.kernel - reference)[mask]))

    def outside_band_max(self) -> float:
        return float(np.max(np.abs(self.kernel[~self.band_mask()]), initial=0.0))


def taylor_covariance(thermal: ThermalSpectral, order: int) -> TaylorKernel:
    """Full momentum kernel from K + 1 Taylor terms, using tridiagonal products only.

    The expansion point is α = (c₀ + 1)/2 with c₀ = 4β_plus²/m_minus, so the
    spectrum of A_p^β lies within distance α of it; the series converges up to
    the singularity at −4π².
    """
    if order < 0:
        raise ValueError(f"Taylor order must be >= 0, got {order}")
    c0 = thermal.norm_bound_square
    alpha = 0.5 * (c0 + 1.0)
    radius = alpha + 2.0 * np.pi**2
    coeffs = taylor_coefficients(alpha, order, radius)
    a = thermal.a_p_beta
    shifted = sparse.diags(
        [a.offdiag, a.diag - alpha, a.offdiag], offsets=[-1, 0, 1], format="csr"
    )
    identity = sparse.identity(a.size, format="csr")
    poly = coeffs[order] * identity
    for k in range(order - 1, -1, -1):
        poly = (shifted @ poly + coeffs[k] * identity).tocsr()
    scale = thermal.m_beta_sqrt
    kernel = scale[:, None] * poly.toarray() * scale[None, :]
    return TaylorKernel(order=order, alpha=alpha, radius=radius, coefficients=coeffs, kernel=kernel)


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------


def _distance_profile(block: np.ndarray) -> np.ndarray:
    """Mean |K[x, x + d]| for d = 0..size−1."""
    size = min(block.shape)
    return np.array([np.mean(np.abs(np.diagonal(block, offset=d))) for d in range(size)])


def _square_decay(block: np.ndarray) -> float:
    rows, cols = block.shape
    distance = np.abs(np.subtract.outer(np.arange(rows), np.arange(cols)))
    weight = np.maximum(distance, 1).astype(np.float64) ** 2
    return float(np.max(weight * np.abs(block)))


def verify_clustering(qcov: QuantumCovariance) -> ClusteringReport:
    """Exponential decay fit and polynomial clustering constant.

    The decay fit and the pp block use the full thermal kernel (the
    centre-of-mass projection adds a flat O(1/n) term).
    """
    kernel = qcov.pp_kernel()
    profile = _distance_profile(kernel)
    floor = CLUSTERING_FLOOR * profile[0]
    above = np.flatnonzero(profile > floor)
    cut = int(above.max()) + 1 if above.size else 0
    distances = np.arange(1, cut)
    fit = None
    q = float("nan")
    if distances.size >= 3:
        fit = linear_fit(distances, np.log(profile[distances]))
        q = float(np.exp(fit.slope))
    else:
        logger.warning("Clustering fit has %d usable distances; need 3", distances.size)

    blocks = {
        "pp": kernel,
        "rr": qcov.c_rr,
        "rp": qcov.c_rp,
        "pr": qcov.c_rp.conj().T,
    }
    by_block = {name: _square_decay(block) for name, block in blocks.items()}
    square_decay = max(by_block.values())
    return ClusteringReport(
        q=q,
        fit=fit,
        square_decay_constant=square_decay,
        square_decay_by_block=by_block,
        quartic_constant=square_decay**2,
    )


# ---------------------------------------------------------------------------
# Thermal energy profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThermalProfile:
    """Disorder-averaged site thermal energy ⟨ĕ_x⟩ at y = x/n.

    ``classical`` is the same average with every mode weight set to 1. It
    equals 1/β(y) less the centre-of-mass share m_x/(2βΣm), so it tends to
    1/β as n grows.
    """

    y: np.ndarray
    value: np.ndarray
    stderr: np.ndarray
    low: np.ndarray
    high: np.ndarray
    per_seed: np.ndarray
    classical: np.ndarray
    beta: np.ndarray

    def as_function(self):  # type: ignore[no-untyped-def]
        y, value = self.y, self.value

        def b_bar(z: np.ndarray) -> np.ndarray:
            return np.interp(np.asarray(z, dtype=np.float64), y, value)

        return b_bar

    @property
    def isothermal(self) -> bool:
        return bool(np.ptp(self.beta) == 0.0)

    def _bulk(self, edge_fraction: float) -> np.ndarray:
        return (self.y > edge_fraction) & (self.y < 1.0 - edge_fraction)

    def bulk_deviation(self, edge_fraction: float = 0.05) -> float:
        """Max relative deviation from the bulk mean, edges excluded."""
        bulk = self.value[self._bulk(edge_fraction)]
        mean = bulk.mean()
        return float(np.max(np.abs(bulk - mean)) / mean)

    def quantum_excess(self) -> float:
        """min_x (b̄_x − classical_x)/classical_x; never negative beyond rounding."""
        return float(np.min((self.value - self.classical) / self.classical))

    def inverse_temperature_gap(self, edge_fraction: float = 0.05) -> float:
        """min over the bulk of β_x b̄_x − 1."""
        keep = self._bulk(edge_fraction)
        return float(np.min(self.beta[keep] * self.value[keep]) - 1.0)

    def summary(self) -> dict[str, float | bool]:
        return {
            "isothermal": self.isothermal,
            "bulk_deviation": self.bulk_deviation(),
            "quantum_excess": self.quantum_excess(),
            "inverse_temperature_gap": self.inverse_temperature_gap(),
        }


def classical_site_energy(qcov: QuantumCovariance, thermal: ThermalSpectral) -> np.ndarray:
    """b_x of the classical state with the same profiles and centre-of-mass frame."""
    masses = thermal.chain.masses
    energy = 0.5 * (1.0 / thermal.beta_sites - qcov.zero_mode**2 / masses)
    energy[:-1] += 0.5 / thermal.beta_bonds
    return energy


def thermal_site_energy(
    chain: DisorderedChain, profiles: Profiles
) -> tuple[np.ndarray, np.ndarray]:
    """Quantum and classical b_x of one chain."""
    thermal = build_thermal(chain, profiles)
    qcov = quantum_covariance(thermal)
    return qcov.b_profile, classical_site_energy(qcov, thermal)


def aggregate_thermal_profile(
    per_seed: np.ndarray,
    classical: np.ndarray,
    beta: np.ndarray,
    confidence: float = 0.95,
    seed: int = 0,
) -> ThermalProfile:
    """Seed mean, standard error and a percentile bootstrap interval per site."""
    per_seed = np.atleast_2d(np.asarray(per_seed, dtype=np.float64))
    classical = np.atleast_2d(np.asarray(classical, dtype=np.float64)).mean(axis=0)
    beta = np.asarray(beta, dtype=np.float64)
    count, n = per_seed.shape
    if classical.shape != (n,) or beta.shape != (n,):
        raise ValueError(f"Classical energies and β must have one entry per site ({n})")
    value = per_seed.mean(axis=0)
    y = np.arange(1, n + 1) / n
    if count < 2:
        nan = np.full(n, np.nan)
        return ThermalProfile(y, value, nan, value.copy(), value.copy(), per_seed, classical, beta)
    stderr = per_seed.std(axis=0, ddof=1) / np.sqrt(count)
    result = stats.bootstrap(
        (per_seed,),
        np.mean,
        axis=0,
        confidence_level=confidence,
        n_resamples=999,
        method="percentile",
        random_state=np.random.default_rng(seed),
    )
    return ThermalProfile(
        y=y,
        value=value,
        stderr=stderr,
        low=np.asarray(result.confidence_interval.low),
        high=np.asarray(result.confidence_interval.high),
        per_seed=per_seed,
        classical=classical,
        beta=beta,
    )


def thermal_energy_profile(
    law: MassLaw, profiles: Profiles, n: int, seeds: Sequence[int]
) -> ThermalProfile:
    """b̄ estimated over an ensemble of chains."""
    if len(seeds) < 8:
        logger.warning("Thermal profile from %d seeds (fewer than 8)", len(seeds))
    energies = [thermal_site_energy(sample_masses(n, law, seed), profiles) for seed in seeds]
    return aggregate_thermal_profile(
        np.vstack([quantum for quantum, _ in energies]),
        np.vstack([classical for _, classical in energies]),
        profiles.beta_sites(n),
        seed=n,
    )



__all__ = [
    "ModeMoments",
    "TaylorKernel",
    "ThermalProfile",
    "aa1_residual",
    "aggregate_thermal_profile",
    "build_Ap_beta",
    "build_Ar_beta",
    "build_thermal",
    "ccr_block",
    "classical_site_energy",
    "classical_limit_gap",
    "f_spec",
    "mode_space_moments",
    "mode_weights",
    "occupation",
    "quantum_covariance",
    "quantum_locally_gibbs_state",
    "taylor_coefficients",
    "taylor_covariance",
    "thermal_energy_profile",
    "thermal_site_energy",
    "verify_clustering",
]
