"""Empirical checks of high-mode localization and of the frequency floor.

The correlator of the high-mode window I(α) = ]n^{1−α}, n−1] is

    S(x, y) = E[ Σ_{k∈I(α)} |φ̃ᵏ_x φ̃ᵏ_y| ],

averaged over an ensemble of chains and fitted with log S = a + b·|x − y|
over distances in [n^{2α}, n/4].
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from chainhydro.domain.analytics.convergence import linear_fit, loglog_fit
from chainhydro.domain.models.results import FrequencyScan, HighModeSplit, LocalizationScan
from chainhydro.domain.models.spectral import SpectralData, high_mode_indices
from chainhydro.domain.models.state import GaussianChainState
from chainhydro.infrastructure.observability import get_logger

from .dynamics import mode_split_covariance

logger = get_logger(__name__)

MIN_ENSEMBLE = 8
LADDER_BASES = 8

Pair = tuple[int, int, int]


def ladder_pairs(n: int, bases: int = LADDER_BASES) -> tuple[Pair, ...]:
    """Site pairs (x, x + d) for d ∈ {0, 1, 2, 4, …, n/4} at ``bases`` base sites.

    Base sites are spread over [n/8, n/2] (0-based), so every partner stays
    inside the chain.
    """
    distances = [0]
    d = 1
    while d <= n // 4:
        distances.append(d)
        d *= 2
    starts = np.unique(np.linspace(n // 8, n // 2, bases).astype(int))
    return tuple((int(x), int(x + d), int(d)) for x in starts for d in distances if x + d < n)


def _window_columns(spec: SpectralData, high: np.ndarray, basis: str) -> np.ndarray:
    if basis == "p":
        return spec.phi_p_tilde[:, high]
    if basis == "r":
        # r-basis column k−1 is mode k; the 1/ω factor is undone with ω_{k*}
        compensation = spec.omega[high].min()
        return spec.phi_r[:, high - 1] * compensation
    raise ValueError(f"Unknown basis {basis!r}; expected 'p' or 'r'")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")


def seed_correlator(
    spec: SpectralData, alpha: float, pairs: Sequence[Pair], basis: str = "p"
) -> np.ndarray:
    """Σ_{k∈I(α)} |φ̃ᵏ_x φ̃ᵏ_y| of one chain at every pair."""
    _check_alpha(alpha)
    n = spec.n
    high = high_mode_indices(n, alpha)
    if high.size == 0:
        raise ValueError(f"I(alpha) is empty for n={n}, alpha={alpha}")
    if basis == "r" and any(max(x, y) >= n - 1 for x, y, _ in pairs):
        raise ValueError("r-basis pairs must lie in 0..n-2")
    xs = np.array([x for x, _, _ in pairs])
    ys = np.array([y for _, y, _ in pairs])
    columns = np.abs(_window_columns(spec, high, basis))
    return np.sum(columns[xs] * columns[ys], axis=1)


def correlator_scan(
    n: int,
    alpha: float,
    pairs: Sequence[Pair],
    per_seed: np.ndarray,
    seeds: Sequence[int],
    basis: str = "p",
    warn_small: bool = True,
) -> LocalizationScan:
    """Average per-seed correlators and fit log S against distance over [n^{2α}, n/4]."""
    _check_alpha(alpha)
    per_seed = np.atleast_2d(np.asarray(per_seed, dtype=np.float64))
    if warn_small and per_seed.shape[0] < MIN_ENSEMBLE:
        logger.warning(
            "Localization ensemble has %d chains (fewer than %d)", per_seed.shape[0], MIN_ENSEMBLE
        )
    pairs = tuple(pairs)
    d_of_pair = np.array([d for _, _, d in pairs])
    correlator = per_seed.mean(axis=0)

    distances = np.unique(d_of_pair)
    profile = np.array([correlator[d_of_pair == d].mean() for d in distances])
    lo, hi = float(n) ** (2.0 * alpha), n / 4.0
    window = (distances >= lo) & (distances <= hi) & (profile > 0)
    fit = None
    if np.count_nonzero(window) >= 2:
        fit = linear_fit(distances[window], np.log(profile[window]))
    else:
        logger.warning(
            "Localization fit window [%.1f, %.1f] holds fewer than two distances (n=%d)",
            lo,
            hi,
            n,
        )
    return LocalizationScan(
        alpha=alpha,
        n=n,
        n_seeds=per_seed.shape[0],
        basis=basis,
        pairs=pairs,
        correlator=correlator,
        per_seed=per_seed,
        distances=distances,
        profile=profile,
        fit=fit,
        fit_window=(lo, hi),
        seeds=tuple(int(s) for s in seeds),
    )


def high_mode_correlator(
    spectra: Sequence[SpectralData],
    alpha: float,
    pairs: Sequence[Pair] | None = None,
    basis: str = "p",
) -> LocalizationScan:
    """Disorder-averaged high-mode correlator with an exponential fit."""
    if not spectra:
        raise ValueError("An ensemble of at least one spectrum is required")
    n = spectra[0].n
    if any(spec.n != n for spec in spectra):
        raise ValueError("All spectra of an ensemble must share n")
    pairs = tuple(pairs) if pairs is not None else ladder_pairs(n)
    per_seed = np.vstack([seed_correlator(spec, alpha, pairs, basis) for spec in spectra])
    return correlator_scan(
        n, alpha, pairs, per_seed, [spec.chain.seed for spec in spectra], basis=basis
    )


def min_frequency(spec: SpectralData, gamma: float) -> tuple[int, float]:
    """(k*, 1/ω_{k*}) with k* the slowest mode of I(γ); an empty window falls back to {n − 1}."""
    window = high_mode_indices(spec.n, gamma)
    if window.size == 0:
        window = np.array([spec.n - 1])
    k_star = int(window[np.argmin(spec.omega[window])])
    return k_star, float(1.0 / spec.omega[k_star])


def frequency_scan(
    rows: Sequence[tuple[int, int, int, float]], gamma: float
) -> FrequencyScan:
    """Collect (n, seed, k*, 1/ω_{k*}) rows and fit the per-n maxima on log-log axes."""
    ordered = sorted(rows)
    per_n: dict[int, float] = {}
    for n, _seed, _k, value in ordered:
        per_n[n] = max(per_n.get(n, 0.0), value)
    fit = loglog_fit(list(per_n), list(per_n.values())) if len(per_n) >= 2 else None
    return FrequencyScan(gamma=gamma, rows=tuple(ordered), fit=fit)


def min_freq_scan(spectra: Sequence[SpectralData], gamma: float) -> FrequencyScan:
    """max_{k∈I(γ)} 1/ωₖ per chain, with a log-log fit of the per-n maxima."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    rows = [(spec.n, spec.chain.seed, *min_frequency(spec, gamma)) for spec in spectra]
    return frequency_scan(rows, gamma)


def high_mode_offdiag_mass(
    state: GaussianChainState,
    spec: SpectralData,
    gamma: float,
    theta: float,
    beta_minus: float,
    block: str = "p",
) -> HighModeSplit:
    """Near and far sums of the high-mode covariance, split at |x − y| = 2n^θ.

    For the p block the kernel is C•_pp,xy/√(m_x m_y); for the r block it is
    C•_rr,xy. The near part is compared with 8 n^{θ−1}/β_minus.
    """
    if not 0.0 < 2.0 * gamma < theta < 1.0:
        raise ValueError(f"Need 0 < 2·gamma < theta < 1, got gamma={gamma}, theta={theta}")
    n = state.n
    split = mode_split_covariance(state, spec, gamma, block=block)
    kernel = np.abs(split.high)
    if block == "p":
        root = np.sqrt(state.masses)
        kernel = kernel / np.outer(root, root)
    size = kernel.shape[0]
    distance = np.abs(np.subtract.outer(np.arange(size), np.arange(size)))
    near = distance <= 2.0 * float(n) ** theta
    return HighModeSplit(
        block=block,
        gamma=gamma,
        theta=theta,
        n=n,
        u_less=float(kernel[near].sum() / n**2),
        u_greater=float(kernel[~near].sum() / n**2),
        bound_less=8.0 * float(n) ** (theta - 1.0) / beta_minus,
    )


__all__ = [
    "correlator_scan",
    "frequency_scan",
    "high_mode_correlator",
    "high_mode_offdiag_mass",
    "ladder_pairs",
    "min_freq_scan",
    "min_frequency",
    "seed_correlator",
]
