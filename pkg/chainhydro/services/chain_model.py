"""Random chain construction: masses, the dynamical matrix and profiles."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from chainhydro.domain.models.chain import (
    ChainModelError,
    DisorderedChain,
    MassLaw,
    MassLawKind,
    TridiagSym,
)
from chainhydro.domain.models.profiles import ProfilePreset, Profiles, make_profiles
from chainhydro.infrastructure.observability import get_logger
from chainhydro.infrastructure.persistence.chain_file import read_chain, write_chain

logger = get_logger(__name__)


def mass_generator(seed: int) -> Generator:
    """Counter-based stream used for the masses of chain ``seed``."""
    return Generator(Philox(SeedSequence(seed)))


def sample_masses(n: int, law: MassLaw | None = None, seed: int = 0) -> DisorderedChain:
    """Draw ``n`` i.i.d. masses; ``mean_mass`` is the analytic mean of ``law``."""
    law = law or MassLaw()
    if n < 2:
        raise ChainModelError(f"A chain needs n >= 2 particles, got {n}")
    if seed < 0 or seed >= 2**64:
        raise ChainModelError(f"Seed must be an unsigned 64-bit integer, got {seed}")

    rng = mass_generator(seed)
    if law.is_degenerate:
        masses = np.full(n, law.lower)
    elif law.kind is MassLawKind.UNIFORM:
        masses = rng.uniform(law.lower, law.upper, size=n)
    else:
        masses = law.lower + law.width * rng.beta(law.a, law.b, size=n)
    masses = np.clip(masses, law.lower, law.upper)
    logger.debug("Sampled n=%d masses with seed %d from %s", n, seed, law.describe())
    return DisorderedChain(n=n, masses=masses, mean_mass=law.mean, seed=seed, mass_law=law)


def build_Ap(chain: DisorderedChain) -> TridiagSym:  # noqa: N802
    """A_p = M^{-1/2}(−Δ)M^{-1/2} with free boundaries."""
    coupling = np.full(chain.n, 2.0)
    coupling[0] = coupling[-1] = 1.0
    masses = chain.masses
    return TridiagSym(
        diag=coupling / masses,
        offdiag=-1.0 / np.sqrt(masses[:-1] * masses[1:]),
    )


def build_Ar(chain: DisorderedChain) -> TridiagSym:  # noqa: N802
    """A_r = −∇₊M^{-1}∇₋ on the n−1 elongations (r_0 = r_n = 0)."""
    inv = 1.0 / chain.masses
    return TridiagSym(diag=inv[:-1] + inv[1:], offdiag=-inv[1:-1])


def sample_profiles(
    preset: str | ProfilePreset, params: Mapping[str, Any] | None = None
) -> Profiles:
    profiles = make_profiles(preset, params)
    logger.debug(
        "Built profiles %s (beta in [%.4g, %.4g])",
        profiles.name,
        profiles.beta_minus,
        profiles.beta_plus,
    )
    return profiles


def save_chain(chain: DisorderedChain, path: str | Path) -> Path:
    """Write ``chain`` as a text file that reads back bit-for-bit."""
    return write_chain(chain, path)


def load_chain(path: str | Path) -> DisorderedChain:
    chain = read_chain(path)
    logger.info("Loaded chain n=%d seed=%d from %s", chain.n, chain.seed, path)
    return chain


__all__ = [
    "build_Ap",
    "build_Ar",
    "load_chain",
    "mass_generator",
    "sample_masses",
    "sample_profiles",
    "save_chain",
]
