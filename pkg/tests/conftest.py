"""Shared fixtures: small chains, spectra and a dense eigen oracle."""

from __future__ import annotations

import numpy as np
import pytest

from chainhydro.domain.models.chain import DisorderedChain, MassLaw
from chainhydro.domain.models.profiles import Profiles, make_profiles
from chainhydro.domain.models.spectral import SpectralData
from chainhydro.infrastructure.observability import get_registry
from chainhydro.services.chain_model import sample_masses
from chainhydro.services.spectral import build_spectral


def jacobi_eigen(matrix: np.ndarray, tol: float = 1e-14, sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations on a dense symmetric matrix.

    Independent of LAPACK; slow, so only for n up to a few dozen.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    size = a.shape[0]
    vectors = np.eye(size)
    scale = max(float(np.abs(a).max()), 1.0)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / a[p, q]
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(size)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                vectors = vectors @ rot
    values = np.diag(a)
    order = np.argsort(values)
    return values[order], vectors[:, order]


@pytest.fixture(autouse=True)
def _reset_metrics():
    get_registry().reset()
    yield
    get_registry().reset()


@pytest.fixture
def eigen_oracle():
    return jacobi_eigen


@pytest.fixture
def small_chain() -> DisorderedChain:
    return sample_masses(16, MassLaw.uniform(1.0, 2.0), seed=3)


@pytest.fixture
def medium_chain() -> DisorderedChain:
    return sample_masses(64, MassLaw.uniform(1.0, 2.0), seed=11)


@pytest.fixture
def clean_chain() -> DisorderedChain:
    return sample_masses(32, MassLaw.point(1.5), seed=0)


@pytest.fixture
def small_spectrum(small_chain: DisorderedChain) -> SpectralData:
    return build_spectral(small_chain)


@pytest.fixture
def medium_spectrum(medium_chain: DisorderedChain) -> SpectralData:
    return build_spectral(medium_chain)


@pytest.fixture
def equilibrium() -> Profiles:
    return make_profiles("equilibrium", {"beta": 1.0})


@pytest.fixture
def wave() -> Profiles:
    return make_profiles("wave", {"p_amplitude": 0.3, "r_amplitude": 0.2, "beta": 1.0})
