import numpy as np
import pytest

from chainhydro.domain.models.chain import ChainModelError, MassLaw
from chainhydro.services.chain_model import (
    build_Ap,
    build_Ar,
    load_chain,
    sample_masses,
    sample_profiles,
    save_chain,
)


class TestSampleMasses:
    """Tests for sample_masses."""

    def test_reproducible_per_seed(self):
        first = sample_masses(64, MassLaw.uniform(1.0, 2.0), seed=7)
        second = sample_masses(64, MassLaw.uniform(1.0, 2.0), seed=7)
        other = sample_masses(64, MassLaw.uniform(1.0, 2.0), seed=8)
        np.testing.assert_array_equal(first.masses, second.masses)
        assert not np.array_equal(first.masses, other.masses)

    def test_default_law_is_scaled_beta(self):
        chain = sample_masses(128, seed=1)
        assert chain.mass_law.kind.value == "scaled-beta"
        assert chain.mean_mass == pytest.approx(1.5)
        assert np.all((chain.masses >= 1.0) & (chain.masses <= 2.0))

    def test_degenerate_law_gives_clean_chain(self):
        chain = sample_masses(10, MassLaw.point(1.3), seed=5)
        np.testing.assert_array_equal(chain.masses, np.full(10, 1.3))

    def test_mean_mass_is_the_law_mean(self):
        chain = sample_masses(32, MassLaw.uniform(1.0, 3.0), seed=2)
        assert chain.mean_mass == 2.0

    @pytest.mark.parametrize("n,seed", [(1, 0), (8, -1), (8, 2**64)])
    def test_invalid_arguments(self, n, seed):
        with pytest.raises(ChainModelError):
            sample_masses(n, seed=seed)


class TestDynamicalMatrices:
    """Tests for A_p and A_r."""

    def test_ap_matches_dense_laplacian(self, small_chain):
        n = small_chain.n
        laplacian = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
        laplacian[0, 0] = laplacian[-1, -1] = 1.0
        inv_sqrt = np.diag(1.0 / small_chain.sqrt_masses)
        np.testing.assert_allclose(
            build_Ap(small_chain).to_dense(), inv_sqrt @ laplacian @ inv_sqrt, atol=1e-14
        )

    def test_ap_kills_the_ground_state(self, small_chain):
        residual = build_Ap(small_chain).matvec(small_chain.ground_state())
        assert np.max(np.abs(residual)) < 1e-14

    def test_ar_is_gradient_sandwich(self, small_chain):
        n = small_chain.n
        grad = np.zeros((n - 1, n))
        grad[np.arange(n - 1), np.arange(n - 1)] = -1.0
        grad[np.arange(n - 1), np.arange(1, n)] = 1.0
        expected = grad @ np.diag(1.0 / small_chain.masses) @ grad.T
        np.testing.assert_allclose(build_Ar(small_chain).to_dense(), expected, atol=1e-14)


class TestChainFiles:
    """Tests for save_chain/load_chain."""

    def test_round_trip_is_exact(self, tmp_path, small_chain):
        path = save_chain(small_chain, tmp_path / "chain.txt")
        loaded = load_chain(path)
        np.testing.assert_array_equal(loaded.masses, small_chain.masses)
        assert loaded.seed == small_chain.seed
        assert loaded.mass_law == small_chain.mass_law


def test_sample_profiles_builds_named_preset():
    profiles = sample_profiles("cosine-momentum", {"amplitude": 0.5})
    assert profiles.name == "cosine-momentum"
    assert profiles.p_bar_sites(2)[-1] == pytest.approx(-0.5)
