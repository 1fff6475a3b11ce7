import numpy as np
import pytest

from chainhydro.domain.models.profiles import make_profiles
from chainhydro.domain.models.state import StateError, StateFlavor
from chainhydro.services.classical_state import (
    initial_mode_bound,
    local_gibbs_moments,
    mode_space_initial_covariance,
    replica_generator,
    sample_state,
)


class TestLocalGibbsMoments:
    """Tests for the classical local Gibbs state."""

    def test_moments(self, small_chain, wave):
        state = local_gibbs_moments(small_chain, wave)
        n = small_chain.n
        assert state.flavor is StateFlavor.CLASSICAL
        np.testing.assert_allclose(
            state.mean_p, wave.p_bar_sites(n) * small_chain.masses / small_chain.mean_mass
        )
        np.testing.assert_allclose(state.mean_r, wave.r_bar_sites(n))
        np.testing.assert_allclose(np.diag(state.c_pp), small_chain.masses)
        np.testing.assert_allclose(np.diag(state.c_rr), 1.0)
        assert not np.any(state.c_rp)

    def test_energy_at_equilibrium(self, small_chain):
        state = local_gibbs_moments(small_chain, make_profiles("equilibrium", {"beta": 2.0}))
        # n kinetic and n-1 potential quadratic terms, each 1/(2β)
        assert state.total_energy() == pytest.approx((2 * small_chain.n - 1) / 4.0)


class TestSampling:
    """Tests for sample_state and the replica streams."""

    def test_replica_streams_are_independent(self):
        a = replica_generator(1, 2, 0).standard_normal(4)
        b = replica_generator(1, 2, 1).standard_normal(4)
        c = replica_generator(1, 2, 0).standard_normal(4)
        assert not np.allclose(a, b)
        np.testing.assert_array_equal(a, c)

    def test_sample_moments(self, small_chain, wave):
        state = local_gibbs_moments(small_chain, wave)
        r, p = sample_state(state, replica_generator(0, small_chain.seed), size=40000)
        assert r.shape == (small_chain.n - 1, 40000)
        assert p.shape == (small_chain.n, 40000)
        se_p = np.sqrt(small_chain.masses / 40000)
        assert np.all(np.abs(p.mean(axis=1) - state.mean_p) < 5 * se_p)
        np.testing.assert_allclose(p.var(axis=1), small_chain.masses, rtol=0.05)

    def test_single_sample_shape(self, small_chain, wave):
        state = local_gibbs_moments(small_chain, wave)
        r, p = sample_state(state, replica_generator(0, 0))
        assert r.shape == (small_chain.n - 1,)
        assert p.shape == (small_chain.n,)

    def test_refuses_correlated_state(self, small_chain, wave):
        state = local_gibbs_moments(small_chain, wave)
        c_pp = np.array(state.c_pp)
        c_pp[0, 1] = c_pp[1, 0] = 0.1
        correlated = state.with_time(1.0, state.mean_r, state.mean_p, state.c_rr, c_pp, state.c_rp)
        with pytest.raises(StateError, match="diagonal"):
            sample_state(correlated, replica_generator(0, 0))


class TestInitialModeBound:
    """Tests for the mode-space bound on the initial state."""

    def test_equilibrium_saturates_bound(self, medium_chain, medium_spectrum, equilibrium):
        state = local_gibbs_moments(medium_chain, equilibrium)
        pp, rr = mode_space_initial_covariance(state, medium_spectrum)
        np.testing.assert_allclose(np.diag(pp), 1.0, atol=1e-12)
        assert rr[0, 0] == 0.0
        result = initial_mode_bound(state, medium_spectrum, equilibrium.beta_minus)
        assert result.holds

    def test_bound_with_temperature_gradient(self, medium_chain, medium_spectrum):
        profiles = make_profiles("linear-temperature", {"beta": 1.0, "slope": 0.5})
        state = local_gibbs_moments(medium_chain, profiles)
        result = initial_mode_bound(state, medium_spectrum, profiles.beta_minus)
        assert result.bound == pytest.approx(1.0)
        assert result.max_pp < 1.0
        assert result.holds
