import numpy as np
import pytest

from chainhydro.domain.models.profiles import Profiles, make_profiles
from chainhydro.domain.models.state import StateFlavor
from chainhydro.services.euler_macro import (
    QuadratureError,
    initial_coefficients,
    macro_solution,
    pde_residuals,
    solve_macro,
    standing_wave,
)


class TestInitialCoefficients:
    """Tests for the Fourier projection of the initial profiles."""

    def test_single_mode_wave(self, wave):
        sine, cosine = initial_coefficients(wave, 64)
        assert sine[1] == pytest.approx(0.2, abs=1e-12)
        assert cosine[1] == pytest.approx(0.3, abs=1e-12)
        assert np.max(np.abs(np.delete(sine, 1))) < 1e-12
        assert np.max(np.abs(np.delete(cosine, 1))) < 1e-12

    def test_jump_without_breakpoint_does_not_converge(self):
        profiles = Profiles(
            name="jump",
            beta=lambda y: np.ones_like(y),
            p_bar=lambda y: np.where(np.asarray(y) < 1.0 / 3.0, 1.0, -0.5),
            r_bar=lambda y: np.zeros_like(y),
        )
        with pytest.raises(QuadratureError, match="did not converge"):
            initial_coefficients(profiles, 64)


class TestMacroSolution:
    """Tests for the exact macroscopic solution."""

    @pytest.mark.parametrize("t", [0.0, 0.25, 0.7, 1.0])
    def test_standing_wave(self, wave, t):
        fields = solve_macro(wave, mean_mass=1.5, t=t, n_modes=64, grid_points=129)
        fr, fp = standing_wave(0.2, 0.3, 1.5, fields.grid, t)
        assert np.max(np.abs(fields.fr - fr)) < 1e-12
        assert np.max(np.abs(fields.fp - fp)) < 1e-12

    def test_equilibrium_is_static(self):
        profiles = make_profiles("equilibrium", {"beta": 2.0})
        fields = solve_macro(profiles, mean_mass=1.5, t=0.8, n_modes=64, grid_points=33)
        np.testing.assert_allclose(fields.fr, 0.0, atol=1e-15)
        np.testing.assert_allclose(fields.fp, 0.0, atol=1e-15)
        np.testing.assert_allclose(fields.fe, 0.5)

    def test_elongation_vanishes_at_boundary(self, wave):
        fields = solve_macro(wave, mean_mass=1.5, t=0.3, n_modes=64)
        assert fields.boundary_values() == (0.0, 0.0)

    def test_momentum_is_conserved(self):
        profiles = Profiles(
            name="drift",
            beta=lambda y: np.ones_like(y),
            p_bar=lambda y: 0.1 + 0.2 * np.cos(np.pi * np.asarray(y)),
            r_bar=lambda y: np.zeros_like(y),
        )
        solution = macro_solution(profiles, mean_mass=1.5, n_modes=64)
        for t in (0.0, 0.3, 1.1):
            assert solution.momentum(t) == pytest.approx(0.1, abs=1e-12)
            assert solution.integral(lambda y: np.ones_like(y), "p", t) == pytest.approx(0.1, abs=1e-12)

    def test_slaving_relation_holds(self):
        profiles = make_profiles("wave", {"beta": 1.0, "beta_slope": 0.5})
        fields = solve_macro(profiles, mean_mass=1.5, t=0.4, n_modes=64, grid_points=65)
        assert fields.slaving_residual() < 1e-14
        np.testing.assert_allclose(fields.slaving_const, 1.0 / (1.0 + 0.5 * fields.grid))

    def test_quantum_flavor_uses_thermal_profile(self, wave):
        solution = macro_solution(
            wave, 1.5, n_modes=64, flavor=StateFlavor.QUANTUM, b_bar=lambda y: np.full_like(y, 0.7)
        )
        fields = solution.fields(0.2, grid_points=17)
        np.testing.assert_allclose(fields.slaving_const, 0.7)

    def test_argument_checks(self, wave):
        with pytest.raises(ValueError, match="at least"):
            macro_solution(wave, 1.5, n_modes=32)
        with pytest.raises(ValueError, match="thermal profile"):
            macro_solution(wave, 1.5, n_modes=64, flavor=StateFlavor.QUANTUM)


class TestPdeResiduals:
    """Tests for the residuals of the Euler equations."""

    def test_spectral_residuals_vanish(self):
        profiles = make_profiles("wave", {"beta": 1.0, "beta_slope": 0.3})
        solution = macro_solution(profiles, mean_mass=1.5, n_modes=64)
        first = solution.fields(0.5, grid_points=129)
        second = solution.fields(0.5 + 1e-5, grid_points=129)
        assert max(pde_residuals(first, second)) < 1e-6

    def test_finite_difference_residuals_are_small(self, wave):
        solution = macro_solution(wave, mean_mass=1.5, n_modes=64)
        first = solution.fields(0.5, grid_points=1025)
        second = solution.fields(0.5 + 1e-5, grid_points=1025)
        assert max(pde_residuals(first, second, derivative="fd")) < 1e-3

    def test_snapshot_order(self, wave):
        solution = macro_solution(wave, mean_mass=1.5, n_modes=64)
        first, second = solution.fields(0.5, 9), solution.fields(0.4, 9)
        with pytest.raises(ValueError, match="later"):
            pde_residuals(first, second)
        with pytest.raises(ValueError, match="Unknown derivative"):
            pde_residuals(second, first, derivative="upwind")
