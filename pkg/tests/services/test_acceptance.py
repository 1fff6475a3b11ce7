import math

from chainhydro.domain.models.results import CellFailure, ConvergenceReport, MetricFit, ReportRow
from chainhydro.services.experiments import ExperimentConfig, evaluate_acceptance
from chainhydro.services.experiments.acceptance import RULES
from chainhydro.services.experiments.config import ExperimentKind


def _report(config: ExperimentConfig) -> ConvergenceReport:
    return ConvergenceReport(
        experiment=config.experiment.value,
        config_hash=config.config_hash(),
        version="test",
        config={},
    )


def _row(metric: str, value: float, n: int = 32, seed: int = 0, t: float = 0.0) -> ReportRow:
    return ReportRow("x", n, seed, t, "-", metric, value)


def test_every_kind_has_rules():
    assert set(RULES) == set(ExperimentKind)


def test_failed_cells_always_reported():
    config = ExperimentConfig(experiment="monte-carlo-check")
    report = _report(config)
    report.failures.append(CellFailure("monte-carlo-check", 32, 1, "ValueError", "boom"))
    criteria = evaluate_acceptance(config, report)
    assert criteria == {"no_failed_cells": False}
    assert report.acceptance == criteria
    assert not report.accepted


class TestMonteCarloRules:
    def test_z_limit(self):
        config = ExperimentConfig(experiment="monte-carlo-check")
        report = _report(config)
        report.extend([_row("max_abs_z", 2.5), _row("max_abs_z", 4.9, seed=1)])
        assert evaluate_acceptance(config, report)["z_scores"]
        report.extend([_row("max_abs_z", 5.2, seed=2)])
        assert not evaluate_acceptance(config, report)["z_scores"]

    def test_non_finite_fails(self):
        config = ExperimentConfig(experiment="monte-carlo-check")
        report = _report(config)
        report.extend([_row("max_abs_z", math.nan)])
        assert not evaluate_acceptance(config, report)["z_scores"]


class TestEulerRules:
    def test_all_checks(self):
        config = ExperimentConfig(experiment="euler-solve")
        report = _report(config)
        report.extend(
            [
                _row("standing_wave_error", 1e-12),
                _row("pde_residual_r", 1e-8),
                _row("pde_residual_p", 1e-8),
                _row("pde_residual_e", 5e-6),
                _row("slaving_residual", 0.0),
                _row("slaving_drift", 1e-14),
                _row("momentum_drift", 1e-15),
            ]
        )
        criteria = evaluate_acceptance(config, report)
        assert criteria["standing_wave"]
        assert criteria["pde_residual_r"] and criteria["pde_residual_p"]
        assert not criteria["pde_residual_e"]
        assert criteria["slaving"] and criteria["slaving_constant"]
        assert criteria["momentum_conserved"]
        assert not report.accepted

    def test_missing_metrics_are_skipped(self):
        config = ExperimentConfig(experiment="euler-solve")
        report = _report(config)
        report.extend([_row("pde_residual_r", 1e-9)])
        criteria = evaluate_acceptance(config, report)
        assert "standing_wave" not in criteria
        assert criteria == {"no_failed_cells": True, "pde_residual_r": True}


class TestSpectrumRules:
    def test_paired_bound(self):
        config = ExperimentConfig(experiment="spectrum")
        report = _report(config)
        report.extend(
            [
                _row("thermal_norm", 3.0, seed=0),
                _row("thermal_bound_square", 8.0, seed=0),
                _row("thermal_norm", 4.0, seed=1),
                _row("thermal_bound_square", 4.0, seed=1),
                _row("eigenvalue_error", 1e-12),
                _row("orthonormality", 1e-13),
            ]
        )
        criteria = evaluate_acceptance(config, report)
        assert criteria["thermal_norm_bound"]
        assert criteria["eigenvalues_match_dense"]
        assert criteria["orthonormal_p"]
        assert "ground_state" not in criteria

    def test_paired_bound_violated(self):
        config = ExperimentConfig(experiment="spectrum")
        report = _report(config)
        report.extend([_row("thermal_norm", 9.0), _row("thermal_bound_square", 8.0)])
        assert not evaluate_acceptance(config, report)["thermal_norm_bound"]


class TestConvergenceSweepRules:
    def _rows(self, value: float, bound: float) -> list[ReportRow]:
        rows = []
        for n in (32, 64):
            rows += [
                _row("initial_mode_max", value, n=n),
                _row("initial_mode_bound", bound, n=n),
                _row("low_mode_value", value, n=n, t=0.5),
                _row("low_mode_bound", bound, n=n, t=0.5),
                _row("offdiag_near_p", value / 2, n=n, t=0.5),
                _row("offdiag_bound_p", bound, n=n, t=0.5),
                _row("offdiag_near_r", value / 2, n=n, t=0.5),
                _row("offdiag_bound_r", bound, n=n, t=0.5),
            ]
        return rows

    def test_equality_within_rounding(self):
        config = ExperimentConfig(experiment="convergence-sweep")
        report = _report(config)
        report.extend(self._rows(1.0 + 1e-15, 1.0))
        criteria = evaluate_acceptance(config, report)
        assert criteria["initial_mode_bound"]
        assert criteria["low_mode_bound"]
        assert criteria["offdiag_near_p"] and criteria["offdiag_near_r"]

    def test_missing_pairs_fail(self):
        config = ExperimentConfig(experiment="convergence-sweep")
        criteria = evaluate_acceptance(config, _report(config))
        assert not criteria["initial_mode_bound"]

    def test_frequency_slope(self):
        config = ExperimentConfig(experiment="convergence-sweep")
        report = _report(config)
        report.details["frequency_floor"] = {"fit": {"slope": 1.3}}
        assert not evaluate_acceptance(config, report)["frequency_floor"]
        report.details["frequency_floor"] = {"fit": {"slope": 0.72}}
        assert evaluate_acceptance(config, report)["frequency_floor"]


class TestLocalizationRules:
    def test_decay_and_control(self):
        config = ExperimentConfig(experiment="localization")
        report = _report(config)
        report.details["localization"] = {
            "64": {"p": {"slope": -0.01, "rvalue": -0.5}, "control": None},
            "128": {
                "p": {"slope": -0.05, "rvalue": -0.97},
                "control": {"slope": 0.001, "rvalue": 0.1},
            },
        }
        criteria = evaluate_acceptance(config, report)
        assert criteria["correlator_decays"]
        assert criteria["control_flat"]

    def test_flat_correlator_fails(self):
        config = ExperimentConfig(experiment="localization", control=False)
        report = _report(config)
        report.details["localization"] = {"128": {"p": {"slope": 0.02, "rvalue": 0.99}}}
        criteria = evaluate_acceptance(config, report)
        assert not criteria["correlator_decays"]
        assert "control_flat" not in criteria


class TestHydroRules:
    def _fit(self, passed: bool) -> MetricFit:
        return MetricFit("m", (32, 64), (1.0, 0.4), -1.3, 2.5, True, passed)

    def test_equilibrium_checks_stationarity(self):
        config = ExperimentConfig(experiment="classical-hydro")
        report = _report(config)
        report.extend([_row("covariance_change", 1e-13), _row("energy_drift", 1e-12)])
        criteria = evaluate_acceptance(config, report)
        assert criteria["stationary"]
        assert criteria["energy_conserved"]
        assert "mean_gap_trend" not in criteria

    def test_profile_run_checks_trends(self):
        config = ExperimentConfig(
            experiment="classical-hydro",
            profiles={"preset": "wave", "params": {"p_amplitude": 0.3, "r_amplitude": 0.2}},
        )
        report = _report(config)
        report.fits["gap_p:sine:t=0.5"] = self._fit(True)
        report.fits["quadvar_p:sine:t=0.5"] = self._fit(True)
        report.fits["markov_p:sine:t=0.5"] = self._fit(False)
        criteria = evaluate_acceptance(config, report)
        assert criteria["mean_gap_trend"]
        assert criteria["quadvar_trend"]
        assert "stationary" not in criteria

    def test_momentum_drift_not_scaled_by_size(self):
        config = ExperimentConfig(experiment="classical-hydro")
        report = _report(config)
        report.extend([_row("momentum_drift", 1e-9, n=512)])
        assert not evaluate_acceptance(config, report)["momentum_conserved"]
        report = _report(config)
        report.extend([_row("momentum_drift", 5e-11, n=512), _row("momentum_drift", 1e-14, n=16)])
        assert evaluate_acceptance(config, report)["momentum_conserved"]

    def test_quantum_checks(self):
        config = ExperimentConfig(experiment="quantum-hydro")
        report = _report(config)
        report.extend(
            [
                _row("mode_moment_error", 1e-12),
                _row("clustering_q", 0.6),
                _row("taylor_gap", 1e-10),
                _row("ccr_defect", 1e-14, t=0.5),
            ]
        )
        report.details["square_decay_by_n"] = {"32": 1.0, "64": 1.5}
        criteria = evaluate_acceptance(config, report)
        for name in (
            "mode_moments",
            "clustering_decay",
            "square_decay_stable",
            "taylor_band",
            "ccr_preserved",
        ):
            assert criteria[name], name
        assert "classical_limit" not in criteria

    def test_quantum_classical_limit_only_at_high_temperature(self):
        config = ExperimentConfig(
            experiment="quantum-hydro", profiles={"preset": "equilibrium", "params": {"beta": 0.005}}
        )
        report = _report(config)
        report.extend([_row("classical_gap", 2e-4)])
        assert not evaluate_acceptance(config, report)["classical_limit"]

    @staticmethod
    def _thermal(excess: float, deviation: float, isothermal: bool = True) -> dict:
        return {
            "n": 64,
            "seeds": 8,
            "isothermal": isothermal,
            "bulk_deviation": deviation,
            "quantum_excess": excess,
            "inverse_temperature_gap": 0.01,
        }

    def test_quantum_thermal_profile(self):
        config = ExperimentConfig(experiment="quantum-hydro")
        report = _report(config)
        report.details["thermal_profile"] = self._thermal(0.04, 0.01)
        criteria = evaluate_acceptance(config, report)
        assert criteria["quantum_above_classical"]
        assert criteria["thermal_profile_flat"]

        report.details["thermal_profile"] = self._thermal(-1e-6, 0.03)
        criteria = evaluate_acceptance(config, report)
        assert not criteria["quantum_above_classical"]
        assert not criteria["thermal_profile_flat"]

    def test_graded_temperature_skips_flatness(self):
        config = ExperimentConfig(experiment="quantum-hydro")
        report = _report(config)
        report.details["thermal_profile"] = self._thermal(1e-3, 0.4, isothermal=False)
        criteria = evaluate_acceptance(config, report)
        assert criteria["quantum_above_classical"]
        assert "thermal_profile_flat" not in criteria
