"""Pass/fail rules evaluated on a finished report (``--check``)."""

from __future__ import annotations

import math
from typing import Callable

from chainhydro.domain.models.profiles import ProfilePreset
from chainhydro.domain.models.results import ConvergenceReport

from .config import ExperimentConfig, ExperimentKind

EIGENVALUE_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
GROUND_STATE_TOL = 1e-11
CONSERVATION_TOL = 1e-10
STATIONARITY_TOL = 1e-8
MODE_MOMENT_TOL = 1e-10
TAYLOR_TOL = 1e-8
CCR_TOL = 1e-8
CLASSICAL_LIMIT_TOL = 1e-4
CLASSICAL_LIMIT_BETA = 1e-2
SQUARE_DECAY_SPREAD = 4.0
LOCALIZATION_R = 0.9
CONTROL_FRACTION = 0.1
FREQUENCY_SLOPE = 1.1
STANDING_WAVE_TOL = 1e-8
PDE_TOL = 1e-6
SLAVING_TOL = 1e-8
MOMENTUM_TOL = 1e-10
Z_LIMIT = 5.0
BOUND_RTOL = 1e-12
THERMAL_FLATNESS = 0.02

Criteria = dict[str, bool]


def _values(report: ConvergenceReport, metric: str) -> list[float]:
    return [row.value for row in report.rows if row.metric == metric]


def _all_below(report: ConvergenceReport, metric: str, limit: float) -> bool | None:
    """None when the metric was not produced."""
    values = _values(report, metric)
    if not values:
        return None
    return all(math.isfinite(v) and v < limit for v in values)


def _paired_within(report: ConvergenceReport, value_metric: str, bound_metric: str) -> bool:
    bounds = {
        (row.n, row.seed, row.t): row.value for row in report.rows if row.metric == bound_metric
    }
    pairs = [
        (row.value, bounds[(row.n, row.seed, row.t)])
        for row in report.rows
        if row.metric == value_metric and (row.n, row.seed, row.t) in bounds
    ]
    return bool(pairs) and all(value <= bound * (1.0 + BOUND_RTOL) for value, bound in pairs)


def _set(criteria: Criteria, name: str, outcome: bool | None) -> None:
    if outcome is not None:
        criteria[name] = bool(outcome)


def _is_equilibrium(config: ExperimentConfig) -> bool:
    return ProfilePreset.from_string(config.profiles.preset) is ProfilePreset.EQUILIBRIUM


def _trends(report: ConvergenceReport, prefixes: tuple[str, ...]) -> bool | None:
    fits = [fit for key, fit in report.fits.items() if key.startswith(prefixes)]
    if not fits:
        return None
    return all(fit.passed for fit in fits)


def _spectrum(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _set(criteria, "eigenvalues_match_dense", _all_below(report, "eigenvalue_error", EIGENVALUE_TOL))
    _set(criteria, "orthonormal_p", _all_below(report, "orthonormality", ORTHONORMALITY_TOL))
    _set(criteria, "orthonormal_r", _all_below(report, "r_orthonormality", ORTHONORMALITY_TOL))
    _set(criteria, "ground_state", _all_below(report, "ground_state_error", GROUND_STATE_TOL))
    _set(criteria, "clean_chain", _all_below(report, "clean_chain_error", EIGENVALUE_TOL * 4.0))
    _set(criteria, "thermal_norm_bound", _paired_within(report, "thermal_norm", "thermal_bound_square"))


def _localization(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    details = report.details.get("localization", {})
    if details:
        largest = details[str(max(int(n) for n in details))]
        fit = largest.get("p")
        criteria["correlator_decays"] = bool(
            fit and fit["slope"] < 0 and abs(fit["rvalue"]) > LOCALIZATION_R
        )
        if config.control and fit:
            control = largest.get("control")
            criteria["control_flat"] = control is None or abs(control["slope"]) < (
                CONTROL_FRACTION * abs(fit["slope"])
            )
    _frequency(report, criteria)


def _frequency(report: ConvergenceReport, criteria: Criteria) -> None:
    fit = report.details.get("frequency_floor", {}).get("fit")
    if fit is not None:
        criteria["frequency_floor"] = fit["slope"] <= FREQUENCY_SLOPE


def _conservation(report: ConvergenceReport, criteria: Criteria) -> None:
    _set(criteria, "momentum_conserved", _all_below(report, "momentum_drift", CONSERVATION_TOL))
    _set(criteria, "energy_conserved", _all_below(report, "energy_drift", CONSERVATION_TOL))


def _hydro_common(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _conservation(report, criteria)
    if _is_equilibrium(config):
        _set(criteria, "stationary", _all_below(report, "covariance_change", STATIONARITY_TOL))
    else:
        _set(criteria, "quadvar_trend", _trends(report, ("quadvar_", "full_quadvar_")))


def _classical_hydro(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _hydro_common(config, report, criteria)
    if not _is_equilibrium(config):
        _set(criteria, "mean_gap_trend", _trends(report, ("gap_",)))


def _quantum_hydro(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _hydro_common(config, report, criteria)
    _set(criteria, "mode_moments", _all_below(report, "mode_moment_error", MODE_MOMENT_TOL))
    _set(criteria, "clustering_decay", _all_below(report, "clustering_q", 1.0))
    square_decay = list(report.details.get("square_decay_by_n", {}).values())
    if square_decay:
        positive = [v for v in square_decay if v > 0]
        criteria["square_decay_stable"] = bool(positive) and (
            max(positive) <= SQUARE_DECAY_SPREAD * min(positive)
        )
    _set(criteria, "taylor_band", _all_below(report, "taylor_gap", TAYLOR_TOL))
    _set(criteria, "ccr_preserved", _all_below(report, "ccr_defect", CCR_TOL))
    _set(criteria, "thermal_norm_bound", _paired_within(report, "thermal_norm", "thermal_bound_square"))
    if config.build_profiles().beta_plus <= CLASSICAL_LIMIT_BETA:
        _set(criteria, "classical_limit", _all_below(report, "classical_gap", CLASSICAL_LIMIT_TOL))
    _thermal_profile(report, criteria)


def _thermal_profile(report: ConvergenceReport, criteria: Criteria) -> None:
    thermal = report.details.get("thermal_profile")
    if not thermal:
        return
    criteria["quantum_above_classical"] = thermal["quantum_excess"] >= -BOUND_RTOL
    if thermal["isothermal"]:
        criteria["thermal_profile_flat"] = thermal["bulk_deviation"] < THERMAL_FLATNESS


def _convergence_sweep(
    config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria
) -> None:
    criteria["initial_mode_bound"] = _paired_within(
        report, "initial_mode_max", "initial_mode_bound"
    )
    criteria["low_mode_bound"] = _paired_within(report, "low_mode_value", "low_mode_bound")
    criteria["offdiag_near_p"] = _paired_within(report, "offdiag_near_p", "offdiag_bound_p")
    criteria["offdiag_near_r"] = _paired_within(report, "offdiag_near_r", "offdiag_bound_r")
    _frequency(report, criteria)


def _euler_solve(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _set(criteria, "standing_wave", _all_below(report, "standing_wave_error", STANDING_WAVE_TOL))
    for z in ("r", "p", "e"):
        _set(criteria, f"pde_residual_{z}", _all_below(report, f"pde_residual_{z}", PDE_TOL))
    _set(criteria, "slaving", _all_below(report, "slaving_residual", SLAVING_TOL))
    _set(criteria, "slaving_constant", _all_below(report, "slaving_drift", SLAVING_TOL))
    _set(criteria, "momentum_conserved", _all_below(report, "momentum_drift", MOMENTUM_TOL))


def _monte_carlo(config: ExperimentConfig, report: ConvergenceReport, criteria: Criteria) -> None:
    _set(criteria, "z_scores", _all_below(report, "max_abs_z", Z_LIMIT))


RULES: dict[ExperimentKind, Callable[[ExperimentConfig, ConvergenceReport, Criteria], None]] = {
    ExperimentKind.SPECTRUM: _spectrum,
    ExperimentKind.LOCALIZATION: _localization,
    ExperimentKind.CLASSICAL_HYDRO: _classical_hydro,
    ExperimentKind.QUANTUM_HYDRO: _quantum_hydro,
    ExperimentKind.CONVERGENCE_SWEEP: _convergence_sweep,
    ExperimentKind.EULER_SOLVE: _euler_solve,
    ExperimentKind.MONTE_CARLO_CHECK: _monte_carlo,
}


def evaluate_acceptance(config: ExperimentConfig, report: ConvergenceReport) -> Criteria:
    """Evaluate the criteria that apply to ``config`` and store them on the report."""
    criteria: Criteria = {"no_failed_cells": not report.failed}
    RULES[config.experiment](config, report, criteria)
    report.acceptance = dict(sorted(criteria.items()))
    return report.acceptance


__all__ = ["RULES", "evaluate_acceptance"]
