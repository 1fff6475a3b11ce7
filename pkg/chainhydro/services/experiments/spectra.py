"""Spectrum, localization and proof-step pipelines."""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import Executor

import numpy as np

from chainhydro.domain.models.chain import MassLaw
from chainhydro.domain.models.results import ConvergenceReport, LocalizationScan

from ..chain_model import build_Ap, sample_masses
from ..classical_state import initial_mode_bound, local_gibbs_moments
from ..dynamics import CovariancePropagator, low_mode_functional
from ..localization import (
    correlator_scan,
    frequency_scan,
    high_mode_offdiag_mass,
    ladder_pairs,
    min_frequency,
    seed_correlator,
)
from ..quantum_state import build_thermal
from ..spectral import build_spectral, clean_chain_eigenvalues
from .base import Cell, CellOutcome, Pipeline, RunArtifacts, ensemble_means, trend_fit

DENSE_LIMIT = 512


def _max_offdiag_identity(gram: np.ndarray) -> float:
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


class SpectrumPipeline(Pipeline):
    """Eigensolver diagnostics per chain, with a dense cross-check for small n."""

    name = "spectrum"

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        a_p = build_Ap(chain)
        out = CellOutcome(cell)
        rows = out.rows

        rows.append(self.row(cell, "orthonormality", _max_offdiag_identity(spec.phi_p.T @ spec.phi_p)))
        rows.append(
            self.row(cell, "r_orthonormality", _max_offdiag_identity(spec.phi_r.T @ spec.phi_r))
        )
        residual = a_p.matvec(spec.phi_p) - spec.phi_p * spec.eigenvalues[None, :]
        scale = max(a_p.gershgorin_bound(), 1.0)
        rows.append(
            self.row(cell, "eigen_residual", float(np.max(np.linalg.norm(residual, axis=0)) / scale))
        )
        rows.append(self.row(cell, "omega_1", spec.omega[1]))
        rows.append(self.row(cell, "omega_max", spec.omega[-1]))
        rows.append(self.row(cell, "degenerate_modes", len(spec.degenerate_modes)))

        if cell.n <= DENSE_LIMIT:
            dense_values, dense_vectors = np.linalg.eigh(a_p.to_dense())
            dense_scale = max(float(np.max(np.abs(dense_values))), 1.0)
            rows.append(
                self.row(
                    cell,
                    "eigenvalue_error",
                    float(np.max(np.abs(spec.eigenvalues - dense_values))) / dense_scale,
                )
            )
            ground = np.abs(dense_vectors[:, 0])
            rows.append(
                self.row(cell, "ground_state_error", float(np.max(np.abs(ground - chain.ground_state()))))
            )
        if self.law.is_degenerate:
            clean = clean_chain_eigenvalues(cell.n, self.law.lower)
            rows.append(
                self.row(cell, "clean_chain_error", float(np.max(np.abs(spec.eigenvalues - clean))))
            )

        thermal = build_thermal(chain, self.profiles)
        report = thermal.norm_report()
        rows.append(self.row(cell, "thermal_norm", report["norm"]))
        rows.append(self.row(cell, "thermal_bound_linear", report["bound_linear"]))
        rows.append(self.row(cell, "thermal_bound_square", report["bound_square"]))
        return out

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        maxima: dict[str, float] = {}
        for row in report.sorted_rows():
            maxima[row.metric] = max(maxima.get(row.metric, -np.inf), row.value)
        report.details["max"] = maxima
        norms = [r.value for r in report.rows if r.metric == "thermal_norm"]
        linear = [r.value for r in report.rows if r.metric == "thermal_bound_linear"]
        report.details["thermal_norm_within_linear"] = int(
            sum(v < b for v, b in zip(norms, linear))
        )
        report.details["chains"] = len(outcomes)
        return RunArtifacts()


class LocalizationPipeline(Pipeline):
    """High-mode correlator ensembles and the frequency floor along n."""

    name = "localization"

    def _pairs(self, n: int, basis: str) -> tuple[tuple[int, int, int], ...]:
        pairs = ladder_pairs(n, self.config.ladder_bases)
        if basis == "r":
            pairs = tuple(p for p in pairs if max(p[0], p[1]) < n - 1)
        return pairs

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        out = CellOutcome(cell)
        alpha = self.config.alpha
        for basis in ("p", "r"):
            pairs = self._pairs(cell.n, basis)
            values = seed_correlator(spec, alpha, pairs, basis)
            out.payload[basis] = values
            d_of_pair = np.array([d for _, _, d in pairs])
            for d in np.unique(d_of_pair):
                out.rows.append(
                    self.row(
                        cell,
                        f"correlator_{basis}",
                        float(values[d_of_pair == d].mean()),
                        f=f"d={int(d)}",
                    )
                )
        k_star, inverse = min_frequency(spec, self.config.gamma)
        out.payload["frequency"] = (cell.n, cell.seed, k_star, inverse)
        out.rows.append(self.row(cell, "inv_min_omega", inverse))
        out.rows.append(self.row(cell, "k_star", k_star))
        return out

    def _control(self, n: int, basis: str) -> LocalizationScan:
        chain = sample_masses(n, MassLaw.point(self.law.mean), seed=0)
        spec = build_spectral(chain)
        pairs = self._pairs(n, basis)
        values = seed_correlator(spec, self.config.alpha, pairs, basis)
        return correlator_scan(
            n, self.config.alpha, pairs, values[None, :], [0], basis=basis, warn_small=False
        )

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        artifacts = RunArtifacts()
        by_n: dict[int, list[CellOutcome]] = defaultdict(list)
        for outcome in outcomes:
            by_n[outcome.cell.n].append(outcome)
        details: dict[str, dict[str, object]] = {}
        for n in sorted(by_n):
            group = sorted(by_n[n], key=lambda o: o.cell.seed)
            seeds = [o.cell.seed for o in group]
            entry: dict[str, object] = {}
            for basis in ("p", "r"):
                per_seed = np.vstack([o.payload[basis] for o in group])
                scan = correlator_scan(
                    n, self.config.alpha, self._pairs(n, basis), per_seed, seeds, basis=basis
                )
                artifacts.scans.append(scan)
                entry[basis] = scan.fit.to_dict() if scan.fit else None
            if self.config.control:
                control = self._control(n, "p")
                artifacts.controls[n] = control
                entry["control"] = control.fit.to_dict() if control.fit else None
            details[str(n)] = entry
        report.details["localization"] = details

        rows = [o.payload["frequency"] for o in outcomes]
        artifacts.frequency = frequency_scan(rows, self.config.gamma)
        fit = artifacts.frequency.fit
        report.details["frequency_floor"] = {
            "gamma": self.config.gamma,
            "per_n_max": {str(k): v for k, v in artifacts.frequency.per_n_max().items()},
            "fit": fit.to_dict() if fit else None,
        }
        ns, means, errors = ensemble_means(report.rows, "inv_min_omega")
        artifacts.series.setdefault("frequency", {})["inv_min_omega"] = (ns, means, errors)
        return artifacts


class ConvergenceSweepPipeline(Pipeline):
    """Intermediate quantities of the hydrodynamic-limit argument along n.

    Per cell: the initial mode bound, the low-mode functional against
    |Ĩ(γ)|/(nβ_minus), the frequency floor on I(γ) and the near/far high-mode
    off-diagonal mass of the p and r blocks at every time.
    """

    name = "convergence-sweep"

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        state0 = local_gibbs_moments(chain, self.profiles)
        beta_minus = self.profiles.beta_minus
        gamma, theta = self.config.gamma, self.config.theta
        out = CellOutcome(cell)
        rows = out.rows

        bound = initial_mode_bound(state0, spec, beta_minus)
        rows.append(self.row(cell, "initial_mode_max", max(bound.max_pp, bound.max_rr)))
        rows.append(self.row(cell, "initial_mode_bound", bound.bound))
        k_star, inverse = min_frequency(spec, gamma)
        out.payload["frequency"] = (cell.n, cell.seed, k_star, inverse)
        rows.append(self.row(cell, "inv_min_omega", inverse))

        propagator = CovariancePropagator(state0, spec)
        for t in sorted(set(self.config.times)):
            state = propagator.state_at_macro(t)
            value, limit = low_mode_functional(state, spec, gamma, beta_minus)
            rows.append(self.row(cell, "low_mode_value", value, t))
            rows.append(self.row(cell, "low_mode_bound", limit, t))
            for block in ("p", "r"):
                split = high_mode_offdiag_mass(state, spec, gamma, theta, beta_minus, block)
                rows.append(self.row(cell, f"offdiag_near_{block}", split.u_less, t))
                rows.append(self.row(cell, f"offdiag_far_{block}", split.u_greater, t))
                rows.append(self.row(cell, f"offdiag_bound_{block}", split.bound_less, t))
        return out

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        artifacts = RunArtifacts()
        for t in sorted(set(self.config.times)):
            for metric in ("low_mode_value", "offdiag_near_p", "offdiag_near_r"):
                trend_fit(report, artifacts, metric, t=t, group="proof")
            for metric in ("offdiag_far_p", "offdiag_far_r"):
                trend_fit(report, artifacts, metric, t=t, group="offdiag_far")
        frequency_rows = [o.payload["frequency"] for o in outcomes]
        artifacts.frequency = frequency_scan(frequency_rows, self.config.gamma)
        fit = artifacts.frequency.fit
        report.details["frequency_floor"] = {"fit": fit.to_dict() if fit else None}
        return artifacts


__all__ = ["ConvergenceSweepPipeline", "LocalizationPipeline", "SpectrumPipeline"]
