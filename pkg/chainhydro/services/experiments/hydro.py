"""Hydrodynamic-limit pipelines: classical and quantum chains against the Euler solve."""

from __future__ import annotations

from concurrent.futures import Executor
from functools import partial

import numpy as np

from chainhydro.domain.analytics.convergence import markov_bound
from chainhydro.domain.analytics.quadrature import integrate
from chainhydro.domain.models.chain import DisorderedChain
from chainhydro.domain.models.profiles import TestFunction
from chainhydro.domain.models.results import ConvergenceReport
from chainhydro.domain.models.spectral import SpectralData
from chainhydro.domain.models.state import GaussianChainState, StateFlavor

from ..chain_model import sample_masses
from ..classical_state import local_gibbs_moments
from ..dynamics import (
    FIELDS,
    CovariancePropagator,
    conservation_drift,
    empirical_mean_functional,
    full_quad_var,
    quad_var,
    quad_var_energy,
)
from ..euler_macro import MacroSolution, macro_solution, pde_residuals, standing_wave
from ..quantum_state import (
    ThermalProfile,
    aa1_residual,
    aggregate_thermal_profile,
    build_thermal,
    classical_limit_gap,
    mode_space_moments,
    quantum_locally_gibbs_state,
    taylor_covariance,
    thermal_site_energy,
    verify_clustering,
)
from .base import NO_FUNCTION, Cell, CellOutcome, Overlay, Pipeline, RunArtifacts, smoothed, trend_fit
from .config import ExperimentConfig

THERMAL_SEED_OFFSET = 2**32
OVERLAY_WINDOWS = 32
PDE_STEP = 1e-5
SINGLE_MODE_TOL = 1e-12


class ClassicalHydroPipeline(Pipeline):
    """Means, quadratic variations and conservation of the evolved classical state."""

    name = "classical-hydro"
    flavor = StateFlavor.CLASSICAL

    def __init__(self, config: ExperimentConfig, spectral) -> None:  # type: ignore[no-untyped-def]
        super().__init__(config, spectral)
        self.times = sorted(set(config.times))
        self.solution: MacroSolution | None = None
        if self.flavor is StateFlavor.CLASSICAL:
            self.solution = macro_solution(self.profiles, self.law.mean, config.n_modes)

    # -- per cell --------------------------------------------------------

    def _keeps_overlay(self, cell: Cell) -> bool:
        return cell.n == max(self.config.n_list) and cell.seed == self.config.seed_list[0]

    def _functional_rows(
        self, out: CellOutcome, cell: Cell, state: GaussianChainState, t: float
    ) -> None:
        assert self.solution is not None
        delta = self.config.delta
        for f in self.test_functions:
            fluctuation = {
                "r": quad_var(f, "r", state),
                "p": quad_var(f, "p", state),
                "e": quad_var_energy(f, state),
            }
            for z in FIELDS:
                mean = empirical_mean_functional(f, z, state)
                macro = self.solution.integral(f, z, t)
                full = full_quad_var(fluctuation[z], mean, macro)
                out.rows.extend(
                    [
                        self.row(cell, f"gap_{z}", abs(mean - macro), t, f.name),
                        self.row(cell, f"quadvar_{z}", fluctuation[z], t, f.name),
                        self.row(cell, f"full_quadvar_{z}", full, t, f.name),
                        self.row(cell, f"markov_{z}", markov_bound(fluctuation[z], delta), t, f.name),
                        self.row(cell, f"markov_full_{z}", markov_bound(full, delta), t, f.name),
                    ]
                )

    def _overlay_payload(self, state: GaussianChainState, t: float) -> dict[str, tuple]:
        n = state.n
        window = max(1, n // OVERLAY_WINDOWS)
        sites = np.arange(1, n + 1) / n
        return {
            "p": (smoothed(sites, window), smoothed(state.mean_p, window)),
            "r": (smoothed(sites[:-1], window), smoothed(state.mean_r, window)),
            "e": (smoothed(sites, window), smoothed(state.site_energy_means(), window)),
        }

    def _evolve_rows(
        self,
        out: CellOutcome,
        cell: Cell,
        state0: GaussianChainState,
        spec: SpectralData,
    ) -> dict[float, GaussianChainState]:
        propagator = CovariancePropagator(state0, spec)
        evolved: dict[float, GaussianChainState] = {}
        for t in self.times:
            state = propagator.state_at_macro(t)
            evolved[t] = state
            self._functional_rows(out, cell, state, t)
            for metric, value in conservation_drift(state0, state).items():
                out.rows.append(self.row(cell, metric, value, t))
            if self._keeps_overlay(cell):
                out.payload.setdefault("overlay", {})[t] = self._overlay_payload(state, t)
        return evolved

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        out = CellOutcome(cell)
        self._evolve_rows(out, cell, local_gibbs_moments(chain, self.profiles), spec)
        return out

    # -- reduction -------------------------------------------------------

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        assert self.solution is not None
        artifacts = RunArtifacts()
        ratio = self.config.required_ratio
        for t in self.times:
            for f in self.test_functions:
                for z in FIELDS:
                    trend_fit(report, artifacts, f"gap_{z}", f.name, t, ratio, group="gap")
                    trend_fit(report, artifacts, f"quadvar_{z}", f.name, t, ratio, group="quadvar")
                    trend_fit(
                        report, artifacts, f"full_quadvar_{z}", f.name, t, ratio, group="full_quadvar"
                    )
                    trend_fit(report, artifacts, f"markov_{z}", f.name, t, ratio, group="markov")
        report.details["markov_delta"] = self.config.delta
        report.details["mean_mass"] = self.law.mean
        artifacts.fields = [self.solution.fields(t, self.config.grid_points) for t in self.times]
        self._overlays(outcomes, artifacts)
        return artifacts

    def _overlays(self, outcomes: list[CellOutcome], artifacts: RunArtifacts) -> None:
        assert self.solution is not None
        for outcome in outcomes:
            overlay = outcome.payload.get("overlay")
            if not overlay:
                continue
            for t, profiles in sorted(overlay.items()):
                grid = np.linspace(0.0, 1.0, self.config.grid_points)
                fr, fp, fe = self.solution.evaluate(grid, t)
                macro = {"r": fr, "p": fp, "e": fe}
                for z in FIELDS:
                    y_micro, micro = profiles[z]
                    artifacts.overlays.append(
                        Overlay(
                            label=z,
                            n=outcome.cell.n,
                            t=t,
                            y_micro=y_micro,
                            micro=micro,
                            y_macro=grid,
                            macro=macro[z],
                        )
                    )


class QuantumHydroPipeline(ClassicalHydroPipeline):
    """Quantum locally Gibbs states: assumption checks and quadratic variations.

    The thermal profile b̄ is estimated once, at the largest n, from an
    ensemble of ``thermal_seeds`` chains disjoint from the cell seeds.
    """

    name = "quantum-hydro"
    flavor = StateFlavor.QUANTUM

    def __init__(self, config: ExperimentConfig, spectral) -> None:  # type: ignore[no-untyped-def]
        super().__init__(config, spectral)
        self.profiles.require_zero_momentum()
        self.thermal_profile: ThermalProfile | None = None

    def thermal_seeds(self) -> list[int]:
        base = self.config.seeds.base + THERMAL_SEED_OFFSET
        return [(base + i) % 2**64 for i in range(self.config.thermal_seeds)]

    def _thermal_energy(self, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        return thermal_site_energy(sample_masses(n, self.law, seed), self.profiles)

    def prepare(self, executor: Executor) -> None:
        n_ref = max(self.config.n_list)
        seeds = self.thermal_seeds()
        self._logger.info("Estimating thermal profile at n=%d from %d chains", n_ref, len(seeds))
        energies = list(executor.map(partial(self._thermal_energy, n_ref), seeds))
        self.thermal_profile = aggregate_thermal_profile(
            np.vstack([quantum for quantum, _ in energies]),
            np.vstack([classical for _, classical in energies]),
            self.profiles.beta_sites(n_ref),
            seed=n_ref,
        )
        self.solution = macro_solution(
            self.profiles,
            self.law.mean,
            self.config.n_modes,
            flavor=StateFlavor.QUANTUM,
            b_bar=self.thermal_profile.as_function(),
        )

    def _b_integral(self, f: TestFunction) -> float:
        assert self.thermal_profile is not None
        b_bar = self.thermal_profile.as_function()
        return integrate(lambda y: f(y) * b_bar(y), panels=128)

    def _assumption_rows(self, out: CellOutcome, cell: Cell, chain: DisorderedChain) -> GaussianChainState:
        thermal = build_thermal(chain, self.profiles)
        state0, qcov = quantum_locally_gibbs_state(chain, self.profiles, thermal)
        rows = out.rows
        rows.append(self.row(cell, "aa1_residual", aa1_residual(state0, chain, self.profiles)))
        sites = chain.sites()
        for f in self.test_functions:
            empirical = float(np.dot(f(sites), qcov.b_profile)) / chain.n
            rows.append(self.row(cell, "aa2_gap", abs(empirical - self._b_integral(f)), f=f.name))
        rows.append(self.row(cell, "mode_moment_error", mode_space_moments(qcov, thermal).max_error()))
        rows.append(self.row(cell, "classical_gap", classical_limit_gap(qcov, thermal)))

        norm = thermal.norm_report()
        rows.append(self.row(cell, "thermal_norm", norm["norm"]))
        rows.append(self.row(cell, "thermal_bound_square", norm["bound_square"]))

        clustering = verify_clustering(qcov)
        rows.append(self.row(cell, "clustering_q", clustering.q))
        rows.append(self.row(cell, "square_decay_constant", clustering.square_decay_constant))
        rows.append(self.row(cell, "quartic_constant", clustering.quartic_constant))
        if self.config.taylor_order > 0:
            taylor = taylor_covariance(thermal, self.config.taylor_order)
            rows.append(self.row(cell, "taylor_gap", taylor.max_gap(qcov.pp_kernel())))
            rows.append(self.row(cell, "taylor_outside_band", taylor.outside_band_max()))
        return state0

    def run_cell(self, cell: Cell) -> CellOutcome:
        chain = self.chain(cell)
        spec = self.spectral.spectrum(chain)
        out = CellOutcome(cell)
        state0 = self._assumption_rows(out, cell, chain)
        initial_ccr = np.imag(state0.two_point_matrix())
        for t, state in self._evolve_rows(out, cell, state0, spec).items():
            defect = float(np.max(np.abs(np.imag(state.two_point_matrix()) - initial_ccr)))
            out.rows.append(self.row(cell, "ccr_defect", defect, t))
        return out

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        artifacts = super().finalize(report, outcomes, executor)
        artifacts.thermal = self.thermal_profile
        trend_fit(report, artifacts, "aa1_residual", group="assumptions")
        for f in self.test_functions:
            trend_fit(report, artifacts, "aa2_gap", f.name, group="assumptions")
        square_decay: dict[str, float] = {}
        for row in report.rows:
            if row.metric == "square_decay_constant":
                square_decay[str(row.n)] = max(square_decay.get(str(row.n), 0.0), row.value)
        report.details["square_decay_by_n"] = dict(
            sorted(square_decay.items(), key=lambda kv: int(kv[0]))
        )
        if self.thermal_profile is not None:
            report.details["thermal_profile"] = {
                "n": max(self.config.n_list),
                "seeds": self.config.thermal_seeds,
                **self.thermal_profile.summary(),
            }
        return artifacts


class EulerSolvePipeline(Pipeline):
    """Reference solve of the macroscopic system with self-checks."""

    name = "euler-solve"

    def cells(self) -> list[Cell]:
        return [Cell(self.config.grid_points, 0)]

    def _single_mode(self, solution: MacroSolution) -> bool:
        rest_r = np.delete(solution.sine0, 1)
        rest_p = np.delete(solution.cosine0, 1)
        return bool(max(np.max(np.abs(rest_r)), np.max(np.abs(rest_p))) < SINGLE_MODE_TOL)

    def run_cell(self, cell: Cell) -> CellOutcome:
        solution = macro_solution(self.profiles, self.law.mean, self.config.n_modes)
        out = CellOutcome(cell)
        rows = out.rows
        grid_points = self.config.grid_points
        base = solution.fields(0.0, grid_points)
        thermal0 = base.fe - base.fp**2 / (2.0 * base.mean_mass) - 0.5 * base.fr**2
        momentum0 = solution.momentum(0.0)
        single_mode = self._single_mode(solution)
        snapshots = []
        for t in sorted(set(self.config.times)):
            fields = solution.fields(t, grid_points)
            snapshots.append(fields)
            thermal = fields.fe - fields.fp**2 / (2.0 * fields.mean_mass) - 0.5 * fields.fr**2
            rows.append(self.row(cell, "momentum", solution.momentum(t), t))
            rows.append(self.row(cell, "momentum_drift", abs(solution.momentum(t) - momentum0), t))
            rows.append(self.row(cell, "slaving_residual", fields.slaving_residual(), t))
            rows.append(self.row(cell, "slaving_drift", float(np.max(np.abs(thermal - thermal0))), t))
            later = solution.fields(t + PDE_STEP, grid_points)
            for z, value in zip(FIELDS, pde_residuals(fields, later)):
                rows.append(self.row(cell, f"pde_residual_{z}", value, t))
            if single_mode:
                fr, fp = standing_wave(
                    solution.sine0[1], solution.cosine0[1], solution.mean_mass, fields.grid, t
                )
                error = max(np.max(np.abs(fields.fr - fr)), np.max(np.abs(fields.fp - fp)))
                rows.append(self.row(cell, "standing_wave_error", float(error), t))
        out.payload["fields"] = snapshots
        return out

    def finalize(
        self, report: ConvergenceReport, outcomes: list[CellOutcome], executor: Executor
    ) -> RunArtifacts:
        artifacts = RunArtifacts()
        for outcome in outcomes:
            artifacts.fields.extend(outcome.payload.get("fields", []))
        maxima: dict[str, float] = {}
        for row in report.rows:
            maxima[row.metric] = max(maxima.get(row.metric, -np.inf), row.value)
        report.details["max"] = maxima
        report.details["mean_mass"] = self.law.mean
        return artifacts


__all__ = [
    "ClassicalHydroPipeline",
    "EulerSolvePipeline",
    "NO_FUNCTION",
    "QuantumHydroPipeline",
]
