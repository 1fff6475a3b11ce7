import csv
import json

import numpy as np
import pytest

from chainhydro.domain.models.chain import ChainModelError
from chainhydro.domain.models.results import CellFailure
from chainhydro.services.experiments import Cell, ExperimentConfig, ExperimentRunner, run, write_run

WAVE = {"preset": "wave", "params": {"p_amplitude": 0.3, "r_amplitude": 0.2, "beta": 1.0}}


def _config(tmp_path, **kwargs) -> ExperimentConfig:
    kwargs.setdefault("output_dir", tmp_path / "out")
    return ExperimentConfig(**kwargs)


class TestSpectrumRun:
    """Runner mechanics on the cheapest pipeline."""

    def test_rows_and_acceptance(self, tmp_path):
        config = _config(tmp_path, experiment="spectrum", n_list=[16, 32], seeds={"count": 2})
        report = run(config)
        assert not report.failed
        assert report.config_hash == config.config_hash()
        assert {row.n for row in report.rows} == {16, 32}
        assert {row.seed for row in report.rows} == {0, 1}
        assert "eigenvalue_error" in report.metrics()
        assert report.acceptance["no_failed_cells"]
        assert report.acceptance["eigenvalues_match_dense"]
        assert report.acceptance["orthonormal_p"]
        assert report.acceptance["thermal_norm_bound"]
        assert report.accepted, report.acceptance

    def test_thread_count_does_not_change_report(self, tmp_path):
        single = run(
            _config(tmp_path, experiment="spectrum", n_list=[16, 32], seeds={"count": 3}, threads=1)
        )
        pooled = run(
            _config(tmp_path, experiment="spectrum", n_list=[16, 32], seeds={"count": 3}, threads=3)
        )
        assert single.sorted_rows() == pooled.sorted_rows()
        assert single.config_hash == pooled.config_hash
        assert single.details == pooled.details
        assert single.acceptance == pooled.acceptance

    def test_runtime_kept_out_of_summary(self, tmp_path):
        report = run(_config(tmp_path, experiment="spectrum", n_list=[16], seeds={"count": 1}))
        assert report.runtime["threads"] == 1
        assert "wall_seconds" in report.runtime
        assert "runtime" not in report.summary()

    def test_failed_cell_is_recorded(self, tmp_path):
        config = _config(tmp_path, experiment="spectrum", n_list=[16], seeds={"count": 3})
        runner = ExperimentRunner(config)
        original = runner.pipeline.run_cell

        def flaky(cell: Cell):
            if cell.seed == 1:
                raise FloatingPointError("overflow in cell")
            return original(cell)

        runner.pipeline.run_cell = flaky
        report = runner.run().report
        assert report.failures == [
            CellFailure("spectrum", 16, 1, "FloatingPointError", "overflow in cell")
        ]
        assert {row.seed for row in report.rows} == {0, 2}
        assert report.acceptance["no_failed_cells"] is False
        assert not report.accepted

    def test_every_cell_failing(self, tmp_path):
        config = _config(tmp_path, experiment="spectrum", n_list=[16], seeds={"count": 2})
        runner = ExperimentRunner(config)

        def broken(cell: Cell):
            raise ValueError("bad cell")

        runner.pipeline.run_cell = broken
        result = runner.run()
        assert len(result.report.failures) == 2
        assert result.report.rows == []
        assert result.artifacts.fields == []


class TestEulerSolveRun:
    def test_wave_passes_self_checks(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="euler-solve",
            profiles=WAVE,
            grid_points=65,
            n_modes=64,
            times=[0.0, 0.25, 0.5],
        )
        result = ExperimentRunner(config).run()
        report = result.report
        assert {row.n for row in report.rows} == {65}
        assert "standing_wave_error" in report.metrics()
        assert report.accepted, report.acceptance
        assert [fields.t for fields in result.artifacts.fields] == [0.0, 0.25, 0.5]
        assert report.details["mean_mass"] == pytest.approx(1.5)


class TestHydroRuns:
    def test_classical_wave(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="classical-hydro",
            profiles=WAVE,
            n_list=[32, 64],
            seeds={"count": 2},
            n_modes=64,
            grid_points=33,
        )
        result = ExperimentRunner(config).run()
        report = result.report
        assert not report.failed
        for z in ("r", "p", "e"):
            assert f"gap_{z}:sine:t=0.5" in report.fits
            assert f"quadvar_{z}:sine:t=0.5" in report.fits
        assert report.acceptance["momentum_conserved"]
        assert report.acceptance["energy_conserved"]
        assert len(result.artifacts.fields) == 1
        assert {overlay.n for overlay in result.artifacts.overlays} == {64}
        assert {overlay.label for overlay in result.artifacts.overlays} == {"r", "p", "e"}
        assert report.details["markov_delta"] == config.delta

    def test_classical_equilibrium_is_stationary(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="classical-hydro",
            n_list=[32],
            seeds={"count": 1},
            times=[0.5, 1.0],
            n_modes=64,
            grid_points=17,
        )
        report = run(config)
        assert report.acceptance["stationary"]
        gaps = [row.value for row in report.rows if row.metric in ("gap_r", "gap_p")]
        assert max(gaps) < 1e-10

    def test_quantum_equilibrium(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="quantum-hydro",
            n_list=[16, 32],
            seeds={"count": 2},
            thermal_seeds=2,
            taylor_order=16,
            n_modes=64,
            grid_points=17,
        )
        result = ExperimentRunner(config).run()
        report = result.report
        assert not report.failed, report.failures
        assert report.acceptance["ccr_preserved"]
        assert report.acceptance["mode_moments"]
        assert report.acceptance["clustering_decay"]
        assert report.acceptance["quantum_above_classical"]
        assert "thermal_profile_flat" in report.acceptance
        thermal = report.details["thermal_profile"]
        assert thermal["n"] == 32
        assert thermal["isothermal"]
        assert thermal["quantum_excess"] > 0.0
        assert thermal["inverse_temperature_gap"] >= -1.0 / 32
        assert set(report.details["square_decay_by_n"]) == {"16", "32"}
        assert result.artifacts.thermal is not None

    def test_quantum_requires_zero_momentum(self, tmp_path):
        y = np.linspace(0.0, 1.0, 129)
        drifting = {"preset": "tabulated", "params": {"y": y.tolist(), "p_bar": (0.1 + 0.2 * y).tolist()}}
        config = _config(tmp_path, experiment="quantum-hydro", profiles=drifting, n_list=[16])
        with pytest.raises(ChainModelError, match=r"requires zero mean momentum, got 2\.000e-01"):
            ExperimentRunner(config)

    def test_quantum_accepts_wave_momentum(self, tmp_path):
        config = _config(tmp_path, experiment="quantum-hydro", profiles=WAVE, n_list=[16])
        assert ExperimentRunner(config).pipeline.profiles.momentum_integral() == pytest.approx(0.0, abs=1e-12)


class TestSpectralRuns:
    def test_localization(self, tmp_path):
        config = _config(
            tmp_path, experiment="localization", n_list=[64, 128], seeds={"count": 2}, ladder_bases=4
        )
        result = ExperimentRunner(config).run()
        report = result.report
        assert set(report.details["localization"]) == {"64", "128"}
        assert "control" in report.details["localization"]["128"]
        assert set(report.details["frequency_floor"]["per_n_max"]) == {"64", "128"}
        assert len(result.artifacts.scans) == 4
        assert result.artifacts.frequency is not None
        assert "correlator_decays" in report.acceptance

    def test_convergence_sweep(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="convergence-sweep",
            n_list=[32, 64],
            seeds={"count": 2},
            profiles={"preset": "linear-temperature", "params": {"beta": 1.0, "slope": 0.5}},
        )
        report = run(config)
        assert not report.failed
        assert report.acceptance["initial_mode_bound"]
        for metric in ("low_mode_value", "offdiag_near_p", "offdiag_far_r", "offdiag_bound_r"):
            assert metric in report.metrics()
        assert "low_mode_value:t=0.5" in report.fits


class TestMonteCarloRun:
    def test_small_ensemble(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="monte-carlo-check",
            n_list=[16],
            seeds={"count": 1},
            mc_samples=20_000,
            mc_batch=5_000,
            mc_pairs=5,
        )
        report = run(config)
        assert not report.failed
        assert report.details["experiment_seed"] == int(config.config_hash(), 16)
        assert len(report.details["pairs"]["16/0"]) == 5
        assert len(report.details["r_pairs"]["16/0"]) == 5
        assert {"r_mean_z", "r_cov_z", "r_odd_z", "rp_cov_z"} <= set(report.metrics())
        replicas = [row.value for row in report.rows if row.metric == "replicas"]
        assert replicas == [20_000]
        assert report.details["max_abs_z"] < 6.0

    def test_reproducible(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="monte-carlo-check",
            n_list=[16],
            seeds={"count": 1},
            mc_samples=2_000,
            mc_batch=700,
            mc_pairs=3,
        )
        first = run(config).sorted_rows()
        second = run(config.with_overrides(threads=2)).sorted_rows()
        assert first == second


class TestWriteRun:
    def test_outputs(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="euler-solve",
            profiles=WAVE,
            grid_points=33,
            n_modes=64,
            times=[0.0, 0.5],
        )
        result = ExperimentRunner(config).run()
        written = write_run(result, tmp_path / "out", plots=False)
        assert {"rows", "summary", "runtime", "fields"} <= set(written)
        assert not any(key.startswith("plot:") for key in written)

        summary = json.loads(written["summary"].read_text(encoding="utf-8"))
        assert summary["config_hash"] == config.config_hash()
        assert summary["acceptance"] == result.report.acceptance

        with written["rows"].open(encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == len(result.report.rows)
        assert rows[0].keys() == {"experiment", "n", "seed", "t", "f", "metric", "value", "stderr"}

        with written["fields"].open(encoding="utf-8") as handle:
            field_rows = list(csv.DictReader(handle))
        assert len(field_rows) == 2 * 33
        assert np.isclose(float(field_rows[0]["y"]), 0.0)

    def test_plots(self, tmp_path):
        config = _config(
            tmp_path,
            experiment="classical-hydro",
            profiles=WAVE,
            n_list=[32, 64],
            seeds={"count": 2},
            n_modes=64,
            grid_points=33,
        )
        written = write_run(ExperimentRunner(config).run(), tmp_path / "out")
        plots = [path for key, path in written.items() if key.startswith("plot:")]
        assert plots
        assert all(path.suffix == ".svg" and path.stat().st_size > 0 for path in plots)

    def test_localization_csv(self, tmp_path):
        config = _config(
            tmp_path, experiment="localization", n_list=[64], seeds={"count": 2}, ladder_bases=4
        )
        written = write_run(ExperimentRunner(config).run(), tmp_path / "out", plots=False)
        with written["localization"].open(encoding="utf-8") as handle:
            header = handle.readline().strip()
        assert header == "n,alpha_or_gamma,distance_or_k,seed,value"
