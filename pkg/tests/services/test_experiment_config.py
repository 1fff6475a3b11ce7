import json

import pytest
from pydantic import ValidationError

from chainhydro.app import ConfigError, apply_overrides, build_config, load_config
from chainhydro.domain.models.chain import MassLawKind
from chainhydro.services.experiments import ExperimentConfig, ExperimentKind, SeedSpec


class TestSeedSpec:
    def test_consecutive_range(self):
        assert SeedSpec(base=10, count=3).resolved() == [10, 11, 12]

    def test_explicit_values_win(self):
        assert SeedSpec(base=10, count=3, values=[7, 1]).resolved() == [7, 1]

    def test_empty_values_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            SeedSpec(values=[])

    @pytest.mark.parametrize("base", [-1, 2**64])
    def test_base_out_of_range(self, base):
        with pytest.raises(ValidationError):
            SeedSpec(base=base)

    def test_range_past_limit(self):
        with pytest.raises(ValueError, match="2\\^64"):
            SeedSpec(base=2**64 - 2, count=5).resolved()


class TestExperimentConfig:
    """Validation and hashing of experiment configurations."""

    def test_defaults(self):
        config = ExperimentConfig()
        assert config.experiment is ExperimentKind.CLASSICAL_HYDRO
        assert config.n_list == [256, 512]
        assert config.seed_list == list(range(8))
        assert config.times == [0.5]
        assert (config.gamma, config.theta, config.theta_prime) == (0.2, 0.5, 0.7)
        law = config.build_mass_law()
        assert law.kind is MassLawKind.SCALED_BETA
        assert (law.lower, law.upper, law.a, law.b) == (1.0, 2.0, 2.0, 2.0)

    def test_hash_is_stable_and_short(self):
        first = ExperimentConfig(n_list=[64, 128]).config_hash()
        second = ExperimentConfig(n_list=[64, 128]).config_hash()
        assert first == second
        assert len(first) == 16
        int(first, 16)

    def test_hash_ignores_execution_settings(self, tmp_path):
        base = ExperimentConfig()
        other = ExperimentConfig(
            threads=4, output_dir=tmp_path, spectral_cache=tmp_path / "cache", plots=False
        )
        assert base.config_hash() == other.config_hash()

    def test_hash_tracks_semantics(self):
        assert ExperimentConfig().config_hash() != ExperimentConfig(gamma=0.1).config_hash()
        assert (
            ExperimentConfig().config_hash()
            != ExperimentConfig(seeds={"base": 1, "count": 8}).config_hash()
        )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"gamma": 0.3},
            {"theta": 0.8},
            {"theta_prime": 1.0},
            {"gamma": 0.0},
        ],
    )
    def test_parameter_ordering(self, kwargs):
        with pytest.raises(ValidationError, match="theta"):
            ExperimentConfig(**kwargs)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.7])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValidationError, match="alpha"):
            ExperimentConfig(alpha=alpha)

    def test_time_beyond_horizon(self):
        with pytest.raises(ValidationError, match="outside"):
            ExperimentConfig(times=[0.5, 1.5])
        assert ExperimentConfig(times=[1.5], horizon=2.0).times == [1.5]

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"n_lsit": [64]})

    def test_empty_sizes(self):
        with pytest.raises(ValidationError, match="empty"):
            ExperimentConfig(n_list=[])

    def test_tiny_chain(self):
        with pytest.raises(ValidationError, match=">= 2"):
            ExperimentConfig(n_list=[1])

    def test_unknown_test_function(self):
        with pytest.raises(ValidationError, match="Unknown test function"):
            ExperimentConfig(test_functions=["sine", "sawtooth"])

    def test_profiles_validated_eagerly(self):
        with pytest.raises(ValidationError, match="beta must be positive"):
            ExperimentConfig(profiles={"preset": "linear-temperature", "params": {"beta": -1.0}})

    def test_mass_law_validated_eagerly(self):
        with pytest.raises((ValidationError, ValueError)):
            ExperimentConfig(mass_law={"kind": "uniform", "lower": 2.0, "upper": 1.0})

    def test_too_few_modes(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(n_modes=32)

    def test_overrides_replace_explicit_seed_values(self, tmp_path):
        config = ExperimentConfig(seeds={"values": [5, 9]})
        updated = config.with_overrides(seed_count=2, output_dir=tmp_path, threads=3)
        assert updated.seed_list == [0, 1]
        assert updated.output_dir == tmp_path
        assert updated.threads == 3

    def test_overrides_revalidate(self):
        with pytest.raises(ValidationError):
            ExperimentConfig().with_overrides(times=[3.0])


class TestConfigLoading:
    def test_yaml_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(
            "experiment: spectrum\nn_list: [16, 32]\nseeds: {base: 4, count: 2}\n",
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.experiment is ExperimentKind.SPECTRUM
        assert config.seed_list == [4, 5]

    def test_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"n_list": [8], "times": [0.25]}), encoding="utf-8")
        assert load_config(path).times == [0.25]

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config(path, experiment="localization").experiment is ExperimentKind.LOCALIZATION

    def test_no_path_gives_defaults(self):
        assert load_config(None).n_list == [256, 512]

    def test_non_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(path)

    def test_unparseable(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="Cannot parse"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read"):
            load_config(tmp_path / "missing.yaml")

    def test_experiment_conflict(self):
        with pytest.raises(ConfigError, match="declares"):
            build_config({"experiment": "spectrum"}, experiment="localization")

    def test_validation_error_wrapped(self):
        with pytest.raises(ConfigError):
            build_config({"gamma": 0.4})

    def test_bad_override_wrapped(self):
        with pytest.raises(ConfigError):
            apply_overrides(ExperimentConfig(), n_list=[])

    def test_none_overrides_ignored(self):
        config = ExperimentConfig(n_list=[64])
        assert apply_overrides(config, threads=None, n_list=None).n_list == [64]
