"""Sweep configuration layering tests"""
import pytest

from features.experiments import EntropyComparison, GammaSweep, NoiseSweep, ScaleSweep
from loaders.sweep import build_experiment, load_sweep_file
from utils.errors import ConfigError, FormatError


class TestBuildExperiment:
    """built-in < config.toml < sweep file < CLI"""

    def test_toml_defaults(self):
        cfg = build_experiment("noise")
        assert isinstance(cfg.sweep, NoiseSweep)
        assert cfg.sweep.noise_stds == (0.0, 0.02, 0.05, 0.1, 0.15, 0.2)
        assert cfg.num_networks == 50
        assert cfg.master_seed == 20150101
        assert cfg.base.n == 80 and cfg.base.m == 5
        assert [str(o) for o in cfg.objectives] == ["biswas-ye", "ls", "qp"]

    def test_file_then_overrides(self):
        cfg = build_experiment(
            "gamma",
            {"kind": "gamma", "gammas": [5.0, 50.0], "num_networks": 7, "solver": {"max_iters": 30}},
            {"num_networks": 3, "workers": None, "master_seed": 11},
        )
        assert isinstance(cfg.sweep, GammaSweep)
        assert cfg.sweep.gammas == (5.0, 50.0)
        assert cfg.num_networks == 3
        assert cfg.workers == 4
        assert cfg.master_seed == 11
        assert cfg.settings.max_iters == 30

    def test_quick(self):
        cfg = build_experiment("range", quick=True)
        assert cfg.num_networks == 20
        assert cfg.base.n == 60

    def test_scale_base_follows_counts(self):
        cfg = build_experiment("scale")
        assert isinstance(cfg.sweep, ScaleSweep)
        assert cfg.sweep.max_degree == 7
        assert cfg.base.n == 30
        assert cfg.base.radio_range == 0.3

    def test_entropy_takes_metrics(self):
        cfg = build_experiment("entropy", {"threshold": 0.03})
        assert cfg.sweep == EntropyComparison(bin_width=0.0049, sigma_ref=0.008, threshold=0.03)

    def test_timing_override(self):
        assert build_experiment("noise", overrides={"record_timing": False}).record_timing is False

    def test_kind_mismatch(self):
        with pytest.raises(ConfigError):
            build_experiment("noise", {"kind": "range"})

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            build_experiment("tides")

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            build_experiment("noise", overrides={"num_networks": 0})


class TestLoadSweepFile:
    """YAML parsing and schema checks"""

    def test_yaml(self, tmp_path):
        path = tmp_path / "sweep.yaml"
        path.write_text("kind: noise\nnoise_stds: [0.0, 0.05]\nnum_networks: 4\n", encoding="utf-8")
        assert load_sweep_file(path) == {"kind": "noise", "noise_stds": [0.0, 0.05], "num_networks": 4}

    def test_json_is_yaml(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text('{"kind": "range", "radio_ranges": [0.2]}', encoding="utf-8")
        assert load_sweep_file(path)["radio_ranges"] == [0.2]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_sweep_file(path) == {}

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            load_sweep_file(tmp_path / "absent.yaml")

    def test_bad_yaml_line(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("kind: noise\nnoise_stds: [0.0, 0.05\n", encoding="utf-8")
        with pytest.raises(FormatError) as exc:
            load_sweep_file(path)
        assert exc.value.line is not None

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_sweep_file(path)

    def test_schema_violation(self, tmp_path):
        pytest.importorskip("jsonschema")
        path = tmp_path / "neg.yaml"
        path.write_text("noise_stds: [-0.1]\n", encoding="utf-8")
        with pytest.raises(FormatError) as exc:
            load_sweep_file(path)
        assert exc.value.field == "noise_stds.0"
