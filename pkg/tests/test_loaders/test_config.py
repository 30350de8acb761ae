"""config.toml loader tests"""
import pytest

from loaders import config as config_loader


@pytest.fixture
def custom_config(tmp_path, monkeypatch):
    path = tmp_path / "config.toml"
    path.write_text('[solver]\nmax_iters = 7\n\n[metrics]\nbin_width = 0.01\n', encoding="utf-8")
    monkeypatch.setenv("SDPLOC_CONFIG", str(path))
    config_loader.reload()
    yield path
    monkeypatch.delenv("SDPLOC_CONFIG")
    config_loader.reload()


class TestConfigLoader:
    """Cached load, dotted get, sections"""

    def test_shipped_defaults(self):
        config_loader.reload()
        assert config_loader.get("solver.tol_gap") == 1e-7
        assert config_loader.get("metrics.bin_width") == 0.0049
        assert config_loader.get("experiments.gamma.gammas")[0] == 0.1

    def test_missing_key_default(self):
        assert config_loader.get("solver.nope", 3) == 3
        assert config_loader.get("solver.max_iters.deeper", "x") == "x"
        assert config_loader.section("nope") == {}

    def test_override_path(self, custom_config):
        assert config_loader.config_path() == custom_config
        assert config_loader.get("solver.max_iters") == 7
        assert config_loader.section("metrics") == {"bin_width": 0.01}

    def test_missing_file_gives_empty(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SDPLOC_CONFIG", str(tmp_path / "absent.toml"))
        try:
            assert config_loader.reload() == {}
        finally:
            monkeypatch.delenv("SDPLOC_CONFIG")
            config_loader.reload()

    def test_cached(self):
        assert config_loader.load() is config_loader.load()
