"""pytest setup: project root on sys.path, `slow` marker behind --runslow"""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow statistical tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-network statistical test (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def _isolated_logging(tmp_path, monkeypatch):
    """Keep log files out of the checkout"""
    monkeypatch.setenv("SDPLOC_LOG_FILE", str(tmp_path / "sdploc.log"))
    from utils.logger import reset_logger
    reset_logger()
    yield
    reset_logger()
