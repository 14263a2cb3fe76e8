"""Shared fixtures for grip CLI tests."""
import json
import logging
from pathlib import Path

import pytest

from tendon_grip.hand_model.hand_config import resolve_hand_path

TEST_DATA_DIR = Path(__file__).parent / "test_data"


@pytest.fixture(autouse=True)
def isolated_run(tmp_path, monkeypatch, mocker):
    """Run every command inside tmp_path with logs there and no user .env."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("GRIP_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("GRIP_LOG_LEVEL", raising=False)
    mocker.patch("tendon_grip.grip_cli.grip_cli.load_environment", return_value=None)
    yield tmp_path
    package_logger = logging.getLogger("tendon_grip")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()


@pytest.fixture
def test_data_dir():
    return TEST_DATA_DIR


@pytest.fixture
def sample_hand_dict():
    """The bundled hand config as a dict, ready to be modified."""
    with open(resolve_hand_path("jamia"), "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def write_hand(tmp_path):
    def _write(data, name="hand.json"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return str(path)

    return _write
