"""Shared fixtures for hand model tests."""
import copy
import json
from pathlib import Path

import pytest

TEST_DATA_DIR = Path(__file__).parent / "test_data"


@pytest.fixture(scope="function")
def hand_config_dict():
    """The single-finger test config as a fresh dict."""
    with open(TEST_DATA_DIR / "test_hand_config.json", "r", encoding="utf-8") as f:
        return copy.deepcopy(json.load(f))


@pytest.fixture(scope="function")
def write_config(tmp_path):
    """Write a config dict to a temporary file and return its path."""

    def _write(data, name="hand.json"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return path

    return _write
