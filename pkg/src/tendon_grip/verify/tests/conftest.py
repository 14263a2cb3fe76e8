"""Shared fixtures for the oracle tests."""
import pytest

from tendon_grip.hand_model.hand_config import load_hand_config, resolve_hand_path
from tendon_grip.hand_model.hand_model import LinkChain


@pytest.fixture(scope="module")
def finger_chain():
    """Three-link finger of the bundled hand."""
    return load_hand_config(resolve_hand_path("jamia")).finger("finger1").chain


@pytest.fixture(scope="module")
def unit_link():
    """A single 1 m, 1 kg slender rod."""
    return LinkChain([1.0], [1.0], [0.5], [1.0 / 12.0])
