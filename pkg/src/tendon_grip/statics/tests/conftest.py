"""Shared fixtures for statics tests."""
import pytest

from tendon_grip.hand_model.hand_config import load_hand_config, resolve_hand_path


@pytest.fixture(scope="module")
def sample_hand():
    """The bundled three-finger hand with a two-link thumb."""
    return load_hand_config(resolve_hand_path("jamia"))


@pytest.fixture(scope="module")
def finger(sample_hand):
    return sample_hand.finger("finger1")


@pytest.fixture(scope="module")
def thumb(sample_hand):
    return sample_hand.finger("thumb")
