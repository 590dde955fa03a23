"""Shared fixtures for the witness engine tests."""

import pytest

from modules.core.config_manager import ConfigManager
from modules.core.dynamics import shg_state, twin_state
from modules.core.state import CoherentVector, GaussianState, NormalCovariance


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the repository configuration"""
    ConfigManager.reload_configs()
    yield
    ConfigManager.reload_configs()


@pytest.fixture
def squeezed():
    """Spontaneous squeezed vacuum with B_sq = 0.1"""
    return shg_state(0.1)


@pytest.fixture
def twin():
    """Pure twin beam with B_p = 1"""
    return twin_state(1.0)


@pytest.fixture
def thermal():
    """Single-mode thermal state with one noise photon"""
    return GaussianState(NormalCovariance.from_blocks(b1=1.0), CoherentVector(), modes=1)


@pytest.fixture
def coherent():
    return GaussianState(NormalCovariance(), CoherentVector(2 ** 0.5 * 1j, 0.5 ** 0.5))
