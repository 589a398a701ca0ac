from __future__ import annotations

import pytest

from qtransduce.env import EnvConfig
from qtransduce.model import TransducerParams


@pytest.fixture
def params() -> TransducerParams:
    return TransducerParams()


@pytest.fixture
def quiet_env_cfg() -> EnvConfig:
    """Default environment without measurement noise."""
    return EnvConfig(observation_noise_sd=0.0)
