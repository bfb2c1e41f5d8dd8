"""
Shared fixtures: repo root on sys.path, the default deployment and a
generator of randomized deployments for cross-method checks.
"""

import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from constants import workers_env_var  # noqa: E402
from scripts.channel import FadingSpec  # noqa: E402
from scripts.linkbudget import SystemConfig  # noqa: E402


@pytest.fixture(autouse=True)
def _no_worker_override(monkeypatch):
    monkeypatch.delenv(workers_env_var, raising=False)


@pytest.fixture
def default_cfg():
    return SystemConfig()


def random_configs(m, count=5, seed=0):
    """Deployments around the default operating point with moderate outage probabilities."""
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        configs.append(
            SystemConfig.from_transmit_snr(
                rho_c_db=rng.uniform(112.0, 135.0),
                rho_r_db=rng.uniform(110.0, 125.0),
                rho_bs_db=rng.uniform(190.0, 215.0),
                beta_semi=rng.uniform(0.05, 1.0),
                d_c=rng.uniform(300.0, 1000.0),
                d_r=rng.uniform(1000.0, 1600.0),
                fading=FadingSpec(float(m)),
            )
        )
    return configs


@pytest.fixture
def make_random_configs():
    return random_configs
