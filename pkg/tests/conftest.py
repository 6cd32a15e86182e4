import numpy as np
import pytest

from qfridge import FridgeConfig, ReservoirSpec, Role, Statistics, default_config


def random_valid_config(rng, resonant=False):
    """Sample a valid machine configuration with moderate rates.

    Temperatures and rates are kept in ranges where relaxation times stay
    bounded, so propagation-based cross checks terminate quickly.
    """
    e1 = rng.uniform(0.5, 2.0)
    e3 = rng.uniform(0.5, 4.0)
    e2 = e1 + e3 if resonant else max(0.3, e1 + e3 + rng.uniform(-0.8, 0.8))
    gammas = tuple(rng.uniform(0.4, 1.5, size=3))
    coupling = rng.uniform(0.2, 1.5)

    def reservoir(role):
        if rng.random() < 0.5:
            return ReservoirSpec(Statistics.BOSONIC, rng.uniform(0.4, 8.0), role)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        return ReservoirSpec(Statistics.FERMIONIC, sign * rng.uniform(0.4, 8.0), role)

    return FridgeConfig(
        gaps=(e1, e2, e3),
        gammas=gammas,
        reservoirs=(reservoir(Role.COLD), reservoir(Role.ROOM), reservoir(Role.HOT)),
        coupling=coupling,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def reference_config():
    """Gaps (1, 5, 4), unit rates, baths at (1, 2, 10), unit coupling."""
    return default_config(tc=1.0, tr=2.0, th=10.0, coupling=1.0)
