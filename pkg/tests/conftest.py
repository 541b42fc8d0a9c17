import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from csgs.radial_grid import make_grid

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PI = math.pi


@pytest.fixture(scope="session")
def grid10():
    """The reference grid for the Gaussian closed forms."""
    return make_grid(10.0, 4001)


@pytest.fixture(scope="session")
def gaussian(grid10):
    return grid10.sample(lambda r: np.exp(-0.5 * r * r))


def gaussian_blocks(p):
    """Closed forms of A..F for u = exp(-r^2/2)."""
    return {
        "A": PI,
        "B": PI,
        "C": PI / 4,
        "D": PI / 4 * math.log(4 / 3),
        "E": PI / 4 * math.log(9 / 8),
        "F": 2 * PI / (p + 1),
    }
