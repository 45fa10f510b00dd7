import numpy as np
import pytest

from vortexlab import example_configuration
from vortexlab.configlab import recentre


@pytest.fixture
def example_system():
    return example_configuration()


@pytest.fixture
def recentred():
    return recentre(example_configuration())


def random_three_vortex(rng):
    """Random valid 3-vortex system: positions in [-2,2]^2, Omega in [-3,3]\\{0}."""
    from vortexlab.core import PointVortexSystem

    while True:
        pos = rng.uniform(-2.0, 2.0, size=(3, 2))
        om = rng.uniform(-3.0, 3.0, size=3)
        if np.all(np.abs(om) > 1e-3):
            d = pos[:, None, :] - pos[None, :, :]
            r = np.sqrt((d**2).sum(-1))
            if r[np.triu_indices(3, 1)].min() > 1e-2:
                return PointVortexSystem(pos, om)
