import numpy as np
import pytest

from frictionlab.core import Field, Grid, ParamSet


@pytest.fixture
def torus64():
    return Grid.torus(64)


@pytest.fixture
def params(torus64):
    return ParamSet(epsilon=0.1, alpha=1.0, gamma=2.0, mass_level=1.0,
                    rho_lower=0.25, rho_upper=2.0, grid=torus64, t_end=1.0)


@pytest.fixture
def cosine_rho(torus64):
    return Field(torus64, 1.0 + 0.3 * np.cos(torus64.x), tag="density")


@pytest.fixture
def zero_w(torus64):
    return Field(torus64, np.zeros(torus64.n))
