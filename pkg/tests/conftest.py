import numpy as np
import pytest

from weakkam import HamiltonianSpec, PeriodicGrid
from weakkam.atlas import build_atlas


@pytest.fixture(scope="session")
def atlas1():
    grid = PeriodicGrid(n=256)
    spec = HamiltonianSpec(kind="example1", grid=grid)
    return build_atlas(grid, spec)


@pytest.fixture(scope="session")
def atlas2():
    grid = PeriodicGrid(n=256)
    spec = HamiltonianSpec(kind="example2", grid=grid)
    return build_atlas(grid, spec)


@pytest.fixture(scope="session")
def cos_a(atlas1):
    g = atlas1.grid
    return np.cos(2.0 * np.pi * g.positions / g.circumference)
