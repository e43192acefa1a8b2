import numpy as np
import pytest

from fdsylvester import assembly
from fdsylvester.scheme import Grid, SchemeId, SignalSpec, build_coefficients, sample_boundary

TABLE_SCHEMES = (SchemeId.LEAPFROG, SchemeId.LAX, SchemeId.LAX_WENDROFF, SchemeId.CRANK_NICOLSON)
# (n_x - 1, n_t)
EVEN_GRIDS = ((4, 4), (8, 6), (16, 10))


def make_system(scheme, n_interior=4, n_t=4, cfl=0.8, c=1.0, length=1.0, wavelength=1.0):
    g = Grid.from_cfl(length, n_interior + 1, n_t, c, cfl)
    co = build_coefficients(scheme, g)
    bd = sample_boundary(SignalSpec(wavelength), g)
    return assembly.assemble_system(co, g, bd), bd


def rel_err(x, ref):
    return float(np.linalg.norm(x - ref) / max(np.linalg.norm(ref), np.finfo(float).tiny))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
