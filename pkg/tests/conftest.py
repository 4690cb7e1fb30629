import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracharm.energy import LatticeMap, LineGrid, assemble
from fracharm.manifold import circle
from fracharm.solver import SolverOptions, minimize

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

E1 = np.array([1.0, 0.0])

_MINIMIZERS = {}


def jump_minimizer(h: float, s: float = 0.25, R: float = 2.0):
    """Converged circle-valued minimizer on (-1, 1) with antipodal jump data
    (cached per process; solves take well under a second)."""
    key = (h, s, R)
    if key not in _MINIMIZERS:
        g = LineGrid(-1.0, 1.0, h, R)
        u0 = LatticeMap.jump(g, E1, -E1)
        K = assemble(g, s)
        rep = minimize(u0, K, circle(), s, SolverOptions(grad_tol=1e-7))
        _MINIMIZERS[key] = (rep, K)
    return _MINIMIZERS[key]


@pytest.fixture(scope="session")
def minimizer_h32():
    return jump_minimizer(1.0 / 32.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
