import os
import subprocess
import sys

import numpy as np
import pytest

from fracharm import _kernels
from fracharm.energy import LatticeMap, LineGrid, assemble
from fracharm.manifold import sphere

pytestmark = pytest.mark.skipif(not _kernels.NUMBA_IMPL, reason="numba backend disabled")


def cases(seed=0):
    rng = np.random.default_rng(seed)
    g = LineGrid(-1, 1, 1 / 32, 2)
    K = assemble(g, 0.3)
    vals = sphere(3).project(rng.standard_normal((g.n_cells, 3)))
    u = LatticeMap(g, vals, vals[0], vals[-1])
    inner = g.interior
    delta = np.zeros_like(vals)
    delta[inner] = 1e-3 * rng.standard_normal((inner.sum(), 3))
    x = rng.choice([-1.0, 1.0], size=g.n_cells)
    V = rng.standard_normal((33, 17, 2))
    y = np.linspace(0, 1, 17)
    args = (K.K, u.values, inner, K.tail_left, K.tail_right, u.tail_left, u.tail_right)
    return {
        "row_energy": args,
        "row_energy_change": (K.K, u.values, delta, inner, K.tail_left, K.tail_right, u.tail_left, u.tail_right),
        "gradient": args,
        "flip_field": (K.K, x, inner, K.tail_left, K.tail_right, 1.0, -1.0),
        "contract": (rng.random((40, g.n_cells + 2)), rng.standard_normal((g.n_cells + 2, 3))),
        "grid_energy_density": (V, 1 / 32, 1 / 16, np.ones(16)),
        "weighted_residual": (V, y, 1 / 32, 1 / 16, 0.5, 2),
        "neumaier_sum": (rng.standard_normal(10_000),),
    }


@pytest.mark.parametrize("name", sorted(_kernels.NUMPY_IMPL))
@pytest.mark.parametrize("seed", [0, 1])
def test_backends_agree(name, seed):
    args = cases(seed)[name]
    a = np.asarray(_kernels.NUMPY_IMPL[name](*args))
    b = np.asarray(_kernels.NUMBA_IMPL[name](*args))
    scale = max(1.0, float(np.abs(a).max()))
    np.testing.assert_allclose(b, a, rtol=1e-9, atol=1e-12 * scale)


def test_neumaier_compensates():
    x = np.array([1.0, 1e100, 1.0, -1e100] * 100)
    assert _kernels.NUMBA_IMPL["neumaier_sum"](x) == 200.0
    assert _kernels.NUMPY_IMPL["neumaier_sum"](x) == 200.0


def test_numpy_backend_subprocess(tmp_path):
    code = (
        "import math\n"
        "from fracharm import _accel\n"
        "from fracharm.energy import LatticeMap, LineGrid, assemble, energy\n"
        "from fracharm.riesz import gamma_s\n"
        "assert _accel.BACKEND == 'numpy'\n"
        "g = LineGrid(-1, 1, 1 / 16, 2)\n"
        "E = energy(LatticeMap.jump(g, [1.0, 0.0], [-1.0, 0.0]), assemble(g, 0.25), 0.25)\n"
        "assert abs(E - 16 * math.sqrt(2) * gamma_s(0.25)) < 1e-12\n"
        "print('ok')\n"
    )
    env = dict(os.environ, FRACHARM_BACKEND="numpy")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300)
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip() == "ok"
