"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--n 512] [--repeat 5]

Each row reports the best wall time per call for both backends, the speedup
and the largest absolute difference between the two results.
"""
import argparse
import timeit

import numpy as np

from fracharm import _kernels
from fracharm.energy import LatticeMap, LineGrid, assemble
from fracharm.manifold import sphere


def cases(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    h = 2.0 / n
    grid = LineGrid(-1.0, 1.0, h, 2.0)
    K = assemble(grid, 0.25)
    vals = sphere(3).project(rng.standard_normal((grid.n_cells, 3)))
    u = LatticeMap(grid, vals, vals[0], vals[-1])
    inner = grid.interior
    delta = np.zeros_like(vals)
    delta[inner] = 1e-3 * rng.standard_normal((inner.sum(), 3))
    x = rng.choice([-1.0, 1.0], size=grid.n_cells)
    W = rng.random((2048, grid.n_cells + 2))
    cols = rng.standard_normal((grid.n_cells + 2, 3))
    V = rng.standard_normal((257, 129, 2))
    y = np.linspace(0.0, 1.0, 129)
    args = (K.K, u.values, inner, K.tail_left, K.tail_right, u.tail_left, u.tail_right)
    return {
        "row_energy": args,
        "row_energy_change": (K.K, u.values, delta, inner, K.tail_left, K.tail_right, u.tail_left, u.tail_right),
        "gradient": args,
        "flip_field": (K.K, x, inner, K.tail_left, K.tail_right, 1.0, -1.0),
        "contract": (W, cols),
        "grid_energy_density": (V, 1 / 256, 1 / 128, np.ones(128)),
        "weighted_residual": (V, y, 1 / 256, 1 / 128, 0.5, 2),
        "neumaier_sum": (np.random.default_rng(1).standard_normal(1 << 20),),
    }


def best_time(fn, args, repeat):
    fn(*args)  # warm-up (compiles on the numba side)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=512, help="window cells")
    p.add_argument("--repeat", type=int, default=5)
    a = p.parse_args(argv)
    if not _kernels.NUMBA_IMPL:
        print("numba backend disabled; nothing to compare")
        return 1
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, args in cases(a.n).items():
        f_np, f_nb = _kernels.NUMPY_IMPL[name], _kernels.NUMBA_IMPL[name]
        t_np = best_time(f_np, args, a.repeat)
        t_nb = best_time(f_nb, args, a.repeat)
        diff = float(np.max(np.abs(np.asarray(f_np(*args)) - np.asarray(f_nb(*args)))))
        print(f"{name:<22}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}{diff:>14.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
