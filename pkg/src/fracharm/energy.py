"""Piecewise-constant discretization of the fractional s-energy on the line.

The truncated line ``(-R, R)`` is cut into equal cells; the window cells are
free, the rest carry exterior data, and the two half-lines beyond ``+-R`` carry
constant tail values.  With exact pair masses the discrete energy of such a
map *is* its continuum energy; there is no quadrature error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from . import _kernels
from .errors import GridError, GridMismatch, MisalignedSubwindow
from .io import read_csv, write_csv
from .riesz import Interval, as_order, gamma_s, half_line_masses, offset_masses

_ALIGN_TOL = 1e-9


def _as_index(value: float, origin: float, h: float, what: str, exc=GridError) -> int:
    k = (value - origin) / h
    kr = round(k)
    if abs(k - kr) > _ALIGN_TOL * max(1.0, abs(k)):
        raise exc(f"{what}={value} is not on the cell lattice (offset {k} cells)")
    return int(kr)


@dataclass(frozen=True)
class LineGrid:
    """Uniform partition of ``(-R, R)`` with a distinguished window ``(x_left, x_right)``."""

    x_left: float
    x_right: float
    h: float
    R: float
    n_cells: int = field(init=False)
    window_start: int = field(init=False)
    window_stop: int = field(init=False)

    def __post_init__(self):
        xl, xr, h, R = map(float, (self.x_left, self.x_right, self.h, self.R))
        if not (math.isfinite(h) and h > 0):
            raise GridError(f"cell size must be positive, got {h}")
        if not xl < xr:
            raise GridError(f"empty window ({xl}, {xr})")
        if not R > max(abs(xl), abs(xr)):
            raise GridError(f"truncation radius {R} must exceed the window ({xl}, {xr})")
        n = _as_index(R, -R, h, "2R")
        start = _as_index(xl, -R, h, "x_left")
        stop = _as_index(xr, -R, h, "x_right")
        for name, val in (("x_left", xl), ("x_right", xr), ("h", h), ("R", R)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "n_cells", n)
        object.__setattr__(self, "window_start", start)
        object.__setattr__(self, "window_stop", stop)

    @property
    def edges(self) -> np.ndarray:
        return -self.R + self.h * np.arange(self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return -self.R + self.h * (np.arange(self.n_cells) + 0.5)

    @property
    def interior(self) -> np.ndarray:
        mask = np.zeros(self.n_cells, dtype=np.bool_)
        mask[self.window_start : self.window_stop] = True
        return mask

    @property
    def n_interior(self) -> int:
        return self.window_stop - self.window_start

    @property
    def window(self) -> Interval:
        return Interval(self.x_left, self.x_right)

    def cell(self, i: int) -> Interval:
        return Interval(-self.R + self.h * i, -self.R + self.h * (i + 1))

    def edge_index(self, x: float, exc=GridError) -> int:
        """Index ``k`` with ``x = -R + k h``; raises when ``x`` is not an edge."""
        return _as_index(x, -self.R, self.h, "x", exc)

    def mask_for(self, sub: Interval) -> np.ndarray:
        """Cells inside a cell-aligned sub-window of the window."""
        i0 = self.edge_index(sub.lo, MisalignedSubwindow)
        i1 = self.edge_index(sub.hi, MisalignedSubwindow)
        if i0 < self.window_start or i1 > self.window_stop:
            raise MisalignedSubwindow(f"{sub} is not inside the window {self.window}")
        mask = np.zeros(self.n_cells, dtype=np.bool_)
        mask[i0:i1] = True
        return mask

    def dilated(self, lam: float) -> "LineGrid":
        return LineGrid(lam * self.x_left, lam * self.x_right, lam * self.h, lam * self.R)

    def same_as(self, other: "LineGrid") -> bool:
        return (
            self.n_cells == other.n_cells
            and self.window_start == other.window_start
            and self.window_stop == other.window_stop
            and math.isclose(self.h, other.h, rel_tol=1e-12)
            and math.isclose(self.R, other.R, rel_tol=1e-12)
        )


@dataclass
class LatticeMap:
    """One value in ``R^d`` per cell, plus the two constant tail values."""

    grid: LineGrid
    values: np.ndarray
    tail_left: np.ndarray
    tail_right: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[0] != self.grid.n_cells:
            raise GridMismatch(
                f"{self.values.shape[0]} values for a grid of {self.grid.n_cells} cells"
            )
        d = self.values.shape[1]
        self.tail_left = np.array(self.tail_left, dtype=float).reshape(d)
        self.tail_right = np.array(self.tail_right, dtype=float).reshape(d)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.grid.window_start : self.grid.window_stop]

    def copy(self) -> "LatticeMap":
        return LatticeMap(self.grid, self.values.copy(), self.tail_left.copy(), self.tail_right.copy())

    def with_interior(self, interior: np.ndarray) -> "LatticeMap":
        out = self.copy()
        out.values[self.grid.window_start : self.grid.window_stop] = interior
        return out

    def __call__(self, x):
        """Pointwise value (cell lookup).  Points on an edge take the right cell."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g = self.grid
        k = np.floor((x + g.R) / g.h).astype(np.int64)
        out = np.empty((x.size, self.dim))
        left = x < -g.R
        right = x >= g.R
        mid = ~(left | right)
        out[left] = self.tail_left
        out[right] = self.tail_right
        out[mid] = self.values[np.clip(k[mid], 0, g.n_cells - 1)]
        return out

    @classmethod
    def constant(cls, grid: LineGrid, p) -> "LatticeMap":
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return cls(grid, np.tile(p, (grid.n_cells, 1)), p, p)

    @classmethod
    def jump(cls, grid: LineGrid, a, b, at: float = 0.0) -> "LatticeMap":
        """``a`` to the right of ``at`` and ``b`` to the left; ``at`` must be an edge."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        k = grid.edge_index(at)
        vals = np.empty((grid.n_cells, a.size))
        vals[:k] = b
        vals[k:] = a
        return cls(grid, vals, b, a)

    @classmethod
    def from_function(cls, grid: LineGrid, f, tail_left=None, tail_right=None) -> "LatticeMap":
        vals = np.array([np.atleast_1d(f(x)) for x in grid.centers], dtype=float)
        tl = vals[0] if tail_left is None else tail_left
        tr = vals[-1] if tail_right is None else tail_right
        return cls(grid, vals, tl, tr)


@dataclass(frozen=True)
class KernelMatrix:
    """Exact pair masses between cells and from each cell to the two tails."""

    grid: LineGrid
    s: float
    K: np.ndarray
    tail_left: np.ndarray
    tail_right: np.ndarray


def assemble(grid: LineGrid, order) -> KernelMatrix:
    """Dense symmetric mass matrix (zero diagonal) and the two tail vectors.

    On a uniform grid the mass depends only on the index offset, so ``n``
    closed-form masses fill the whole Toeplitz matrix.
    """
    order = as_order(order)
    n = grid.n_cells
    K = toeplitz(offset_masses(grid.h, n, order))
    tails = half_line_masses(grid.h, n, order)
    return KernelMatrix(grid, order.s, K, tails.copy(), tails[::-1].copy())


def _check(u: LatticeMap, K: KernelMatrix, order):
    order = as_order(order)
    if not u.grid.same_as(K.grid):
        raise GridMismatch("map and kernel matrix live on different grids")
    if not math.isclose(order.s, K.s, rel_tol=0, abs_tol=1e-15):
        raise GridMismatch(f"kernel assembled for s={K.s}, asked for s={order.s}")
    return order


def _energy_with_mask(u, K, order, mask):
    order = _check(u, K, order)
    rows = _kernels.row_energy(
        K.K, u.values, mask, K.tail_left, K.tail_right, u.tail_left, u.tail_right
    )
    return gamma_s(order) * float(_kernels.neumaier_sum(rows))


def energy(u: LatticeMap, K: KernelMatrix, order) -> float:
    """Fractional energy of ``u`` in the window of its grid."""
    return _energy_with_mask(u, K, order, u.grid.interior)


def localized_energy(u: LatticeMap, sub: Interval, K: KernelMatrix, order) -> float:
    """Energy in a cell-aligned sub-window; every cell outside ``sub`` counts as exterior."""
    return _energy_with_mask(u, K, order, u.grid.mask_for(sub))


def energy_change(u: LatticeMap, new_interior: np.ndarray, K: KernelMatrix, order) -> float:
    """``energy(u with new interior) - energy(u)``, evaluated from the increment
    so that it stays accurate when the change is far below ``eps * energy``."""
    order = _check(u, K, order)
    delta = np.zeros_like(u.values)
    delta[u.grid.window_start : u.grid.window_stop] = new_interior - u.interior_values
    rows = _kernels.row_energy_change(
        K.K, u.values, delta, u.grid.interior, K.tail_left, K.tail_right, u.tail_left, u.tail_right
    )
    return gamma_s(order) * float(_kernels.neumaier_sum(rows))


def energy_gradient(u: LatticeMap, K: KernelMatrix, order) -> np.ndarray:
    """Euclidean gradient with respect to the interior values, shape ``(n_interior, d)``."""
    order = _check(u, K, order)
    g = _kernels.gradient(
        K.K, u.values, u.grid.interior, K.tail_left, K.tail_right, u.tail_left, u.tail_right
    )
    return gamma_s(order) * g[u.grid.window_start : u.grid.window_stop]


# ---------------------------------------------------------------------------
# CSV


def lattice_columns(d: int):
    return ["cell_index", "cell_lo", "cell_hi", "is_interior"] + [f"v_{k + 1}" for k in range(d)]


def lattice_rows(u: LatticeMap):
    """Rows of the lattice CSV.  The two tails are rows ``-1`` and ``n`` with
    an infinite endpoint."""
    g = u.grid
    edges = g.edges
    interior = g.interior
    rows = [[-1, -math.inf, edges[0], 0, *u.tail_left.tolist()]]
    for i in range(g.n_cells):
        rows.append([i, float(edges[i]), float(edges[i + 1]), int(interior[i]), *u.values[i].tolist()])
    rows.append([g.n_cells, edges[-1], math.inf, 0, *u.tail_right.tolist()])
    return rows


def write_lattice_csv(u: LatticeMap, path, config=None) -> str:
    return write_csv(path, lattice_columns(u.dim), lattice_rows(u), config)


def read_lattice_csv(path) -> LatticeMap:
    columns, rows = read_csv(path)
    if columns[:4] != ["cell_index", "cell_lo", "cell_hi", "is_interior"]:
        raise ValueError(f"{path}: not a lattice CSV (columns {columns})")
    rows = sorted(rows, key=lambda r: r[0])
    cells = [r for r in rows if math.isfinite(r[1]) and math.isfinite(r[2])]
    left = [r for r in rows if not math.isfinite(r[1])]
    right = [r for r in rows if not math.isfinite(r[2])]
    if not cells or len(left) != 1 or len(right) != 1:
        raise ValueError(f"{path}: expected finite cells plus exactly two tail rows")
    R = -cells[0][1]
    h = cells[0][2] - cells[0][1]
    inner = [r for r in cells if r[3] != 0]
    grid = LineGrid(inner[0][1], inner[-1][2], h, R)
    values = np.array([r[4:] for r in cells])
    u = LatticeMap(grid, values, left[0][4:], right[0][4:])
    if not np.array_equal(grid.interior, np.array([r[3] != 0 for r in cells])):
        raise ValueError(f"{path}: interior flags are not a contiguous window")
    return u
