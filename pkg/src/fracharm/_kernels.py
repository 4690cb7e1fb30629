"""Inner loops: pairwise quadratic forms, gradients, flip deltas, kernel
contractions and the half-plane stencils.

Each public function has a numba body and a numpy body; the dispatcher at the
bottom picks one according to :mod:`fracharm._accel`.  Reductions run in a
fixed order so results do not depend on the thread count.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

# ---------------------------------------------------------------------------
# numba bodies


@njit
def _neumaier_nb(x):
    total = 0.0
    comp = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


@njit
def _row_energy_nb(K, vals, inner, tm, tp, gm, gp):
    n, d = vals.shape
    rows = np.zeros(n)
    for i in range(n):
        if not inner[i]:
            continue
        acc = 0.0
        for j in range(n):
            if j == i:
                continue
            kij = K[i, j]
            if kij == 0.0:
                continue
            sq = 0.0
            for c in range(d):
                diff = vals[i, c] - vals[j, c]
                sq += diff * diff
            if inner[j]:
                acc += 0.5 * kij * sq
            else:
                acc += kij * sq
        sqm = 0.0
        sqp = 0.0
        for c in range(d):
            dm = vals[i, c] - gm[c]
            dp = vals[i, c] - gp[c]
            sqm += dm * dm
            sqp += dp * dp
        rows[i] = acc + tm[i] * sqm + tp[i] * sqp
    return rows


@njit
def _row_energy_change_nb(K, vals, delta, inner, tm, tp, gm, gp):
    # per-row change of the energy when vals -> vals + delta (delta is zero off inner)
    n, d = vals.shape
    rows = np.zeros(n)
    for i in range(n):
        if not inner[i]:
            continue
        acc = 0.0
        for j in range(n):
            if j == i:
                continue
            kij = K[i, j]
            if kij == 0.0:
                continue
            ch = 0.0
            for c in range(d):
                dd = delta[i, c] - delta[j, c]
                ch += dd * (dd + 2.0 * (vals[i, c] - vals[j, c]))
            if inner[j]:
                acc += 0.5 * kij * ch
            else:
                acc += kij * ch
        chm = 0.0
        chp = 0.0
        for c in range(d):
            di = delta[i, c]
            chm += di * (di + 2.0 * (vals[i, c] - gm[c]))
            chp += di * (di + 2.0 * (vals[i, c] - gp[c]))
        rows[i] = acc + tm[i] * chm + tp[i] * chp
    return rows


@njit
def _gradient_nb(K, vals, inner, tm, tp, gm, gp):
    n, d = vals.shape
    out = np.zeros((n, d))
    for i in range(n):
        if not inner[i]:
            continue
        for c in range(d):
            acc = 0.0
            ui = vals[i, c]
            for j in range(n):
                if j != i:
                    acc += K[i, j] * (ui - vals[j, c])
            acc += tm[i] * (ui - gm[c]) + tp[i] * (ui - gp[c])
            out[i, c] = 2.0 * acc
    return out


@njit
def _flip_field_nb(K, x, inner, tm, tp, gm, gp):
    # F_i = sum_{j != i} K_ij x_j + tm_i gm + tp_i gp  (scalar targets)
    n = x.shape[0]
    out = np.zeros(n)
    for i in range(n):
        if not inner[i]:
            continue
        acc = 0.0
        for j in range(n):
            if j != i:
                acc += K[i, j] * x[j]
        out[i] = acc + tm[i] * gm + tp[i] * gp
    return out


@njit
def _contract_nb(W, vals):
    m, c = W.shape
    d = vals.shape[1]
    out = np.zeros((m, d))
    for i in range(m):
        for k in range(d):
            acc = 0.0
            for j in range(c):
                acc += W[i, j] * vals[j, k]
            out[i, k] = acc
    return out


@njit
def _grid_energy_density_nb(V, dx, dy, wy):
    # V: (nx, ny, d) node values with row 0 at y = 0; wy: (ny-1,) mean of y^a per strip
    nx, ny, d = V.shape
    out = np.zeros((nx - 1, ny - 1))
    for i in range(nx - 1):
        for j in range(ny - 1):
            g2 = 0.0
            for c in range(d):
                gx = 0.5 * ((V[i + 1, j, c] - V[i, j, c]) + (V[i + 1, j + 1, c] - V[i, j + 1, c])) / dx
                gy = 0.5 * ((V[i, j + 1, c] - V[i, j, c]) + (V[i + 1, j + 1, c] - V[i + 1, j, c])) / dy
                g2 += gx * gx + gy * gy
            out[i, j] = wy[j] * g2
    return out


@njit
def _weighted_residual_nb(V, y, dx, dy, a, jmin):
    # conservative div(y^a grad v) at interior nodes with column index >= jmin
    nx, ny, d = V.shape
    worst = 0.0
    for i in range(1, nx - 1):
        for j in range(jmin, ny - 1):
            yp = (0.5 * (y[j] + y[j + 1])) ** a
            ym = (0.5 * (y[j] + y[j - 1])) ** a
            yc = y[j] ** a
            mag = 0.0
            for c in range(d):
                lap_x = yc * (V[i + 1, j, c] - 2.0 * V[i, j, c] + V[i - 1, j, c]) / (dx * dx)
                lap_y = (yp * (V[i, j + 1, c] - V[i, j, c]) - ym * (V[i, j, c] - V[i, j - 1, c])) / (dy * dy)
                r = lap_x + lap_y
                mag += r * r
            mag = math.sqrt(mag)
            if mag > worst:
                worst = mag
    return worst


# ---------------------------------------------------------------------------
# numpy bodies


def _neumaier_np(x):
    return math.fsum(np.asarray(x, dtype=float).tolist())


def _pair_sq_np(vals, rows):
    sq = np.zeros((rows.size, vals.shape[0]))
    for c in range(vals.shape[1]):
        diff = vals[rows, c][:, None] - vals[None, :, c]
        sq += diff * diff
    return sq


def _row_energy_np(K, vals, inner, tm, tp, gm, gp):
    n = vals.shape[0]
    rows = np.flatnonzero(inner)
    sq = _pair_sq_np(vals, rows)
    coef = np.where(inner, 0.5, 1.0)
    contrib = K[rows] * sq * coef[None, :]
    contrib[np.arange(rows.size), rows] = 0.0
    out = np.zeros(n)
    out[rows] = (
        contrib.sum(axis=1)
        + tm[rows] * ((vals[rows] - gm) ** 2).sum(axis=1)
        + tp[rows] * ((vals[rows] - gp) ** 2).sum(axis=1)
    )
    return out


def _row_energy_change_np(K, vals, delta, inner, tm, tp, gm, gp):
    n = vals.shape[0]
    rows = np.flatnonzero(inner)
    ch = np.zeros((rows.size, n))
    for c in range(vals.shape[1]):
        dd = delta[rows, c][:, None] - delta[None, :, c]
        ch += dd * (dd + 2.0 * (vals[rows, c][:, None] - vals[None, :, c]))
    coef = np.where(inner, 0.5, 1.0)
    contrib = K[rows] * ch * coef[None, :]
    contrib[np.arange(rows.size), rows] = 0.0
    dr = delta[rows]
    out = np.zeros(n)
    out[rows] = (
        contrib.sum(axis=1)
        + tm[rows] * (dr * (dr + 2.0 * (vals[rows] - gm))).sum(axis=1)
        + tp[rows] * (dr * (dr + 2.0 * (vals[rows] - gp))).sum(axis=1)
    )
    return out


def _gradient_np(K, vals, inner, tm, tp, gm, gp):
    n, d = vals.shape
    rows = np.flatnonzero(inner)
    Kr = K[rows].copy()
    Kr[np.arange(rows.size), rows] = 0.0
    out = np.zeros((n, d))
    for c in range(d):
        diff = vals[rows, c][:, None] - vals[None, :, c]
        out[rows, c] = 2.0 * (
            (Kr * diff).sum(axis=1)
            + tm[rows] * (vals[rows, c] - gm[c])
            + tp[rows] * (vals[rows, c] - gp[c])
        )
    return out


def _flip_field_np(K, x, inner, tm, tp, gm, gp):
    rows = np.flatnonzero(inner)
    Kr = K[rows].copy()
    Kr[np.arange(rows.size), rows] = 0.0
    out = np.zeros(x.shape[0])
    out[rows] = (Kr * x[None, :]).sum(axis=1) + tm[rows] * gm + tp[rows] * gp
    return out


def _contract_np(W, vals):
    return (W[:, :, None] * vals[None, :, :]).sum(axis=1)


def _grid_energy_density_np(V, dx, dy, wy):
    dxv = V[1:, :, :] - V[:-1, :, :]
    dyv = V[:, 1:, :] - V[:, :-1, :]
    gx = 0.5 * (dxv[:, :-1, :] + dxv[:, 1:, :]) / dx
    gy = 0.5 * (dyv[:-1, :, :] + dyv[1:, :, :]) / dy
    return wy[None, :] * ((gx * gx).sum(axis=2) + (gy * gy).sum(axis=2))


def _weighted_residual_np(V, y, dx, dy, a, jmin):
    nx, ny, _ = V.shape
    if nx < 3 or ny - 1 <= jmin:
        return 0.0
    j = np.arange(jmin, ny - 1)
    yp = (0.5 * (y[j] + y[j + 1])) ** a
    ym = (0.5 * (y[j] + y[j - 1])) ** a
    yc = y[j] ** a
    C = V[1:-1, j, :]
    lap_x = yc[None, :, None] * (V[2:, j, :] - 2.0 * C + V[:-2, j, :]) / dx**2
    lap_y = (
        yp[None, :, None] * (V[1:-1, j + 1, :] - C) - ym[None, :, None] * (C - V[1:-1, j - 1, :])
    ) / dy**2
    return float(np.sqrt(((lap_x + lap_y) ** 2).sum(axis=2)).max())


# ---------------------------------------------------------------------------
# dispatch

if HAVE_NUMBA:
    neumaier_sum = _neumaier_nb
    row_energy = _row_energy_nb
    row_energy_change = _row_energy_change_nb
    gradient = _gradient_nb
    flip_field = _flip_field_nb
    contract = _contract_nb
    grid_energy_density = _grid_energy_density_nb
    weighted_residual_kernel = _weighted_residual_nb
else:
    neumaier_sum = _neumaier_np
    row_energy = _row_energy_np
    row_energy_change = _row_energy_change_np
    gradient = _gradient_np
    flip_field = _flip_field_np
    contract = _contract_np
    grid_energy_density = _grid_energy_density_np
    weighted_residual_kernel = _weighted_residual_np

NUMPY_IMPL = {
    "neumaier_sum": _neumaier_np,
    "row_energy": _row_energy_np,
    "row_energy_change": _row_energy_change_np,
    "gradient": _gradient_np,
    "flip_field": _flip_field_np,
    "contract": _contract_np,
    "grid_energy_density": _grid_energy_density_np,
    "weighted_residual": _weighted_residual_np,
}

NUMBA_IMPL = (
    {
        "neumaier_sum": _neumaier_nb,
        "row_energy": _row_energy_nb,
        "row_energy_change": _row_energy_change_nb,
        "gradient": _gradient_nb,
        "flip_field": _flip_field_nb,
        "contract": _contract_nb,
        "grid_energy_density": _grid_energy_density_nb,
        "weighted_residual": _weighted_residual_nb,
    }
    if HAVE_NUMBA
    else {}
)
