"""Caffarelli-Silvestre extension of line maps to the upper half-plane.

For a piecewise constant map the extension is explicit: the Poisson-type
kernel ``sigma_s y^{2s} / ((x-t)^2 + y^2)^{(1+2s)/2}`` integrates over a cell
to a difference of its cumulative distribution, which is a regularized
incomplete beta function.  Its gradient is a sum over the jump edges only.

Region integrals (weighted Dirichlet energy, density, monotonicity deficit)
come in two flavours:

* ``method="grid"`` works on node values of any :class:`ExtensionField`
  (midpoint rule, face-averaged gradients, exact covered-area weights for
  cells cut by the arc).  Near a jump the integrand behaves like
  ``rho^(a-2)``, so this converges only like ``dx^a``.
* ``method="exact"`` (default for kernel-built fields) integrates the
  analytic gradient in polar coordinates around ``x0`` with Gauss-Jacobi
  panels on the ``y^(2s-1)`` boundary layer and on every jump edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, roots_jacobi, roots_legendre

from . import _kernels
from ._accel import HAVE_NUMBA, njit
from .energy import LatticeMap
from .errors import BadRadii, GridError, GridTooCoarse, RegionNotCovered
from .io import write_csv
from .riesz import as_order, sigma_s

# ---------------------------------------------------------------------------
# kernel weights


def _upper_tail(tau: np.ndarray, s: float) -> np.ndarray:
    """Kernel mass beyond ``|tau|`` on one side: ``1/2 I_{1/(1+tau^2)}(s, 1/2)``."""
    return 0.5 * betainc(s, 0.5, 1.0 / (1.0 + tau * tau))


def poisson_weights(edges: np.ndarray, x: np.ndarray, y: np.ndarray, s: float) -> np.ndarray:
    """Kernel mass of every cell seen from each point ``(x, y)``, ``y > 0``.

    Columns: left tail, the ``len(edges)-1`` cells, right tail.  Each row sums
    to one up to rounding.
    """
    x = np.asarray(x, float)[:, None]
    y = np.asarray(y, float)[:, None]
    tau = (edges[None, :] - x) / y
    q = _upper_tail(tau, s)
    neg = tau < 0
    # cdf F(tau) = q on the negative side, 1 - q on the positive side; cell
    # masses are differenced on whichever side avoids cancellation
    lo, hi = tau[:, :-1], tau[:, 1:]
    qlo, qhi = q[:, :-1], q[:, 1:]
    cells = np.where(
        hi <= 0,
        qhi - qlo,
        np.where(lo >= 0, qlo - qhi, 1.0 - qlo - qhi),
    )
    cells = np.abs(cells)  # rounding can leave -0.0
    left = np.where(neg[:, 0], q[:, 0], 1.0 - q[:, 0])
    right = np.where(neg[:, -1], 1.0 - q[:, -1], q[:, -1])
    return np.hstack([left[:, None], cells, right[:, None]])


def _map_columns(u: LatticeMap) -> np.ndarray:
    return np.vstack([u.tail_left[None, :], u.values, u.tail_right[None, :]])


def extension_at(u: LatticeMap, order, x, y, chunk: int = 4096) -> np.ndarray:
    """Extension values at points with ``y > 0``; shape ``(len(x), d)``."""
    s = as_order(order).s
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    if np.any(y <= 0):
        raise ValueError("extension points must have y > 0")
    cols = _map_columns(u)
    edges = u.grid.edges
    out = np.empty((x.size, u.dim))
    for start in range(0, x.size, chunk):
        sl = slice(start, start + chunk)
        W = poisson_weights(edges, x[sl], y[sl], s)
        out[sl] = _kernels.contract(W, cols)
    return out


def kernel_mass_at(u: LatticeMap, order, x, y) -> np.ndarray:
    """Total kernel mass per point (should be 1)."""
    s = as_order(order).s
    W = poisson_weights(u.grid.edges, np.atleast_1d(x), np.atleast_1d(y), s)
    return np.array([math.fsum(row) for row in W])


def jump_edges(u: LatticeMap):
    """Positions of the edges where ``u`` jumps and the jump vectors (right - left)."""
    cols = _map_columns(u)
    J = np.diff(cols, axis=0)
    keep = np.any(J != 0.0, axis=1)
    return u.grid.edges[keep].copy(), J[keep].copy()


def trace_values(u: LatticeMap, x) -> np.ndarray:
    """Boundary values ``v(x, 0)``: the map itself, averaged at jump edges."""
    x = np.atleast_1d(np.asarray(x, float))
    g = u.grid
    k = (x + g.R) / g.h
    on_edge = np.abs(k - np.round(k)) < 1e-9
    right = u(x)
    left = u(np.where(on_edge, x - 0.5 * g.h, x))
    return np.where(on_edge[:, None], 0.5 * (left + right), right)


@njit
def _grad_terms_nb(px, py, e, J, s, sigma, x0, radial):
    # y^a |grad v|^2, or y^a |d_rho v|^2 (radial derivative about (x0, 0))
    n = px.shape[0]
    m, d = J.shape
    a = 1.0 - 2.0 * s
    q = 0.5 + s
    out = np.zeros(n)
    gx = np.zeros(d)
    gy = np.zeros(d)
    for i in range(n):
        x = px[i]
        y = py[i]
        for c in range(d):
            gx[c] = 0.0
            gy[c] = 0.0
        ys = y ** (2.0 * s)
        for k in range(m):
            dx = e[k] - x
            base = sigma * ys / (dx * dx + y * y) ** q
            by = base * dx / y
            for c in range(d):
                gx[c] += J[k, c] * base
                gy[c] += J[k, c] * by
        acc = 0.0
        if radial:
            rx = x - x0
            rr = math.sqrt(rx * rx + y * y)
            cx = rx / rr
            cy = y / rr
            for c in range(d):
                g = cx * gx[c] + cy * gy[c]
                acc += g * g
        else:
            for c in range(d):
                acc += gx[c] * gx[c] + gy[c] * gy[c]
        out[i] = y ** a * acc
    return out


def _grad_terms_np(px, py, e, J, s, sigma, x0, radial):
    a = 1.0 - 2.0 * s
    out = np.empty(px.size)
    step = max(1, 2_000_000 // max(1, e.size))
    for start in range(0, px.size, step):
        x = px[start : start + step, None]
        y = py[start : start + step, None]
        dx = e[None, :] - x
        base = sigma * y ** (2.0 * s) / (dx * dx + y * y) ** (0.5 + s)
        gx = base @ J
        gy = (base * dx / y) @ J
        if radial:
            rx = x - x0
            rr = np.sqrt(rx * rx + y * y)
            g = (rx / rr) * gx + (y / rr) * gy
            acc = (g * g).sum(axis=1)
        else:
            acc = (gx * gx).sum(axis=1) + (gy * gy).sum(axis=1)
        out[start : start + step] = y[:, 0] ** a * acc
    return out


_grad_terms = _grad_terms_nb if HAVE_NUMBA else _grad_terms_np


def extension_gradient(u: LatticeMap, order, x, y) -> np.ndarray:
    """Analytic gradient of the extension, shape ``(len(x), 2, d)``."""
    s = as_order(order).s
    sig = sigma_s(s)
    x = np.atleast_1d(np.asarray(x, float))[:, None]
    y = np.atleast_1d(np.asarray(y, float))[:, None]
    e, J = jump_edges(u)
    dx = e[None, :] - x
    base = sig * y ** (2.0 * s) / (dx * dx + y * y) ** (0.5 + s)
    return np.stack([base @ J, (base * dx / y) @ J], axis=1)


# ---------------------------------------------------------------------------
# grids and fields


@dataclass(frozen=True)
class HalfRectGrid:
    """Nodes ``x0 + i dx`` (i = 0..nx-1) times ``j dy`` (j = 1..ny); ``y = 0`` is
    excluded and supplied by the trace of the line map."""

    x0: float
    x1: float
    Y: float
    dx: float
    dy: float

    def __post_init__(self):
        if not (self.dx > 0 and self.dy > 0 and self.Y > 0 and self.x1 > self.x0):
            raise GridError("half-rectangle needs positive spacings, Y > 0 and x1 > x0")
        for name, span, step in (("x", self.x1 - self.x0, self.dx), ("y", self.Y, self.dy)):
            k = span / step
            if abs(k - round(k)) > 1e-9 * max(1.0, k):
                raise GridError(f"{name}-spacing does not divide the range")

    @property
    def nx(self) -> int:
        return int(round((self.x1 - self.x0) / self.dx)) + 1

    @property
    def ny(self) -> int:
        return int(round(self.Y / self.dy))

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.dy * np.arange(1, self.ny + 1)

    def refined(self, factor: int = 2) -> "HalfRectGrid":
        return HalfRectGrid(self.x0, self.x1, self.Y, self.dx / factor, self.dy / factor)

    def covers(self, x0: float, r: float) -> bool:
        eps = 1e-12 * max(1.0, abs(x0) + r)
        return x0 - r >= self.x0 - eps and x0 + r <= self.x1 + eps and r <= self.Y + eps


@dataclass
class ExtensionField:
    """Node values on a :class:`HalfRectGrid` plus the boundary trace.

    ``provenance`` is ``"poisson-kernel"`` when built from a line map (which is
    then kept in ``source`` for exact evaluation) or ``"solved"`` for
    user-supplied node data.
    """

    grid: HalfRectGrid
    values: np.ndarray  # (nx, ny, d)
    trace: np.ndarray  # (nx, d), values at y = 0
    provenance: str
    s: float
    source: LatticeMap | None = None

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def with_trace(self) -> np.ndarray:
        return np.concatenate([self.trace[:, None, :], self.values], axis=1)


def poisson_extend(u: LatticeMap, grid: HalfRectGrid, order) -> ExtensionField:
    """Extension of ``u`` evaluated at every node of ``grid``."""
    order = as_order(order)
    X, Yg = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    vals = extension_at(u, order, X.ravel(), Yg.ravel()).reshape(grid.nx, grid.ny, u.dim)
    return ExtensionField(grid, vals, trace_values(u, grid.xs), "poisson-kernel", order.s, u)


def field_from_function(f, grid: HalfRectGrid, order, dim: int | None = None) -> ExtensionField:
    """Sample ``f(x, y) -> (..., d)`` on the nodes (``provenance="solved"``)."""
    order = as_order(order)
    X, Yg = np.meshgrid(grid.xs, np.concatenate([[0.0], grid.ys]), indexing="ij")
    V = np.asarray(f(X, Yg), float)
    if V.ndim == 2:
        V = V[..., None]
    return ExtensionField(grid, V[:, 1:, :].copy(), V[:, 0, :].copy(), "solved", order.s)


def weighted_residual(v: ExtensionField, order, y_min: float | None = None, x_range=None) -> float:
    """Max over nodes of ``|div(y^a grad v)|`` with the conservative 5-point stencil.

    Only nodes with ``y >= max(2 dy, y_min)`` (and ``x`` inside ``x_range``
    when given) are scored; the weight degenerates at ``y = 0``.
    """
    order = as_order(order)
    g = v.grid
    if g.nx < 3 or g.ny < 3:
        raise GridTooCoarse("need at least 3 nodes per direction")
    V = v.with_trace()
    y = np.concatenate([[0.0], g.ys])
    jmin = 2 if y_min is None else max(2, int(math.ceil(y_min / g.dy - 1e-9)))
    if x_range is not None:
        i0 = max(1, int(math.ceil((x_range[0] - g.x0) / g.dx - 1e-9)))
        i1 = min(g.nx - 1, int(math.floor((x_range[1] - g.x0) / g.dx + 1e-9)) + 1)
        V = V[i0 - 1 : i1 + 1]
    if V.shape[0] < 3 or jmin >= V.shape[1] - 1:
        raise GridTooCoarse("no interior nodes left in the scored region")
    return float(_kernels.weighted_residual_kernel(np.ascontiguousarray(V), y, g.dx, g.dy, order.a, jmin))


# ---------------------------------------------------------------------------
# region integrals on the grid


def _covered_weight(x0, r, a, xl, xr, yl, yr):
    """``int y^a`` over ``[xl,xr] x [yl,yr]`` intersected with the disc of radius
    ``r`` about ``(x0, 0)``; exact for fully covered cells."""
    xs, ws = _legendre01(16)
    dxs = xr - xl
    xq = xl[..., None] + dxs[..., None] * xs
    top = np.sqrt(np.clip(r * r - (xq - x0) ** 2, 0.0, None))
    hi = np.minimum(top, yr[..., None])
    lo = yl[..., None]
    col = np.where(hi > lo, (hi ** (1 + a) - lo ** (1 + a)) / (1 + a), 0.0)
    return dxs * (col @ ws)


def _grid_region(v: ExtensionField, x0: float, r: float, a: float):
    g = v.grid
    if not g.covers(x0, r):
        raise RegionNotCovered(f"half-disc of radius {r} at {x0} leaves the grid")
    xs = g.xs
    ys = np.concatenate([[0.0], g.ys])
    i0 = max(0, int(math.floor((x0 - r - g.x0) / g.dx)))
    i1 = min(g.nx - 1, int(math.ceil((x0 + r - g.x0) / g.dx)))
    j1 = min(ys.size - 1, int(math.ceil(r / g.dy)))
    xl, xr = xs[i0:i1], xs[i0 + 1 : i1 + 1]
    yl, yr = ys[:j1], ys[1 : j1 + 1]
    XL, YL = np.meshgrid(xl, yl, indexing="ij")
    XR, YR = np.meshgrid(xr, yr, indexing="ij")
    far = np.maximum.reduce([(XL - x0) ** 2 + YR**2, (XR - x0) ** 2 + YR**2])
    inside = far <= r * r
    W = np.empty(XL.shape)
    W[inside] = (YR[inside] ** (1 + a) - YL[inside] ** (1 + a)) / (1 + a) * (XR - XL)[inside]
    cut = ~inside
    W[cut] = _covered_weight(x0, r, a, XL[cut], XR[cut], YL[cut], YR[cut])
    V = v.with_trace()[i0 : i1 + 1, : j1 + 1]
    return V, W


def _grid_energy(v: ExtensionField, x0: float, r: float, a: float) -> float:
    V, W = _grid_region(v, x0, r, a)
    ones = np.ones(W.shape[1])  # the y^a weight is already inside W
    dens = _kernels.grid_energy_density(np.ascontiguousarray(V), v.grid.dx, v.grid.dy, ones)
    return 0.5 * float(_kernels.neumaier_sum((dens * W).ravel()))


def _grid_radial(v: ExtensionField, x0: float, rho: float, r: float, a: float, s: float) -> float:
    V, W_out = _grid_region(v, x0, r, a)
    _, W_in = _grid_region(v, x0, rho, a)
    W = W_out.copy()
    g = v.grid
    i0 = max(0, int(math.floor((x0 - r - g.x0) / g.dx)))
    i0_in = max(0, int(math.floor((x0 - rho - g.x0) / g.dx)))
    off = i0_in - i0
    W[off : off + W_in.shape[0], : W_in.shape[1]] -= W_in
    dx, dy = g.dx, g.dy
    dxv = V[1:, :, :] - V[:-1, :, :]
    dyv = V[:, 1:, :] - V[:, :-1, :]
    gx = 0.5 * (dxv[:, :-1, :] + dxv[:, 1:, :]) / dx
    gy = 0.5 * (dyv[:-1, :, :] + dyv[1:, :, :]) / dy
    xc = g.xs[i0 : i0 + W.shape[0]] + 0.5 * dx
    yc = (np.arange(W.shape[1]) + 0.5) * dy
    RX, RY = np.meshgrid(xc - x0, yc, indexing="ij")
    rr = np.hypot(RX, RY)
    radial = (RX / rr)[..., None] * gx + (RY / rr)[..., None] * gy
    dens = (radial**2).sum(axis=2) * rr ** (2.0 * s - 1.0)
    return float(_kernels.neumaier_sum((dens * W).ravel()))


# ---------------------------------------------------------------------------
# exact region integrals (kernel-built fields)


@lru_cache(maxsize=None)
def _legendre01(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _jacobi01(n, alpha, beta):
    # nodes/weights on (0,1) for weight (1-t)^alpha t^beta
    x, w = roots_jacobi(n, alpha, beta)
    return 0.5 * (x + 1.0), w * 0.5 ** (1.0 + alpha + beta)


def _theta_rule(t1: float, half: float, s: float, n: int):
    """Nodes on ``(0, half)`` resolving ``theta^(2s-1)`` below ``t1`` and a
    geometric transition above it.  Returns nodes and weights *including*
    the ``theta^(2s-1)`` factor, i.e. integrate ``f(theta)`` directly."""
    beta = 2.0 * s - 1.0
    t1 = min(t1, half)
    xj, wj = _jacobi01(n, 0.0, beta)
    nodes = [t1 * xj]
    weights = [wj * t1 ** (1.0 + beta) / (t1 * xj) ** beta]  # undo the weight
    xl, wl = _legendre01(n)
    lo = t1
    while lo < half * (1.0 - 1e-15):
        hi = min(half, _THETA_GROWTH * lo)
        nodes.append(lo + (hi - lo) * xl)
        weights.append((hi - lo) * wl)
        lo = hi
    return np.concatenate(nodes), np.concatenate(weights)


def _exact_integral(u: LatticeMap, s: float, x0: float, r_in: float, r_out: float, radial: bool, n: int) -> float:
    """Polar quadrature of ``y^a |grad v|^2`` (or of ``rho^(2s) y^a |d_rho v|^2``
    when ``radial``) over the half-annulus ``r_in < rho < r_out``."""
    e, J = jump_edges(u)
    if e.size == 0:
        return 0.0
    sig = sigma_s(s)
    dist = np.abs(e - x0)
    brk = np.unique(np.concatenate([[r_in, r_out], dist[(dist > r_in) & (dist < r_out)]]))
    on_center = np.any(dist < 1e-14 * max(1.0, abs(x0)))
    right = np.sort(e[e > x0] - x0)
    left = np.sort(x0 - e[e < x0])
    tol = 1e-12 * max(1.0, r_out)

    def _exponent(p):
        # leading power of the theta-integrated density at a breakpoint:
        # rho^(-2s) at a jump edge, rho^(2s) at a regular centre, else smooth
        if p < tol:
            return -2.0 * s if on_center else 2.0 * s
        return -2.0 * s if np.any(np.abs(dist - p) < tol) else None

    xl, wl = _legendre01(n)
    rho_nodes, rho_w = [], []
    for p0, p1 in zip(brk[:-1], brk[1:]):
        L = p1 - p0
        el, er = _exponent(p0), _exponent(p1)
        sl, sr = el is not None, er is not None
        # geometric grading toward singular ends (the leading power is handled
        # by the Jacobi weight, the grading absorbs the logarithmic corrections)
        cuts = {0.0, 1.0}
        levels = [_GRADE_RATIO**k for k in range(1, _GRADE_LEVELS + 1)]
        if sl:
            cuts.update(c for c in levels if not sr or c < 0.5)
        if sr:
            cuts.update(1.0 - c for c in levels if not sl or c < 0.5)
        if not (sl or sr):
            cuts.add(0.5)
        cuts = sorted(cuts)
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            a0, a1 = p0 + c0 * L, p0 + c1 * L
            end_left = c0 == 0.0 and sl
            end_right = c1 == 1.0 and sr
            if end_left or end_right:
                al = er if end_right else 0.0
                be = el if end_left else 0.0
                xj, wj = _jacobi01(n, al, be)
                t = a0 + (a1 - a0) * xj
                wt = wj * (a1 - a0) / ((1.0 - xj) ** al * xj**be)
            else:
                t = a0 + (a1 - a0) * xl
                wt = (a1 - a0) * wl
            rho_nodes.append(t)
            rho_w.append(wt)
    rho_nodes = np.concatenate(rho_nodes)
    rho_w = np.concatenate(rho_w)

    px, py, pw = [], [], []
    half = 0.5 * math.pi
    for rho, wr in zip(rho_nodes, rho_w):
        for side, cand in ((1.0, right), (-1.0, left)):
            if cand.size:
                k = np.searchsorted(cand, rho)
                gaps = [abs(cand[j] - rho) for j in (k - 1, k) if 0 <= j < cand.size]
                delta = max(min(gaps), 1e-300)
            else:
                delta = rho
            t1 = min(half, 0.25 * delta / rho)
            th, wth = _theta_rule(t1, half, s, n)
            ang = th if side > 0 else math.pi - th
            px.append(x0 + rho * np.cos(ang))
            py.append(rho * np.sin(ang))
            pw.append(wth * wr * rho)
    px = np.concatenate(px)
    py = np.concatenate(py)
    pw = np.concatenate(pw)
    vals = _grad_terms(px, py, e, np.ascontiguousarray(J), s, sig, x0, radial)
    if radial:
        vals = vals * np.hypot(px - x0, py) ** (2.0 * s - 1.0)
    return float(_kernels.neumaier_sum(vals * pw))


def _resolve_method(v: ExtensionField, method: str) -> str:
    if method == "auto":
        return "exact" if v.source is not None else "grid"
    if method == "exact" and v.source is None:
        raise ValueError("exact integration needs a kernel-built field")
    if method not in ("exact", "grid"):
        raise ValueError(f"unknown method {method!r}")
    return method


_EXACT_ORDER = 8
_GRADE_LEVELS = 5
_GRADE_RATIO = 0.2
_THETA_GROWTH = 4.0


def dirichlet_energy(v: ExtensionField, x0: float, r: float, order, method: str = "auto") -> float:
    """``1/2 int_{B_r^+(x0)} y^a |grad v|^2``."""
    order = as_order(order)
    if not r > 0:
        raise BadRadii("radius must be positive")
    if not v.grid.covers(x0, r):
        raise RegionNotCovered(f"half-disc of radius {r} at {x0} leaves the grid")
    if _resolve_method(v, method) == "grid":
        return _grid_energy(v, x0, r, order.a)
    return 0.5 * _exact_integral(v.source, order.s, x0, 0.0, r, False, _EXACT_ORDER)


def density(v: ExtensionField, x0: float, r: float, order, method: str = "auto") -> float:
    """Scale-invariant energy ``r^(2s-1) E(v, B_r^+(x0))``."""
    order = as_order(order)
    return r ** (-order.a) * dirichlet_energy(v, x0, r, order, method)


@dataclass
class DensityProfile:
    x0: float
    radii: np.ndarray
    theta: np.ndarray

    def rows(self):
        return [[float(r), float(t)] for r, t in zip(self.radii, self.theta)]

    def to_csv(self, path, config=None) -> str:
        return write_csv(path, ["r", "theta"], self.rows(), config)


def density_profile(v: ExtensionField, x0: float, radii, order, method: str = "auto") -> DensityProfile:
    radii = np.asarray(radii, float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise BadRadii("radii must be positive and strictly increasing")
    theta = np.array([density(v, x0, r, order, method) for r in radii])
    return DensityProfile(float(x0), radii, theta)


def monotonicity_deficit(v: ExtensionField, x0: float, rho: float, r: float, order, method: str = "auto"):
    """``(Theta(r) - Theta(rho), int_{annulus} y^a |(x-x0).grad v|^2 / |x-x0|^(3-2s))``."""
    order = as_order(order)
    if not 0 < rho < r:
        raise BadRadii(f"need 0 < rho < r, got rho={rho}, r={r}")
    if not v.grid.covers(x0, r):
        raise RegionNotCovered(f"half-disc of radius {r} at {x0} leaves the grid")
    lhs = density(v, x0, r, order, method) - density(v, x0, rho, order, method)
    if _resolve_method(v, method) == "grid":
        rhs = _grid_radial(v, x0, rho, r, order.a, order.s)
    else:
        rhs = _exact_integral(v.source, order.s, x0, rho, r, True, _EXACT_ORDER)
    return lhs, rhs


def jump_density(a, b, order) -> float:
    """Density of the extension of a single jump from ``b`` to ``a`` at its jump
    point: ``|a-b|^2 sigma_s / (2 (1-2s))``, the same for every radius."""
    order = as_order(order)
    diff = np.asarray(a, float) - np.asarray(b, float)
    return float(diff @ diff) * sigma_s(order) / (2.0 * order.a)


def field_rows(v: ExtensionField):
    g = v.grid
    rows = []
    for i, x in enumerate(g.xs):
        rows.append([float(x), 0.0, *v.trace[i].tolist()])
        for j, y in enumerate(g.ys):
            rows.append([float(x), float(y), *v.values[i, j].tolist()])
    return rows


def write_field_csv(v: ExtensionField, path, config=None) -> str:
    cols = ["x", "y"] + [f"v_{k + 1}" for k in range(v.dim)]
    return write_csv(path, cols, field_rows(v), config)
