"""Constrained minimization of the discrete energy with fixed exterior data.

Sphere targets use projected (retracted) gradient descent with Armijo
backtracking.  The two-point target has a trivial tangent space, so gradient
flow is meaningless there; :func:`flip_search` is the local-minimality test
instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .energy import KernelMatrix, LatticeMap, energy, energy_change, energy_gradient
from .errors import AmbiguousProjection, ProjectionFailure, Stalled, WrongTarget
from .manifold import TargetManifold
from .riesz import as_order, gamma_s


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    step0: float = 1.0  # in units of 1 / (Lipschitz bound of the gradient)
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    seed: int = 0
    jitter: float = 1e-3  # seeded tangent kick of the initial map, sphere targets only

    def __post_init__(self):
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if not self.grad_tol > 0 or not self.step0 > 0:
            raise ValueError("grad_tol and step0 must be positive")
        if not 0 < self.armijo_c < 1 or not 0 < self.backtrack < 1:
            raise ValueError("armijo_c and backtrack must lie strictly inside (0, 1)")
        if self.jitter < 0:
            raise ValueError("jitter must be nonnegative")


@dataclass
class SolveReport:
    final_map: LatticeMap
    energies: list = field(default_factory=list)
    decrements: list = field(default_factory=list)  # exact change of each accepted step
    grad_norm: float = math.nan
    iterations: int = 0
    termination: str = ""

    @property
    def final_energy(self) -> float:
        return self.energies[-1]

    @property
    def converged(self) -> bool:
        return self.termination in ("converged", "trivial-tangent-space")

    def to_dict(self) -> dict:
        return {
            "termination": self.termination,
            "iterations": self.iterations,
            "final_energy": self.final_energy,
            "grad_norm": self.grad_norm,
            "energy_trajectory": list(self.energies),
            "energy_decrements": list(self.decrements),
        }


def tangential_gradient(u: LatticeMap, K: KernelMatrix, m: TargetManifold, order) -> np.ndarray:
    """Tangent-space part of the energy gradient on each interior cell."""
    G = energy_gradient(u, K, order)
    return m.tangent_project(u.interior_values, G)


def _weighted_norm(g: np.ndarray, h: float) -> float:
    # L2 norm of the discrete variational derivative g_i / h
    return math.sqrt(float(_kernels.neumaier_sum((g * g).sum(axis=1))) / h)


def el_residual(u: LatticeMap, K: KernelMatrix, m: TargetManifold, order) -> float:
    """How far ``u`` is from discrete Euler-Lagrange orthogonality.

    ``sqrt(sum_i |P_i grad_i|^2 / h)``: the L2 norm of the tangential part of
    the discrete variational derivative.  Zero for the two-point target.
    """
    return _weighted_norm(tangential_gradient(u, K, m, order), u.grid.h)


def _check_constrained(u: LatticeMap, m: TargetManifold):
    if u.dim != m.ambient_dim:
        raise WrongTarget(f"map has values in R^{u.dim}, target lives in R^{m.ambient_dim}")
    vals = np.vstack([u.values, u.tail_left, u.tail_right])
    if not np.all(m.contains(vals)):
        raise ValueError("initial map is not constrained to the target on every cell")


def lipschitz_bound(K: KernelMatrix, order) -> float:
    """Upper bound on the Hessian norm of the energy in the interior values."""
    rows = K.K.sum(axis=1) + K.tail_left + K.tail_right
    return 4.0 * gamma_s(order) * float(rows.max())


def minimize(u0: LatticeMap, K: KernelMatrix, m: TargetManifold, order, opts: SolverOptions | None = None) -> SolveReport:
    """Projected gradient descent on the interior values of ``u0``.

    Exterior cells and tails are never touched.  Returns a :class:`SolveReport`
    whose energy trajectory is nonincreasing; the per-step changes in
    ``decrements`` are evaluated from the increment and are all strictly
    negative.  Raises :class:`Stalled`
    or :class:`ProjectionFailure` (with the partial report attached as
    ``.report``) when the line search cannot make progress.
    """
    opts = opts or SolverOptions()
    order = as_order(order)
    _check_constrained(u0, m)
    h = u0.grid.h
    u = u0.copy()

    if m.has_trivial_tangent:
        return SolveReport(u, [energy(u, K, order)], grad_norm=0.0, iterations=0, termination="trivial-tangent-space")

    interior = u.interior_values.copy()
    if opts.jitter > 0:
        rng = np.random.default_rng(opts.seed)
        kick = m.tangent_project(interior, rng.standard_normal(interior.shape))
        interior = m.project(interior + opts.jitter * kick)
        u = u.with_interior(interior)

    E = energy(u, K, order)
    report = SolveReport(u, [E])
    eta0 = opts.step0 / lipschitz_bound(K, order)
    eta = eta0
    for it in range(opts.max_iters):
        g = -tangential_gradient(u, K, m, order)
        gnorm = _weighted_norm(g, h)
        report.grad_norm = gnorm
        report.iterations = it
        if gnorm <= opts.grad_tol:
            report.termination = "converged"
            return report
        slope = float(_kernels.neumaier_sum((g * g).sum(axis=1)))
        halvings = 0
        while True:
            try:
                cand = m.project(interior + eta * g)
            except AmbiguousProjection:
                halvings += 1
                if halvings > 30:
                    report.termination = "projection-failure"
                    err = ProjectionFailure("iterate keeps hitting the ambiguity set")
                    err.report = report
                    raise err
                eta *= 0.5
                continue
            dE = energy_change(u, cand, K, order)
            if dE < 0 and dE <= -opts.armijo_c * eta * slope:
                break
            eta *= opts.backtrack
            if eta < 1e-14 * eta0:
                report.termination = "stalled"
                err = Stalled(f"line search underflow at iteration {it} (residual {gnorm:.3e})")
                err.report = report
                raise err
        interior, u, E = cand, u.with_interior(cand), E + dE
        report.final_map = u
        report.energies.append(E)
        report.decrements.append(dE)
        eta = min(eta / opts.backtrack, 4.0 * eta0)

    g = -tangential_gradient(u, K, m, order)
    report.grad_norm = _weighted_norm(g, h)
    report.iterations = opts.max_iters
    report.termination = "converged" if report.grad_norm <= opts.grad_tol else "max_iters"
    return report


# ---------------------------------------------------------------------------
# initial maps


def _slerp(p, q, t, fallback_axis):
    p, q = np.asarray(p, float), np.asarray(q, float)
    cosang = float(np.clip(p @ q, -1.0, 1.0))
    ang = math.acos(cosang)
    if ang < 1e-14:
        return np.tile(p, (len(t), 1))
    w = q - cosang * p
    nw = np.linalg.norm(w)
    if nw < 1e-12:  # antipodal: any great circle works, take the given axis
        w = fallback_axis - (fallback_axis @ p) * p
        nw = np.linalg.norm(w)
    w = w / nw
    t = np.asarray(t)[:, None]
    return np.cos(t * ang) * p + np.sin(t * ang) * w


def initial_map(exterior: LatticeMap, m: TargetManifold, kind: str = "copy", seed: int = 0) -> LatticeMap:
    """Interior initialization.

    ``copy``: interior cells keep the values already stored (for a jump
    exterior built with :meth:`LatticeMap.jump` this is the jump map).
    ``geodesic``: interpolate along a great circle between the exterior values
    adjacent to the window.  ``random``: seeded uniform points on the target.
    """
    g = exterior.grid
    n = g.n_interior
    if kind == "copy":
        return exterior.copy()
    rng = np.random.default_rng(seed)
    if kind == "random":
        if m.kind == "pointpair":
            vals = rng.choice([-1.0, 1.0], size=(n, 1))
        else:
            vals = m.project(rng.standard_normal((n, m.ambient_dim)))
        return exterior.with_interior(vals)
    if kind == "geodesic":
        left = exterior.values[g.window_start - 1] if g.window_start > 0 else exterior.tail_left
        right = exterior.values[g.window_stop] if g.window_stop < g.n_cells else exterior.tail_right
        t = (np.arange(n) + 0.5) / n
        if m.kind == "pointpair":
            vals = np.where(t[:, None] < 0.5, left, right)
        else:
            axis = np.zeros(m.ambient_dim)
            axis[-1] = 1.0
            if abs(abs(left @ axis) - 1.0) < 1e-12:
                axis = np.roll(axis, 1)
            vals = _slerp(left, right, t, axis)
        return exterior.with_interior(vals)
    raise ValueError(f"unknown initialization {kind!r}")


# ---------------------------------------------------------------------------
# two-point target


@dataclass
class FlipReport:
    deltas: np.ndarray  # energy change per interior cell
    best_cell: int  # grid index of the best flip
    best_delta: float


def flip_deltas(u: LatticeMap, K: KernelMatrix, order) -> np.ndarray:
    """Exact energy change of flipping the sign of each interior cell.

    Flipping ``u_i -> -u_i`` changes the energy by
    ``4 gamma u_i (sum_{j != i} K_ij u_j + T-_i g- + T+_i g+)``.
    """
    order = as_order(order)
    if u.dim != 1 or not np.all(np.abs(np.abs(np.concatenate([u.values[:, 0], u.tail_left, u.tail_right])) - 1.0) <= 1e-12):
        raise WrongTarget("flip search needs a map into {-1, +1}")
    x = u.values[:, 0]
    field_ = _kernels.flip_field(
        K.K, x, u.grid.interior, K.tail_left, K.tail_right, float(u.tail_left[0]), float(u.tail_right[0])
    )
    sl = slice(u.grid.window_start, u.grid.window_stop)
    return 4.0 * gamma_s(order) * x[sl] * field_[sl]


def flip_search(u: LatticeMap, K: KernelMatrix, order) -> FlipReport:
    deltas = flip_deltas(u, K, order)
    k = int(np.argmin(deltas))
    return FlipReport(deltas, u.grid.window_start + k, float(deltas[k]))


def max_adjacent_jump(u: LatticeMap) -> float:
    """Largest ``|u_{i+1} - u_i|`` over pairs of neighbouring window cells."""
    vals = u.interior_values
    return float(np.linalg.norm(np.diff(vals, axis=0), axis=1).max())
