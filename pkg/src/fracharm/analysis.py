"""Blow-up diagnostics: rescaling, tangent-map classification, density-based
singular-set detection and a Campanato-type Hoelder exponent."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cs_extension as cse
from .energy import LatticeMap, LineGrid
from .errors import BadRadii, CoverageExceeded, InsufficientRadii
from .io import write_json
from .manifold import TargetManifold
from .riesz import as_order

_EDGE_TOL = 1e-9


def rescale(u: LatticeMap, x0: float, rho: float, ref: LineGrid) -> LatticeMap:
    """``x -> u(x0 + rho x)`` sampled at the cell centres of ``ref``.

    The mapped truncation ``x0 + rho (-R_ref, R_ref)`` has to stay inside the
    truncation of ``u``.  Tail values are read just beyond the mapped
    truncation, which is exact whenever ``u`` is constant out there.
    """
    if not rho > 0:
        raise ValueError("scale must be positive")
    g = u.grid
    lo, hi = x0 - rho * ref.R, x0 + rho * ref.R
    tol = _EDGE_TOL * max(1.0, g.R)
    if lo < -g.R - tol or hi > g.R + tol:
        raise CoverageExceeded(f"rescaled truncation ({lo}, {hi}) leaves (-{g.R}, {g.R})")
    vals = u(x0 + rho * ref.centers)
    pad = 0.5 * rho * ref.h
    return LatticeMap(ref, vals, u(lo - pad)[0], u(hi + pad)[0])


@dataclass
class BlowupSequence:
    center: float
    scales: np.ndarray
    maps: list
    ref: LineGrid

    def __post_init__(self):
        sc = np.asarray(self.scales, float)
        if sc.ndim != 1 or np.any(sc <= 0) or np.any(np.diff(sc) >= 0):
            raise BadRadii("blow-up scales must be positive and strictly decreasing")
        self.scales = sc

    @property
    def final(self) -> LatticeMap:
        return self.maps[-1]


def blowup_sequence(u: LatticeMap, x0: float, scales, ref: LineGrid) -> BlowupSequence:
    scales = np.asarray(scales, float)
    return BlowupSequence(float(x0), scales, [rescale(u, x0, r, ref) for r in scales], ref)


@dataclass
class TangentClass:
    """``kind`` is ``constant``, ``jump`` or ``unresolved``.  For a jump,
    ``a`` is the value on ``x > 0`` and ``b`` on ``x < 0``."""

    kind: str
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    residual: float = math.nan

    def to_dict(self):
        return {
            "kind": self.kind,
            "a": None if self.a is None else self.a.tolist(),
            "b": None if self.b is None else self.b.tolist(),
            "residual": self.residual,
        }


def _rms(vals: np.ndarray, model: np.ndarray) -> float:
    if vals.size == 0:
        return 0.0
    return math.sqrt(float(((vals - model) ** 2).sum(axis=1).mean()))


def tangent_classify(seq: BlowupSequence, m: TargetManifold, tol: float) -> TangentClass:
    """Fit the last rescaled map with one constant per half-line."""
    if len(seq.maps) < 3:
        raise InsufficientRadii("tangent classification needs at least 3 scales")
    u = seq.final
    c = u.grid.centers
    vals = u.values
    right, left = vals[c > 0], vals[c < 0]
    a = m.project(right.mean(axis=0)[None, :])[0]
    b = m.project(left.mean(axis=0)[None, :])[0]
    if float(np.linalg.norm(a - b)) <= tol:
        p = m.project(vals.mean(axis=0)[None, :])[0]
        res = _rms(vals, p[None, :])
        if res <= tol:
            return TangentClass("constant", p, p, res)
        return TangentClass("unresolved", a, b, res)
    res = math.sqrt((_rms(right, a[None, :]) ** 2 * right.shape[0] + _rms(left, b[None, :]) ** 2 * left.shape[0]) / vals.shape[0])
    if res <= tol:
        return TangentClass("jump", a, b, res)
    return TangentClass("unresolved", a, b, res)


# ---------------------------------------------------------------------------
# singular set


def reliable_radii(radii, h: float, cells: int = 8) -> np.ndarray:
    """Radii whose half-disc spans at least ``cells`` lattice cells."""
    radii = np.asarray(radii, float)
    return radii[2.0 * radii >= cells * h * (1.0 - 1e-12)]


def extrapolated_density(v, x0: float, radii, h: float, order) -> tuple[float, list]:
    """Linear extrapolation to ``r = 0`` from the two smallest reliable radii,
    clamped at zero.  Returns the estimate and the ``(r, theta)`` pairs used."""
    rel = np.sort(reliable_radii(radii, h))
    if rel.size < 2:
        raise InsufficientRadii(f"need two radii with 2r >= 8h (h={h}), got {list(radii)}")
    r1, r2 = rel[0], rel[1]
    t1 = cse.density(v, x0, r1, order)
    t2 = cse.density(v, x0, r2, order)
    est = t1 - r1 * (t2 - t1) / (r2 - r1)
    return max(0.0, est), [(float(r1), t1), (float(r2), t2)]


@dataclass
class SingularSetReport:
    points: np.ndarray
    theta: np.ndarray
    threshold: float
    flagged: np.ndarray
    samples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tested_points": self.points.tolist(),
            "theta_estimate": self.theta.tolist(),
            "threshold": self.threshold,
            "flagged_points": self.flagged.tolist(),
            "samples": self.samples,
        }

    def to_json(self, path, config=None) -> str:
        return write_json(path, self.to_dict(), config)


def singular_set(u: LatticeMap, v, threshold: float, points, probe_radii, order) -> SingularSetReport:
    """Flag probe points whose extrapolated density reaches ``threshold``."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    order = as_order(order)
    pts = np.asarray(points, float)
    h = max(u.grid.h, v.grid.dx if v.source is None else 0.0)
    thetas, samples = [], []
    for x0 in pts:
        est, used = extrapolated_density(v, float(x0), probe_radii, h, order)
        thetas.append(est)
        samples.append({"x0": float(x0), "radii_theta": used})
    thetas = np.array(thetas)
    return SingularSetReport(pts, thetas, float(threshold), pts[thetas >= threshold], samples)


def default_threshold(order, scale: float = 0.5) -> float:
    """``scale`` times the density of the antipodal unit jump."""
    return scale * cse.jump_density([1.0], [-1.0], order)


# ---------------------------------------------------------------------------
# Hoelder exponent


def mean_oscillation(u: LatticeMap, x0: float, r: float) -> float:
    """``(2r)^-1 int_{x0-r}^{x0+r} |u - avg|^2``, exact for cellwise data."""
    g = u.grid
    lo, hi = x0 - r, x0 + r
    pieces, weights = [], []
    if lo < -g.R:
        pieces.append(u.tail_left)
        weights.append(min(hi, -g.R) - lo)
    e = g.edges
    i0 = max(0, int(np.searchsorted(e, lo, side="right")) - 1)
    i1 = min(g.n_cells, int(np.searchsorted(e, hi, side="left")))
    for i in range(i0, i1):
        w = min(hi, e[i + 1]) - max(lo, e[i])
        if w > 0:
            pieces.append(u.values[i])
            weights.append(w)
    if hi > g.R:
        pieces.append(u.tail_right)
        weights.append(hi - max(lo, g.R))
    P = np.array(pieces)
    W = np.array(weights)
    avg = (W[:, None] * P).sum(axis=0) / W.sum()
    return float((W * ((P - avg) ** 2).sum(axis=1)).sum() / W.sum())


@dataclass
class HolderFit:
    x0: float
    exponent: float
    slope: float
    residual: float
    radii: list
    oscillation: list

    def to_dict(self):
        return dict(self.__dict__)


def holder_exponent(u: LatticeMap, x0: float, radii, min_cells: int = 4) -> HolderFit:
    """Half the log-log slope of the mean oscillation against ``r``.

    Radii with ``2r < min_cells * h`` are dropped (resolution floor).
    """
    radii = np.sort(np.asarray(radii, float))
    if radii.size < 4:
        raise InsufficientRadii("need at least 4 radii")
    ratios = radii[1:] / radii[:-1]
    if not np.allclose(ratios, 2.0, rtol=1e-9):
        raise BadRadii("radii must be dyadic")
    kept = radii[2.0 * radii >= min_cells * u.grid.h * (1.0 - 1e-12)]
    if kept.size < 3:
        raise InsufficientRadii(f"only {kept.size} radii above the resolution floor")
    osc = np.array([mean_oscillation(u, x0, r) for r in kept])
    if not np.any(osc > 0):
        # locally constant: no decay rate to measure, any exponent fits
        return HolderFit(float(x0), math.inf, math.inf, 0.0, kept.tolist(), osc.tolist())
    y = np.log(np.maximum(osc, np.finfo(float).tiny))
    X = np.vstack([np.log(kept), np.ones_like(kept)]).T
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
    slope = float(coef[0])
    return HolderFit(float(x0), 0.5 * slope, slope, resid, kept.tolist(), osc.tolist())
