"""Target manifolds: unit spheres in R^d and the two-point set {-1, +1} in R.

All operations accept a single point of shape ``(d,)`` or a stack ``(n, d)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousProjection, NotOnManifold

ON_MANIFOLD_TOL = 1e-12


@dataclass(frozen=True)
class TargetManifold:
    kind: str  # "sphere" or "pointpair"
    ambient_dim: int

    def __post_init__(self):
        if self.kind not in ("sphere", "pointpair"):
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.kind == "sphere" and self.ambient_dim < 2:
            raise ValueError("spheres need ambient dimension >= 2")
        if self.kind == "pointpair" and self.ambient_dim != 1:
            raise ValueError("the point pair lives in R^1")

    @property
    def name(self) -> str:
        if self.kind == "pointpair":
            return "S0"
        return f"S{self.ambient_dim - 1}"

    @property
    def has_trivial_tangent(self) -> bool:
        return self.kind == "pointpair"

    def _as_points(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape[-1:] != (self.ambient_dim,):
            if self.ambient_dim == 1 and z.ndim <= 1:
                z = z.reshape(-1, 1) if z.ndim == 1 else z.reshape(1)
            else:
                raise ValueError(f"expected trailing dimension {self.ambient_dim}, got {z.shape}")
        return z

    def dist(self, z):
        z = self._as_points(z)
        if self.kind == "sphere":
            return np.abs(np.linalg.norm(z, axis=-1) - 1.0)
        x = z[..., 0]
        return np.minimum(np.abs(x - 1.0), np.abs(x + 1.0))

    def contains(self, z, tol=ON_MANIFOLD_TOL):
        return self.dist(z) <= tol

    def project(self, z):
        """Nearest point on the manifold; raises on the ambiguity set."""
        z = self._as_points(z)
        if self.kind == "sphere":
            r = np.linalg.norm(z, axis=-1, keepdims=True)
            if np.any(r == 0.0):
                raise AmbiguousProjection("the origin has no unique nearest point on the sphere")
            return z / r
        if np.any(z[..., 0] == 0.0):
            raise AmbiguousProjection("0 is equidistant from -1 and +1")
        return np.sign(z)

    def tangent_project(self, b, w):
        """Orthogonal projection of ``w`` onto the tangent space at ``b``."""
        b = self._as_points(b)
        w = self._as_points(w)
        if not np.all(self.contains(b)):
            raise NotOnManifold("base point is not on the manifold")
        if self.kind == "pointpair":
            return np.zeros(np.broadcast_shapes(b.shape, w.shape))
        return w - np.sum(w * b, axis=-1, keepdims=True) * b


def sphere(dim: int = 2) -> TargetManifold:
    """Unit sphere in ``R^dim`` (``dim=2`` is the circle)."""
    return TargetManifold("sphere", dim)


def circle() -> TargetManifold:
    return TargetManifold("sphere", 2)


def point_pair() -> TargetManifold:
    return TargetManifold("pointpair", 1)


def from_name(kind: str, dim: int | None = None) -> TargetManifold:
    kind = kind.lower()
    if kind in ("pointpair", "s0"):
        return point_pair()
    if kind == "circle":
        return circle()
    if kind == "sphere":
        return sphere(2 if dim is None else dim)
    raise ValueError(f"unknown target {kind!r}")
