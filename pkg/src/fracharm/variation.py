"""Rotating competitor for the two-valued jump map on the unit circle.

With ``a = (alpha, beta)`` on ``(0, 1)`` and ``b = (-alpha, beta)`` on
``(-1, 0)``, the competitor ``u_t`` rotates both values toward the normals
``a* = (-beta, alpha)`` and ``b* = (beta, alpha)`` and renormalizes.  Its
energy on ``(-1, 1)`` is a five-term expression in three kernel masses, so
both variations at ``t = 0`` are closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import LatticeMap, LineGrid
from .io import write_csv
from .riesz import Interval, as_order, gamma_s, kernel_mass

_UNIT_TOL = 1e-14


@dataclass(frozen=True)
class JumpConfig:
    """Normal form ``a = (alpha, beta)``, ``b = (-alpha, beta)`` with
    ``alpha > 0``, ``beta >= 0`` and ``alpha^2 + beta^2 = 1``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0 and 0.0 <= self.beta < 1.0):
            raise ValueError(f"need alpha in (0,1] and beta in [0,1), got ({self.alpha}, {self.beta})")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > _UNIT_TOL * 4:
            raise ValueError("(alpha, beta) must lie on the unit circle")

    @classmethod
    def from_angle(cls, phi: float) -> "JumpConfig":
        """``a = (cos phi, sin phi)`` for ``phi`` in ``[0, pi/2)``."""
        return cls(math.cos(phi), math.sin(phi))

    @classmethod
    def antipodal(cls) -> "JumpConfig":
        return cls(1.0, 0.0)

    @property
    def a(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])

    @property
    def b(self) -> np.ndarray:
        return np.array([-self.alpha, self.beta])

    @property
    def a_star(self) -> np.ndarray:
        return np.array([-self.beta, self.alpha])

    @property
    def b_star(self) -> np.ndarray:
        return np.array([self.beta, self.alpha])

    def values(self, t: float):
        """Competitor values on ``(0, 1)`` and ``(-1, 0)``; both unit vectors."""
        n = math.sqrt(1.0 + t * t)
        return (self.a + t * self.a_star) / n, (self.b + t * self.b_star) / n


@dataclass(frozen=True)
class VariationCoefficients:
    """The three masses of the expansion and the energy constant."""

    I1: float  # (0,1) against (-1,0)
    I2: float  # (0,1) against (1, inf)
    I3: float  # (0,1) against (-inf, -1)
    gamma: float

    @property
    def identity_residual(self) -> float:
        """``I2 - I1 - I3``; zero for every order."""
        return self.I2 - self.I1 - self.I3


def coefficients(order) -> VariationCoefficients:
    order = as_order(order)
    unit = Interval(0.0, 1.0)
    return VariationCoefficients(
        float(kernel_mass(unit, Interval(-1.0, 0.0), order)),
        float(kernel_mass(unit, Interval(1.0, math.inf), order)),
        float(kernel_mass(unit, Interval(-math.inf, -1.0), order)),
        gamma_s(order),
    )


def competitor_energy(cfg: JumpConfig, t: float, order) -> float:
    """Energy of ``u_t`` on ``(-1, 1)`` from the five-term expansion."""
    c = coefficients(order)
    a, b, a_, b_ = cfg.a, cfg.b, cfg.a_star, cfg.b_star
    n = math.sqrt(1.0 + t * t)
    q = 1.0 + t * t
    # 1 - sqrt(1+t^2) without cancellation
    one_minus_n = -t * t / (1.0 + n)

    def sq(v):
        return float(v @ v)

    inner = sq((a - b) + t * (a_ - b_)) / q
    same = (sq(one_minus_n * a + t * a_) + sq(one_minus_n * b + t * b_)) / q
    cross = (sq(a + t * a_ - b * n) + sq(b + t * b_ - a * n)) / q
    return c.gamma * (c.I1 * inner + c.I2 * same + c.I3 * cross)


def variation_constant(order) -> float:
    """``C(s) = 8 gamma (I1 + I3) > 0``: the first variation is ``-C alpha beta``."""
    c = coefficients(order)
    return 8.0 * c.gamma * (c.I1 + c.I3)


def first_variation(cfg: JumpConfig, order) -> float:
    """``d/dt`` of the competitor energy at ``t = 0``."""
    return -variation_constant(order) * cfg.alpha * cfg.beta


def second_variation_antipodal(order) -> float:
    """``d^2/dt^2`` at ``t = 0`` for ``a = (1,0)``, ``b = (-1,0)``:
    ``-8 gamma I1 + 4 gamma I2 - 4 gamma I3``."""
    c = coefficients(order)
    return -8.0 * c.gamma * c.I1 + 4.0 * c.gamma * c.I2 - 4.0 * c.gamma * c.I3


def second_variation_reduced(order) -> float:
    """Same quantity after ``I2 = I1 + I3``: ``-4 gamma I1``."""
    c = coefficients(order)
    return -4.0 * c.gamma * c.I1


def competitor_lattice(cfg: JumpConfig, t: float, grid: LineGrid) -> LatticeMap:
    """``u_t`` on a lattice whose window is ``(-1, 1)``: ``b`` left of ``-1``,
    ``a`` right of ``1``."""
    if not (math.isclose(grid.x_left, -1.0) and math.isclose(grid.x_right, 1.0)):
        raise ValueError("the competitor lives on the window (-1, 1)")
    plus, minus = cfg.values(t)
    c = grid.centers
    vals = np.empty((grid.n_cells, 2))
    vals[c < -1.0] = cfg.b
    vals[(c > -1.0) & (c < 0.0)] = minus
    vals[(c > 0.0) & (c < 1.0)] = plus
    vals[c > 1.0] = cfg.a
    return LatticeMap(grid, vals, cfg.b, cfg.a)


STABILITY_COLUMNS = ["s", "alpha", "beta", "E0", "dE", "d2E_antipodal", "identity_residual", "identity_pass"]


def stability_rows(s_values, angles, identity_tol: float = 1e-12):
    """One row per ``(s, phi)``: energy at ``t = 0``, first variation, the
    antipodal second variation and the ``I2 = I1 + I3`` check."""
    rows = []
    for s in s_values:
        c = coefficients(s)
        d2 = second_variation_antipodal(s)
        for phi in angles:
            cfg = JumpConfig.from_angle(phi)
            res = c.identity_residual
            rows.append([
                float(s), cfg.alpha, cfg.beta,
                competitor_energy(cfg, 0.0, s), first_variation(cfg, s), d2,
                res, int(abs(res) <= identity_tol),
            ])
    return rows


def write_stability_csv(path, rows, config=None) -> str:
    return write_csv(path, STABILITY_COLUMNS, rows, config)
