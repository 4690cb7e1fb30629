"""Riesz-kernel masses over interval pairs and the normalization constants.

The mass of a pair of intervals is

    M(I, J) = int_I int_J |x - y|^(-1-2s) dy dx,

which is finite for abutting intervals as long as ``s < 1/2``.  The closed
form is a second difference of ``t -> t^(1-2s)``; :func:`quadrature_oracle`
computes the same number by adaptive Gauss quadrature and is only meant for
testing.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import (
    InvalidInterval,
    InvalidOrder,
    NoConvergence,
    OverlappingIntervals,
)


@dataclass(frozen=True)
class FractionalOrder:
    """Fractional exponent ``s`` in (0, 1/2) and the extension weight ``a = 1 - 2s``."""

    s: float
    a: float = field(init=False)

    def __post_init__(self):
        s = float(self.s)
        if not (math.isfinite(s) and 0.0 < s < 0.5):
            raise InvalidOrder(f"s must lie in (0, 1/2), got {self.s!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a", 1.0 - 2.0 * s)

    @property
    def p(self) -> float:
        """Exponent ``1 - 2s`` of the antiderivative; equal to ``a``."""
        return self.a


def as_order(order) -> FractionalOrder:
    if isinstance(order, FractionalOrder):
        return order
    return FractionalOrder(order)


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; at most one endpoint may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidInterval("NaN endpoint")
        if not lo < hi:
            raise InvalidInterval(f"need lo < hi, got ({lo}, {hi})")
        if math.isinf(lo) and math.isinf(hi):
            raise InvalidInterval("the whole line is not an admissible interval")
        if lo == math.inf or hi == -math.inf:
            raise InvalidInterval(f"degenerate half-line ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_half_line(self) -> bool:
        return math.isinf(self.lo) or math.isinf(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def scaled(self, lam: float) -> "Interval":
        lo, hi = lam * self.lo, lam * self.hi
        return Interval(min(lo, hi), max(lo, hi))

    def reflected(self) -> "Interval":
        return Interval(-self.hi, -self.lo)


@dataclass(frozen=True)
class KernelMass:
    value: float

    def __float__(self):
        return self.value


def gamma_s(order) -> float:
    """Normalization of the s-energy, ``s 2^{2s} pi^{-1/2} G((1+2s)/2) / G(1-s)``."""
    s = as_order(order).s
    log_ratio = math.lgamma(0.5 + s) - math.lgamma(1.0 - s)
    return s * 2.0 ** (2.0 * s) * math.exp(log_ratio) / math.sqrt(math.pi)


def sigma_s(order) -> float:
    """Constant of the extension kernel, ``pi^{-1/2} G((1+2s)/2) / G(s)``.

    Also accepts ``s = 1/2`` (classical Poisson kernel, value ``1/pi``).
    """
    if isinstance(order, FractionalOrder):
        s = order.s
    else:
        s = float(order)
        if not 0.0 < s <= 0.5:
            raise InvalidOrder(f"s must lie in (0, 1/2], got {order!r}")
    return math.exp(math.lgamma(0.5 + s) - math.lgamma(s)) / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# closed form


def _pow_increment(x: float, w: float, p: float) -> float:
    """``(x + w)^p - x^p`` for ``x >= 0``, ``w > 0`` without cancellation."""
    if x <= w:
        # no cancellation to fear, and w / x could overflow
        return (x + w) ** p - x ** p
    return x ** p * math.expm1(p * math.log1p(w / x))


def _mass_oriented(gap: float, w1: float, w2: float, s: float) -> float:
    """Mass of ``(-w1, 0) x (gap, gap + w2)``; ``w2`` may be ``inf``."""
    p = 1.0 - 2.0 * s
    near = _pow_increment(gap, w1, p)
    if math.isinf(w2):
        diff = near
    else:
        diff = near - _pow_increment(gap + w2, w1, p)
    return diff / (2.0 * s * p)


def _canonical(I: Interval, J: Interval):
    """Return ``(gap, w1, w2)`` with the finite interval on the left.

    Raises when the interiors intersect or both intervals are unbounded.
    """
    if I.is_half_line and J.is_half_line:
        raise InvalidInterval("at most one interval may be a half-line")
    if I.hi <= J.lo:
        left, right = I, J
    elif J.hi <= I.lo:
        left, right = J, I
    else:
        raise OverlappingIntervals(f"interiors of {I} and {J} intersect")
    if math.isinf(left.lo):
        # mirror so that the unbounded piece sits on the right
        left, right = right.reflected(), left.reflected()
    return right.lo - left.hi, left.length, right.length


def kernel_mass(I: Interval, J: Interval, order) -> KernelMass:
    """Exact ``int_I int_J |x-y|^(-1-2s)`` for intervals with disjoint interiors."""
    s = as_order(order).s
    gap, w1, w2 = _canonical(I, J)
    return KernelMass(_mass_oriented(gap, w1, w2, s))


def unit_masses(order):
    """The three masses ``I1 = M((0,1),(-1,0))``, ``I2 = M((0,1),(1,inf))``,
    ``I3 = M((0,1),(-inf,-1))``."""
    unit = Interval(0.0, 1.0)
    i1 = kernel_mass(unit, Interval(-1.0, 0.0), order).value
    i2 = kernel_mass(unit, Interval(1.0, math.inf), order).value
    i3 = kernel_mass(unit, Interval(-math.inf, -1.0), order).value
    return i1, i2, i3


def offset_masses(h: float, count: int, order) -> np.ndarray:
    """Masses between two width-``h`` cells ``k`` cells apart, ``k = 0..count-1``.

    Entry ``0`` is set to zero: the same-cell mass diverges but never
    contributes for piecewise constant maps.
    """
    s = as_order(order).s
    out = np.zeros(count)
    for k in range(1, count):
        out[k] = _mass_oriented((k - 1) * h, h, h, s)
    return out


def half_line_masses(h: float, count: int, order) -> np.ndarray:
    """Mass between a width-``h`` cell and a half-line starting ``k*h`` away."""
    s = as_order(order).s
    out = np.empty(count)
    for k in range(count):
        out[k] = _mass_oriented(k * h, h, math.inf, s)
    return out


# ---------------------------------------------------------------------------
# quadrature oracle

_GAUSS_ORDER = 8
_MAX_LEAVES = 20000


@lru_cache(maxsize=None)
def _legendre01(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _jacobi01(n, beta):
    # weight t^beta on (0, 1)
    x, w = roots_jacobi(n, 0.0, beta)
    return 0.5 * (x + 1.0), w * 0.5 ** (1.0 + beta)


def _rect_rule(q, u0, u1, v0, v1, n):
    x, w = _legendre01(n)
    du, dv = u1 - u0, v1 - v0
    uu = u0 + du * x
    vv = v0 + dv * x
    vals = (uu[:, None] + vv[None, :]) ** (-q)
    return du * dv * float(w @ vals @ w)


def _adaptive_rectangles(q, rects, tol_abs, budget):
    """Global adaptive tensor Gauss on ``(u + v)^(-q)`` over rectangles in the
    positive quadrant.  Returns ``(value, error_estimate, leaves_used)``."""
    heap = []
    total = 0.0
    err_total = 0.0
    counter = 0

    def evaluate(r):
        u0, u1, v0, v1 = r
        um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
        coarse = _rect_rule(q, u0, u1, v0, v1, _GAUSS_ORDER)
        kids = ((u0, um, v0, vm), (um, u1, v0, vm), (u0, um, vm, v1), (um, u1, vm, v1))
        fine = sum(_rect_rule(q, *k, _GAUSS_ORDER) for k in kids)
        return fine, abs(fine - coarse)

    for r in rects:
        val, err = evaluate(r)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, counter, r, val))
        counter += 1

    leaves = len(heap)
    while err_total > tol_abs:
        if leaves >= budget:
            raise NoConvergence(
                f"refinement budget {budget} exhausted (error {err_total:.3e} > {tol_abs:.3e})"
            )
        neg_err, _, r, val = heapq.heappop(heap)
        total -= val
        err_total += neg_err
        u0, u1, v0, v1 = r
        um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
        for k in ((u0, um, v0, vm), (um, u1, v0, vm), (u0, um, vm, v1), (um, u1, vm, v1)):
            kval, kerr = evaluate(k)
            total += kval
            err_total += kerr
            heapq.heappush(heap, (-kerr, counter, k, kval))
            counter += 1
        leaves += 3
    return total, err_total, leaves


def _corner_square(q, s, m):
    """``int_0^m int_0^m (u + v)^(-q)`` by a Duffy split of the square into two
    triangles; the radial factor ``rho^(-2s)`` is absorbed by Gauss-Jacobi."""
    results = []
    for n in (12, 24):
        rho, wr = _jacobi01(n, -2.0 * s)
        tau, wt = _legendre01(n)
        acc = 0.0
        for upper in (False, True):
            # lower triangle: u = rho, v = rho*tau; upper triangle swaps roles
            u = rho[:, None] * (tau[None, :] if upper else 1.0)
            v = rho[:, None] * (1.0 if upper else tau[None, :])
            # rho*(u+v)^(-q) * rho^(2s) is smooth once rho is factored out
            smooth = ((u + v) ** (-q)) * rho[:, None] * rho[:, None] ** (2.0 * s)
            acc += float(wr @ smooth @ wt)
        results.append(acc * m ** (2.0 - q))
    return results[1], abs(results[1] - results[0])


def quadrature_oracle(I: Interval, J: Interval, order, tol: float = 1e-12) -> float:
    """Independent numerical value of the pair mass, relative accuracy ``tol``.

    Adaptive tensor Gauss on the rectangle, a Duffy-transformed corner square
    when the intervals share an endpoint, and dyadic panels for a half-line
    whose remainder beyond the last panel is added from the one-dimensional
    tail ``int_Y^inf t^(-q) dt``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    s = as_order(order).s
    q = 1.0 + 2.0 * s
    gap, w1, w2 = _canonical(I, J)
    # coordinates u = distance left of the shared gap, v = distance right of it
    # integrand (u + v + gap)^(-q); shift v by the gap
    pieces = []
    corner_val = corner_err = 0.0
    if gap == 0.0:
        m = w1 if math.isinf(w2) else min(w1, w2)
        corner_val, corner_err = _corner_square(q, s, m)
        if w1 > m:
            pieces.append((m, w1, 0.0, m))
        v_start = m
    else:
        v_start = gap
    v_end = v_start + (w2 - (v_start - gap)) if not math.isinf(w2) else math.inf

    if math.isinf(v_end):
        # dyadic panels out to Y, plus the exact 1-D tail of the remainder
        scale = max(w1, v_start)
        width = scale
        lo = v_start
        while lo < 16.0 * scale:
            pieces.append((0.0, w1, lo, lo + width))
            lo, width = lo + width, 2.0 * width
        # remainder: int_0^w1 int_lo^inf (u+v)^(-q) dv du = int_0^w1 (u+lo)^(-2s)/(2s) du,
        # smooth because lo >= 16 w1
        tails = []
        for n in (20, 40):
            x, w = _legendre01(n)
            tails.append(w1 * float(w @ ((w1 * x + lo) ** (-2.0 * s))) / (2.0 * s))
        tail, tail_err = tails[1], abs(tails[1] - tails[0])
    else:
        pieces.append((0.0, w1, v_start, v_end))
        tail = tail_err = 0.0

    # first pass to size the absolute tolerance
    rough = corner_val + tail + sum(_rect_rule(q, *r, _GAUSS_ORDER) for r in pieces)
    tol_abs = max(tol * abs(rough), 1e-300) * 0.25
    val, err, _ = _adaptive_rectangles(q, pieces, tol_abs, _MAX_LEAVES)
    total = val + corner_val + tail
    if corner_err + tail_err > tol * abs(total):
        raise NoConvergence("corner or tail contribution not resolved to tolerance")
    return total
