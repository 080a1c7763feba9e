"""Polynomial segment primitives.

A segment is an odd-order polynomial in the monomial basis, stored as an
(order+1) x 3 coefficient matrix (ascending powers, one column per axis).
Because the order is odd, the coefficients are in bijection with the stacked
value-and-derivative boundary conditions at the two segment ends, and this
module provides that mapping together with the integrated squared-derivative
cost matrix.

The monomial basis keeps every formula elementary but conditions poorly for
high orders; order <= 11 is the supported range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

import scipy.linalg

Array = NDArray[np.float64]


@lru_cache(maxsize=None)
def _falling(order: int, deriv: int) -> Array:
    """Falling factorials j!/(j-deriv)! for j = 0..order (zero below deriv)."""
    row = np.zeros(order + 1)
    for j in range(deriv, order + 1):
        row[j] = math.perm(j, deriv)
    row.setflags(write=False)
    return row


def _check_order(order: int) -> None:
    if order < 1 or order % 2 == 0:
        raise ValueError(f"polynomial order must be odd and >= 1, got {order}")


def basis(t: float, order: int, deriv: int = 0) -> Array:
    """Derivative of the monomial basis row at time t.

    Entry j equals d^deriv/dt^deriv [t^j], i.e. j!/(j-deriv)! * t^(j-deriv)
    for j >= deriv and zero otherwise.

    Args:
        t: evaluation time.
        order: polynomial order (odd).
        deriv: derivative order, >= 0.

    Returns:
        Vector of length order + 1.
    """
    _check_order(order)
    if deriv < 0:
        raise ValueError(f"derivative order must be >= 0, got {deriv}")
    out = np.zeros(order + 1)
    if deriv > order:
        return out
    out[deriv:] = float(t) ** np.arange(order + 1 - deriv)
    out *= _falling(order, deriv)
    return out


@lru_cache(maxsize=None)
def _mapping_structure(order: int) -> tuple[Array, Array, Array, float]:
    """Cached pieces of the boundary mapping: start block, factors, exponents.

    Also the condition number at unit duration, which anchors a closed-form
    bound on the conditioning at any duration (diagonal rescaling by powers
    of the duration connects the two).
    """
    half = (order + 1) // 2
    factors = np.vstack([_falling(order, r) for r in range(half)])
    j = np.arange(order + 1)
    r = np.arange(half)[:, None]
    start_block = factors * (j[None, :] == r)
    exponents = np.maximum(j[None, :] - r, 0).astype(float)
    unit = np.vstack([start_block, factors])
    cond_unit = float(np.linalg.cond(unit))
    for arr in (start_block, factors, exponents):
        arr.setflags(write=False)
    return start_block, factors, exponents, cond_unit


def mapping_matrix(duration: float, order: int) -> Array:
    """Matrix sending segment coefficients to stacked boundary conditions.

    The first (order+1)/2 rows evaluate derivatives 0..(order-1)/2 at time 0,
    the remaining rows evaluate them at ``duration``. Odd order makes the
    matrix square and nonsingular, so coefficients and boundary conditions
    determine each other uniquely.
    """
    _check_order(order)
    if duration <= 0:
        raise ValueError(f"segment duration must be positive, got {duration}")
    start_block, factors, exponents, cond_unit = _mapping_structure(order)
    if __debug__:
        # closed-form upper bound on cond(A(duration)): diagonal duration
        # rescalings relate A(duration) to A(1) row- and column-wise
        half = (order + 1) // 2
        stretch = max(duration, 1.0 / duration)
        bound = cond_unit * stretch ** (order + half - 1)
        assert bound < 1.0 / np.finfo(float).eps, (
            f"boundary mapping conditioning bound {bound:.2e} too large for "
            f"duration={duration}, order={order}; order <= 11 and moderate "
            f"durations are the supported range"
        )
    return np.vstack([start_block, factors * float(duration) ** exponents])


@lru_cache(maxsize=None)
def _cost_structure(order: int, deriv: int) -> tuple[Array, Array]:
    """Constant factor and duration exponent of one derivative's cost matrix."""
    f = _falling(order, deriv)
    j = np.arange(order + 1)
    live = (j[:, None] >= deriv) & (j[None, :] >= deriv)
    expo = np.where(live, j[:, None] + j[None, :] - 2 * deriv + 1, 1)
    coef = np.where(live, np.outer(f, f) / expo, 0.0)
    coef.setflags(write=False)
    expo = expo.astype(float)
    expo.setflags(write=False)
    return coef, expo


def cost_matrix(
    duration: float,
    order: int,
    weights: dict[int, float],
    d_min: int | None = None,
    d_max: int | None = None,
) -> Array:
    """Weighted integrated squared-derivative cost matrix of one segment.

    For coefficients c, the quadratic form trace(c^T Q c) equals
    sum_r weights[r] * integral over [0, duration] of |p^(r)(t)|^2 dt.

    Args:
        duration: segment duration, > 0.
        order: polynomial order (odd).
        weights: map derivative order -> nonnegative weight.
        d_min: lowest penalized order; defaults to min(weights).
        d_max: highest penalized order; defaults to max(weights).

    Returns:
        Symmetric positive-semidefinite (order+1) x (order+1) matrix.
    """
    _check_order(order)
    if duration <= 0:
        raise ValueError(f"segment duration must be positive, got {duration}")
    if not weights:
        raise ValueError("weights must penalize at least one derivative order")
    d_min = min(weights) if d_min is None else d_min
    d_max = max(weights) if d_max is None else d_max
    if not 0 <= d_min <= d_max <= order:
        raise ValueError(
            f"penalized derivative orders must satisfy "
            f"0 <= {d_min} <= {d_max} <= {order}"
        )
    if any(not d_min <= r <= d_max for r in weights):
        raise ValueError("every weighted order must lie in [d_min, d_max]")
    out = np.zeros((order + 1, order + 1))
    for r, w in sorted(weights.items()):
        if w == 0.0:
            continue
        coef, expo = _cost_structure(order, r)
        out += w * coef * duration**expo
    return out


@dataclass(frozen=True, eq=False)
class DerivStack:
    """Value and derivatives of the trajectory at one waypoint.

    Row r holds the r-th derivative of position, for r = 0..(order-1)/2;
    columns are the x/y/z axes.
    """

    values: Array

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 3:
            raise ValueError(f"derivative stack must be (rows, 3), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("derivative stack entries must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        """Polynomial order this stack pairs with: 2*rows - 1."""
        return 2 * self.values.shape[0] - 1


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """Boundary conditions at the start and end of one segment."""

    start: DerivStack
    end: DerivStack

    def __post_init__(self):
        if self.start.values.shape != self.end.values.shape:
            raise ValueError("start and end stacks must have the same shape")

    @property
    def order(self) -> int:
        return self.start.order

    def stacked(self) -> Array:
        """Start stack over end stack as one (order+1) x 3 matrix."""
        return np.vstack([self.start.values, self.end.values])


@dataclass(frozen=True, eq=False)
class PolySegment:
    """One polynomial segment: coefficient matrix plus duration."""

    coeffs: Array
    duration: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != 3:
            raise ValueError(f"coefficients must be (order+1, 3), got {coeffs.shape}")
        if coeffs.shape[0] % 2 != 0:
            raise ValueError("coefficient rows must be even (odd polynomial order)")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "duration", float(self.duration))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1


def coeffs_from_boundary(bp: BoundaryPair, duration: float) -> PolySegment:
    """Segment whose boundary conditions equal ``bp`` over ``duration``.

    Solves the square boundary-mapping system with a pivoted LU
    factorization; one refinement pass keeps the round trip near machine
    precision even for long durations.
    """
    mapping = mapping_matrix(duration, bp.order)
    rhs = bp.stacked()
    lu = scipy.linalg.lu_factor(mapping)
    coeffs = scipy.linalg.lu_solve(lu, rhs)
    coeffs += scipy.linalg.lu_solve(lu, rhs - mapping @ coeffs)
    return PolySegment(coeffs, duration)


def boundary_of(seg: PolySegment) -> BoundaryPair:
    """Boundary conditions of a segment (inverse of coeffs_from_boundary)."""
    half = (seg.order + 1) // 2
    start = np.vstack([basis(0.0, seg.order, r) @ seg.coeffs for r in range(half)])
    end = np.vstack(
        [basis(seg.duration, seg.order, r) @ seg.coeffs for r in range(half)]
    )
    return BoundaryPair(DerivStack(start), DerivStack(end))


def eval_segment(seg: PolySegment, t: float, deriv: int = 0) -> Array:
    """Evaluate a segment derivative at local time t in [0, duration]."""
    if not 0.0 <= t <= seg.duration:
        raise ValueError(
            f"evaluation time {t} outside segment duration [0, {seg.duration}]"
        )
    return seg.coeffs.T @ basis(t, seg.order, deriv)
