"""Per-segment duration optimization for fixed boundary conditions.

Once every boundary condition is pinned, segments decouple and each duration
can be optimized on its own.  A segment's cost is rho * T plus a rational
function of T: a polynomial numerator of known degree over a fixed power of
T.  The numerator is recovered by exact interpolation, the stationarity
condition becomes a polynomial equation, and the best positive root wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ConditioningError, DegenerateSegmentError
from .objective import Partition, ProblemSpec, build_partition, fixed_values
from .poly import BoundaryPair, DerivStack, cost_matrix, mapping_matrix
from .roots import positive_real_roots

Array = NDArray[np.float64]

_HELDOUT_FALLBACK = (0.7, 1.0, 1.6)
_FIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RationalCost:
    """Cost of one segment as a function of its duration T.

    cost(T) = rho * T + numer(T) / T**denom_power, where ``numer`` is a
    polynomial in ascending coefficients.
    """

    numer: Array
    denom_power: int
    rho: float

    def __post_init__(self):
        numer = np.asarray(self.numer, dtype=float)
        numer = numer.copy()
        numer.setflags(write=False)
        object.__setattr__(self, "numer", numer)

    @property
    def numer_degree(self) -> int:
        return self.numer.size - 1

    def cost(self, duration):
        """Segment cost at one or many durations."""
        duration = np.asarray(duration, dtype=float)
        value = np.polynomial.polynomial.polyval(duration, self.numer)
        out = self.rho * duration + value / duration**self.denom_power
        return float(out) if out.ndim == 0 else out

    def cost_derivative(self, duration):
        """d(cost)/dT at one or many durations."""
        duration = np.asarray(duration, dtype=float)
        slope = np.arange(self.numer.size) - self.denom_power
        value = np.polynomial.polynomial.polyval(duration, self.numer * slope)
        out = self.rho + value / duration ** (self.denom_power + 1)
        return float(out) if out.ndim == 0 else out


def _quad_cost_and_scale(
    spec: ProblemSpec, stacked: Array, duration: float
) -> tuple[float, float]:
    """Smoothness cost of one segment plus its cancellation magnitude.

    The magnitude (same contraction with all entries absolute) is the scale
    against which the value's floating-point error is relative.
    """
    mapping = mapping_matrix(duration, spec.order)
    coeffs = np.linalg.solve(mapping, stacked)
    quad = cost_matrix(duration, spec.order, spec.weights)
    weighted = np.abs(quad) @ np.abs(coeffs)
    return (
        float(np.sum(coeffs * (quad @ coeffs))),
        float(np.sum(np.abs(coeffs) * weighted)),
    )


def segment_quadratic_cost(spec: ProblemSpec, bp: BoundaryPair, duration: float) -> float:
    """Smoothness cost of one segment, excluding the rho * T term."""
    return _quad_cost_and_scale(spec, bp.stacked(), duration)[0]


def segment_cost(spec: ProblemSpec, bp: BoundaryPair, duration: float) -> float:
    """Full cost of one segment at a given duration (matrix evaluation)."""
    return spec.rho * duration + segment_quadratic_cost(spec, bp, duration)


def _interp_coeffs(x: Array, y: Array) -> Array:
    """Monomial coefficients of the degree len(x)-1 interpolant.

    Newton divided differences expanded by Horner steps; far more accurate
    than solving the Vandermonde system for clustered sample points.
    """
    n = x.size
    dd = y.astype(float).copy()
    for j in range(1, n):
        dd[j:] = (dd[j:] - dd[j - 1 : -1]) / (x[j:] - x[: n - j])
    coeffs = np.zeros(n)
    coeffs[0] = dd[n - 1]
    for k in range(n - 2, -1, -1):
        # multiply the current polynomial by (t - x[k]), then add dd[k]
        head = coeffs[0]
        coeffs[1:] = coeffs[:-1] - x[k] * coeffs[1:]
        coeffs[0] = dd[k] - x[k] * head
    return coeffs


def extract_rational(spec: ProblemSpec, bp: BoundaryPair) -> RationalCost:
    """Recover the rational duration-cost of one segment.

    Multiplying the smoothness cost by T**denom_power yields a polynomial of
    known degree, so sampling it at degree+1 points and interpolating is
    exact.  Three held-out samples guard against precision loss.

    Raises:
        ConditioningError: the interpolant fails to reproduce held-out samples.
    """
    denom_power = 2 * spec.d_max - 1
    degree = 2 * (spec.d_max - spec.d_min) + spec.order - 1
    stacked = bp.stacked()
    samples = np.geomspace(0.5, 2.0, degree + 1)
    g = np.array(
        [
            t**denom_power * _quad_cost_and_scale(spec, stacked, t)[0]
            for t in samples
        ]
    )
    numer = _interp_coeffs(samples, g)
    if samples.size > 1:
        mids = np.sqrt(samples[:-1] * samples[1:])
        held = np.array([mids[0], mids[mids.size // 2], mids[-1]])
    else:
        held = np.array(_HELDOUT_FALLBACK)
    for t in held:
        fitted = float(np.polynomial.polynomial.polyval(t, numer))
        value, magnitude = _quad_cost_and_scale(spec, stacked, t)
        reference = t**denom_power * value
        # error is relative to the evaluation's cancellation magnitude, not
        # to the (possibly smaller) cost value itself
        scale = 1.0 + t**denom_power * magnitude
        if abs(fitted - reference) > _FIT_TOL * scale:
            raise ConditioningError(
                f"duration-cost interpolation residual {abs(fitted - reference):.2e} "
                f"at T={t:.4f} exceeds tolerance; the segment cost is too "
                f"ill-conditioned to trust"
            )
    return RationalCost(numer, denom_power, spec.rho)


def stationarity_polynomial(rc: RationalCost) -> Array:
    """Polynomial whose positive roots are the stationary durations.

    Equals T**(denom_power+1) times d(cost)/dT, so it shares d(cost)/dT's
    positive roots while staying polynomial.
    """
    n = rc.denom_power
    out = np.zeros(max(n + 2, rc.numer.size))
    out[: rc.numer.size] += (np.arange(rc.numer.size) - n) * rc.numer
    out[n + 1] += rc.rho
    last = out.size
    while last > 1 and out[last - 1] == 0.0:
        last -= 1
    return out[:last]


def optimal_duration(rc: RationalCost, root_tol: float = 1e-12) -> float:
    """Duration minimizing a segment's rational cost over (0, infinity).

    Evaluates the cost at every positive stationary duration and keeps the
    cheapest; near-ties go to the shorter duration.

    Raises:
        DegenerateSegmentError: no positive stationary point exists (the
            boundary conditions carry no motion, so shrinking the duration
            always pays).
    """
    candidates = positive_real_roots(stationarity_polynomial(rc), tol=root_tol)
    if candidates.size == 0:
        raise DegenerateSegmentError(
            "degenerate segment: duration cost has no positive stationary "
            "point, the optimum collapses to a zero-length segment"
        )
    best_t = float(candidates[0])
    best_cost = rc.cost(best_t)
    for t in candidates[1:]:
        value = rc.cost(float(t))
        if value < best_cost - 1e-12 * (1.0 + abs(best_cost)):
            best_t, best_cost = float(t), value
    return best_t


def solve_temporal(
    spec: ProblemSpec,
    d_free: Array,
    partition: Partition | None = None,
) -> Array:
    """Optimal duration of every segment for fixed free boundary values.

    Raises:
        DegenerateSegmentError: some segment is degenerate; the exception's
            ``segment`` attribute holds its index.
    """
    part = build_partition(spec) if partition is None else partition
    d_free = np.asarray(d_free, dtype=float).reshape(part.n_free, 3)
    d_all = part.scatter(fixed_values(spec, part), d_free)
    half = spec.stack_size
    times = np.empty(spec.num_segments)
    for m in range(spec.num_segments):
        bp = BoundaryPair(
            DerivStack(d_all[m * half : (m + 1) * half]),
            DerivStack(d_all[(m + 1) * half : (m + 2) * half]),
        )
        try:
            times[m] = optimal_duration(extract_rational(spec, bp))
        except DegenerateSegmentError as err:
            raise DegenerateSegmentError(f"segment {m}: {err}", segment=m) from None
    return times
