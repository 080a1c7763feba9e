"""Whole-trajectory objective: legality checks, partitioning, cost and gradients.

The decision variables are the waypoint boundary conditions that the problem
leaves free plus the per-segment durations.  For fixed durations the cost is
a positive-semidefinite quadratic form in the stacked boundary conditions;
this module assembles its fixed/free blocks and the associated gradient and
spectral quantities the solver and its diagnostics need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import NoFreeVariablesError
from .poly import cost_matrix, mapping_matrix

Array = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Complete description of one trajectory problem.

    Attributes:
        order: polynomial order of every segment (odd, <= 11 supported).
        waypoints: (M+1, (order+1)/2, 3) array; waypoints[i, r] is the r-th
            derivative template at waypoint i.  Fixed entries are prescribed
            boundary conditions; free entries are placeholders.
        fixed: (M+1, (order+1)/2) boolean mask, True where the corresponding
            waypoint derivative row is prescribed.
        weights: map derivative order -> nonnegative penalty weight.
        rho: weight on total duration, > 0.
    """

    order: int
    waypoints: Array
    fixed: NDArray[np.bool_]
    weights: dict[int, float]
    rho: float

    def __post_init__(self):
        if self.order < 1 or self.order % 2 == 0:
            raise ValueError(f"polynomial order must be odd and >= 1, got {self.order}")
        half = (self.order + 1) // 2
        waypoints = np.asarray(self.waypoints, dtype=float)
        if waypoints.ndim != 3 or waypoints.shape[1:] != (half, 3):
            raise ValueError(
                f"waypoints must be (M+1, {half}, 3) for order {self.order}, "
                f"got {waypoints.shape}"
            )
        if waypoints.shape[0] < 2:
            raise ValueError("need at least two waypoints (one segment)")
        if not np.all(np.isfinite(waypoints)):
            raise ValueError("waypoint entries must be finite")
        fixed = np.asarray(self.fixed, dtype=bool)
        if fixed.shape != waypoints.shape[:2]:
            raise ValueError(
                f"fixed mask shape {fixed.shape} does not match waypoints "
                f"{waypoints.shape[:2]}"
            )
        weights = {int(r): float(w) for r, w in self.weights.items()}
        if not weights:
            raise ValueError("weights must contain at least one derivative order")
        if not np.isfinite(self.rho):
            raise ValueError("rho must be finite")
        waypoints = waypoints.copy()
        waypoints.setflags(write=False)
        fixed = fixed.copy()
        fixed.setflags(write=False)
        object.__setattr__(self, "waypoints", waypoints)
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def num_segments(self) -> int:
        return self.waypoints.shape[0] - 1

    @property
    def stack_size(self) -> int:
        """Rows per waypoint derivative stack: derivatives 0..(order-1)/2."""
        return (self.order + 1) // 2

    @property
    def d_min(self) -> int:
        return min(self.weights)

    @property
    def d_max(self) -> int:
        return max(self.weights)


def validate_spec(spec: ProblemSpec) -> list[str]:
    """Check the legality conditions of a problem; empty list means valid.

    Rejects configurations whose optimum escapes to unbounded decision values
    or to a zero-length segment: nonpositive duration weight, negative or
    all-zero derivative weights, out-of-range penalized orders, free waypoint
    positions, and consecutive fully-fixed identical waypoints.
    """
    violations = []
    if spec.rho <= 0:
        violations.append(
            "nonpositive time weight: rho <= 0 lets the cost decrease without "
            "bound as durations grow"
        )
    if any(w < 0 for w in spec.weights.values()):
        violations.append(
            "negative derivative weight: the quadratic cost must be nonnegative"
        )
    if all(w == 0 for w in spec.weights.values()):
        violations.append(
            "all-zero derivative weights: nothing penalizes the trajectory shape, "
            "so free boundary values are unbounded"
        )
    if spec.d_min < 0 or spec.d_max > spec.order:
        violations.append(
            f"penalized derivative orders must lie in [0, {spec.order}], "
            f"got [{spec.d_min}, {spec.d_max}]"
        )
    if not spec.fixed[:, 0].all():
        loose = np.flatnonzero(~spec.fixed[:, 0])
        violations.append(
            f"waypoint positions must be fixed (free position rows at waypoint(s) "
            f"{loose.tolist()}): the trajectory would be unanchored"
        )
    for m in range(spec.num_segments):
        if (
            spec.fixed[m].all()
            and spec.fixed[m + 1].all()
            and np.array_equal(spec.waypoints[m], spec.waypoints[m + 1])
        ):
            violations.append(
                f"waypoints {m} and {m + 1} are fully fixed and identical: the "
                f"optimal duration of the segment between them collapses to zero"
            )
    return violations


def spec_notices(spec: ProblemSpec) -> list[str]:
    """Non-fatal advisories about a problem (empty list = nothing to note)."""
    notices = []
    limit = (spec.order - 1) // 2
    if spec.d_max > limit:
        notices.append(
            f"penalizing derivative order {spec.d_max} above the guaranteed "
            f"continuity order {limit} for order-{spec.order} segments: "
            f"penalized derivatives may jump at interior waypoints"
        )
    if spec.order > 11:
        notices.append(
            f"order {spec.order} exceeds the supported range (<= 11); the "
            f"monomial basis conditions poorly at high orders"
        )
    return notices


@dataclass(frozen=True, eq=False)
class Partition:
    """Index maps between waypoint rows and the (fixed; free) stacking.

    Global row i*stack_size + r addresses derivative order r of waypoint i.
    ``segment_rows[m]`` lists the 2*stack_size global rows forming segment
    m's boundary conditions (interior waypoints appear in two segments), and
    ``stacked_pos[g]`` is row g's position in the stacked (fixed; free)
    variable, with fixed rows first.
    """

    fixed_rows: NDArray[np.intp]
    free_rows: NDArray[np.intp]
    stacked_pos: NDArray[np.intp]
    segment_rows: NDArray[np.intp]

    @property
    def n_fixed(self) -> int:
        return self.fixed_rows.size

    @property
    def n_free(self) -> int:
        return self.free_rows.size

    def gather(self, d_all: Array) -> tuple[Array, Array]:
        """Split the full (rows, 3) boundary matrix into (fixed, free) parts."""
        return d_all[self.fixed_rows], d_all[self.free_rows]

    def scatter(self, d_fixed: Array, d_free: Array) -> Array:
        """Rebuild the full boundary matrix from its fixed and free parts."""
        out = np.empty((self.stacked_pos.size, 3))
        out[self.fixed_rows] = d_fixed
        out[self.free_rows] = d_free
        return out


def build_partition(spec: ProblemSpec) -> Partition:
    """Index maps for the fixed/free split of one problem."""
    mask = spec.fixed.ravel()
    fixed_rows = np.flatnonzero(mask)
    free_rows = np.flatnonzero(~mask)
    stacked_pos = np.empty(mask.size, dtype=np.intp)
    stacked_pos[fixed_rows] = np.arange(fixed_rows.size)
    stacked_pos[free_rows] = fixed_rows.size + np.arange(free_rows.size)
    half = spec.stack_size
    starts = np.arange(spec.num_segments) * half
    segment_rows = starts[:, None] + np.arange(2 * half)[None, :]
    for arr in (fixed_rows, free_rows, stacked_pos, segment_rows):
        arr.setflags(write=False)
    return Partition(fixed_rows, free_rows, stacked_pos, segment_rows)


def fixed_values(spec: ProblemSpec, partition: Partition | None = None) -> Array:
    """Prescribed boundary rows of a problem, in partition order."""
    part = build_partition(spec) if partition is None else partition
    return spec.waypoints.reshape(-1, 3)[part.fixed_rows]


@dataclass(frozen=True, eq=False)
class ObjectiveBlocks:
    """Fixed/free blocks of the quadratic-form matrix at one time allocation.

    The full matrix is symmetric positive semidefinite; ``pf`` equals
    ``fp.T`` up to assembly rounding.
    """

    ff: Array
    fp: Array
    pf: Array
    pp: Array


def _segment_hessian(spec: ProblemSpec, duration: float) -> Array:
    """Quadratic-form matrix of one segment in boundary-condition variables."""
    mapping = mapping_matrix(duration, spec.order)
    quad = cost_matrix(duration, spec.order, spec.weights)
    inv = np.linalg.inv(mapping)
    h = inv.T @ quad @ inv
    return 0.5 * (h + h.T)


def assemble_blocks(
    spec: ProblemSpec,
    times: Array,
    partition: Partition | None = None,
) -> ObjectiveBlocks:
    """Assemble the quadratic-form blocks for a time allocation.

    Scatters each segment's boundary-condition quadratic form into the
    stacked (fixed; free) ordering and slices the four partition blocks.
    """
    times = np.asarray(times, dtype=float)
    part = build_partition(spec) if partition is None else partition
    if times.shape != (spec.num_segments,):
        raise ValueError(
            f"expected {spec.num_segments} durations, got shape {times.shape}"
        )
    if np.any(times <= 0) or not np.all(np.isfinite(times)):
        raise ValueError("segment durations must be positive and finite")
    size = part.stacked_pos.size
    full = np.zeros((size, size))
    for m in range(spec.num_segments):
        idx = part.stacked_pos[part.segment_rows[m]]
        full[np.ix_(idx, idx)] += _segment_hessian(spec, times[m])
    full = 0.5 * (full + full.T)
    nf = part.n_fixed
    return ObjectiveBlocks(
        ff=full[:nf, :nf], fp=full[:nf, nf:], pf=full[nf:, :nf], pp=full[nf:, nf:]
    )


def _check_free_shape(d_free: Array, part: Partition) -> Array:
    d_free = np.asarray(d_free, dtype=float)
    if d_free.shape != (part.n_free, 3):
        raise ValueError(
            f"free boundary matrix must be ({part.n_free}, 3), got {d_free.shape}"
        )
    return d_free


def total_cost(
    spec: ProblemSpec,
    d_free: Array,
    times: Array,
    blocks: ObjectiveBlocks | None = None,
    partition: Partition | None = None,
) -> float:
    """Full objective: rho * total duration + quadratic smoothness cost."""
    part = build_partition(spec) if partition is None else partition
    d_free = _check_free_shape(d_free, part)
    if blocks is None:
        blocks = assemble_blocks(spec, times, part)
    df = fixed_values(spec, part)
    quad = (
        np.sum(df * (blocks.ff @ df))
        + 2.0 * np.sum(df * (blocks.fp @ d_free))
        + np.sum(d_free * (blocks.pp @ d_free))
    )
    return float(spec.rho * np.sum(times) + quad)


def spatial_gradient(
    spec: ProblemSpec,
    d_free: Array,
    times: Array,
    blocks: ObjectiveBlocks | None = None,
    partition: Partition | None = None,
) -> Array:
    """Gradient of the objective with respect to the free boundary rows."""
    part = build_partition(spec) if partition is None else partition
    d_free = _check_free_shape(d_free, part)
    if blocks is None:
        blocks = assemble_blocks(spec, times, part)
    df = fixed_values(spec, part)
    return 2.0 * (blocks.pf @ df + blocks.pp @ d_free)


def sigma_free(
    spec: ProblemSpec,
    times: Array,
    blocks: ObjectiveBlocks | None = None,
    partition: Partition | None = None,
) -> float:
    """Spectral norm of the free-free block at one time allocation.

    Bounds the Lipschitz constant of the spatial gradient; the solver's
    sufficient-decrease diagnostics divide by it.
    """
    part = build_partition(spec) if partition is None else partition
    if part.n_free == 0:
        raise NoFreeVariablesError(
            "no free boundary derivatives: the free-block norm is undefined"
        )
    if blocks is None:
        blocks = assemble_blocks(spec, times, part)
    return float(np.linalg.eigvalsh(blocks.pp)[-1])
