"""Problem builders: waypoint-list convenience, randomized and benchmark instances."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .objective import ProblemSpec

Array = NDArray[np.float64]


def waypoint_problem(
    positions,
    order: int = 7,
    weights: dict[int, float] | None = None,
    rho: float = 10.0,
    start_stack: Array | None = None,
    end_stack: Array | None = None,
) -> ProblemSpec:
    """Spec threading the given positions with free interior derivatives.

    Both trajectory ends are fully prescribed (at rest unless explicit stacks
    are given); every interior waypoint fixes only its position.

    Args:
        positions: (M+1, 3) waypoint positions.
        order: segment polynomial order (odd).
        weights: derivative penalties; defaults to 1.0 on order (order+1)/2,
            the classic minimum-snap-style choice for the given order.
        rho: duration weight.
        start_stack / end_stack: optional full ((order+1)/2, 3) boundary
            stacks for the first and last waypoint.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise ValueError(f"positions must be (M+1, 3), got {positions.shape}")
    half = (order + 1) // 2
    count = positions.shape[0]
    stacks = np.zeros((count, half, 3))
    stacks[:, 0, :] = positions
    if start_stack is not None:
        stacks[0] = np.asarray(start_stack, dtype=float)
        stacks[0, 0, :] = positions[0]
    if end_stack is not None:
        stacks[-1] = np.asarray(end_stack, dtype=float)
        stacks[-1, 0, :] = positions[-1]
    fixed = np.zeros((count, half), dtype=bool)
    fixed[:, 0] = True
    fixed[0, :] = True
    fixed[-1, :] = True
    if weights is None:
        weights = {half: 1.0}
    return ProblemSpec(order, stacks, fixed, weights, rho)


def random_problem(
    rng: np.random.Generator,
    order: int | None = None,
    num_segments: int | None = None,
) -> ProblemSpec:
    """Randomized legal instance for diagnostics and stress tests.

    Positions follow a random walk with O(1) steps, ends are at rest,
    interior derivatives are free, and the duration weight spans two orders
    of magnitude, so optimal durations stay in a numerically friendly range.
    """
    if order is None:
        order = int(rng.choice([3, 5, 7]))
    if num_segments is None:
        num_segments = int(rng.integers(2, 6))
    steps = rng.normal(size=(num_segments, 3))
    steps *= (rng.uniform(0.5, 2.0, size=num_segments) / np.linalg.norm(steps, axis=1))[
        :, None
    ]
    positions = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)])
    half = (order + 1) // 2
    weights = {half: 1.0}
    if half > 1 and rng.uniform() < 0.5:
        weights[half - 1] = float(rng.uniform(0.0, 1.0))
    rho = float(10.0 ** rng.uniform(-0.3, 2.0))
    return waypoint_problem(positions, order=order, weights=weights, rho=rho)


def benchmark_problem(num_segments: int = 50, order: int = 7) -> ProblemSpec:
    """Deterministic many-segment instance: a gently climbing helix arc."""
    i = np.arange(num_segments + 1)
    angle = 0.35 * i
    positions = np.column_stack(
        [3.0 * np.cos(angle), 3.0 * np.sin(angle), 0.25 * i]
    )
    half = (order + 1) // 2
    return waypoint_problem(positions, order=order, weights={half: 1.0}, rho=100.0)
