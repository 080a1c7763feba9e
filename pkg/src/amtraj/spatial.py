"""Closed-form minimization over the free boundary conditions.

For a fixed time allocation the objective is a convex quadratic in the free
boundary rows, so the minimizer solves one symmetric positive-definite
system in the free-free block.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import NoFreeVariablesError, SingularFreeBlockError
from .objective import (
    ObjectiveBlocks,
    Partition,
    ProblemSpec,
    assemble_blocks,
    build_partition,
    fixed_values,
)

Array = NDArray[np.float64]

_SINGULAR_RCOND = 1e-12


def solve_free_block(blocks: ObjectiveBlocks, d_fixed: Array) -> Array:
    """Minimizing free boundary rows given assembled blocks.

    Cholesky-factorizes the free-free block and refuses to proceed when the
    estimated reciprocal condition number drops below 1e-12: a silent
    minimum-norm answer would mask an ill-posed problem.
    """
    pp = blocks.pp
    rhs = -(blocks.pf @ d_fixed)
    try:
        chol = np.linalg.cholesky(pp)
    except np.linalg.LinAlgError as err:
        raise SingularFreeBlockError(
            f"degenerate free-variable block: {err}"
        ) from None
    anorm = float(np.abs(pp).sum(axis=0).max())
    rcond, info = scipy.linalg.lapack.dpocon(chol, anorm, lower=1)
    if info != 0 or rcond < _SINGULAR_RCOND:
        raise SingularFreeBlockError(
            f"degenerate free-variable block: reciprocal condition estimate "
            f"{rcond:.2e} below {_SINGULAR_RCOND:.0e}"
        )
    solution, _ = scipy.linalg.lapack.dpotrs(chol, rhs, lower=1)
    # one refinement pass; keeps the optimality residual near round-off
    solution += scipy.linalg.lapack.dpotrs(chol, rhs - pp @ solution, lower=1)[0]
    return solution


def solve_spatial(
    spec: ProblemSpec,
    times: Array,
    blocks: ObjectiveBlocks | None = None,
    partition: Partition | None = None,
) -> Array:
    """Optimal free boundary rows for a fixed time allocation.

    Raises:
        NoFreeVariablesError: the problem fixes every boundary derivative.
        SingularFreeBlockError: the free-free block is numerically singular.
    """
    part = build_partition(spec) if partition is None else partition
    if part.n_free == 0:
        raise NoFreeVariablesError(
            "no free boundary derivatives to optimize for this problem"
        )
    if blocks is None:
        blocks = assemble_blocks(spec, times, part)
    return solve_free_block(blocks, fixed_values(spec, part))
