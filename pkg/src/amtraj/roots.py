"""Positive real roots of univariate real polynomials.

Sign-variation (Descartes) subdivision isolates every positive root inside
(0, B] for a root bound B, then a bracketed Newton/bisection pass refines
each isolated interval.  The subdivision works on the polynomial mapped to
the unit interval, so each split only needs a halving rescale and a
binomial-matrix shift; coefficients are renormalized per node to keep deep
recursions inside floating-point range.

Deterministic, dependency-free, and intended for modest degrees (the
duration-optimization polynomials produced elsewhere in this package stay
below degree ~25; degree > 64 is unsupported).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_TRIM_REL = 1e-14
_CLUSTER_WIDTH_REL = 1e-12
_CLUSTER_RESIDUAL_REL = 1e-10
_CLUSTER_MERGE_REL = 1e-3
_SPLIT_FRACTIONS = (0.5, 0.53125, 0.46875)
_MAX_DEGREE = 64


@lru_cache(maxsize=None)
def _pascal(n: int) -> np.ndarray:
    """Upper-triangular binomial matrix P[i, j] = C(j, i)."""
    out = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        for i in range(j + 1):
            out[i, j] = math.comb(j, i)
    out.setflags(write=False)
    return out


def _variations(coeffs: np.ndarray) -> int:
    """Descartes sign variations, ignoring relatively tiny coefficients."""
    peak = np.max(np.abs(coeffs))
    if peak == 0.0:
        return 0
    signs = np.sign(coeffs[np.abs(coeffs) > _TRIM_REL * peak])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _count_unit_interval(q: np.ndarray) -> int:
    """Upper bound (exact at 0 and 1) on the roots of q inside (0, 1)."""
    n = q.size - 1
    return _variations(_pascal(n) @ q[::-1])


def _rescale(q: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(q))
    return q / peak if peak > 0 else q


def _subpoly(q: np.ndarray, frac: float, right: bool) -> np.ndarray:
    """Restriction of q (living on [0, 1]) to one side of the split point."""
    n = q.size - 1
    if not right:
        return _rescale(q * frac ** np.arange(n + 1))
    if frac == 0.5:
        # q(0.5 (1 + x)): halve the variable, then shift by one.
        return _rescale(_pascal(n) @ (q * 0.5 ** np.arange(n + 1)))
    # q(frac + (1 - frac) x): shift by frac, then rescale the variable.
    return _rescale(_shift(q, frac) * (1.0 - frac) ** np.arange(n + 1))


def _shift(q: np.ndarray, a: float) -> np.ndarray:
    """Coefficients of q(x + a) for a in (0, 1)."""
    n = q.size - 1
    powers = a ** np.arange(n + 1)
    return (_pascal(n) * np.outer(1.0 / powers, powers)) @ q


def _horner(coeffs: list, x: float) -> float:
    """Scalar polynomial evaluation; plain floats beat numpy at these sizes."""
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def _abs_value(coeffs: list, x: float) -> float:
    """Sum of |c_i| |x|^i, the natural residual scale at x."""
    acc = 0.0
    x = abs(x)
    for a in reversed(coeffs):
        acc = acc * x + abs(a)
    return acc


def _root_bound(coeffs: np.ndarray) -> float:
    """Upper bound on the modulus of every root (ascending coefficients)."""
    lead = abs(coeffs[-1])
    ratios = np.abs(coeffs[:-1]) / lead
    cauchy = 1.0 + float(ratios.max())
    n = coeffs.size - 1
    # Fujiwara's bound is far tighter when low-order coefficients dominate.
    with np.errstate(divide="ignore"):
        logs = np.log2(ratios[::-1])
    ks = np.arange(1, n + 1)
    fujiwara = 2.0 * float(2.0 ** np.max(logs / ks))
    return min(cauchy, fujiwara)


def _refine(coeffs: list, deriv: list, a: float, b: float, tol: float) -> float:
    """Newton/bisection refinement of a single root inside bracket (a, b)."""
    fa = _horner(coeffs, a)
    fb = _horner(coeffs, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    x = 0.5 * (a + b)
    bracketed = (fa > 0) != (fb > 0)
    for _ in range(200):
        fx = _horner(coeffs, x)
        if fx == 0.0:
            return x
        if bracketed:
            if (fx > 0) == (fa > 0):
                a, fa = x, fx
            else:
                b, fb = x, fx
        dx = _horner(deriv, x)
        step = x - fx / dx if dx != 0.0 else None
        if step is None or not a < step < b:
            step = 0.5 * (a + b)
        if abs(step - x) <= 0.5 * tol * max(abs(step), 1e-300):
            x = step
            break
        x = step
    # Newton polish while the residual improves; pushes it to the noise floor.
    fx = abs(_horner(coeffs, x))
    for _ in range(3):
        dx = _horner(deriv, x)
        if dx == 0.0:
            break
        nxt = x - _horner(coeffs, x) / dx
        fnxt = abs(_horner(coeffs, nxt))
        if fnxt >= fx:
            break
        x, fx = nxt, fnxt
    return x


def positive_real_roots(coeffs, tol: float = 1e-12) -> np.ndarray:
    """All distinct positive real roots of a polynomial, sorted ascending.

    Args:
        coeffs: real coefficients in ascending powers.
        tol: relative accuracy of each returned root.

    Returns:
        Array of positive roots; multiple (or tightly clustered) roots are
        reported once.

    Raises:
        ValueError: zero polynomial, non-finite input, or degree > 64.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be a finite 1-D sequence")
    if tol <= 0:
        raise ValueError("tol must be positive")
    peak = np.max(np.abs(c))
    if peak == 0.0:
        raise ValueError("zero polynomial has no well-defined root set")
    c = c / peak
    c[np.abs(c) < _TRIM_REL] = 0.0
    c = np.trim_zeros(c, "b")
    if c.size == 0:
        raise ValueError("zero polynomial has no well-defined root set")
    lead_zeros = 0
    while lead_zeros < c.size and c[lead_zeros] == 0.0:
        lead_zeros += 1
    c = c[lead_zeros:]  # roots at zero are not positive
    degree = c.size - 1
    if degree < 1:
        return np.empty(0)
    if degree > _MAX_DEGREE:
        raise ValueError(f"degree {degree} exceeds the supported maximum {_MAX_DEGREE}")

    bound = _root_bound(c) * (1.0 + 1e-9)
    with np.errstate(divide="ignore"):
        log_peak = np.max(
            np.log10(np.abs(c[c != 0.0])) + np.flatnonzero(c != 0.0) * math.log10(bound)
        )
    if log_peak > 306.0:
        raise ValueError("root bound overflows double precision for this polynomial")

    c_list = c.tolist()
    deriv = c[1:] * np.arange(1, c.size)
    deriv_list = deriv.tolist()
    deriv2_list = (deriv[1:] * np.arange(1, deriv.size)).tolist()

    total = _variations(c)
    if total == 0:
        return np.empty(0)
    if total == 1:
        # exactly one positive root (one sign variation), so skip subdivision
        return np.array([_refine(c_list, deriv_list, 0.0, bound, tol)])

    initial = _rescale(c * bound ** np.arange(c.size))
    stack = [(0.0, 1.0, initial)]
    # (root, isolated) pairs; isolated means "refined inside a verified
    # sign-change bracket", which certifies a distinct simple root.
    found: list[tuple[float, bool]] = []
    while stack:
        lo, hi, q = stack.pop()
        count = _count_unit_interval(q)
        if count == 0:
            continue
        a, b = bound * lo, bound * hi
        fa = _horner(c_list, a)
        fb = _horner(c_list, b)
        sign_change = (fa > 0) != (fb > 0)
        if count == 1 and sign_change:
            found.append((_refine(c_list, deriv_list, a, b, tol), True))
            continue
        if hi - lo <= _CLUSTER_WIDTH_REL:
            # Unresolvable cluster: a multiple root or a near-axis complex
            # pair.  An even-multiplicity root is a simple root of the
            # derivative, so try that first; otherwise keep the midpoint
            # only if the residual says "root".
            if sign_change:
                found.append((_refine(c_list, deriv_list, a, b, tol), True))
                continue
            da = _horner(deriv_list, a)
            db = _horner(deriv_list, b)
            if (da > 0) != (db > 0):
                at = _refine(deriv_list, deriv2_list, a, b, tol)
                if abs(_horner(c_list, at)) <= _CLUSTER_RESIDUAL_REL * _abs_value(c_list, at):
                    found.append((at, False))
                    continue
            mid = 0.5 * (a + b)
            if abs(_horner(c_list, mid)) <= _CLUSTER_RESIDUAL_REL * _abs_value(c_list, mid):
                found.append((mid, False))
            continue
        frac = None
        for candidate in _SPLIT_FRACTIONS:
            mid = a + candidate * (b - a)
            if abs(_horner(c_list, mid)) > _TRIM_REL * _abs_value(c_list, mid):
                frac = candidate
                break
        if frac is None:
            # Every candidate split lands on a root; record one and split anyway
            # (children never count their own endpoints, dedup handles the rest).
            frac = _SPLIT_FRACTIONS[0]
            found.append((a + frac * (b - a), False))
        cut = lo + frac * (hi - lo)
        stack.append((lo, cut, _subpoly(q, frac, right=False)))
        stack.append((cut, hi, _subpoly(q, frac, right=True)))

    if not found:
        return np.empty(0)
    found.sort()
    merged = [found[0]]
    for root, isolated in found[1:]:
        prev_root, prev_isolated = merged[-1]
        gap = root - prev_root
        hard = max(_CLUSTER_WIDTH_REL * bound, 10.0 * tol * max(1.0, root))
        same = gap <= hard
        if not same and gap <= _CLUSTER_MERGE_REL * max(1.0, root):
            # Reports this close are one root unless the polynomial is
            # certifiably nonzero between them; at a multiplicity-m root,
            # float evaluation scatters reports over ~eps**(1/m).
            mid = 0.5 * (root + prev_root)
            same = abs(_horner(c_list, mid)) <= 1e-11 * _abs_value(c_list, mid)
        if not same:
            merged.append((root, isolated))
        elif isolated and not prev_isolated:
            merged[-1] = (root, isolated)
        elif isolated == prev_isolated and abs(_horner(c_list, root)) < abs(
            _horner(c_list, prev_root)
        ):
            merged[-1] = (root, isolated)
    return np.array([root for root, _ in merged])
