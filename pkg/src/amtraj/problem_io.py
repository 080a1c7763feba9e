"""Problem-file ingestion, trajectory export, and report emission.

The problem format is strict JSON with an explicit version tag: unknown
fields are rejected, every waypoint entry pairs a derivative order with its
value and a fixed flag, and the optional solver block carries iteration and
tolerance overrides.  Exports are CSV with shortest round-trip float
formatting, so identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .driver import SolveResult, Termination, rate_report
from .errors import ProblemFileError, ValidationError
from .objective import ProblemSpec, build_partition, validate_spec
from .poly import eval_segment

Array = NDArray[np.float64]

FORMAT_VERSION = 1

_TOP_KEYS = {"version", "order", "rho", "weights", "waypoints", "solver"}
_WAYPOINT_KEYS = {"derivatives"}
_ENTRY_KEYS = {"order", "value", "fixed"}
_SOLVER_KEYS = {"max_iterations", "tolerance", "initial_guess"}


@dataclass(frozen=True)
class SolverConfig:
    """Solver overrides carried by a problem file."""

    max_iterations: int = 64
    tolerance: float | None = None
    initial_guess: Array | None = None  # None means the default guess


def _fmt(x: float) -> str:
    """Shortest float spelling that round-trips; deterministic across runs."""
    return repr(float(x))


class _Errors:
    def __init__(self):
        self.messages: list[str] = []

    def add(self, path: str, message: str):
        self.messages.append(f"{path}: {message}")

    def raise_if_any(self):
        if self.messages:
            raise ProblemFileError(self.messages)


def _expect_keys(obj: dict, allowed: set, path: str, errs: _Errors):
    for key in obj:
        if key not in allowed:
            errs.add(f"{path}.{key}" if path else key, "unknown field")


def _as_vector3(value, path: str, errs: _Errors):
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        errs.add(path, "must be a list of three numbers")
        return None
    return [float(v) for v in value]


def parse_problem(text: str) -> tuple[ProblemSpec, SolverConfig]:
    """Build a validated problem from problem-file text.

    Raises:
        ProblemFileError: malformed JSON or structural field errors, with
            one message per offending location.
        ValidationError: the parsed problem violates the legality conditions.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProblemFileError(
            [f"line {err.lineno}, column {err.colno}: {err.msg}"]
        ) from None
    errs = _Errors()
    if not isinstance(data, dict):
        raise ProblemFileError(["top level: must be a JSON object"])
    _expect_keys(data, _TOP_KEYS, "", errs)
    version = data.get("version")
    if version != FORMAT_VERSION:
        errs.add("version", f"must be {FORMAT_VERSION}, got {version!r}")
    order = data.get("order")
    if not isinstance(order, int) or isinstance(order, bool):
        errs.add("order", "must be an integer")
        errs.raise_if_any()
    if order < 1 or order % 2 == 0:
        errs.add("order", f"must be odd and >= 1, got {order}")
        errs.raise_if_any()
    half = (order + 1) // 2

    rho = data.get("rho")
    if not isinstance(rho, (int, float)) or isinstance(rho, bool):
        errs.add("rho", "must be a number")
        rho = 1.0

    weights = {}
    raw_weights = data.get("weights")
    if not isinstance(raw_weights, dict) or not raw_weights:
        errs.add("weights", "must be a non-empty object of order -> weight")
    else:
        for key, value in raw_weights.items():
            try:
                r = int(key)
            except ValueError:
                errs.add(f"weights.{key}", "order key must be an integer")
                continue
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                errs.add(f"weights.{key}", "weight must be a number")
                continue
            weights[r] = float(value)

    raw_waypoints = data.get("waypoints")
    stacks = []
    mask = []
    if not isinstance(raw_waypoints, list) or len(raw_waypoints) < 2:
        errs.add("waypoints", "must be a list of at least two waypoints")
    else:
        for i, wp in enumerate(raw_waypoints):
            path = f"waypoints[{i}]"
            stack = np.zeros((half, 3))
            row_fixed = np.zeros(half, dtype=bool)
            if not isinstance(wp, dict):
                errs.add(path, "must be an object")
                stacks.append(stack)
                mask.append(row_fixed)
                continue
            _expect_keys(wp, _WAYPOINT_KEYS, path, errs)
            entries = wp.get("derivatives")
            if not isinstance(entries, list):
                errs.add(f"{path}.derivatives", "must be a list of entries")
                entries = []
            seen = set()
            for j, entry in enumerate(entries):
                epath = f"{path}.derivatives[{j}]"
                if not isinstance(entry, dict):
                    errs.add(epath, "must be an object")
                    continue
                _expect_keys(entry, _ENTRY_KEYS, epath, errs)
                r = entry.get("order")
                if not isinstance(r, int) or isinstance(r, bool) or not 0 <= r < half:
                    errs.add(
                        f"{epath}.order",
                        f"must be an integer in [0, {half - 1}] for order {order}",
                    )
                    continue
                if r in seen:
                    errs.add(f"{epath}.order", f"duplicate derivative order {r}")
                    continue
                seen.add(r)
                vec = _as_vector3(entry.get("value"), f"{epath}.value", errs)
                flag = entry.get("fixed")
                if not isinstance(flag, bool):
                    errs.add(f"{epath}.fixed", "must be true or false")
                    flag = False
                if vec is not None:
                    stack[r] = vec
                row_fixed[r] = flag
            stacks.append(stack)
            mask.append(row_fixed)

    config = SolverConfig()
    raw_solver = data.get("solver")
    if raw_solver is not None:
        if not isinstance(raw_solver, dict):
            errs.add("solver", "must be an object")
        else:
            _expect_keys(raw_solver, _SOLVER_KEYS, "solver", errs)
            max_iterations = raw_solver.get("max_iterations", 64)
            if (
                not isinstance(max_iterations, int)
                or isinstance(max_iterations, bool)
                or max_iterations < 1
            ):
                errs.add("solver.max_iterations", "must be a positive integer")
                max_iterations = 64
            tolerance = raw_solver.get("tolerance")
            if tolerance is not None and (
                not isinstance(tolerance, (int, float))
                or isinstance(tolerance, bool)
                or tolerance <= 0
            ):
                errs.add("solver.tolerance", "must be a positive number or null")
                tolerance = None
            guess = raw_solver.get("initial_guess", "default")
            guess_array = None
            if guess != "default":
                if not isinstance(guess, list):
                    errs.add(
                        "solver.initial_guess", 'must be "default" or a list of rows'
                    )
                else:
                    rows = []
                    for j, row in enumerate(guess):
                        vec = _as_vector3(row, f"solver.initial_guess[{j}]", errs)
                        rows.append(vec if vec is not None else [0.0, 0.0, 0.0])
                    guess_array = np.array(rows, dtype=float).reshape(-1, 3)
            config = SolverConfig(
                max_iterations=max_iterations,
                tolerance=None if tolerance is None else float(tolerance),
                initial_guess=guess_array,
            )
    errs.raise_if_any()

    try:
        spec = ProblemSpec(order, np.array(stacks), np.array(mask), weights, float(rho))
    except ValueError as err:
        raise ProblemFileError([str(err)]) from None
    violations = validate_spec(spec)
    if violations:
        raise ValidationError(violations)
    if config.initial_guess is not None:
        n_free = build_partition(spec).n_free
        if config.initial_guess.shape != (n_free, 3):
            raise ProblemFileError(
                [
                    f"solver.initial_guess: expected {n_free} rows of three numbers "
                    f"for this problem, got shape {config.initial_guess.shape}"
                ]
            )
    return spec, config


def load_problem(path) -> tuple[ProblemSpec, SolverConfig]:
    """Read and validate a problem file from disk."""
    with open(path, encoding="utf-8") as handle:
        return parse_problem(handle.read())


def dump_problem(spec: ProblemSpec, config: SolverConfig | None = None) -> str:
    """Canonical problem-file text for a spec (stable under round trips)."""
    config = config or SolverConfig()
    waypoints = []
    for i in range(spec.waypoints.shape[0]):
        entries = [
            {
                "order": r,
                "value": [float(v) for v in spec.waypoints[i, r]],
                "fixed": bool(spec.fixed[i, r]),
            }
            for r in range(spec.stack_size)
        ]
        waypoints.append({"derivatives": entries})
    solver: dict = {
        "max_iterations": config.max_iterations,
        "tolerance": config.tolerance,
        "initial_guess": "default"
        if config.initial_guess is None
        else [[float(v) for v in row] for row in config.initial_guess],
    }
    doc = {
        "version": FORMAT_VERSION,
        "order": spec.order,
        "rho": spec.rho,
        "weights": {str(r): spec.weights[r] for r in sorted(spec.weights)},
        "waypoints": waypoints,
        "solver": solver,
    }
    return json.dumps(doc, indent=2) + "\n"


def export_trajectory(
    result: SolveResult, dt: float, max_order: int = 2
) -> tuple[list[str], Array]:
    """Sample a solved trajectory on a uniform global time grid.

    Args:
        result: solver output with at least one segment.
        dt: sampling period, > 0.
        max_order: highest derivative to include (0 = position only).

    Returns:
        (column names, samples): samples[k] is (t, x, y, z, x_d1, ...) with
        one xyz triple per derivative order.  The grid covers [0, total
        duration]; the final sample lands within one dt of the total.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    order = result.segments[0].order
    if not 0 <= max_order <= order:
        raise ValueError(
            f"max_order must be in [0, {order}] for order-{order} segments"
        )
    knots = np.concatenate([[0.0], np.cumsum(result.times)])
    total = float(knots[-1])
    count = int(math.floor(total / dt + 1e-9))
    ts = np.arange(count + 1) * dt
    columns = ["t"]
    for r in range(max_order + 1):
        suffix = "" if r == 0 else f"_d{r}"
        columns += [f"x{suffix}", f"y{suffix}", f"z{suffix}"]
    rows = np.empty((ts.size, len(columns)))
    for k, t in enumerate(ts):
        m = min(
            int(np.searchsorted(knots[1:], t, side="right")),
            len(result.segments) - 1,
        )
        seg = result.segments[m]
        local = min(t - knots[m], seg.duration)
        rows[k, 0] = t
        for r in range(max_order + 1):
            rows[k, 1 + 3 * r : 4 + 3 * r] = eval_segment(seg, local, r)
    return columns, rows


def samples_to_csv(columns: list[str], rows: Array) -> str:
    """CSV text for exported samples, with round-trip float formatting."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Report:
    """Human-readable text plus the machine-readable iteration table."""

    text: str
    columns: tuple[str, ...]
    table: tuple[tuple, ...]

    def table_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.table:
            lines.append(
                ",".join(str(v) if isinstance(v, int) else _fmt(v) for v in row)
            )
        return "\n".join(lines) + "\n"


def emit_report(result: SolveResult) -> Report:
    """Summarize a solver run: outcome, iteration table, diagnostic verdicts."""
    columns = ("iteration", "cost", "grad_norm", "sigma_free", "decrease_residual")
    table = tuple(
        (r.iteration, r.cost, r.grad_norm, r.sigma_free, r.decrease_residual)
        for r in result.records
    )
    lines = [
        f"termination: {result.termination.value}",
        f"records: {len(result.records)}",
        f"final cost: {_fmt(result.cost)}",
        f"total duration: {_fmt(float(np.sum(result.times)))}",
        "segment durations: " + ", ".join(_fmt(t) for t in result.times),
    ]
    if result.termination is Termination.DEGENERATE:
        lines.append(f"degenerate segment index: {result.degenerate_segment}")
    lines.append("")
    lines.append("    iter            cost       grad_norm      sigma_free        decrease")
    for r in result.records:
        lines.append(
            f"    {r.iteration:4d}  {r.cost:14.8g}  {r.grad_norm:14.8g}"
            f"  {r.sigma_free:14.8g}  {r.decrease_residual:14.8g}"
        )
    lines.append("")
    if len(result.records) >= 2:
        summary = rate_report(result.records)
        verdict = lambda bad: "FAIL" if bad else "PASS"  # noqa: E731
        lines += [
            "diagnostics:",
            f"  monotone cost decrease: {verdict(summary.monotonicity_failures)}"
            + (
                f" (iterations {list(summary.monotonicity_failures)})"
                if summary.monotonicity_failures
                else ""
            ),
            f"  per-iteration sufficient decrease: {verdict(summary.decrease_failures)}"
            + (
                f" (iterations {list(summary.decrease_failures)})"
                if summary.decrease_failures
                else ""
            ),
            f"  prefix rate bound (measured constant {_fmt(summary.rate_constant)}): "
            + verdict(summary.prefix_failures)
            + (
                f" (prefixes {list(summary.prefix_failures)})"
                if summary.prefix_failures
                else ""
            ),
            f"  local-rate envelope (heuristic): {verdict(not summary.envelope_ok)}",
        ]
    else:
        lines.append("diagnostics: not enough iterations recorded")
    return Report(text="\n".join(lines) + "\n", columns=columns, table=table)
