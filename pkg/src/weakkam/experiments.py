"""Vanishing-discount sweeps and uniqueness probes."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from .classical import TOL_FP, critical_constant
from .discounted import iterate_fixed_point, sandwich_bounds, solve_discounted
from .implicit import ConvergenceError
from .limit import vanishing_limit
from .model import CostModel, normalize_critical

__all__ = [
    "CONV_TOL",
    "SweepReport",
    "UniquenessReport",
    "default_grid",
    "vanishing_discount_sweep",
    "uniqueness_probe",
    "write_sweep_csv",
    "write_gnuplot_script",
]

CONV_TOL = 1e-6
TAIL = 5
TAIL_CEILING = 1e-3


def default_grid(model: CostModel, start=0.5, ratio=0.5, steps=20):
    """``start * lambda_max * ratio**k`` for ``k = 0..steps-1``."""
    return [start * model.lambda_max * ratio ** k for k in range(steps)]


@dataclass(frozen=True)
class SweepReport:
    lambdas: tuple[float, ...]
    sup_errors: tuple[float, ...]
    residuals: tuple[float, ...]
    iterations: tuple[int, ...]
    converged: bool
    u0: np.ndarray
    c0: float
    u_lambdas: np.ndarray


def _sweep_converged(errors, conv_tol=CONV_TOL):
    if errors[-1] <= conv_tol:
        return True
    tail = errors[-TAIL:]
    return bool(all(b <= a for a, b in zip(tail, tail[1:])) and tail[-1] < TAIL_CEILING)


def _solve_point(model, lam):
    try:
        sol = solve_discounted(model, lam)
    except (ConvergenceError, ArithmeticError) as exc:
        raise type(exc)(f"lambda={lam}: {exc}") from exc
    return sol.u, sol.residual, sol.iterations


def vanishing_discount_sweep(model: CostModel, grid=None, conv_tol=CONV_TOL,
                             workers=None) -> SweepReport:
    """Solve the discounted problem along a decreasing grid and track
    ``max |u_lam - u0|``.

    ``workers`` > 1 distributes grid points over a process pool; results are
    collected in grid order, so the report does not depend on it.
    """
    limit = vanishing_limit(model)
    nm = limit.normalized
    if grid is None:
        grid = default_grid(nm)
    grid = [float(g) for g in grid]
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly decreasing")
    task = partial(_solve_point, nm)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, grid))
    else:
        results = [task(lam) for lam in grid]
    us = np.array([r[0] for r in results])
    errors = tuple(float(np.max(np.abs(u - limit.u0))) for u in us)
    return SweepReport(
        lambdas=tuple(grid),
        sup_errors=errors,
        residuals=tuple(float(r[1]) for r in results),
        iterations=tuple(int(r[2]) for r in results),
        converged=_sweep_converged(errors, conv_tol),
        u0=limit.u0,
        c0=limit.c0,
        u_lambdas=us,
    )


@dataclass(frozen=True)
class UniquenessReport:
    lam: float
    starts: tuple[str, ...]
    fixed_points: tuple[np.ndarray, ...]
    residuals: tuple[float, ...]
    max_pairwise_gap: float
    unique: bool
    failures: tuple[str, ...] = ()


def uniqueness_probe(model: CostModel, lam: float, extra_starts=(), tol=TOL_FP):
    """Look for distinct fixed points of ``T_lam`` from several starts.

    Starts are the two sandwich bounds, zero, and ``extra_starts`` (given in
    the coordinates of the normalized model).
    """
    c0 = critical_constant(model.l0)
    nm = normalize_critical(model, c0)
    if not 0 < lam < nm.lambda_max:
        raise ValueError(f"lambda={lam} outside (0, {nm.lambda_max})")
    lower, upper = sandwich_bounds(nm)
    starts = [("lower", lower, +1), ("upper", upper, -1), ("zero", np.zeros(nm.n), 0)]
    starts += [(f"extra[{i}]", np.asarray(s, dtype=float), 0)
               for i, s in enumerate(extra_starts)]
    names, points, residuals, failures = [], [], [], []
    for name, start, direction in starts:
        try:
            route = iterate_fixed_point(nm, lam, start, direction, tol)
        except (ConvergenceError, ArithmeticError) as exc:
            failures.append(f"{name}: {exc}")
            continue
        names.append(name)
        points.append(route.u)
        residuals.append(route.residual)
    gap = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            gap = max(gap, float(np.max(np.abs(points[i] - points[j]))))
    return UniquenessReport(
        lam=lam,
        starts=tuple(names),
        fixed_points=tuple(points),
        residuals=tuple(residuals),
        max_pairwise_gap=gap,
        unique=not failures and gap <= 2 * tol,
        failures=tuple(failures),
    )


def write_sweep_csv(report: SweepReport, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "sup_error", "residual", "iterations"])
        for row in zip(report.lambdas, report.sup_errors, report.residuals,
                       report.iterations):
            writer.writerow([f"{row[0]:.17g}", f"{row[1]:.17g}", f"{row[2]:.17g}", row[3]])
    return path


def write_gnuplot_script(csv_path, path) -> Path:
    """A log-log plot of the sweep for gnuplot."""
    path = Path(path)
    path.write_text(
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'lambda'\n"
        "set ylabel 'sup |u_lambda - u_0|'\n"
        f"plot '{Path(csv_path).name}' using 1:($2 > 0 ? $2 : 1/0) "
        "skip 1 with linespoints title 'sup error'\n")
    return path
