"""Implicit Lax-Oleinik operators.

For a cost ``c(z, x, u, v)`` that is ``kappa_v``-Lipschitz in ``v`` with
``kappa_v < 1``, the operator ``T`` maps ``phi`` to the unique ``f`` with::

    f(x) = min_z c(z, x, phi(z), f(x))

Each target ``x`` is an independent scalar fixed point, solved by contraction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "TOL_INNER",
    "ConvergenceError",
    "GeneralCost",
    "apply_implicit",
    "sample_hypotheses",
]

TOL_INNER = 1e-12


class ConvergenceError(ArithmeticError):
    """Iteration cap reached; ``residual`` holds the last measured defect."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class GeneralCost:
    """Cost ``c(z, x, u, v)`` evaluated on the whole pair grid.

    ``evaluator(U, V)`` receives ``(n, n)`` arrays of slot values, entry
    ``[z, x]`` belonging to the pair ``(z, x)``, and returns the ``(n, n)``
    cost table.  It must be pure.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kappa_u: float
    kappa_v: float

    def __post_init__(self):
        if not 0 <= self.kappa_v < 1:
            raise ValueError(f"kappa_v must lie in [0, 1), got {self.kappa_v}")
        if self.kappa_u < 0:
            raise ValueError("kappa_u must be nonnegative")

    def table(self, U, V):
        return self.evaluator(U, V)


def apply_implicit(cost: GeneralCost, phi, tol=TOL_INNER, max_iter=10**6, log=None):
    """Evaluate ``T phi`` by per-state contraction from ``f = 0``.

    Parameters
    ----------
    cost : GeneralCost
    phi : array_like, shape (n,)
    tol : float
        Target bound on ``|f(x) - min_z c(z, x, phi(z), f(x))|``.
    max_iter : int
    log : list, optional
        If given, every iterate is appended to it.

    Returns
    -------
    ndarray, shape (n,)
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[0]
    U = np.broadcast_to(phi[:, None], (n, n))
    q = cost.kappa_v
    f = np.zeros(n)
    if log is not None:
        log.append(f.copy())
    active = np.ones(n, dtype=bool)
    stop = tol * (1.0 - q)
    for _ in range(max_iter):
        new = np.min(cost.table(U, np.broadcast_to(f[None, :], (n, n))), axis=0)
        step = np.abs(new - f)
        f = np.where(active, new, f)
        if log is not None:
            log.append(f.copy())
        active &= step > stop
        if not active.any():
            return f
        if q == 0.0:
            # v-independent cost: one pass is exact
            return f
    residual = float(np.max(np.abs(
        np.min(cost.table(U, np.broadcast_to(f[None, :], (n, n))), axis=0) - f)))
    raise ConvergenceError(
        f"implicit operator did not converge in {max_iter} iterations", residual)


def sample_hypotheses(cost: GeneralCost, n, lo=-10.0, hi=10.0, points=17, emit=True):
    """Sample the Lipschitz and monotonicity hypotheses on a ``(u, v)`` grid.

    Returns a list of violation messages; with ``emit`` each one is also
    raised as a warning.
    """
    grid = np.linspace(lo, hi, points)
    tables = np.array([[cost.table(np.full((n, n), u), np.full((n, n), v))
                        for v in grid] for u in grid])
    du = np.diff(tables, axis=0)
    dv = np.diff(tables, axis=1)
    h = grid[1] - grid[0]
    slack = 1e-12 * max(1.0, float(np.abs(tables).max()))
    problems = []
    if np.any(np.abs(du) > cost.kappa_u * h + slack):
        problems.append(f"cost is not {cost.kappa_u}-Lipschitz in u on the sample grid")
    if np.any(np.abs(dv) > cost.kappa_v * h + slack):
        problems.append(f"cost is not {cost.kappa_v}-Lipschitz in v on the sample grid")
    if np.any(du < -slack):
        problems.append("cost is not non-decreasing in u on the sample grid")
    if np.any(dv > slack):
        problems.append("cost is not non-increasing in v on the sample grid")
    if emit:
        for msg in problems:
            warnings.warn(msg, stacklevel=2)
    return problems
