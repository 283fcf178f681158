"""Dense two-phase simplex with Bland's pivoting rule.

Solves ``min c @ x`` subject to ``A @ x = b`` and ``x >= 0``.  Intended for
the small LPs of this package (a few dozen variables); Bland's rule makes the
pivot sequence, and therefore the returned basic solution, deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPError", "InfeasibleLPError", "UnboundedLPError", "LPResult", "solve_lp"]


class LPError(ArithmeticError):
    pass


class InfeasibleLPError(LPError):
    pass


class UnboundedLPError(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    basis: tuple[int, ...]
    pivots: int


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _run(T, basis, ncols, eps, max_pivots):
    """Bland's-rule simplex on tableau ``T`` (objective row last)."""
    m = T.shape[0] - 1
    pivots = 0
    while True:
        reduced = T[-1, :ncols]
        candidates = np.flatnonzero(reduced < -eps)
        if candidates.size == 0:
            return pivots
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > eps)
        if rows.size == 0:
            raise UnboundedLPError(f"objective unbounded along column {col}")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + eps * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, basis, row, col)
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")


def solve_lp(c, A_eq, b_eq, eps=1e-11, max_pivots=100_000) -> LPResult:
    """Minimize ``c @ x`` over ``{x >= 0 : A_eq @ x = b_eq}``.

    Returns an optimal basic feasible solution.  Redundant equality rows are
    detected and dropped after phase one.

    Raises
    ------
    InfeasibleLPError
        If the feasible set is empty.
    UnboundedLPError
        If the objective is unbounded below on the feasible set.

    Examples
    --------
    >>> solve_lp([1.0], [[1.0]], [1.0]).value
    1.0
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A_eq, dtype=float)).copy()
    b = np.asarray(b_eq, dtype=float).reshape(-1).copy()
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase one: artificials n..n+m-1
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    pivots = _run(T, basis, n + m, eps, max_pivots)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > 1e-9 * scale:
        raise InfeasibleLPError(f"phase one residual {-T[-1, -1]:.3g}")

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cols = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
            if cols.size == 0:
                continue
            _pivot(T, basis, r, int(cols[0]))
            pivots += 1
        keep.append(r)
    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = T[keep, :n]
    T2[:-1, -1] = T[keep, -1]
    basis = [basis[r] for r in keep]
    # phase two objective row in terms of the current basis
    T2[-1, :n] = c
    for r, j in enumerate(basis):
        if T2[-1, j] != 0.0:
            T2[-1] -= T2[-1, j] * T2[r]
    pivots += _run(T2, basis, n, eps, max_pivots)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = T2[r, -1]
    x[np.abs(x) < eps] = 0.0
    return LPResult(x, float(c @ x), tuple(basis), pivots)
