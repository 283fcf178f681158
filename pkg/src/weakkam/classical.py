"""Classical discrete weak KAM theory for a base cost table.

All functions take the base cost ``l0`` as an ``(n, n)`` array with
``l0[z, x]`` the cost of the transition ``z -> x`` (a :class:`CostModel` is
accepted too and its base cost is used).  Potentials are length-``n`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TOL_AUBRY",
    "TOL_FP",
    "minplus_product",
    "minplus_powers",
    "lax_oleinik",
    "lax_oleinik_argmin",
    "critical_constant",
    "BarrierTable",
    "peierls_barrier",
    "peierls_liminf",
    "aubry_set",
    "weak_kam_solution",
    "is_subsolution",
    "comparison_check",
]

TOL_AUBRY = 1e-9
TOL_FP = 1e-9


def _base(base) -> np.ndarray:
    l0 = getattr(base, "l0", base)
    l0 = np.asarray(l0, dtype=float)
    if l0.ndim != 2 or l0.shape[0] != l0.shape[1]:
        raise ValueError(f"base cost must be a square table, got shape {l0.shape}")
    return l0


def minplus_product(P, Q):
    """Min-plus matrix product ``(P * Q)[i, j] = min_k P[i, k] + Q[k, j]``."""
    return np.min(P[:, :, None] + Q[None, :, :], axis=1)


def minplus_powers(L, kmax):
    """Yield ``(k, L^k)`` for ``k = 1..kmax`` in the min-plus semiring."""
    P = L.copy()
    yield 1, P
    for k in range(2, kmax + 1):
        P = minplus_product(P, L)
        yield k, P


def lax_oleinik(base, f):
    """Apply ``T0 f(x) = min_z f(z) + l0(z, x)``.

    Examples
    --------
    >>> lax_oleinik([[0, -1], [2, 1]], [0, 0])
    array([ 0., -1.])
    """
    l0 = _base(base)
    f = np.asarray(f, dtype=float)
    return np.min(f[:, None] + l0, axis=0)


def lax_oleinik_argmin(base, f):
    """Minimizing source state for each target; ties go to the lowest index."""
    l0 = _base(base)
    f = np.asarray(f, dtype=float)
    return np.argmin(f[:, None] + l0, axis=0)


def critical_constant(base, verify=False) -> float:
    """Critical constant ``c0 = -(minimum mean cycle weight)`` via Karp.

    The complete digraph on the states (self-loops included) is strongly
    connected, so a single source suffices.  With ``verify=True`` the value
    is cross-checked against the occupation-measure LP.
    """
    l0 = _base(base)
    n = l0.shape[0]
    # D[k, v]: minimal weight of a k-edge walk from state 0 to v
    D = np.full((n + 1, n), np.inf)
    D[0, 0] = 0.0
    for k in range(1, n + 1):
        D[k] = np.min(D[k - 1][:, None] + l0, axis=0)
    best = np.inf
    for v in range(n):
        if not np.isfinite(D[n, v]):
            continue
        ks = np.arange(n)
        finite = np.isfinite(D[:n, v])
        worst = np.max((D[n, v] - D[:n, v][finite]) / (n - ks[finite]))
        best = min(best, worst)
    c0 = -float(best) + 0.0  # no negative zeros
    if verify:
        from .mather import mather_value_lp

        value, _ = mather_value_lp(l0)
        if abs(value + c0) > 1e-9:
            raise ArithmeticError(
                f"Karp value {c0} disagrees with LP value {-value}")
    return c0


@dataclass(frozen=True)
class BarrierTable:
    """Peierls barrier and Mane potential of a base cost.

    Attributes
    ----------
    l0 : ndarray
        The raw base cost the table was computed from.
    c0 : float
        Critical constant of ``l0``.
    mane : ndarray
        Minimal cost of paths of length at least one under ``l0 + c0``.
    h : ndarray
        Peierls barrier.
    aubry : tuple of int
        States ``x`` with ``mane[x, x] <= TOL_AUBRY``.
    """

    l0: np.ndarray
    c0: float
    mane: np.ndarray
    h: np.ndarray
    aubry: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.h.shape[0]


def peierls_liminf(base, c0=None, start=None):
    """Direct estimate of the barrier as a windowed liminf.

    Returns ``min_{start <= k <= 2 start} L^k + k c0`` where ``L^k`` is the
    ``k``-th min-plus power of the base cost.  ``start`` defaults to
    ``4 n``.
    """
    l0 = _base(base)
    n = l0.shape[0]
    if c0 is None:
        c0 = critical_constant(l0)
    if start is None:
        start = 4 * n
    tilde = l0 + c0
    out = np.full_like(tilde, np.inf)
    for k, P in minplus_powers(tilde, 2 * start):
        if k >= start:
            out = np.minimum(out, P)
    return out


def peierls_barrier(base, c0=None, verify=None, tol_aubry=TOL_AUBRY) -> BarrierTable:
    """Compute the Peierls barrier by routing through the Aubry set.

    On a finite graph, ``h(x, y) = min_a M'(x, a) + M'(a, y)`` over Aubry
    points ``a``, where ``M`` is the Mane potential of the normalized cost
    and ``M'(a, a) = 0``.  When ``verify`` is true (the default for
    ``n <= 6``) the result is compared with :func:`peierls_liminf`, doubling
    the window from ``4 n`` up to ``64 n`` while the powers are transient.

    Examples
    --------
    >>> bt = peierls_barrier([[0, -1], [2, 1]])
    >>> bt.h
    array([[ 0., -1.],
           [ 2.,  1.]])
    >>> bt.aubry
    (0,)
    """
    l0 = _base(base)
    n = l0.shape[0]
    if c0 is None:
        c0 = critical_constant(l0)
    tilde = l0 + c0
    mane = tilde.copy()
    for _, P in minplus_powers(tilde, n):
        mane = np.minimum(mane, P)
    aubry = tuple(int(a) for a in np.flatnonzero(np.diag(mane) <= tol_aubry))
    if not aubry:
        raise ArithmeticError(
            "empty Aubry set: tolerance too tight for this cost table")
    # through[x, a] = M'(x, a)
    through = mane[:, aubry].copy()
    for j, a in enumerate(aubry):
        through[a, j] = 0.0
    from_aubry = mane[aubry, :].copy()
    for j, a in enumerate(aubry):
        from_aubry[j, a] = 0.0
    h = minplus_product(through, from_aubry)

    if verify is None:
        verify = n <= 6
    if verify:
        # min-plus powers can stay transient past 4n; widen before failing
        start = 4 * n
        while True:
            gap = float(np.max(np.abs(peierls_liminf(tilde, 0.0, start) - h)))
            if gap <= 1e-9:
                break
            if start >= 64 * n:
                raise ArithmeticError(
                    f"barrier disagrees with the liminf estimate by {gap:.3g}")
            start *= 2
    for arr in (h, mane):
        arr.setflags(write=False)
    return BarrierTable(l0, float(c0), mane, h, aubry)


def aubry_set(bt: BarrierTable, tol=TOL_AUBRY) -> tuple[int, ...]:
    """States ``x`` with ``|h(x, x)| <= tol``."""
    found = tuple(int(x) for x in np.flatnonzero(np.abs(np.diag(bt.h)) <= tol))
    if not found:
        raise ArithmeticError("empty Aubry set: tolerance too tight")
    return found


def _fp_defect(l0, c0, u):
    return float(np.max(np.abs(lax_oleinik(l0, u) + c0 - u)))


def weak_kam_solution(bt: BarrierTable, basepoint: int, tol=TOL_FP):
    """Weak KAM solution ``h(basepoint, .)`` for an Aubry basepoint."""
    if basepoint not in aubry_set(bt):
        raise ValueError(f"state {basepoint} is not in the Aubry set {bt.aubry}")
    u = np.array(bt.h[basepoint], dtype=float)
    defect = _fp_defect(bt.l0, bt.c0, u)
    if defect > tol:
        raise ArithmeticError(f"h(x, .) fails the fixed-point check by {defect:.3g}")
    return u


def is_subsolution(base, c0, w, tol=0.0) -> bool:
    """Whether ``w(x) - w(z) <= l0(z, x) + c0 + tol`` for every pair."""
    l0 = _base(base)
    w = np.asarray(w, dtype=float)
    return bool(np.all(w[None, :] - w[:, None] <= l0 + c0 + tol))


def comparison_check(bt: BarrierTable, u, v, tol=TOL_FP) -> bool:
    """Comparison principle between a weak KAM solution and a subsolution.

    Returns ``False`` when ``u >= v`` fails on the Aubry set.  Otherwise
    asserts ``u >= v - tol`` everywhere and returns ``True``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    defect = _fp_defect(bt.l0, bt.c0, u)
    if defect > tol:
        raise ValueError(f"u is not a weak KAM solution (defect {defect:.3g})")
    if not is_subsolution(bt.l0, bt.c0, v, tol):
        raise ValueError("v is not a subsolution")
    idx = list(bt.aubry)
    if np.any(u[idx] < v[idx] - tol):
        return False
    worst = float(np.max(v - u))
    if worst > tol:
        raise AssertionError(
            f"comparison principle violated: v exceeds u by {worst:.3g}")
    return True
