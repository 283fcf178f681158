"""The vanishing-discount limit ``u0`` and its two representations.

``u0`` is computed pointwise as the supremum of the constrained subsolution
set (one LP per state) and, independently, as a minimum over Mather vertices
of a ratio of barrier integrals.  :func:`vanishing_limit` runs both and
insists that they agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import classical
from .lp import UnboundedLPError, solve_lp
from .mather import mather_vertices
from .model import (TOL_L4, AssumptionError, CostModel, check_assumptions,
                    derivative_at_zero, normalize_critical)

__all__ = [
    "TWO_FORMULA_TOL",
    "UnboundedSupError",
    "vertex_constraint_rows",
    "in_S0",
    "compute_u0_sup_formula",
    "compute_u0_mather_formula",
    "LimitResult",
    "vanishing_limit",
    "u0",
]

TWO_FORMULA_TOL = 1e-7


class UnboundedSupError(AssumptionError):
    """The constrained subsolution set has no pointwise upper bound."""


def _vertex_list(vertices):
    return list(getattr(vertices, "vertices", vertices))


def vertex_constraint_rows(model: CostModel, vertices):
    """Rows ``g_i`` with ``g_i @ w = sum (Du w(z) + Dv w(x)) mu_i(z, x)``."""
    Du, Dv = derivative_at_zero(model)
    rows = []
    for mu in _vertex_list(vertices):
        W = mu.weights
        rows.append((W * Du).sum(axis=1) + (W * Dv).sum(axis=0))
    return np.array(rows).reshape(-1, model.n)


def in_S0(model: CostModel, w, vertices, tol=1e-9) -> bool:
    """Membership in the constrained subsolution set of a normalized model."""
    w = np.asarray(w, dtype=float)
    if not classical.is_subsolution(model.l0, 0.0, w, tol):
        return False
    G = vertex_constraint_rows(model, vertices)
    return bool(np.all(G @ w >= -tol))


def _l4_values(model, vertices):
    Du, Dv = derivative_at_zero(model)
    lam = Du + Dv
    return np.array([float(np.sum(lam * mu.weights)) for mu in _vertex_list(vertices)])


def compute_u0_sup_formula(model: CostModel, vertices, check_l4=True, fp_tol=1e-8):
    """``u0(x*) = max w(x*)`` over the constrained subsolution set.

    One LP per state, solved with the package simplex; ``w`` is split into
    nonnegative parts.

    Raises
    ------
    AssumptionError
        If ``check_l4`` and some vertex has a non-negative integral of
        ``Du + Dv``.
    UnboundedSupError
        If an LP is unbounded.
    """
    vertices = _vertex_list(vertices)
    if check_l4:
        vals = _l4_values(model, vertices)
        bad = np.flatnonzero(~(vals < -TOL_L4))
        if bad.size:
            i = int(bad[0])
            raise AssumptionError(
                f"nondegeneracy fails at Mather vertex {i} "
                f"({vertices[i].describe(model.space.labels)}): integral {vals[i]:.6g}")
    n = model.n
    l0 = model.l0
    G = vertex_constraint_rows(model, vertices)
    m_sub = n * n
    m_v = G.shape[0]
    nvar = 2 * n + m_sub + m_v
    A = np.zeros((m_sub + m_v, nvar))
    b = np.zeros(m_sub + m_v)
    # w(x) - w(z) + s_zx = l0(z, x)
    r = 0
    for z in range(n):
        for x in range(n):
            A[r, x] += 1.0
            A[r, z] -= 1.0
            A[r, n + x] -= 1.0
            A[r, n + z] += 1.0
            A[r, 2 * n + r] = 1.0
            b[r] = l0[z, x]
            r += 1
    # -g_i @ w + t_i = 0
    for i in range(m_v):
        A[m_sub + i, :n] = -G[i]
        A[m_sub + i, n:2 * n] = G[i]
        A[m_sub + i, 2 * n + m_sub + i] = 1.0
    out = np.empty(n)
    for xs in range(n):
        c = np.zeros(nvar)
        c[xs] = -1.0
        c[n + xs] = 1.0
        try:
            res = solve_lp(c, A, b)
        except UnboundedLPError as exc:
            raise UnboundedSupError(
                f"sup over the constrained subsolutions is unbounded at state "
                f"{model.space.labels[xs]}") from exc
        out[xs] = -res.value + 0.0  # no negative zeros
    defect = float(np.max(np.abs(classical.lax_oleinik(l0, out) - out)))
    if defect > fp_tol:
        raise ArithmeticError(f"sup-formula result is not a T0 fixed point (defect {defect:.3g})")
    return out


def compute_u0_mather_formula(model: CostModel, vertices, bt):
    """Minimum over Mather vertices of the barrier-ratio formula.

    The ratio is linear-fractional in the measure with a negative denominator
    on the whole polytope, so its minimum is attained at a vertex.
    """
    vertices = _vertex_list(vertices)
    Du, Dv = derivative_at_zero(model)
    h = bt.h
    best = np.full(model.n, np.inf)
    for i, mu in enumerate(vertices):
        W = mu.weights
        den = float(np.sum((Du + Dv) * W))
        if not den < -TOL_L4:
            raise AssumptionError(
                f"nondegeneracy fails at Mather vertex {i}: integral {den:.6g}")
        num = (W * Du).sum(axis=1) @ h + (W * Dv).sum(axis=0) @ h
        best = np.minimum(best, num / den)
    return best + 0.0


@dataclass(frozen=True)
class LimitResult:
    u0: np.ndarray
    u_sup: np.ndarray
    u_mather: np.ndarray
    gap: float
    c0: float
    normalized: CostModel
    vertices: tuple


def vanishing_limit(model: CostModel, tol=TWO_FORMULA_TOL) -> LimitResult:
    """Compute ``u0`` by both formulas and cross-check them.

    The model is normalized internally; the returned potential is a weak KAM
    solution of the raw base cost (``T0 u0 + c0 = u0``).
    """
    c0 = classical.critical_constant(model.l0)
    nm = normalize_critical(model, c0)
    poly = mather_vertices(nm.l0)
    report = check_assumptions(nm, poly.vertices)
    if not report.l4_ok:
        raise AssumptionError("; ".join(report.messages))
    bt = classical.peierls_barrier(nm.l0)
    u_sup = compute_u0_sup_formula(nm, poly.vertices)
    u_m = compute_u0_mather_formula(nm, poly.vertices, bt)
    gap = float(np.max(np.abs(u_sup - u_m)))
    if gap > tol:
        raise ArithmeticError(f"u0 formulas disagree by {gap:.3g}")
    return LimitResult(u_sup, u_sup, u_m, gap, c0, nm, poly.vertices)


def u0(model: CostModel):
    """The vanishing-discount limit of ``model``.

    Examples
    --------
    >>> from weakkam.model import make_model
    >>> u0(make_model([[0, -1], [2, 1]], alpha=[1, 1]))
    array([ 0., -1.])
    """
    return vanishing_limit(model).u0
