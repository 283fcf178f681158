"""Discounted operator ``T_lam`` and its fixed points.

For a model whose base cost has critical constant zero::

    T_lam phi(x) = min_z phi(z) + l(z, x, lam phi(z), lam T_lam phi(x))

Fixed points are found by monotone iteration from a weak KAM solution shifted
below zero (non-decreasing iterates) and from one shifted above zero
(non-increasing iterates).  Plain iteration contracts at rate roughly
``1 - lam * kappa``, which is hopeless for small ``lam``; the iteration is
therefore accelerated by policy iteration on the greedy policy of the current
iterate.  A jump is accepted only when it lands on a verified fixed point that
keeps the logged sequence monotone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import classical
from .classical import TOL_FP
from .implicit import TOL_INNER, ConvergenceError, GeneralCost, apply_implicit
from .model import AFFINE, CostModel, cost_partials, cost_table

__all__ = [
    "MonotonicityError",
    "DiscountedSolution",
    "discounted_cost",
    "apply_T_lambda",
    "sandwich_bounds",
    "iterate_fixed_point",
    "solve_discounted",
    "backward_orbit",
]

MONOTONE_SLACK = 1e-10


class MonotonicityError(ArithmeticError):
    """A monotone iteration moved in the wrong direction."""


def _check_lambda(model: CostModel, lam: float):
    if not 0 < lam < model.lambda_max:
        raise ValueError(f"lambda={lam} outside (0, {model.lambda_max})")


def _require_normalized(model: CostModel):
    c0 = classical.critical_constant(model.l0)
    if abs(c0) > 1e-9:
        raise ValueError(
            f"model is not critically normalized (c0={c0}); use normalize_critical")


def discounted_cost(model: CostModel, lam: float) -> GeneralCost:
    """The cost ``c(z, x, u, v) = u + l(z, x, lam u, lam v)``."""
    return GeneralCost(
        lambda U, V: U + cost_table(model, lam * U, lam * V),
        kappa_u=1.0,
        kappa_v=lam * model.kappa_v,
    )


def apply_T_lambda(model: CostModel, phi, lam: float, tol=TOL_INNER):
    """Apply the discounted operator to ``phi``.

    Examples
    --------
    >>> from weakkam.model import make_model
    >>> m = make_model([[0, -1], [2, 1]], alpha=[1, 1])
    >>> apply_T_lambda(m, [2.0, 2.0], 0.5)
    array([1., 0.])
    """
    _check_lambda(model, lam)
    phi = np.asarray(phi, dtype=float)
    c = model.coupling
    if c.variant == AFFINE and not c.B.any():
        # v-free affine cost: closed form min_z (1 - lam A) phi(z) + l0
        return np.min((1.0 - lam * c.A) * phi[:, None] + model.l0, axis=0)
    return apply_implicit(discounted_cost(model, lam), phi, tol=tol)


def _residual(model, u, lam):
    return float(np.max(np.abs(apply_T_lambda(model, u, lam) - u)))


def sandwich_bounds(model: CostModel, bt=None):
    """Weak KAM solutions ``(lower <= 0, upper >= 0)`` bracketing fixed points.

    Both are ``h(a, .)`` for the lowest-index Aubry point ``a``, shifted by its
    maximum and minimum respectively.
    """
    if bt is None:
        bt = classical.peierls_barrier(model.l0)
    a = bt.aubry[0]
    w = classical.weak_kam_solution(bt, a)
    return w - w.max(), w - w.min()


# -- policy iteration ------------------------------------------------------

def _greedy(model, lam, u, keep=None):
    n = model.n
    Tu = apply_T_lambda(model, u, lam)
    Q = u[:, None] + cost_table(model, lam * u[:, None], lam * Tu[None, :])
    pi = np.argmin(Q, axis=0)
    if keep is not None:
        best = Q[pi, np.arange(n)]
        current = Q[keep, np.arange(n)]
        stay = current <= best + 1e-12 * (1.0 + np.abs(best))
        pi = np.where(stay, keep, pi)
    return pi


def _policy_value(model, lam, pi, start, max_newton=60):
    """Solve ``u(x) = u(pi x) + l(pi x, x, lam u(pi x), lam u(x))`` by Newton."""
    u = _newton_policy(model, lam, pi, start, max_newton)
    # quadratic convergence towards an exact zero ends in subnormals
    return np.where(np.abs(u) < np.finfo(float).tiny, 0.0, u)


def _newton_policy(model, lam, pi, start, max_newton):
    n = model.n
    xs = np.arange(n)
    u = np.array(start, dtype=float)

    def defect(u):
        U = np.broadcast_to(u[:, None], (n, n))
        V = np.broadcast_to(u[None, :], (n, n))
        return u - u[pi] - cost_table(model, lam * U, lam * V)[pi, xs]

    if model.coupling.variant == AFFINE:
        # linear policy system: solve it outright, then refine below
        c = model.coupling
        J = np.eye(n) * (1.0 + lam * c.B[pi, xs])
        J[xs, pi] += -1.0 + lam * c.A[pi, xs]
        u = np.linalg.solve(J, model.l0[pi, xs])
        if not np.all(np.isfinite(u)):
            raise np.linalg.LinAlgError("singular policy system")
    F = defect(u)
    for _ in range(max_newton):
        norm = np.max(np.abs(F))
        if norm == 0.0:
            return u
        U = np.broadcast_to(u[:, None], (n, n))
        V = np.broadcast_to(u[None, :], (n, n))
        Du, Dv = cost_partials(model, lam * U, lam * V)
        J = np.eye(n) * (1.0 - lam * Dv[pi, xs])
        J[xs, pi] += -1.0 - lam * Du[pi, xs]
        step = np.linalg.solve(J, F)
        if not np.all(np.isfinite(step)):
            raise np.linalg.LinAlgError("singular policy system")
        t = 1.0
        while True:
            trial = u - t * step
            Ft = defect(trial)
            if np.max(np.abs(Ft)) < norm or t < 1e-6:
                break
            t *= 0.5
        # stop once rounding prevents further progress
        if np.max(np.abs(Ft)) >= norm:
            return u
        u, F = trial, Ft
    return u


def _policy_iteration(model, lam, start, max_rounds=None):
    """Howard's policy iteration from the greedy policy of ``start``."""
    n = model.n
    if max_rounds is None:
        max_rounds = 10 * n + 10
    pi = _greedy(model, lam, start)
    u = np.asarray(start, dtype=float)
    for _ in range(max_rounds):
        u = _policy_value(model, lam, pi, u)
        new = _greedy(model, lam, u, keep=pi)
        if np.array_equal(new, pi):
            return u
        pi = new
    raise ConvergenceError("policy iteration did not settle")


# -- monotone iteration ----------------------------------------------------

@dataclass
class _Route:
    u: np.ndarray
    residual: float
    steps: int
    jumped: bool
    log: list = field(default_factory=list)


def iterate_fixed_point(model: CostModel, lam: float, start, direction=0,
                        tol=TOL_FP, max_steps=10**5, accelerate=True,
                        jump_every=50):
    """Iterate ``T_lam`` from ``start`` until the fixed-point residual is small.

    Parameters
    ----------
    direction : {1, -1, 0}
        ``1`` asserts non-decreasing iterates (start below ``T_lam start``),
        ``-1`` non-increasing, ``0`` no check.
    accelerate : bool
        Try a policy-iteration jump after the first two steps and then every
        ``jump_every`` steps.

    Raises
    ------
    MonotonicityError
        If the asserted direction is violated by more than ``1e-10``.
    ConvergenceError
        If ``max_steps`` iterations do not reach the tolerance.
    """
    _check_lambda(model, lam)
    u = np.array(start, dtype=float)
    log = [u.copy()]
    stop = tol * (1.0 - lam * model.kappa_u) / 2
    d = np.inf
    for step in range(1, max_steps + 1):
        Tu = apply_T_lambda(model, u, lam)
        d = Tu - u
        if direction > 0 and d.min() < -MONOTONE_SLACK:
            raise MonotonicityError(f"iterate decreased by {-d.min():.3g} at step {step}")
        if direction < 0 and d.max() > MONOTONE_SLACK:
            raise MonotonicityError(f"iterate increased by {d.max():.3g} at step {step}")
        u = Tu
        log.append(u.copy())
        if np.max(np.abs(d)) <= stop:
            res = _residual(model, u, lam)
            if res <= tol:
                return _Route(u, res, step, False, log)
        if accelerate and (step == 2 or step % jump_every == 0):
            cand = _try_jump(model, lam, u, direction, tol)
            if cand is not None:
                log.append(cand.copy())
                return _Route(cand, _residual(model, cand, lam), step + 1, True, log)
    raise ConvergenceError(
        f"no fixed point within {max_steps} steps at lambda={lam}",
        residual=float(np.max(np.abs(d))))


def _try_jump(model, lam, u, direction, tol):
    try:
        cand = _policy_iteration(model, lam, u)
    except (np.linalg.LinAlgError, ConvergenceError, FloatingPointError):
        return None
    if not np.all(np.isfinite(cand)):
        return None
    if direction > 0 and np.min(cand - u) < -MONOTONE_SLACK:
        return None
    if direction < 0 and np.max(cand - u) > MONOTONE_SLACK:
        return None
    # polish with plain steps; each is a non-expansive move of size <= residual
    for _ in range(3):
        if _residual(model, cand, lam) <= tol / 10:
            break
        cand = apply_T_lambda(model, cand, lam)
    if _residual(model, cand, lam) > tol:
        return None
    return cand


@dataclass(frozen=True)
class DiscountedSolution:
    """Fixed point of ``T_lam`` with its certificates.

    ``u`` is the limit of the non-decreasing iteration from ``lower``;
    ``u_from_above`` the limit of the non-increasing iteration from
    ``upper``.  ``unique_in_sandwich`` records whether the two agree within
    ``2 * tol``.
    """

    lam: float
    u: np.ndarray
    residual: float
    iterations: int
    lower_bound_ok: bool
    upper_bound_ok: bool
    u_from_above: np.ndarray
    iterations_from_above: int
    unique_in_sandwich: bool
    lower: np.ndarray
    upper: np.ndarray
    lower_log: tuple = ()
    upper_log: tuple = ()


def solve_discounted(model: CostModel, lam: float, tol=TOL_FP, max_steps=10**5,
                     accelerate=True, bt=None) -> DiscountedSolution:
    """Fixed point of ``T_lam`` by monotone iteration from the sandwich bounds.

    The model must be critically normalized.

    Examples
    --------
    >>> from weakkam.model import make_model
    >>> m = make_model([[0, -1], [2, 1]], alpha=[1, 1])
    >>> solve_discounted(m, 0.25).u
    array([ 0., -1.])
    """
    _check_lambda(model, lam)
    _require_normalized(model)
    lower, upper = sandwich_bounds(model, bt)
    below = iterate_fixed_point(model, lam, lower, +1, tol, max_steps, accelerate)
    above = iterate_fixed_point(model, lam, upper, -1, tol, max_steps, accelerate)
    u = below.u
    return DiscountedSolution(
        lam=lam,
        u=u,
        residual=below.residual,
        iterations=below.steps,
        lower_bound_ok=bool(np.all(u >= lower - 1e-9)),
        upper_bound_ok=bool(np.all(u <= upper + 1e-9)),
        u_from_above=above.u,
        iterations_from_above=above.steps,
        unique_in_sandwich=bool(np.max(np.abs(u - above.u)) <= 2 * tol),
        lower=lower,
        upper=upper,
        lower_log=tuple(below.log),
        upper_log=tuple(above.log),
    )


def backward_orbit(model: CostModel, sol: DiscountedSolution, x0: int, length: int,
                   tol=TOL_FP):
    """Backward minimizing orbit ``x0, x_-1, ..., x_-length`` of a fixed point.

    Each predecessor minimizes ``u(z) + l(z, x, lam u(z), lam u(x))``; ties go
    to the lowest index.
    """
    u = sol.u
    lam = sol.lam
    n = model.n
    orbit = [int(x0)]
    x = int(x0)
    for _ in range(length):
        vals = u + cost_table(model, lam * u[:, None], lam * u[x])[:, x]
        z = int(np.argmin(vals))
        if abs(vals[z] - u[x]) > 2 * tol:
            raise ArithmeticError(
                f"orbit step {z}->{x} has defect {abs(vals[z] - u[x]):.3g}")
        orbit.append(z)
        x = z
    assert len(orbit) == length + 1 and all(0 <= s < n for s in orbit)
    return orbit
