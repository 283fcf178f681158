"""Cost models on a finite state space.

A cost model couples a base cost table ``l0[z, x]`` (row = source state,
column = target state) with a nonlinear dependence on two scalar slots
``u`` and ``v``::

    affine:      l(z, x, u, v) = l0(z, x) - A(z, x) u - B(z, x) v
    saturating:  l(z, x, u, v) = l0(z, x) - A(z, x) sig(u) - B(z, x) sig(v)

with ``sig(t) = s * tanh(t / s)``.  Nonnegative weight tables make the cost
non-increasing in both slots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "AFFINE",
    "SATURATING",
    "TOL_L4",
    "ModelError",
    "AssumptionError",
    "FiniteSpace",
    "Coupling",
    "CostModel",
    "AssumptionReport",
    "make_model",
    "eval_cost",
    "cost_table",
    "derivative_at_zero",
    "check_assumptions",
    "normalize_critical",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "save_model",
]

AFFINE = "affine"
SATURATING = "saturating"
TOL_L4 = 1e-9


class ModelError(ValueError):
    """Raised for malformed or inconsistent model data."""


class AssumptionError(RuntimeError):
    """Raised when a structural hypothesis on the cost fails."""


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ModelError("state space must contain at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise ModelError(f"state labels must be unique, got {self.labels}")

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, state) -> int:
        """Resolve a label or an integer index to an integer index."""
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.n:
                raise ModelError(f"state index {state} out of range")
            return int(state)
        try:
            return self.labels.index(state)
        except ValueError:
            raise ModelError(f"unknown state {state!r}") from None


@dataclass(frozen=True)
class Coupling:
    variant: str
    A: np.ndarray
    B: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        if self.variant not in (AFFINE, SATURATING):
            raise ModelError(f"unknown coupling variant {self.variant!r}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ModelError("saturation scale must be positive")

    @property
    def kappa_u(self) -> float:
        return float(self.A.max())

    @property
    def kappa_v(self) -> float:
        return float(self.B.max())

    def sigma(self, t):
        if self.variant == AFFINE:
            return t
        return self.scale * np.tanh(np.asarray(t) / self.scale)

    def dsigma(self, t):
        if self.variant == AFFINE:
            return np.ones_like(np.asarray(t, dtype=float))
        th = np.tanh(np.asarray(t) / self.scale)
        return 1.0 - th * th

    def eta(self, t):
        """Modulus in the first-order remainder bound at the origin."""
        if self.variant == AFFINE:
            return np.zeros_like(np.asarray(t, dtype=float))
        return (self.kappa_u + self.kappa_v) * np.asarray(t) / self.scale


@dataclass(frozen=True)
class CostModel:
    """Immutable cost model.

    Attributes
    ----------
    space : FiniteSpace
    l0 : ndarray, shape (n, n)
        Base cost ``l(z, x, 0, 0)``.
    coupling : Coupling
    lambda_max : float
        Upper end of the admissible discount range; satisfies
        ``lambda_max * max(kappa_u, kappa_v) < 1``.
    c0_shift : float
        Critical constant that was added to the base cost by
        :func:`normalize_critical` (0 for a raw model).
    """

    space: FiniteSpace
    l0: np.ndarray
    coupling: Coupling
    lambda_max: float
    c0_shift: float = 0.0

    def __post_init__(self):
        for arr in (self.l0, self.coupling.A, self.coupling.B):
            arr.setflags(write=False)
        kappa = max(self.coupling.kappa_u, self.coupling.kappa_v)
        if not self.lambda_max > 0:
            raise ModelError("lambda_max must be positive")
        if self.lambda_max * kappa >= 1:
            raise ModelError(
                f"lambda_max={self.lambda_max} violates lambda_max * kappa < 1 "
                f"(kappa={kappa})")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def kappa_u(self) -> float:
        return self.coupling.kappa_u

    @property
    def kappa_v(self) -> float:
        return self.coupling.kappa_v


def default_lambda_max(kappa_u: float, kappa_v: float) -> float:
    kappa = max(kappa_u, kappa_v)
    if kappa == 0:
        return 1.0
    return min(1.0, 0.9 / max(kappa, 1e-12))


def _table(name, data, n):
    arr = np.array(data, dtype=float)
    if arr.shape != (n, n):
        raise ModelError(f"{name} must have shape ({n}, {n}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} contains non-finite entries")
    return arr


def make_model(l0, A=None, B=None, *, alpha=None, beta=None,
               variant=AFFINE, scale=1.0, labels=None, lambda_max=None):
    """Build a validated :class:`CostModel`.

    Either full weight tables ``A``/``B`` or vectors ``alpha``/``beta`` can be
    given.  ``alpha[z]`` fills row ``z`` of ``A`` and ``beta[x]`` fills column
    ``x`` of ``B``.  Missing weights default to zero.
    """
    l0 = np.atleast_2d(np.array(l0, dtype=float))
    n = l0.shape[0]
    if labels is None:
        labels = [chr(ord("a") + i) if n <= 26 else f"s{i}" for i in range(n)]
    space = FiniteSpace(tuple(str(s) for s in labels))
    if space.n != n:
        raise ModelError(f"{space.n} labels for a {n}-state cost table")
    l0 = _table("l0", l0, n)

    if A is not None and alpha is not None:
        raise ModelError("give either A or alpha, not both")
    if B is not None and beta is not None:
        raise ModelError("give either B or beta, not both")
    if alpha is not None:
        alpha = np.array(alpha, dtype=float).reshape(-1)
        if alpha.shape != (n,):
            raise ModelError(f"alpha must have length {n}")
        A = np.repeat(alpha[:, None], n, axis=1)
    if beta is not None:
        beta = np.array(beta, dtype=float).reshape(-1)
        if beta.shape != (n,):
            raise ModelError(f"beta must have length {n}")
        B = np.repeat(beta[None, :], n, axis=0)
    A = np.zeros((n, n)) if A is None else _table("A", A, n)
    B = np.zeros((n, n)) if B is None else _table("B", B, n)
    if np.any(A < 0) or np.any(B < 0):
        raise ModelError("coupling weights A and B must be nonnegative")

    coupling = Coupling(variant, A, B, float(scale))
    if lambda_max is None:
        lambda_max = default_lambda_max(coupling.kappa_u, coupling.kappa_v)
    return CostModel(space, l0, coupling, float(lambda_max))


def eval_cost(model: CostModel, z, x, u, v):
    """Evaluate ``l(z, x, u, v)``; broadcasts over array arguments."""
    c = model.coupling
    return (model.l0[z, x] - c.A[z, x] * c.sigma(u) - c.B[z, x] * c.sigma(v))


def cost_table(model: CostModel, U, V):
    """Cost on the full pair grid with slot values ``U[z, x]``, ``V[z, x]``.

    ``U`` and ``V`` broadcast against shape ``(n, n)``.
    """
    c = model.coupling
    return model.l0 - c.A * c.sigma(U) - c.B * c.sigma(V)


def cost_partials(model: CostModel, U, V):
    """Partial derivatives of the cost in ``u`` and ``v`` on the pair grid."""
    c = model.coupling
    return -c.A * c.dsigma(U), -c.B * c.dsigma(V)


def derivative_at_zero(model: CostModel):
    """Return ``(Du, Dv)``, the slot derivatives of the cost at ``u = v = 0``."""
    return -model.coupling.A.copy(), -model.coupling.B.copy()


@dataclass(frozen=True)
class AssumptionReport:
    kappa_u: float
    kappa_v: float
    l2_ok: bool
    l4_values: tuple[float, ...]
    l4_ok: bool
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.l2_ok and self.l4_ok

    def failing_vertices(self, tol=TOL_L4):
        return [i for i, val in enumerate(self.l4_values) if not val < -tol]


def check_assumptions(model: CostModel, vertices, tol=TOL_L4) -> AssumptionReport:
    """Check the monotonicity and nondegeneracy hypotheses of ``model``.

    Parameters
    ----------
    model : CostModel
    vertices : sequence of PairMeasure
        Vertices of the Mather polytope of the base cost.  Nondegeneracy is
        linear in the measure, so checking vertices covers the polytope.
    """
    vertices = list(vertices)
    if not vertices:
        raise ModelError("empty vertex list: a finite space always has Mather measures")
    Du, Dv = derivative_at_zero(model)
    lam = Du + Dv
    l2_ok = bool(np.all(model.coupling.A >= 0) and np.all(model.coupling.B >= 0))
    values = tuple(float(np.sum(lam * mu.weights)) for mu in vertices)
    messages = []
    if not l2_ok:
        messages.append("coupling weights must be nonnegative")
    for i, (mu, val) in enumerate(zip(vertices, values)):
        if not val < -tol:
            messages.append(
                f"nondegeneracy fails at Mather vertex {i} "
                f"({mu.describe(model.space.labels)}): "
                f"integral of Du+Dv = {val:.6g} is not negative")
    l4_ok = all(val < -tol for val in values)
    return AssumptionReport(model.kappa_u, model.kappa_v, l2_ok, values, l4_ok,
                            tuple(messages))


def normalize_critical(model: CostModel, c0: float) -> CostModel:
    """Shift the base cost by ``c0`` so that its critical constant is zero."""
    if c0 == 0:
        return model
    from .classical import critical_constant

    shifted = replace(model, l0=model.l0 + c0, c0_shift=model.c0_shift + c0)
    check = critical_constant(shifted.l0)
    if abs(check) > 1e-9 * max(1.0, abs(c0)):
        raise ModelError(f"c0={c0} is not the critical constant (residual {check})")
    return shifted


# -- persistence -----------------------------------------------------------

def model_to_dict(model: CostModel) -> dict:
    c = model.coupling
    out = {
        "labels": list(model.space.labels),
        "l0": model.l0.tolist(),
        "coupling": {"variant": c.variant, "A": c.A.tolist(), "B": c.B.tolist()},
        "lambda_max": model.lambda_max,
    }
    if c.variant == SATURATING:
        out["coupling"]["scale"] = c.scale
    if model.c0_shift:
        out["c0_shift"] = model.c0_shift
    return out


def model_from_dict(data: dict) -> CostModel:
    if not isinstance(data, dict):
        raise ModelError("model file must contain a JSON object")
    for key in ("l0", "coupling"):
        if key not in data:
            raise ModelError(f"missing field {key!r}")
    cpl = data["coupling"]
    if not isinstance(cpl, dict):
        raise ModelError("field 'coupling' must be an object")
    variant = cpl.get("variant", AFFINE)
    try:
        model = make_model(
            data["l0"],
            A=cpl.get("A"), B=cpl.get("B"),
            alpha=cpl.get("alpha"), beta=cpl.get("beta"),
            variant=variant, scale=cpl.get("scale", 1.0),
            labels=data.get("labels"), lambda_max=data.get("lambda_max"))
        shift = float(data.get("c0_shift", 0.0))
        return replace(model, c0_shift=shift) if shift else model
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed model data: {exc}") from exc


def load_model(path) -> CostModel:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(data)


def save_model(model: CostModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2))
