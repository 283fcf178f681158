"""Closed measures, Mather measures and the Mather polytope of a base cost."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .classical import _base, critical_constant
from .lp import LPError, solve_lp

__all__ = [
    "CYCLE_ENUMERATION_CAP",
    "PairMeasure",
    "MatherPolytope",
    "closed_measure_constraints",
    "mather_value_lp",
    "simple_cycles",
    "cycle_measure",
    "mather_vertices",
    "integrate",
]

CYCLE_ENUMERATION_CAP = 8


@dataclass(frozen=True)
class PairMeasure:
    """Probability measure on state pairs, ``weights[z, x]``.

    Checks normalization and closedness (equal marginals) on construction.
    ``cycle`` records the supporting simple cycle for uniform cycle measures.
    """

    weights: np.ndarray
    cycle: tuple[int, ...] | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("measure weights must be a square table")
        if np.any(w < -1e-12):
            raise ValueError("measure weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"measure has total mass {w.sum()!r}")
        if np.max(np.abs(w.sum(axis=1) - w.sum(axis=0))) > 1e-10:
            raise ValueError("measure is not closed: marginals differ")
        w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def describe(self, labels=None) -> str:
        labels = labels or [str(i) for i in range(self.n)]
        if self.cycle is not None:
            if len(self.cycle) == 1:
                a = labels[self.cycle[0]]
                return f"delta({a},{a})"
            path = "->".join(labels[i] for i in self.cycle + self.cycle[:1])
            return f"uniform on cycle {path}"
        support = [f"({labels[z]},{labels[x]})" for z, x in zip(*np.nonzero(self.weights))]
        return "measure on " + " ".join(support)


@dataclass(frozen=True)
class MatherPolytope:
    vertices: tuple[PairMeasure, ...]
    value: float


def integrate(mu: PairMeasure, F) -> float:
    """``sum F(z, x) mu(z, x)``."""
    F = np.asarray(F, dtype=float)
    if F.shape != mu.weights.shape:
        raise ValueError(f"table shape {F.shape} does not match measure {mu.weights.shape}")
    return float(np.sum(F * mu.weights))


def closed_measure_constraints(n):
    """Equality constraints ``(A, b)`` of closed probability measures.

    Variables are the flattened weights ``mu[z, x]`` (row-major).  The ``n``
    balance rows sum to zero, so one of them is redundant.
    """
    A = np.zeros((n + 1, n * n))
    for z in range(n):
        out_edges = np.zeros((n, n))
        out_edges[z, :] += 1.0
        out_edges[:, z] -= 1.0
        A[z] = out_edges.ravel()
    A[n] = 1.0
    b = np.zeros(n + 1)
    b[n] = 1.0
    return A, b


def mather_value_lp(base):
    """Minimize the integral of ``l0`` over closed probability measures.

    Returns ``(value, witness)`` with ``witness`` an optimal basic solution.
    The value equals minus the critical constant.
    """
    l0 = _base(base)
    n = l0.shape[0]
    A, b = closed_measure_constraints(n)
    try:
        res = solve_lp(l0.ravel(), A, b)
    except LPError as exc:
        raise RuntimeError(f"closed-measure LP failed: {exc}") from exc
    w = res.x.reshape(n, n)
    w = w / w.sum()
    return res.value, PairMeasure(w)


def simple_cycles(n):
    """All simple cycles of the complete digraph on ``n`` states.

    Self-loops are included.  Each cycle starts at its smallest state; the
    list is sorted by length, then lexicographically.
    """
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    G.add_edges_from((z, x) for z in range(n) for x in range(n))
    cycles = []
    for cyc in nx.simple_cycles(G):
        k = cyc.index(min(cyc))
        cycles.append(tuple(cyc[k:] + cyc[:k]))
    cycles.sort(key=lambda c: (len(c), c))
    return cycles


def cycle_measure(cycle, n) -> PairMeasure:
    w = np.zeros((n, n))
    k = len(cycle)
    for i, z in enumerate(cycle):
        w[z, cycle[(i + 1) % k]] += 1.0 / k
    return PairMeasure(w, tuple(cycle))


def _cycle_mean(l0, cycle):
    k = len(cycle)
    return sum(l0[z, cycle[(i + 1) % k]] for i, z in enumerate(cycle)) / k


def mather_vertices(base, cap=CYCLE_ENUMERATION_CAP, tol=1e-9) -> MatherPolytope:
    """Vertices of the Mather polytope of ``l0``.

    Vertices of the closed-measure polytope are uniform measures on simple
    cycles; the Mather vertices are those on cycles of minimal mean.
    """
    l0 = _base(base)
    n = l0.shape[0]
    if n > cap:
        raise ValueError(f"cycle enumeration is capped at {cap} states, got {n}")
    value, _ = mather_value_lp(l0)
    c0 = critical_constant(l0)
    if abs(value + c0) > 1e-9:
        raise ArithmeticError(f"LP value {value} and critical constant {c0} disagree")
    vertices = []
    seen = set()
    for cyc in simple_cycles(n):
        if abs(_cycle_mean(l0, cyc) - value) <= tol:
            mu = cycle_measure(cyc, n)
            key = np.round(mu.weights, 12).tobytes()
            if key not in seen:
                seen.add(key)
                vertices.append(mu)
    if not vertices:
        raise ArithmeticError("no minimal-mean cycle found")
    return MatherPolytope(tuple(vertices), value)
