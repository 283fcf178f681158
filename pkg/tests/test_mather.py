import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from weakkam.classical import critical_constant, peierls_barrier
from weakkam.mather import (PairMeasure, closed_measure_constraints, cycle_measure, integrate,
                            mather_value_lp, mather_vertices, simple_cycles)
from weakkam.random_models import base_suite

E1 = [[0, -1], [2, 1]]
E2 = [[0, 2], [3, 0]]


def face_vertices(l0, value, tol=1e-9):
    """Vertices of the optimal face by enumerating bases of its equality system."""
    n = len(l0)
    A, b = closed_measure_constraints(n)
    A = np.vstack([A, np.asarray(l0, float).ravel()])
    b = np.append(b, value)
    rank = np.linalg.matrix_rank(A)
    found = []
    for cols in itertools.combinations(range(n * n), rank):
        sub = A[:, cols]
        if np.linalg.matrix_rank(sub) < rank:
            continue
        x_sub, *_ = np.linalg.lstsq(sub, b, rcond=None)
        if np.max(np.abs(sub @ x_sub - b)) > tol or np.any(x_sub < -tol):
            continue
        x = np.zeros(n * n)
        x[list(cols)] = x_sub
        if not any(np.max(np.abs(x - y)) < 1e-9 for y in found):
            found.append(x)
    return found


def test_value_lp_examples():
    value, mu = mather_value_lp(E2)
    assert value == 0.0
    assert mu.weights[0, 0] == 1.0 or mu.weights[1, 1] == 1.0
    value, mu = mather_value_lp([[1, 2], [3, -1]])
    assert value == -1.0
    np.testing.assert_array_equal(mu.weights, [[0, 0], [0, 1]])
    value, _ = mather_value_lp(np.full((3, 3), 2.5))
    assert value == 2.5


def test_value_lp_against_highs_and_karp():
    for l0 in base_suite(11, 100):
        n = len(l0)
        A, b = closed_measure_constraints(n)
        ref = linprog(l0.ravel(), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        value, mu = mather_value_lp(l0)
        assert value == pytest.approx(ref.fun, abs=1e-9)
        assert abs(value + critical_constant(l0)) <= 1e-9
        assert integrate(mu, l0) == pytest.approx(value, abs=1e-9)


def test_vertex_examples():
    assert [v.cycle for v in mather_vertices(E2).vertices] == [(0,), (1,)]
    assert [v.cycle for v in mather_vertices(E1).vertices] == [(0,)]
    poly = mather_vertices([[3.0]])
    assert poly.value == 3.0 and poly.vertices[0].weights.tolist() == [[1.0]]


def test_simple_cycle_count():
    # sum_k C(n, k) (k - 1)!
    assert [len(simple_cycles(n)) for n in range(1, 6)] == [1, 3, 8, 24, 89]


def test_vertices_match_face_enumeration():
    for l0 in base_suite(12, 60, max_states=4):
        poly = mather_vertices(l0)
        oracle = face_vertices(l0, poly.value)
        assert len(oracle) == len(poly.vertices)
        for v in poly.vertices:
            assert any(np.max(np.abs(v.weights.ravel() - o)) < 1e-9 for o in oracle)


def test_vertex_invariants(rng):
    for l0 in base_suite(13, 40):
        poly = mather_vertices(l0)
        bt = peierls_barrier(l0)
        c0 = bt.c0
        assert poly.value == pytest.approx(-c0, abs=1e-9)
        for mu in poly.vertices:
            assert integrate(mu, l0) == pytest.approx(-c0, abs=1e-9)
        weights = rng.dirichlet(np.ones(len(poly.vertices)))
        mix = PairMeasure(sum(w * v.weights for w, v in zip(weights, poly.vertices)))
        assert integrate(mix, l0) == pytest.approx(-c0, abs=1e-9)
        w = -bt.h[:, 0]
        for mu in poly.vertices:
            assert integrate(mu, w[None, :] - w[:, None]) == pytest.approx(0.0, abs=1e-9)


def test_integrate_examples():
    assert integrate(cycle_measure((0,), 2), E1) == 0.0
    assert integrate(cycle_measure((0, 1), 2), E2) == 2.5
    assert integrate(cycle_measure((0, 1), 2), np.zeros((2, 2))) == 0.0


def test_measure_validation():
    with pytest.raises(ValueError):
        PairMeasure(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        PairMeasure(np.array([[0.5, 0.0], [0.0, 0.4]]))


def test_enumeration_cap():
    with pytest.raises(ValueError):
        mather_vertices(np.zeros((9, 9)))
