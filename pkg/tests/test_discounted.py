import numpy as np
import pytest

from weakkam.classical import critical_constant, lax_oleinik
from weakkam.discounted import (MonotonicityError, apply_T_lambda, backward_orbit,
                                iterate_fixed_point, solve_discounted)
from weakkam.model import normalize_critical
from weakkam.random_models import admissible_suite


def normalized(m):
    return normalize_critical(m, critical_constant(m.l0))


def test_apply_examples(e1, e1_sat):
    np.testing.assert_array_equal(apply_T_lambda(e1, [2.0, 2.0], 0.5), [1.0, 0.0])
    for m in (e1, e1_sat):
        np.testing.assert_array_equal(apply_T_lambda(m, [0.0, 0.0], 0.3), m.l0.min(axis=0))
    phi = np.array([0.7, -1.3])
    np.testing.assert_allclose(apply_T_lambda(e1_sat, phi, 1e-9), lax_oleinik(e1_sat.l0, phi),
                               atol=1e-7)


def test_affine_reduction_is_exact(rng):
    for _ in range(200):
        n = rng.integers(1, 6)
        alpha = rng.uniform(0, 1, n)
        from weakkam.model import make_model
        m = make_model(rng.normal(size=(n, n)), alpha=alpha)
        lam = rng.uniform(0, m.lambda_max)
        phi = rng.normal(scale=3, size=n)
        np.testing.assert_array_equal(apply_T_lambda(m, phi, lam),
                                      lax_oleinik(m.l0, (1 - lam * alpha) * phi))


def test_lambda_range(e1):
    with pytest.raises(ValueError):
        apply_T_lambda(e1, [0, 0], e1.lambda_max)
    with pytest.raises(ValueError):
        solve_discounted(e1, 0.0)


def test_solve_e1(e1):
    sol = solve_discounted(e1, 0.25)
    np.testing.assert_array_equal(sol.u, [0.0, -1.0])
    assert sol.residual < 1e-10
    assert sol.lower_bound_ok and sol.upper_bound_ok and sol.unique_in_sandwich


@pytest.mark.parametrize("lam", [0.8, 0.25, 1e-3, 1e-6])
def test_solve_e2(e2, lam):
    np.testing.assert_array_equal(solve_discounted(e2, lam).u, [0.0, 0.0])


def test_requires_normalized_model():
    from weakkam.model import make_model
    with pytest.raises(ValueError):
        solve_discounted(make_model([[1, 2], [3, -1]], alpha=[1, 1]), 0.1)


def test_backward_orbit_examples(e1, e2):
    sol = solve_discounted(e1, 0.25)
    assert backward_orbit(e1, sol, 1, 5) == [1, 0, 0, 0, 0, 0]
    assert backward_orbit(e1, sol, 1, 0) == [1]
    sol = solve_discounted(e2, 0.25)
    assert backward_orbit(e2, sol, 1, 4) == [1] * 5
    assert backward_orbit(e2, sol, 0, 4) == [0] * 5


def test_solutions_on_random_models():
    for m in admissible_suite(21, 40):
        nm = normalized(m)
        for lam in (0.5 * nm.lambda_max, 0.05, 1e-4):
            sol = solve_discounted(nm, lam)
            assert np.max(np.abs(apply_T_lambda(nm, sol.u, lam) - sol.u)) <= 1e-9
            assert np.all(sol.lower - 1e-9 <= sol.u) and np.all(sol.u <= sol.upper + 1e-9)
            lo = np.array(sol.lower_log)
            hi = np.array(sol.upper_log)
            assert np.all(np.diff(lo, axis=0) >= -1e-10)
            assert np.all(np.diff(hi, axis=0) <= 1e-10)
            assert sol.unique_in_sandwich
            orbit = backward_orbit(nm, sol, nm.n - 1, 10)
            assert len(orbit) == 11


def test_plain_iteration_agrees_with_accelerated():
    for m in admissible_suite(22, 15):
        nm = normalized(m)
        lam = 0.4 * nm.lambda_max
        plain = solve_discounted(nm, lam, accelerate=False)
        fast = solve_discounted(nm, lam)
        assert np.max(np.abs(plain.u - fast.u)) <= 2e-9
        assert plain.residual <= 1e-9


def test_monotonicity_guard(e1):
    # (1, 1) lies above the fixed point, so iterates decrease
    with pytest.raises(MonotonicityError):
        iterate_fixed_point(e1, 0.25, [1.0, 1.0], direction=+1)
