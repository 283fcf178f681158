import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakkam.mather import cycle_measure, mather_vertices
from weakkam.model import (AFFINE, SATURATING, ModelError, check_assumptions,
                           derivative_at_zero, eval_cost, load_model, make_model,
                           model_from_dict, model_to_dict, normalize_critical)
from weakkam.classical import critical_constant


def test_affine_formula():
    m = make_model([[0, -1], [2, 1]], A=[[0, 1], [0, 0]])
    assert eval_cost(m, 0, 1, 2.0, 7.0) == -3.0


@pytest.mark.parametrize("variant", [AFFINE, SATURATING])
def test_zero_slots_give_base_cost(variant, rng):
    l0 = rng.normal(size=(3, 3))
    m = make_model(l0, A=rng.uniform(0, 1, (3, 3)), B=rng.uniform(0, 1, (3, 3)),
                   variant=variant, scale=0.7)
    for z in range(3):
        for x in range(3):
            assert eval_cost(m, z, x, 0.0, 0.0) == l0[z, x]


def test_saturating_finite_difference_in_u(rng):
    m = make_model(rng.normal(size=(3, 3)), A=rng.uniform(0, 2, (3, 3)),
                   variant=SATURATING, scale=1.0)
    h = 1e-6
    for z in range(3):
        for x in range(3):
            fd = (eval_cost(m, z, x, h, 0.0) - eval_cost(m, z, x, -h, 0.0)) / (2 * h)
            assert fd == pytest.approx(-m.coupling.A[z, x], abs=1e-8)


def test_derivative_at_zero_examples():
    m = make_model([[0, 1], [1, 0]])
    Du, Dv = derivative_at_zero(m)
    assert not Du.any() and not Dv.any()
    m = make_model([[0, 1], [1, 0]], A=[[2, 2], [2, 2]], variant=SATURATING)
    assert derivative_at_zero(m)[0][0, 1] == -2.0


def test_derivative_matches_finite_differences(rng):
    for _ in range(10):
        n = rng.integers(1, 5)
        m = make_model(rng.normal(size=(n, n)), A=rng.uniform(0, 1, (n, n)),
                       B=rng.uniform(0, 1, (n, n)), variant=SATURATING,
                       scale=rng.uniform(0.2, 3))
        Du, Dv = derivative_at_zero(m)
        h = 1e-6
        zs, xs = np.meshgrid(range(n), range(n), indexing="ij")
        fdu = (eval_cost(m, zs, xs, h, 0.0) - eval_cost(m, zs, xs, -h, 0.0)) / (2 * h)
        fdv = (eval_cost(m, zs, xs, 0.0, h) - eval_cost(m, zs, xs, 0.0, -h)) / (2 * h)
        assert np.all(Du <= 0) and np.all(Dv <= 0)
        np.testing.assert_allclose(fdu, Du, atol=1e-6)
        np.testing.assert_allclose(fdv, Dv, atol=1e-6)
        assert np.max(np.abs(Du)) == m.kappa_u
        assert np.max(np.abs(Dv)) == m.kappa_v


slot = st.floats(-20, 20, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(u=slot, u2=slot, v=slot, scale=st.floats(0.1, 5), variant=st.sampled_from([AFFINE, SATURATING]))
def test_monotone_and_lipschitz_in_u(u, u2, v, scale, variant):
    rng = np.random.default_rng(7)
    m = make_model(rng.normal(size=(3, 3)), A=rng.uniform(0, 1, (3, 3)),
                   B=rng.uniform(0, 1, (3, 3)), variant=variant, scale=scale)
    lo, hi = min(u, u2), max(u, u2)
    a = eval_cost(m, slice(None), slice(None), lo, v)
    b = eval_cost(m, slice(None), slice(None), hi, v)
    assert np.all(b <= a + 1e-12)
    assert np.all(np.abs(a - b) <= m.kappa_u * (hi - lo) + 1e-12)


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-3, 3), v=st.floats(-3, 3), scale=st.floats(0.2, 5),
       variant=st.sampled_from([AFFINE, SATURATING]))
def test_first_order_remainder_bound(u, v, scale, variant):
    rng = np.random.default_rng(11)
    m = make_model(rng.normal(size=(3, 3)), A=rng.uniform(0, 1, (3, 3)),
                   B=rng.uniform(0, 1, (3, 3)), variant=variant, scale=scale)
    Du, Dv = derivative_at_zero(m)
    r = (abs(u) + abs(v)) / 2
    val = eval_cost(m, slice(None), slice(None), u, v)
    rem = np.abs(val - m.l0 - Du * u - Dv * v)
    assert np.all(rem <= r * m.coupling.eta(r) + 1e-12)


def test_check_assumptions_examples():
    l0 = [[0, 2], [3, 0]]
    verts = [cycle_measure((0,), 2), cycle_measure((1,), 2)]
    rep = check_assumptions(make_model(l0, alpha=[1, 1]), verts)
    assert rep.l4_values == (-1.0, -1.0) and rep.l4_ok and rep.l2_ok
    rep = check_assumptions(make_model(l0, alpha=[1, 0]), verts)
    assert rep.l4_values == (-1.0, 0.0) and not rep.l4_ok
    assert "delta(b,b)" in rep.messages[0]
    rep = check_assumptions(make_model(l0), verts)
    assert not rep.l4_ok and rep.l4_values == (0.0, 0.0)
    with pytest.raises(ModelError):
        check_assumptions(make_model(l0), [])


def test_normalize_critical():
    m = make_model([[1, 2], [3, -1]])
    c0 = critical_constant(m.l0)
    assert c0 == 1.0
    nm = normalize_critical(m, c0)
    np.testing.assert_array_equal(nm.l0, [[2, 3], [4, 0]])
    assert abs(critical_constant(nm.l0)) <= 1e-12
    assert normalize_critical(m, 0.0) is m
    assert nm.coupling is m.coupling
    with pytest.raises(ModelError):
        normalize_critical(m, 5.0)


def test_lambda_max_default_and_validation():
    m = make_model([[0]], alpha=[2.0])
    assert m.lambda_max == pytest.approx(0.45)
    assert make_model([[0]]).lambda_max == 1.0
    with pytest.raises(ModelError):
        make_model([[0]], alpha=[2.0], lambda_max=0.5)
    with pytest.raises(ModelError):
        make_model([[0, 1], [1, 0]], alpha=[-1, 0])
    with pytest.raises(ModelError):
        make_model([[0, 1], [1, 0]], labels=["a", "a"])


def test_models_are_immutable(e1):
    with pytest.raises(ValueError):
        e1.l0[0, 0] = 5.0


def test_alpha_beta_layout():
    m = make_model(np.zeros((3, 3)), alpha=[1, 2, 3], beta=[4, 5, 6])
    assert m.coupling.A[1, 0] == 2 and m.coupling.A[1, 2] == 2
    assert m.coupling.B[0, 2] == 6 and m.coupling.B[2, 2] == 6


def test_json_round_trip(tmp_path):
    m = make_model([[0.1, -1.3], [2.7, 1 / 3]], A=[[0.2, 0.3], [0.4, 0.5]],
                   beta=[0.1, 0.2], variant=SATURATING, scale=0.5, labels=["x", "y"])
    nm = normalize_critical(m, critical_constant(m.l0))
    for model in (m, nm):
        again = model_from_dict(json.loads(json.dumps(model_to_dict(model))))
        np.testing.assert_array_equal(again.l0, model.l0)
        np.testing.assert_array_equal(again.coupling.A, model.coupling.A)
        np.testing.assert_array_equal(again.coupling.B, model.coupling.B)
        assert again.space == model.space and again.c0_shift == model.c0_shift
    path = tmp_path / "m.json"
    path.write_text('{"l0": [[0, 1], [1, 0]], "coupling": {"variant": "affine", "alpha": [1, 1]}}')
    assert load_model(path).coupling.A.tolist() == [[1, 1], [1, 1]]


@pytest.mark.parametrize("text", [
    "{not json",
    '{"coupling": {}}',
    '{"l0": [[0, 1]], "coupling": {}}',
    '{"l0": [[0, 1], [1, 0]], "coupling": {"variant": "cubic"}}',
    '{"l0": [[0, 1], [1, 0]], "coupling": {"alpha": [1]}}',
])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ModelError):
        load_model(path)
