import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lorentzlab import ContractError, gcn
from lorentzlab.curvature import christoffel_coordinates, curvature, frame_ricci, orthonormal_christoffel

vec3 = arrays(np.float64, 3, elements=st.floats(-1, 1))


def test_params_validation():
    with pytest.raises(ContractError):
        gcn.GcnParams(0.0, 3)
    with pytest.raises(ContractError):
        gcn.GcnParams(1.0, 2)


def test_metric_matrix_at_a_point():
    G = gcn.gcn_metric(gcn.GcnParams(2.0, 3))(np.array([0.0, 0.0, 0.5]))
    np.testing.assert_allclose(G, [[-4, -2, 0], [-2, 0, 0], [0, 0, 1]], atol=1e-15)


@pytest.mark.parametrize("c", [1.0, 2.0, 5.0])
def test_coordinate_christoffel_table(c):
    p = gcn.GcnParams(c, 3)
    x = np.random.default_rng(0).uniform(-2, 2, (50, 3))
    got = christoffel_coordinates(gcn.gcn_metric(p), x).entries
    assert np.max(np.abs(got - gcn.gcn_coordinate_christoffel(p, x))) < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5])
def test_orthonormal_christoffel_constants(n):
    p = gcn.GcnParams(1.5, n)
    x = np.array([0.2, -0.7, 1.1] + [0.4] * (n - 3))
    got = orthonormal_christoffel(gcn.gcn_metric(p), gcn.gcn_frame(p), x).entries
    np.testing.assert_allclose(got, gcn.gcn_orthonormal_christoffel(p), atol=1e-12)


def test_energy_tensor_example_lambda_zero():
    # at c = 2, Lambda = 0 the frame tensor starts diag(3, 1, 1)
    T = gcn.gcn_ground_truth(gcn.GcnParams(2.0, 3, 0.0)).energy_diag
    np.testing.assert_allclose(T, [3.0, 1.0, 1.0])


@pytest.mark.parametrize("n,lam", [(4, 0.0), (5, -1.0), (4, 3.0)])
def test_energy_tensor_tail_entries(n, lam):
    # the flat directions carry Ric = 0, so T = (Lambda - scal / 2) g there
    c = 2.0
    p = gcn.GcnParams(c, n, lam)
    x = np.zeros(n)
    rep = curvature(gcn.gcn_metric(p), x)
    T = rep.ricci - (0.5 * rep.scalar - lam) * rep.metric
    E = gcn.gcn_frame(p).vectors(x)
    TF = E @ T @ E.T
    np.testing.assert_allclose(np.diag(TF)[3:], -c * c / 4 + lam, atol=1e-12)
    np.testing.assert_allclose(np.diag(TF), gcn.gcn_ground_truth(p).energy_diag, atol=1e-12)


def test_scalar_curvature_is_constant():
    x = np.random.default_rng(1).uniform(-3, 3, (10, 4))
    np.testing.assert_allclose(curvature(gcn.gcn_metric(gcn.GcnParams(3.0, 4)), x).scalar, 4.5, atol=1e-10)


def test_frame_ricci_invariant_under_rescaling():
    # Ric of c^2 g equals Ric of g; with matched frames g^c and g^1 share frame Ricci up to c^2
    x = np.array([0.1, 0.2, 0.3])
    r1 = frame_ricci(gcn.gcn_metric(gcn.GcnParams(1.0, 3)), gcn.gcn_frame(gcn.GcnParams(1.0, 3)), x)
    r3 = frame_ricci(gcn.gcn_metric(gcn.GcnParams(3.0, 3)), gcn.gcn_frame(gcn.GcnParams(3.0, 3)), x)
    np.testing.assert_allclose(r3, 9.0 * r1, atol=1e-12)


@pytest.mark.parametrize("c", [2.0, 3.0])
def test_isometry(c):
    x = np.random.default_rng(2).uniform(-2, 2, (100, 4))
    assert gcn.gcn_isometry_check(c, 4, x) < 1e-12
    np.testing.assert_allclose(gcn.phi_inv(c, gcn.phi(c, x)), x, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(vec3, vec3, st.floats(0.0, 5.0), st.sampled_from([1.0, 2.0]))
def test_closed_form_solves_geodesic_equation(p, v, t, c):
    params = gcn.GcnParams(c, 3)
    w = gcn.geodesic_omega(c, p, v)
    if w != 0 and abs(w) < 0.05:
        return  # ill-conditioned near the polynomial branch
    s = gcn.gcn_geodesic(params, p, v, [t])
    Gam = christoffel_coordinates(gcn.gcn_metric(params), s.x[0]).entries
    res = s.a[0] + np.einsum("kij,i,j->k", Gam, s.v[0], s.v[0])
    assert np.max(np.abs(res)) < 1e-8 * max(1.0, np.max(np.abs(s.a[0])))
    np.testing.assert_allclose(gcn.gcn_geodesic(params, p, v, [0.0]).x[0], p, atol=1e-12)


def test_branch_continuity():
    # omega = 1e-4 against the polynomial branch; the gap is O(omega) on [0, 2]
    params = gcn.GcnParams(1.0, 3)
    p = np.array([0.1, 0.2, 0.3])
    v = np.array([-0.3 * 0.5, 0.5, 0.4])
    t = np.linspace(0, 2, 9)
    x0 = gcn.gcn_geodesic(params, p, v, t).x
    v_eps = v + np.array([1e-4, 0.0, 0.0])
    assert gcn.geodesic_omega(1.0, p, v_eps) == pytest.approx(1e-4)
    x1 = gcn.gcn_geodesic(params, p, v_eps, t).x
    assert np.max(np.abs(x1 - x0)) < 1e-3


def test_closed_geodesic_example():
    c = 2.0
    params = gcn.GcnParams(c, 3)
    v = np.array([1.0, 0.0, math.sqrt(2) * c])
    verdict = gcn.closed_geodesic_classify(params, np.zeros(3), v)
    assert verdict.closed and verdict.period == pytest.approx(2 * math.pi / c**2)
    s = gcn.gcn_geodesic(params, np.zeros(3), v, [verdict.period])
    np.testing.assert_allclose(s.x[0], 0.0, atol=1e-12)
    assert gcn.causal_defect(params, np.zeros(3), v) > 0


def test_tail_velocity_prevents_closing():
    params = gcn.GcnParams(1.0, 4)
    v = np.array([1.0, 0.0, math.sqrt(2), 0.1])
    assert not gcn.closed_geodesic_classify(params, np.zeros(4), v).closed


@settings(max_examples=60, deadline=None)
@given(vec3, vec3)
def test_no_closed_causal_geodesic(p, v):
    params = gcn.GcnParams(1.5, 3)
    if gcn.closed_geodesic_classify(params, p, v).closed:
        assert gcn.causal_defect(params, p, v) > 0


@pytest.mark.parametrize("p", [-5.0, 0.0, 17.0])
def test_loop_plan(p):
    plan = gcn.timelike_loop(p)
    val = plan.validate(200)
    assert len(plan.segments) == 11
    assert plan.S > 0
    assert val.max_join_error < 1e-12
    assert val.min_margin > 0
    np.testing.assert_allclose(val.start, [p, 0, 0])
    np.testing.assert_allclose(val.end, [0, 0, 0], atol=1e-12)


def test_loop_requires_large_T():
    with pytest.raises(ContractError):
        gcn.timelike_loop(0.0, T=10)


def test_closed_loop_pieces_chain():
    parts = gcn.closed_timelike_loop(3.0)
    assert [off for _, off in parts] == [0.0, 3.0]
    end = parts[1][0].validate(10).end + np.array([3.0, 0, 0])
    np.testing.assert_allclose(end, [3.0, 0, 0], atol=1e-12)


@pytest.mark.parametrize("c", [1.0, 2.0])
def test_pulled_back_loop_is_timelike(c):
    plan = gcn.timelike_loop(-5.0)
    for _, _, x, v in plan.samples(100):
        _, _, margin = gcn.pull_back_loop(c, x, v)
        assert np.all(margin > 0)
