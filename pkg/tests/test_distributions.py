import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lorentzlab import ContractError, DegeneracyError, TransversalityError, catalog, gcn
from lorentzlab import jet as J
from lorentzlab.distributions import (Distribution, graph_map, orthogonal_complement, orthogonal_distribution,
                                      tw_sw_metric, twist_locally, twistedness)
from lorentzlab.fields import VectorField, linear_combination, ScalarField

pts3 = arrays(np.float64, 3, elements=st.floats(-1.5, 1.5))


def frame_H(c=1.0, n=3):
    fr = gcn.gcn_frame(gcn.GcnParams(c, n))
    return fr, Distribution(fr.fields[1:], name="H")


def test_graph_map_of_tilted_plane():
    _, H = frame_H()
    W = Distribution.coordinate([1, 2], 3)
    V = Distribution.coordinate([0], 3)
    x = np.array([0.4, -1.0, 0.7])
    gm = graph_map(H, W, V, x)
    np.testing.assert_allclose(gm.vectors[:, 0], [-0.7, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(gm.vectors[:, 1], [0.0, 0.0, 0.0], atol=1e-15)


def test_graph_map_needs_transversality():
    Z = Distribution.coordinate([0, 2], 3)
    with pytest.raises(TransversalityError):
        graph_map(Z, Distribution.coordinate([1, 2], 3), Distribution.coordinate([0], 3), np.zeros(3))


def test_dependent_spanning_fields():
    D = Distribution([VectorField.coordinate(0, 2), VectorField.constant([2.0, 0.0])])
    with pytest.raises(DegeneracyError):
        D.basis(np.zeros(2))


@settings(max_examples=20, deadline=None)
@given(pts3)
def test_twistedness_of_the_standard_plane_field(x):
    _, H = frame_H()
    tw = twistedness(H, Distribution.coordinate([0], 3), x)
    np.testing.assert_allclose(tw.vectors[0, 1], [1.0, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(tw.vectors[1, 0], [-1.0, 0.0, 0.0], atol=1e-14)


def test_integrable_distribution_has_no_twist():
    tw = twistedness(Distribution.coordinate([1, 2], 3), Distribution.coordinate([0], 3), np.ones(3))
    assert not np.any(tw.coefficients)


@pytest.mark.parametrize("c", [1.0, 2.5])
def test_metric_twistedness(c):
    fr, H = frame_H(c)
    x = np.array([0.3, 0.1, -0.4])
    e0 = fr.vectors(x)[0]
    r = tw_sw_metric(gcn.gcn_metric(gcn.GcnParams(c, 3)), H, x, fr.fields[1], fr.fields[2], e0)
    assert r.tw == pytest.approx(-c, abs=1e-12)
    assert r.sw == pytest.approx(0.0, abs=1e-12)


def test_twistedness_is_tensorial():
    c = 2.0
    fr, H = frame_H(c)
    g = gcn.gcn_metric(gcn.GcnParams(c, 3))
    x = np.array([0.5, 0.2, 0.1])
    f = ScalarField(lambda y: 1.0 + y[..., 0] * y[..., 0], 3)
    fe1 = linear_combination([f], [fr.fields[1]])
    e0 = fr.vectors(x)[0]
    a = tw_sw_metric(g, H, x, fe1, fr.fields[2], e0)
    b = tw_sw_metric(g, H, x, fr.fields[1], fr.fields[2], e0)
    assert a.tw == pytest.approx(1.25 * b.tw, abs=1e-12)
    # vectors at x are extended with constant coefficients; the result cannot depend on that
    u = fr.vectors(x)[1] * 1.25
    c_ = tw_sw_metric(g, H, x, u, fr.vectors(x)[2], e0)
    assert c_.tw == pytest.approx(a.tw, abs=1e-12)


def test_tw_sw_requires_orthogonal_w():
    fr, H = frame_H()
    x = np.zeros(3)
    with pytest.raises(ContractError):
        tw_sw_metric(gcn.gcn_metric(gcn.GcnParams(1.0, 3)), H, x, fr.fields[1], fr.fields[2], [0, 1.0, 0])


def test_orthogonal_complement_of_spacelike_plane():
    fr, H = frame_H(2.0)
    x = np.array([0.0, 0.0, 0.8])
    perp = orthogonal_complement(gcn.gcn_metric(gcn.GcnParams(2.0, 3)), H, x)
    assert perp.shape == (3, 1)
    np.testing.assert_allclose(perp[1:, 0], 0.0, atol=1e-14)


def test_null_plane_is_degenerate():
    H = Distribution([VectorField.constant([1.0, 1.0, 0.0]), VectorField.coordinate(2, 3)])
    with pytest.raises(DegeneracyError):
        orthogonal_complement(catalog.minkowski(3), H, np.zeros(3))


@settings(max_examples=10, deadline=None)
@given(pts3)
def test_orthogonal_distribution_is_orthogonal_everywhere(x):
    g = catalog.polynomial_metric(3, seed=4)
    _, H = frame_H()
    P = orthogonal_distribution(g, H, np.zeros(3))
    G = g(x)
    assert np.max(np.abs(H.basis(x).T @ G @ P.basis(x))) < 1e-12


def test_kernel_is_annihilated_by_its_form():
    def form(x):
        return J.vector([2.0 + x[..., 1], x[..., 0] * x[..., 2], -1.0], like=x)

    K = Distribution.kernel(form, 3)
    x = np.array([0.3, 0.4, -0.2])
    np.testing.assert_allclose(J.value(form(x)) @ K.basis(x), 0.0, atol=1e-15)


def test_twist_locally_in_minkowski_space():
    g = catalog.minkowski(3)
    H = Distribution.coordinate([1, 2], 3)
    x = np.array([0.2, -0.1, 0.3])
    res = twist_locally(g, H, x, 0.1)
    assert res.twist == pytest.approx(0.1, abs=1e-12)
    assert res.spacelike
    assert res.spacelike_threshold > 0.1
    far = x + np.array([0.0, 0.6, 0.0])
    np.testing.assert_allclose(res.distribution.basis(far), H.basis(far), atol=1e-15)


def test_twist_locally_needs_rank_two():
    with pytest.raises(ContractError):
        twist_locally(catalog.minkowski(2), Distribution.coordinate([1], 2), np.zeros(2), 0.1)
