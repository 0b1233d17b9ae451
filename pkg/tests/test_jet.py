import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lorentzlab import jet as J

finite = st.floats(-2.0, 2.0, allow_nan=False)
points = arrays(np.float64, 3, elements=finite)


def f_analytic(x):
    x0, x1, x2 = x
    val = x0 * x0 * x1 + np.sin(x2) * x0
    grad = np.array([2 * x0 * x1 + np.sin(x2), x0 * x0, np.cos(x2) * x0])
    hess = np.array([[2 * x1, 2 * x0, np.cos(x2)],
                     [2 * x0, 0.0, 0.0],
                     [np.cos(x2), 0.0, -np.sin(x2) * x0]])
    return val, grad, hess


@settings(max_examples=60, deadline=None)
@given(points)
def test_polynomial_trig_jet_matches_hand_derivatives(x):
    u = J.Jet.variables(x, 2)
    out = u[..., 0] * u[..., 0] * u[..., 1] + J.sin(u[..., 2]) * u[..., 0]
    val, grad, hess = f_analytic(x)
    assert np.isclose(out.val, val, atol=1e-12)
    np.testing.assert_allclose(out.grad, grad, atol=1e-12)
    np.testing.assert_allclose(out.hess, hess, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(points)
def test_quotient_and_exp_chain_rule(x):
    # d/dx of exp(x0) / (2 + x1^2) by the quotient rule
    u = J.Jet.variables(x, 1)
    out = J.exp(u[..., 0]) / (2.0 + u[..., 1] ** 2)
    d = 2 + x[1] ** 2
    expect = [np.exp(x[0]) / d, -np.exp(x[0]) * 2 * x[1] / d**2, 0.0]
    np.testing.assert_allclose(out.grad, expect, rtol=1e-12, atol=1e-14)


def test_numpy_ufuncs_dispatch_to_jets():
    u = J.Jet.variables(np.array([0.3, 0.7]), 2)
    a = np.sin(u[..., 0]) * np.exp(u[..., 1])
    b = J.sin(u[..., 0]) * J.exp(u[..., 1])
    np.testing.assert_array_equal(a.grad, b.grad)
    np.testing.assert_array_equal(a.hess, b.hess)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 2, elements=st.floats(-1, 1)))
def test_inverse_derivative_identity(x):
    # d(A^-1) = -A^-1 dA A^-1, checked against finite differences of numpy's inverse
    def A(y):
        return J.matrix([[3.0 + y[..., 0], y[..., 1]], [y[..., 1] * y[..., 0], 2.0 - y[..., 1]]], like=y)

    u = J.Jet.variables(x, 1)
    Ai = J.inv(A(u))
    h = 1e-6
    for a in range(2):
        e = np.zeros(2)
        e[a] = h
        fd = (np.linalg.inv(A(x + e)) - np.linalg.inv(A(x - e))) / (2 * h)
        np.testing.assert_allclose(Ai.grad[a], fd, atol=1e-7)


def test_batched_constants_broadcast_against_jets():
    x = np.random.default_rng(0).normal(size=(5, 3))
    u = J.Jet.variables(x, 2)
    v = J.vector([1.0, u[..., 0], 2.0], like=x)
    assert v.val.shape == (5, 3)
    assert v.grad.shape == (3, 5, 3)
    np.testing.assert_array_equal(v.grad[0, :, 1], np.ones(5))
    np.testing.assert_array_equal(v.grad[:, :, 0], np.zeros((3, 5)))


def test_stack_rejects_nonnegative_axis():
    with pytest.raises(ValueError):
        J.stack([1.0, 2.0], axis=0)


def test_matmul_product_rule():
    x = np.array([0.2, -0.4])
    u = J.Jet.variables(x, 2)
    A = J.matrix([[u[..., 0], 1.0], [0.0, u[..., 1]]], like=x)
    P = J.matmul(A, A)
    # (A^2)_{01} = x0 + x1, second derivatives vanish
    np.testing.assert_allclose(P.grad[:, 0, 1], [1.0, 1.0])
    np.testing.assert_allclose(P.hess[:, :, 0, 1], np.zeros((2, 2)))
