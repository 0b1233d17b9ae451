import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lorentzlab import ContractError, EvaluationDomainError
from lorentzlab import catalog
from lorentzlab import jet as J
from lorentzlab.fields import (BracketField, MetricField, ScalarField, VectorField, jacobian, lie_bracket,
                               linear_combination)

pts3 = arrays(np.float64, 3, elements=st.floats(-1.5, 1.5))


def poly_field(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) * 0.3

    def f(x):
        return J.vector([sum(A[a, i] * x[..., i] for i in range(3)) + B[a, 0] * x[..., 1] * x[..., 2]
                         + B[a, 1] * x[..., 0] * x[..., 0] for a in range(3)], like=x)

    return VectorField(f, 3, name=f"poly{seed}")


def test_bracket_of_standard_frame():
    X = VectorField(lambda x: J.vector([-1.0 * x[..., 2], 1.0, 0.0], like=x), 3)
    Y = VectorField.coordinate(2, 3)
    x = np.array([0.3, -1.2, 0.8])
    np.testing.assert_allclose(lie_bracket(X, Y, x), [1.0, 0.0, 0.0], atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(pts3)
def test_jacobi_identity(x):
    X, Y, Z = poly_field(1), poly_field(2), poly_field(3)
    total = (lie_bracket(X, BracketField(Y, Z), x) + lie_bracket(Y, BracketField(Z, X), x)
             + lie_bracket(Z, BracketField(X, Y), x))
    assert np.max(np.abs(total)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(pts3)
def test_bracket_antisymmetric(x):
    X, Y = poly_field(4), poly_field(5)
    np.testing.assert_allclose(lie_bracket(X, Y, x), -lie_bracket(Y, X, x), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(pts3)
def test_dual_and_fd_jets_agree(x):
    g = catalog.polynomial_metric(3, seed=2)
    jd = g.jet(x, 2)
    jf = g.with_mode("fd", 1e-4).jet(x, 2)
    np.testing.assert_allclose(jf.grad, jd.grad, atol=1e-7)
    np.testing.assert_allclose(jf.hess, jd.hess, atol=1e-4)


def test_nonfinite_values_raise():
    f = ScalarField(lambda x: np.log(x[..., 0]), 1)
    with np.errstate(invalid="ignore"), pytest.raises(EvaluationDomainError):
        f(np.array([-1.0]))


def test_unknown_mode_and_bad_step():
    with pytest.raises(ContractError):
        ScalarField(lambda x: x[..., 0], 1, mode="symbolic")
    with pytest.raises(ContractError):
        ScalarField(lambda x: x[..., 0], 1, fd_step=0.0)


def test_signature_check():
    catalog.minkowski(3).check_signature(np.zeros(3))
    riemannian_declared_lorentzian = MetricField(lambda x: J.matrix(np.eye(3).tolist(), like=x), 3, 1)
    with pytest.raises(ContractError):
        riemannian_declared_lorentzian.check_signature(np.zeros(3))


def test_linear_combination_with_function_coefficients():
    a = ScalarField(lambda x: x[..., 0] * x[..., 1], 2)
    V = linear_combination([a, 2.0], [VectorField.coordinate(0, 2), VectorField.coordinate(1, 2)])
    x = np.array([0.5, 3.0])
    np.testing.assert_allclose(V(x), [1.5, 2.0])
    val, D = jacobian(V, x)
    np.testing.assert_allclose(D[0], [3.0, 0.5])


def test_batched_evaluation_shapes():
    g = catalog.polynomial_metric(4, seed=1)
    x = np.zeros((7, 2, 4))
    assert g(x).shape == (7, 2, 4, 4)
    assert g.jet(x, 2).hess.shape == (4, 4, 7, 2, 4, 4)
