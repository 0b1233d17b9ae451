"""Closed-form metrics and frames used throughout the library and its tests."""

from __future__ import annotations

import numpy as np

from . import jet as J
from .fields import MetricField, VectorField


def minkowski(n: int) -> MetricField:
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    return MetricField(lambda x: J.matrix(eta.tolist(), like=x), n, 1, name=f"minkowski{n}")


def euclidean(n: int) -> MetricField:
    return MetricField(lambda x: J.matrix(np.eye(n).tolist(), like=x), n, 0, name=f"euclidean{n}")


def round_sphere(radius: float = 1.0) -> MetricField:
    """Unit-sphere metric in polar coordinates (theta, phi); valid for 0 < theta < pi."""
    r2 = radius * radius

    def g(x):
        th = x[..., 0]
        s = np.sin(th)
        return J.matrix([[r2, 0.0], [0.0, r2 * s * s]], like=x)

    return MetricField(g, 2, 0, name="sphere")


def schwarzschild(mass: float = 1.0) -> MetricField:
    """Exterior Schwarzschild metric in (t, r, theta, phi); valid for r > 2m."""

    def g(x):
        r, th = x[..., 1], x[..., 2]
        a = 1.0 - 2.0 * mass / r
        s = np.sin(th)
        return J.matrix([[-1.0 * a, 0.0, 0.0, 0.0],
                         [0.0, 1.0 / a, 0.0, 0.0],
                         [0.0, 0.0, r * r, 0.0],
                         [0.0, 0.0, 0.0, r * r * s * s]], like=x)

    return MetricField(g, 4, 1, name="schwarzschild")


def polynomial_metric(n: int, index: int = 1, seed: int = 0, scale: float = 0.05,
                      base=None) -> MetricField:
    """Quadratic perturbation of the flat metric of the given index.

    ``g_ij(x) = eta_ij + scale * (A_ij + B_ijk x_k + C_ijkl x_k x_l)`` with
    symmetric random coefficients.  For ``scale`` small the signature is kept on
    the cube ``[-2, 2]^n``.  ``base`` optionally replaces ``eta`` by another
    metric field.
    """
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (n, n))
    B = rng.uniform(-1, 1, (n, n, n))
    C = rng.uniform(-1, 1, (n, n, n, n)) * 0.25
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.transpose(1, 0, 2))
    C = 0.5 * (C + C.transpose(1, 0, 2, 3))
    eta = np.diag([-1.0] * index + [1.0] * (n - index))

    pairs = [(k, l) for k in range(n) for l in range(k, n)]
    coef = np.concatenate([A[..., None], B,
                           np.stack([C[..., k, l] + (C[..., l, k] if l != k else 0.0) for k, l in pairs],
                                    axis=-1)], axis=-1) * scale

    def g(x):
        mono = J.vector([1.0] + [x[..., k] for k in range(n)]
                        + [x[..., k] * x[..., l] for k, l in pairs], like=x)
        pert = (mono[..., None, None, :] * coef).sum(-1)
        if base is None:
            return pert + eta
        return pert + base.func(x)

    return MetricField(g, n, index, name=f"poly{n}[{seed}]")


def coordinate_frame_fields(n: int) -> list[VectorField]:
    return [VectorField.coordinate(i, n) for i in range(n)]
