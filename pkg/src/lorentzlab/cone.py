"""Deterministic samples of the causal cone slice ``v0 = 1``."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.special import erfinv
from scipy.stats import qmc


def _sobol(d: int, count: int, seed: int) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # balance warning for non powers of two
        return qmc.Sobol(d=d, scramble=True, seed=seed).random(count)


def sphere_directions(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Unit vectors in R^dim from a scrambled Sobol sequence, plus the +-axes."""
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    if dim == 1:
        return axes
    u = _sobol(dim, count, seed)
    z = np.sqrt(2.0) * erfinv(np.clip(2 * u - 1, -1 + 1e-15, 1 - 1e-15))
    z /= np.linalg.norm(z, axis=-1, keepdims=True)
    return np.vstack([axes, z])


def ball_points(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Points of the open unit ball (uniform in volume), including the origin."""
    u = _sobol(dim + 1, count, seed + 7919)
    z = np.sqrt(2.0) * erfinv(np.clip(2 * u[:, 1:] - 1, -1 + 1e-15, 1 - 1e-15))
    z /= np.linalg.norm(z, axis=-1, keepdims=True)
    r = u[:, :1] ** (1.0 / dim) * (1 - 1e-12)
    return np.vstack([np.zeros(dim), r * z])


def cone_slice(spatial_dim: int, n_sphere: int = 2048, n_interior: int = 512, seed: int = 0,
               boundary: bool = True, interior: bool = True) -> np.ndarray:
    """Vectors ``(1, s)`` with ``|s| = 1`` (boundary) and ``|s| < 1`` (interior)."""
    parts = []
    if boundary:
        parts.append(sphere_directions(spatial_dim, n_sphere, seed))
    if interior:
        parts.append(ball_points(spatial_dim, n_interior, seed))
    s = np.vstack(parts)
    return np.hstack([np.ones((len(s), 1)), s])
