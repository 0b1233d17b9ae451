"""Leaves of hyperplane fields as graphs over a box, and their convergence.

Coordinates are split as ``x = (y, z)`` with the vertical part ``y`` in the
first ``q`` slots and the horizontal part ``z`` in the last ``p``.  A
distribution ``H`` transversal to ``span(d_y)`` is the graph of
``lambda[H] : span(d_z) -> span(d_y)``; its leaf through ``(z_c, t)`` is
``z -> f_t(z) = alpha(1)`` where ``alpha' = lambda[H](c + s z, alpha) z`` and
``alpha(0) = t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .distributions import Distribution, graph_matrix
from .errors import ContractError, DomainEscapeError

SAFETY = 1.1


@dataclass
class BoxDomain:
    center: np.ndarray
    q: int
    r_B: float
    r_J: float
    a: float
    C: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if not 0 < self.q < len(self.center):
            raise ContractError("need 0 < q < n")
        if not self.r_B * self.C < 1:
            raise ContractError("box violates r_B * C < 1")
        if not self.a * self.r_B < self.r_J:
            raise ContractError("box violates a * r_B < r_J")

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def p(self) -> int:
        return self.n - self.q

    @property
    def r_I(self) -> float:
        return self.r_J - self.a * self.r_B

    @property
    def y0(self) -> np.ndarray:
        return self.center[: self.q]

    @property
    def z0(self) -> np.ndarray:
        return self.center[self.q:]


def lambda_at(H: Distribution, q: int, pts: np.ndarray) -> np.ndarray:
    """``lambda[H]`` at a batch of points as matrices ``[..., q, p]``."""
    n = H.n
    eye = np.eye(n)
    W, V = eye[:, q:], eye[:, :q]
    Z = H.basis(pts, check=False)
    batch = Z.shape[:-2]
    lam, _, _ = graph_matrix(Z, np.broadcast_to(W, batch + W.shape), np.broadcast_to(V, batch + V.shape))
    return lam


def _cube_samples(box: BoxDomain, per_axis: int, radius_y: float) -> np.ndarray:
    axes = [np.linspace(-radius_y, radius_y, per_axis)] * box.q + [np.linspace(-box.r_B, box.r_B, per_axis)] * box.p
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.n)
    zpart = mesh[:, box.q:]
    mesh = mesh[np.linalg.norm(zpart, axis=-1) <= box.r_B * (1 + 1e-12)]
    return mesh + box.center


def sup_norm_difference(H1: Distribution, H2: Distribution | None, box: BoxDomain, per_axis: int = 21) -> float:
    """``sup ||lambda[H1] - lambda[H2]||`` (operator norm) over sampled B x J."""
    pts = _cube_samples(box, per_axis, box.r_J)
    d = lambda_at(H1, box.q, pts)
    if H2 is not None:
        d = d - lambda_at(H2, box.q, pts)
    return float(np.max(np.linalg.norm(d, ord=2, axis=(-2, -1))))


def estimate_lipschitz(H: Distribution, q: int, center, r_B: float, r_J: float, per_axis: int = 41) -> float:
    """Difference-quotient estimate of the vertical Lipschitz constant of ``lambda[H]``."""
    center = np.asarray(center, dtype=float)
    n = len(center)
    p = n - q
    zs = [np.linspace(-r_B, r_B, 9)] * p
    zmesh = np.stack(np.meshgrid(*zs, indexing="ij"), axis=-1).reshape(-1, p)
    ys = np.linspace(-r_J, r_J, per_axis)
    best = 0.0
    for axis in range(q):
        pts = np.zeros((len(zmesh), per_axis, n))
        pts[..., q:] = zmesh[:, None, :]
        pts[..., axis] = ys[None, :]
        lam = lambda_at(H, q, pts + center)
        dl = np.linalg.norm(np.diff(lam, axis=1), ord=2, axis=(-2, -1)) / (ys[1] - ys[0])
        best = max(best, float(dl.max()))
    return SAFETY * best


def make_box(family, H_lim: Distribution, center, q: int, r_B: float, r_J: float) -> BoxDomain:
    """Box with ``a`` the sampled sup of ``|lambda[H_k]|`` and ``C`` the inflated Lipschitz bound.

    ``r_B`` is halved until both box inequalities hold.
    """
    center = np.asarray(center, dtype=float)
    C = estimate_lipschitz(H_lim, q, center, r_B, r_J)
    for _ in range(40):
        probe = BoxDomain.__new__(BoxDomain)
        probe.center, probe.q, probe.r_B, probe.r_J, probe.a, probe.C = center, q, r_B, r_J, 0.0, 0.0
        a = max(sup_norm_difference(H, None, probe) for H in list(family) + [H_lim])
        if r_B * C < 1 and a * r_B < r_J:
            return BoxDomain(center, q, r_B, r_J, a, C)
        r_B /= 2
    raise ContractError("could not shrink the box to satisfy its invariants")


@dataclass
class LeafGraph:
    t: np.ndarray
    z: np.ndarray         # [grid..., p] offsets from the centre
    values: np.ndarray    # [grid..., q], NaN outside the ball
    mask: np.ndarray
    box: BoxDomain

    @property
    def spacing(self) -> float:
        return float(self.z.reshape(-1, self.box.p)[1, -1] - self.z.reshape(-1, self.box.p)[0, -1])

    def derivative(self) -> np.ndarray:
        """Grid central differences ``[grid..., q, p]`` (NaN where a neighbour is missing)."""
        p, q = self.box.p, self.box.q
        axes = [np.unique(self.z[..., j]) for j in range(p)]
        out = np.empty(self.values.shape[:-1] + (q, p))
        for j in range(p):
            out[..., j] = np.gradient(self.values, axes[j], axis=j, edge_order=2)
        return out


def leaf_values(H: Distribution, box: BoxDomain, t, z: np.ndarray, ode_steps: int = 256) -> np.ndarray:
    """``f_t(z)`` for a batch of horizontal offsets ``z`` (radial RK4)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if np.linalg.norm(t - box.y0) > box.r_I + 1e-12:
        raise ContractError("t must lie in I")
    m = len(z)
    alpha = np.tile(t, (m, 1))
    h = 1.0 / ode_steps
    q = box.q

    def rhs(s, al):
        pts = np.empty((m, box.n))
        pts[:, :q] = al
        pts[:, q:] = box.z0 + s * z
        return np.einsum("mij,mj->mi", lambda_at(H, q, pts), z)

    for k in range(ode_steps):
        s = k * h
        k1 = rhs(s, alpha)
        k2 = rhs(s + h / 2, alpha + h / 2 * k1)
        k3 = rhs(s + h / 2, alpha + h / 2 * k2)
        k4 = rhs(s + h, alpha + h * k3)
        alpha = alpha + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out = np.linalg.norm(alpha - box.y0, axis=-1) > box.r_J
        if np.any(out):
            i = int(np.argmax(out))
            raise DomainEscapeError("leaf left the vertical box J", np.r_[alpha[i], box.z0 + (s + h) * z[i]])
    return alpha


def integrate_leaf(H: Distribution, box: BoxDomain, t, grid: int = 41, ode_steps: int = 256) -> LeafGraph:
    """Leaf through ``(z0, t)`` sampled on a uniform grid of the ball ``|z| <= r_B``."""
    p = box.p
    ax = np.linspace(-box.r_B, box.r_B, grid)
    Z = np.stack(np.meshgrid(*([ax] * p), indexing="ij"), axis=-1)
    mask = np.linalg.norm(Z, axis=-1) <= box.r_B * (1 + 1e-12)
    vals = np.full(Z.shape[:-1] + (box.q,), np.nan)
    vals[mask] = leaf_values(H, box, t, Z[mask], ode_steps)
    return LeafGraph(np.atleast_1d(np.asarray(t, dtype=float)), Z, vals, mask, box)


def tangency_residual(H: Distribution, leaf: LeafGraph, ode_steps: int = 256, probes: int = 9,
                      h: float = 1e-4) -> float:
    """``max |Df_t(z) - lambda[H](z, f_t(z))|`` with Df from separate ODE solves at ``z +- h e_j``."""
    box = leaf.box
    zs = leaf.z[leaf.mask]
    idx = np.linspace(0, len(zs) - 1, probes).round().astype(int)
    zs = zs[idx] * (1 - 2 * h / box.r_B)
    f0 = leaf_values(H, box, leaf.t, zs, ode_steps)
    D = np.empty((len(zs), box.q, box.p))
    for j in range(box.p):
        e = np.zeros(box.p)
        e[j] = h
        D[..., j] = (leaf_values(H, box, leaf.t, zs + e, ode_steps)
                     - leaf_values(H, box, leaf.t, zs - e, ode_steps)) / (2 * h)
    pts = np.concatenate([f0, box.z0 + zs], axis=-1)
    return float(np.max(np.abs(D - lambda_at(H, box.q, pts))))


@dataclass
class CauchyCheck:
    lhs: float
    rhs: float
    passed: bool


def cauchy_bound_check(H_k: Distribution, H_l: Distribution, H_lim: Distribution, box: BoxDomain, t_samples,
                       grid: int = 41, ode_steps: int = 256, leaves: dict | None = None) -> CauchyCheck:
    """``sup |f^k_t - f^l_t| <= r_B / (1 - r_B C) (|lambda_k - lambda| + |lambda_l - lambda|)``."""
    leaves = leaves if leaves is not None else {}
    lhs = 0.0
    for t in np.atleast_1d(np.asarray(t_samples, dtype=float)).reshape(-1, box.q):
        fk = leaves.get((id(H_k), tuple(t))) or integrate_leaf(H_k, box, t, grid, ode_steps)
        fl = leaves.get((id(H_l), tuple(t))) or integrate_leaf(H_l, box, t, grid, ode_steps)
        lhs = max(lhs, float(np.nanmax(np.abs(fk.values - fl.values))))
    nk = sup_norm_difference(H_k, H_lim, box)
    nl = sup_norm_difference(H_l, H_lim, box)
    rhs = box.r_B / (1 - box.r_B * box.C) * (nk + nl)
    return CauchyCheck(lhs, rhs, bool(lhs <= rhs + 1e-8))


@dataclass
class ConvergenceReport:
    labels: list
    distance_to_limit: list            # sup_t sup_z |f^k_t - f_t|
    lambda_distance: list              # sup |lambda_k - lambda|
    c1_diagnostic: list                # sup |Df^k_t - lambda[H](z, f_t(z))|
    cauchy: dict = field(default_factory=dict)

    @property
    def all_cauchy_pass(self) -> bool:
        return all(c.passed for c in self.cauchy.values())

    @property
    def c1_decreasing(self) -> bool:
        d = self.c1_diagnostic
        return all(b < a for a, b in zip(d, d[1:]))


def convergence_sweep(family, labels, H_lim: Distribution, box: BoxDomain, t_samples, grid: int = 41,
                      ode_steps: int = 256) -> ConvergenceReport:
    ts = np.atleast_1d(np.asarray(t_samples, dtype=float)).reshape(-1, box.q)
    limit = {tuple(t): integrate_leaf(H_lim, box, t, grid, ode_steps) for t in ts}
    leaves = {}
    dist, lamd, c1 = [], [], []
    for H in family:
        d = c = 0.0
        for t in ts:
            lf = integrate_leaf(H, box, t, grid, ode_steps)
            leaves[(id(H), tuple(t))] = lf
            lim = limit[tuple(t)]
            d = max(d, float(np.nanmax(np.abs(lf.values - lim.values))))
            m = lim.mask
            pts = np.concatenate([lim.values[m], box.z0 + lim.z[m]], axis=-1)
            eta = lambda_at(H_lim, box.q, pts)
            c = max(c, float(np.nanmax(np.abs(lf.derivative()[m] - eta))))
        dist.append(d)
        c1.append(c)
        lamd.append(sup_norm_difference(H, H_lim, box))
    rep = ConvergenceReport(list(labels), dist, lamd, c1)
    for (i, Hk), (j, Hl) in combinations(enumerate(family), 2):
        rep.cauchy[(labels[i], labels[j])] = cauchy_bound_check(Hk, Hl, H_lim, box, ts, grid, ode_steps, leaves)
    return rep


def phi_family(k: float, n: int = 2) -> Distribution:
    """``ker(dx0 - sin(k x0) / k * (dx1 + ... + dx_{n-1}))`` (integrable)."""
    from . import jet as J

    def form(x):
        phi = np.sin(k * x[..., 0]) / k
        return J.vector([1.0] + [-1.0 * phi] * (n - 1), like=x)

    return Distribution.kernel(form, n, name=f"phi_{k}")


def slope_family(slope: float, n: int = 2) -> Distribution:
    """``ker(dx0 - slope dx1)``: leaves ``f_t(z) = t + slope z``."""
    from . import jet as J

    def form(x):
        return J.vector([1.0, -slope] + [0.0] * (n - 2), like=x)

    return Distribution.kernel(form, n, name=f"slope_{slope}")
