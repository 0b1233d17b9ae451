"""The family g^c_n: a twisted Lorentzian metric with constant frame curvature.

``g^c_n = -c^2 (dx0 + x2 dx1)^2 + dx1^2 + dx2^2 + ... + dx_{n-1}^2`` with the
orthonormal frame ``e0 = d0 / c``, ``e1 = d1 - x2 d0``, ``e_i = d_i`` (i >= 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet as J
from .curvature import Frame
from .errors import ContractError
from .fields import MetricField, VectorField

LOOP_T = 700
ANGLE = 3.14
DAMP = 0.99


@dataclass(frozen=True)
class GcnParams:
    c: float = 1.0
    n: int = 3
    lam: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise ContractError("c must be positive")
        if self.n < 3:
            raise ContractError("n must be at least 3")


def gcn_metric(params: GcnParams) -> MetricField:
    c2, n = params.c**2, params.n

    def g(x):
        x2 = x[..., 2]
        rows = [[0.0] * n for _ in range(n)]
        rows[0][0] = -c2
        rows[0][1] = rows[1][0] = -c2 * x2
        rows[1][1] = 1.0 - c2 * x2 * x2
        for i in range(2, n):
            rows[i][i] = 1.0
        return J.matrix(rows, like=x)

    return MetricField(g, n, 1, name=f"g^{params.c}_{n}")


def gcn_frame(params: GcnParams) -> Frame:
    c, n = params.c, params.n

    def e1(x):
        comps = [0.0] * n
        comps[0] = -1.0 * x[..., 2]
        comps[1] = 1.0
        return J.vector(comps, like=x)

    fields = [VectorField.constant(np.eye(n)[0] / c, name="e0"), VectorField(e1, n, name="e1")]
    fields += [VectorField.coordinate(i, n) for i in range(2, n)]
    return Frame(fields, [-1.0] + [1.0] * (n - 1))


def gcn_coordinate_christoffel(params: GcnParams, x) -> np.ndarray:
    """Closed-form coordinate Christoffel symbols ``Gamma[..., k, i, j]``."""
    c2, n = params.c**2, params.n
    x = np.asarray(x, dtype=float)
    x2 = x[..., 2]
    out = np.zeros(x.shape[:-1] + (n, n, n))

    def put(k, i, j, v):
        out[..., k, i, j] = v
        out[..., k, j, i] = v

    put(2, 0, 1, c2 / 2)
    put(0, 0, 2, c2 / 2 * x2)
    put(1, 0, 2, -c2 / 2)
    put(2, 1, 1, c2 * x2)
    put(0, 1, 2, 0.5 * (1 + c2 * x2 * x2))
    put(1, 1, 2, -c2 / 2 * x2)
    return out


def gcn_orthonormal_christoffel(params: GcnParams) -> np.ndarray:
    """Constant frame symbols ``g(nabla_{e_i} e_j, e_k)`` stored as ``[k, i, j]``."""
    c, n = params.c, params.n
    G = np.zeros((n, n, n))
    G[2, 0, 1] = G[2, 1, 0] = G[0, 2, 1] = c / 2
    G[1, 0, 2] = G[0, 1, 2] = G[1, 2, 0] = -c / 2
    return G


@dataclass(frozen=True)
class GroundTruth:
    ricci_diag: np.ndarray
    scalar: float
    energy_diag: np.ndarray
    semi_dominant: bool


def gcn_ground_truth(params: GcnParams) -> GroundTruth:
    c2, n, lam = params.c**2, params.n, params.lam
    ric = np.zeros(n)
    ric[:3] = c2 / 2
    T = np.zeros(n)
    T[0] = 0.75 * c2 - lam
    T[1:3] = 0.25 * c2 + lam
    T[3:] = -0.25 * c2 + lam
    return GroundTruth(ric, c2 / 2, T, bool(c2 >= 4 * lam))


# isometry --------------------------------------------------------------------

def phi(c: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = np.full(x.shape[-1], c)
    s[0] = c * c
    return x * s


def phi_inv(c: float, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    s = np.full(y.shape[-1], 1.0 / c)
    s[0] = 1.0 / (c * c)
    return y * s


def gcn_isometry_check(c: float, n: int, x) -> float:
    """``max |g^c(x) - c^-2 phi_c^* g^1(x)|`` (should vanish)."""
    x = np.asarray(x, dtype=float)
    gc = gcn_metric(GcnParams(c, n))(x)
    g1 = gcn_metric(GcnParams(1.0, n))(phi(c, x))
    D = np.diag(phi(c, np.ones(n)))
    pull = np.einsum("ai,...ab,bj->...ij", D, g1, D) / c**2
    return float(np.max(np.abs(gc - pull)))


# geodesics -------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicSpec:
    p: tuple
    v: tuple


def geodesic_omega(c: float, p, v) -> float:
    return c * c * (v[0] + p[2] * v[1])


def _closed_form(c: float, p, v, t):
    c2 = c * c
    p0, p1, p2 = p[0], p[1], p[2]
    v0, v1, v2 = v[0], v[1], v[2]
    w = c2 * (v0 + p2 * v1)
    if w == 0.0:
        x0 = -0.5 * v1 * v2 * t * t - p2 * v1 * t + p0
        x1 = v1 * t + p1
        x2 = v2 * t + p2
    else:
        s, co = np.sin(w * t), np.cos(w * t)
        s2, c2t = np.sin(2 * w * t), np.cos(2 * w * t)
        x0 = (v1 * v2 / (2 * w * w) * c2t + (v2 * v2 - v1 * v1) / (4 * w * w) * s2
              - (p2 * w - v1) / (w * w) * (v1 * s - v2 * co)
              + (w / c2 - (v1 * v1 + v2 * v2) / (2 * w)) * t
              + (2 * p0 * w * w - 2 * p2 * v2 * w + v1 * v2) / (2 * w * w))
        x1 = (v1 * s - v2 * co + p1 * w + v2) / w
        x2 = (v2 * s + v1 * co + p2 * w - v1) / w
    comps = [x0, x1, x2] + [v[i] * t + p[i] for i in range(3, len(p))]
    return comps


@dataclass
class GeodesicSample:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray


def gcn_geodesic(params: GcnParams, p, v, t) -> GeodesicSample:
    """Closed-form geodesic through ``p`` with velocity ``v`` sampled at times ``t``.

    Velocity and acceleration come from jets in ``t``.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if p.shape != (params.n,) or v.shape != (params.n,):
        raise ContractError("p and v must be vectors of length n")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tj = J.Jet.variables(t[:, None], 2)[:, 0]
    out = J.vector(_closed_form(params.c, p, v, tj), like=tj.val[:, None])
    return GeodesicSample(t, out.val, out.grad[0], out.hess[0, 0])


@dataclass(frozen=True)
class ClosedVerdict:
    closed: bool
    omega: float
    period: float | None
    defect: float


def closed_geodesic_classify(params: GcnParams, p, v, tol: float = 1e-9) -> ClosedVerdict:
    """Closed iff ``2 c^2 (v0 + p2 v1)^2 = v1^2 + v2^2`` and the tail velocity vanishes."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    c2 = params.c**2
    w = geodesic_omega(params.c, p, v)
    # the condition is homogeneous in v: test it on v / |v|_max so tiny speeds neither
    # underflow nor slip under an absolute tolerance
    scale = float(np.max(np.abs(v[:3])))
    u = v / scale if scale > 0 else v
    lhs = 2 * c2 * (u[0] + p[2] * u[1]) ** 2
    rhs = u[1] ** 2 + u[2] ** 2
    defect = abs(lhs - rhs) / max(lhs, rhs) if max(lhs, rhs) > 0 else 0.0
    tail = float(np.max(np.abs(v[3:]))) if params.n > 3 else 0.0
    closed = w != 0.0 and defect <= tol and tail == 0.0
    period = 2 * math.pi / abs(w) if w != 0.0 else None
    return ClosedVerdict(bool(closed), float(w), period, float(defect))


def causal_defect(params: GcnParams, p, v) -> float:
    """``-c^2 (v0 + p2 v1)^2 + |v_spatial|^2``; causal iff this is <= 0."""
    return float(-params.c**2 * (v[0] + p[2] * v[1]) ** 2 + np.sum(np.asarray(v[1:]) ** 2))


# timelike loop in g^1_3 -------------------------------------------------------------

@dataclass
class Segment:
    name: str
    duration: float
    func: Callable

    def evaluate(self, t):
        """Positions, velocities at the parameter values ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tj = J.Jet.variables(t[:, None], 1)[:, 0]
        out = J.vector(self.func(tj), like=tj.val[:, None])
        return out.val, out.grad[0]


def loop_margin(x, v) -> np.ndarray:
    """``(v0 + x2 v1)^2 - v1^2 - v2^2``: positive iff timelike for g^1_3."""
    return (v[..., 0] + x[..., 2] * v[..., 1]) ** 2 - v[..., 1] ** 2 - v[..., 2] ** 2


@dataclass
class LoopValidation:
    join_position_errors: list
    join_velocity_errors: list
    min_margins: list
    start_velocity: np.ndarray
    end_velocity: np.ndarray
    start: np.ndarray
    end: np.ndarray

    @property
    def max_join_error(self) -> float:
        return max(self.join_position_errors + self.join_velocity_errors)

    @property
    def min_margin(self) -> float:
        return min(self.min_margins)


@dataclass
class TimelikeLoopPlan:
    p: float
    T: int
    T1: int
    S: float
    B0: float
    B1: float
    segments: list = field(default_factory=list)

    def samples(self, per_segment: int = 1000):
        """Yield ``(name, t, x, v)`` for each segment on a uniform grid."""
        for seg in self.segments:
            t = np.linspace(0.0, seg.duration, per_segment)
            x, v = seg.evaluate(t)
            yield seg.name, t, x, v

    def validate(self, per_segment: int = 1000) -> LoopValidation:
        pos_err, vel_err, margins = [], [], []
        for a, b in zip(self.segments[:-1], self.segments[1:]):
            xa, va = a.evaluate([a.duration])
            xb, vb = b.evaluate([0.0])
            pos_err.append(float(np.max(np.abs(xa - xb))))
            vel_err.append(float(np.max(np.abs(va - vb))))
        for _, _, x, v in self.samples(per_segment):
            margins.append(float(np.min(loop_margin(x, v))))
        x0, v0 = self.segments[0].evaluate([0.0])
        x1, v1 = self.segments[-1].evaluate([self.segments[-1].duration])
        return LoopValidation(pos_err, vel_err, margins, v0[0], v1[0], x0[0], x1[0])


def timelike_loop(p: float, T: int = LOOP_T) -> TimelikeLoopPlan:
    """Piecewise C^1 timelike path for g^1_3 from (p, 0, 0) to the origin.

    Start and end velocity are both (1, 0, 0), so the path can be chained with
    translates of itself (translation in x0 is an isometry).
    """
    a, k = ANGLE, DAMP
    sa, ca = math.sin(a), math.cos(a)
    if not 1 - k * (T + 1) < ca / sa:
        raise ContractError("T is too small for the turning segments to stay timelike")
    K = p + 2 * T + 6 + math.pi + 2 * sa - 2 * ca
    slope = ca + sa
    T1 = max(1, math.floor(K / -slope) + 1)
    while K + slope * T1 >= 0:
        T1 += 1
    S = -(K + slope * T1)
    B0 = p + T + 2 + 2 * sa + ca * T1
    B1 = 2 - 2 * ca + sa * T1
    X = k * (T + 1)
    segs = [
        Segment("w0", 1.0, lambda t: [p + t, 0.0 * t, k / 2 * t * t]),
        Segment("w1", float(T), lambda t: [p + 1 + t, 0.0 * t, k * (0.5 + t)]),
        Segment("w2", 1.0, lambda t: [p + T + 1 + t, 0.0 * t, k * (0.5 + T + t - 0.5 * t * t)]),
        Segment("w3", a, lambda t: [p + T + 2 + np.sin(t), 1 - np.cos(t), X + 0.0 * t]),
        Segment("w4", float(T1), lambda t: [p + T + 2 + sa + ca * t, 1 - ca + sa * t, X + 0.0 * t]),
        Segment("w5", a, lambda t: [B0 - np.sin(a - t), B1 - 1 + np.cos(a - t), X + 0.0 * t]),
        Segment("w6", 1.0, lambda t: [B0 + t, B1 + 0.0 * t, k * (T + 1 - 0.5 * t * t)]),
        Segment("w7", float(T), lambda t: [B0 + 1 + t, B1 + 0.0 * t, k * (T + 0.5 - t)]),
        Segment("w8", 1.0, lambda t: [B0 + 1 + T + t, B1 + 0.0 * t, k * (0.5 - t + 0.5 * t * t)]),
        Segment("w9", math.pi, lambda t: [B0 + 2 + T + t + 0.5 * B1 * (1 - np.cos(t)),
                                          0.5 * B1 * (np.cos(t) + 1), 0.0 * t]),
        Segment("w10", S, lambda t: [-S + t, 0.0 * t, 0.0 * t]),
    ]
    return TimelikeLoopPlan(p, T, T1, S, B0, B1, segs)


def closed_timelike_loop(p: float) -> list[tuple[TimelikeLoopPlan, float]]:
    """Closed C^1 timelike loop through (p, 0, 0) as plans with x0-offsets.

    The plan from ``p`` to the origin is followed by the plan from ``-p`` shifted
    by ``p``; for ``p = 0`` a single plan already closes.
    """
    if p == 0:
        return [(timelike_loop(0.0), 0.0)]
    return [(timelike_loop(p), 0.0), (timelike_loop(-p), p)]


def pull_back_loop(c: float, x, v):
    """Map a g^1_3 curve sample through phi_c^{-1}; returns positions, velocities, margins.

    The margin is ``-g^c(u, u)`` which is positive iff the mapped velocity is
    timelike for ``g^c_3``.
    """
    y = phi_inv(c, x)
    u = phi_inv(c, v)
    G = gcn_metric(GcnParams(c, 3))(y)
    margin = -np.einsum("...a,...ab,...b->...", u, G, u)
    return y, u, margin
