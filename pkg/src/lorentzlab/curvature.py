"""Connection and curvature of a metric field.

Index conventions (coordinate and frame alike):

* ``Gamma[..., k, i, j]`` is the Christoffel symbol with upper index ``k``.
  For an orthonormal frame the entry is ``g(nabla_{e_i} e_j, e_k)``.
* ``R[..., i, j, k, l] = g(R(d_i, d_j) d_k, d_l)`` with
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``.
* ``Ric[j, k] = sum_i R^i_{ijk}`` which is positive on round spheres.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jet as J
from .errors import BlowUpError, ContractError, DegeneracyError
from .fields import DerivedField, MetricField, ScalarField, VectorField, jacobian

ORTHONORMAL_TOL = 1e-10
CAUSAL_BAND = 1e-10


@dataclass
class ChristoffelTable:
    entries: np.ndarray
    flavor: str  # "coordinate" or "orthonormal"
    signs: np.ndarray | None = None


@dataclass
class Frame:
    """A local frame ``(e_0, ..., e_{n-1})`` with signs ``g(e_i, e_i)``."""

    fields: Sequence[VectorField]
    signs: np.ndarray

    def __post_init__(self):
        self.signs = np.asarray(self.signs, dtype=float)
        if len(self.fields) != len(self.signs):
            raise ContractError("frame needs one sign per vector")

    @property
    def n(self) -> int:
        return len(self.fields)

    def vectors(self, x) -> np.ndarray:
        """Array ``E[..., i, a]``: component ``a`` of ``e_i``."""
        return np.stack([f(x) for f in self.fields], axis=-2)

    def gram(self, g: MetricField, x) -> np.ndarray:
        E = self.vectors(x)
        return np.einsum("...ia,...ab,...jb->...ij", E, g(x), E)

    def check(self, g: MetricField, x, tol: float = ORTHONORMAL_TOL) -> None:
        dev = self.gram(g, x) - np.diag(self.signs)
        if np.max(np.abs(dev)) > tol:
            raise ContractError(f"frame is not orthonormal (deviation {np.max(np.abs(dev)):.3e})")


def _gram_schmidt(G, n: int):
    """Orthonormalise the coordinate basis for ``G`` (arrays or jets alike)."""
    vecs, signs = [], []
    for m in range(n):
        e = np.zeros(n)
        e[m] = 1.0
        u = 0.0 * G[..., 0, :] + e
        for w, s in zip(vecs, signs):
            coef = (w * (G * u[..., None, :]).sum(-1)).sum(-1) * s
            u = u - coef[..., None] * w
        nrm = (u * (G * u[..., None, :]).sum(-1)).sum(-1)
        s = float(np.sign(np.ravel(J.value(nrm))[0]))
        vecs.append(u / np.sqrt(s * nrm)[..., None])
        signs.append(s)
    return vecs, signs


def gram_schmidt_frame(g: MetricField, x_ref) -> Frame:
    """Orthonormal frame field from Gram-Schmidt on ``d_0, ..., d_{n-1}``.

    Signs are read off at ``x_ref`` and must stay constant on the region used.
    """
    n = g.n
    _, signs = _gram_schmidt(g(x_ref), n)
    fields = [DerivedField("vector", n, lambda G, x, i=i: _gram_schmidt(G, n)[0][i], [g], name=f"gs{i}")
              for i in range(n)]
    return Frame(fields, signs)


# metric data -----------------------------------------------------------------

def metric_jet(g: MetricField, x, order: int = 2):
    """``(G, dG, d2G)`` with derivative indices last; ``d2G`` is None for order 1."""
    jt = g.jet(x, order)
    d2 = None if jt.hess is None else J.derivative_last(jt.hess, 2)
    return jt.val, J.derivative_last(jt.grad), d2


def inverse_metric(G: np.ndarray, cond_max: float = 1e12) -> np.ndarray:
    cond = np.linalg.cond(G)
    if np.any(~np.isfinite(cond)) or np.any(cond > cond_max):
        raise DegeneracyError("metric is degenerate or too ill-conditioned to invert")
    return np.linalg.inv(G)


def _gamma_lower(dG: np.ndarray) -> np.ndarray:
    # Gamma_{m i j} = 1/2 (d_i g_jm + d_j g_im - d_m g_ij), dG[..., a, b, c] = d_c g_ab
    return 0.5 * (np.einsum("...jmi->...mij", dG) + np.einsum("...imj->...mij", dG)
                  - np.einsum("...ijm->...mij", dG))


def _christoffel_parts(g: MetricField, x, order: int):
    G, dG, d2G = metric_jet(g, x, order)
    Gi = inverse_metric(G)
    low = _gamma_lower(dG)
    Gam = np.einsum("...km,...mij->...kij", Gi, low)
    return G, Gi, dG, d2G, low, Gam


def christoffel_coordinates(g: MetricField, x) -> ChristoffelTable:
    _, _, _, _, _, Gam = _christoffel_parts(g, x, 1)
    return ChristoffelTable(Gam, "coordinate")


def christoffel_derivative(g: MetricField, x):
    """``(Gamma, dGamma)`` with ``dGamma[..., k, i, j, a] = d_a Gamma^k_ij``."""
    _, _, Gam, dGam = _second_order(g, x)
    return Gam, dGam


def _second_order(g: MetricField, x):
    G, Gi, dG, d2G, low, Gam = _christoffel_parts(g, x, 2)
    dGi = -np.einsum("...kp,...pqa,...qm->...kma", Gi, dG, Gi)
    dlow = 0.5 * (np.einsum("...jmia->...mija", d2G) + np.einsum("...imja->...mija", d2G)
                  - np.einsum("...ijma->...mija", d2G))
    dGam = np.einsum("...kma,...mij->...kija", dGi, low) + np.einsum("...km,...mija->...kija", Gi, dlow)
    return G, Gi, Gam, dGam


def _riemann_up(Gam: np.ndarray, dGam: np.ndarray) -> np.ndarray:
    # R^m_{ijk} = d_i G^m_jk - d_j G^m_ik + G^p_jk G^m_ip - G^p_ik G^m_jp
    return (np.einsum("...mjki->...mijk", dGam) - np.einsum("...mikj->...mijk", dGam)
            + np.einsum("...pjk,...mip->...mijk", Gam, Gam)
            - np.einsum("...pik,...mjp->...mijk", Gam, Gam))


@dataclass
class CurvatureReport:
    point: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray


def curvature(g: MetricField, x) -> CurvatureReport:
    x = np.asarray(x, dtype=float)
    G, Gi, Gam, dGam = _second_order(g, x)
    Rup = _riemann_up(Gam, dGam)
    R = np.einsum("...lm,...mijk->...ijkl", G, Rup)
    Ric = np.einsum("...iijk->...jk", Rup)
    Ric = 0.5 * (Ric + np.swapaxes(Ric, -1, -2))
    scal = np.einsum("...jk,...jk->...", Gi, Ric)
    return CurvatureReport(x, G, Gi, Gam, R, Ric, scal)


def riemann(g: MetricField, x) -> np.ndarray:
    return curvature(g, x).riemann


def ricci(g: MetricField, x) -> np.ndarray:
    return curvature(g, x).ricci


def scalar_curv(g: MetricField, x) -> np.ndarray:
    return curvature(g, x).scalar


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (np.einsum("...il,...jk->...ijkl", h, k) + np.einsum("...jk,...il->...ijkl", h, k)
            - np.einsum("...ik,...jl->...ijkl", h, k) - np.einsum("...jl,...ik->...ijkl", h, k))


def weyl(g: MetricField, x) -> np.ndarray:
    n = g.n
    if n < 3:
        raise ContractError("the Weyl tensor needs dimension at least 3")
    rep = curvature(g, x)
    if n == 3:
        return np.zeros_like(rep.riemann)
    P = (rep.ricci - rep.scalar[..., None, None] / (2 * (n - 1)) * rep.metric) / (n - 2)
    return rep.riemann - kulkarni_nomizu(P, rep.metric)


def einstein(g: MetricField, x) -> np.ndarray:
    rep = curvature(g, x)
    return rep.ricci - 0.5 * rep.scalar[..., None, None] * rep.metric


def einstein_divergence(g: MetricField, x, step: float = 1e-3) -> np.ndarray:
    """``(div G)_b = g^{ac} nabla_c G_ab``.

    The Einstein tensor is exact (jet derivatives); its first derivatives are
    taken with a five-point central stencil, the only place third derivatives
    of the metric are needed.
    """
    x = np.asarray(x, dtype=float)
    n = g.n
    Gt = einstein(g, x)
    dGt = np.empty(Gt.shape + (n,))
    for c in range(n):
        e = np.zeros(n)
        e[c] = step
        dGt[..., c] = (-einstein(g, x + 2 * e) + 8 * einstein(g, x + e)
                       - 8 * einstein(g, x - e) + einstein(g, x - 2 * e)) / (12 * step)
    _, Gi, _, _, _, Gam = _christoffel_parts(g, x, 1)
    nab = (dGt - np.einsum("...dca,...db->...abc", Gam, Gt)
           - np.einsum("...dcb,...ad->...abc", Gam, Gt))
    return np.einsum("...ac,...abc->...b", Gi, nab)


def energy_momentum(g: MetricField, lam: float, x) -> np.ndarray:
    """``T = Ric - scal/2 g + Lambda g`` in coordinates."""
    rep = curvature(g, x)
    return rep.ricci - (0.5 * rep.scalar - lam)[..., None, None] * rep.metric


def sharp(g: MetricField, x, form) -> np.ndarray:
    """Vector metrically dual to the covector ``form``."""
    Gi = inverse_metric(g(x))
    return np.einsum("...ab,...b->...a", Gi, np.asarray(form, dtype=float))


def hessian(g: MetricField, f: ScalarField, x) -> np.ndarray:
    """Covariant Hessian ``d_i d_j f - Gamma^k_ij d_k f``."""
    jt = f.jet(x, 2)
    df = J.derivative_last(jt.grad)
    d2f = J.derivative_last(jt.hess, 2)
    Gam = christoffel_coordinates(g, x).entries
    return d2f - np.einsum("...kij,...k->...ij", Gam, df)


# frames ----------------------------------------------------------------------

def frame_christoffel_from_brackets(G: np.ndarray, E: np.ndarray, brackets: np.ndarray) -> np.ndarray:
    """Koszul formula for an orthonormal frame.

    ``brackets[..., i, j, :]`` holds ``[e_i, e_j]``.  Returns
    ``Gamma[k, i, j] = g(nabla_{e_i} e_j, e_k)`` via
    ``2 Gamma^k_ij = g([e_i,e_j],e_k) + g([e_k,e_i],e_j) + g([e_k,e_j],e_i)``.
    """
    B = np.einsum("...ija,...ab,...kb->...ijk", brackets, G, E)  # g([e_i,e_j], e_k)
    return 0.5 * (np.einsum("...ijk->...kij", B) + np.einsum("...kij->...kij", B)
                  + np.einsum("...kji->...kij", B))


def frame_brackets(frame: Frame, x) -> np.ndarray:
    n = frame.n
    vals, jacs = zip(*(jacobian(f, x) for f in frame.fields))
    out = np.empty(np.shape(vals[0])[:-1] + (n, n, np.shape(vals[0])[-1]))
    for i in range(n):
        for j in range(n):
            out[..., i, j, :] = (np.einsum("...b,...ab->...a", vals[i], jacs[j])
                                 - np.einsum("...b,...ab->...a", vals[j], jacs[i]))
    return out


def orthonormal_christoffel(g: MetricField, frame: Frame, x) -> ChristoffelTable:
    """Frame Christoffel symbols from brackets (Koszul formula)."""
    frame.check(g, x)
    G = g(x)
    E = frame.vectors(x)
    Gam = frame_christoffel_from_brackets(G, E, frame_brackets(frame, x))
    return ChristoffelTable(Gam, "orthonormal", frame.signs.copy())


def frame_christoffel_via_coordinates(g: MetricField, frame: Frame, x) -> ChristoffelTable:
    """Same symbols computed through coordinate Christoffels (independent route)."""
    frame.check(g, x)
    G = g(x)
    Gam = christoffel_coordinates(g, x).entries
    vals, jacs = zip(*(jacobian(f, x) for f in frame.fields))
    E = np.stack(vals, axis=-2)
    DE = np.stack(jacs, axis=-3)  # [..., j, b, a] = d_a e_j^b
    nab = (np.einsum("...ia,...jba->...ijb", E, DE)
           + np.einsum("...bac,...ia,...jc->...ijb", Gam, E, E))
    out = np.einsum("...ijb,...bc,...kc->...kij", nab, G, E)
    return ChristoffelTable(out, "orthonormal", frame.signs.copy())


def frame_tensor(T: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Components ``T(e_i, e_j)`` of a coordinate bilinear form."""
    return np.einsum("...ia,...ab,...jb->...ij", E, T, E)


def frame_ricci(g: MetricField, frame: Frame, x) -> np.ndarray:
    return frame_tensor(ricci(g, x), frame.vectors(x))


def frame_riemann_from_christoffel(Gam: np.ndarray, signs, dGam: np.ndarray | None = None) -> np.ndarray:
    """``Riem(e_i, e_j, e_k, e_l)`` from frame Christoffels.

    ``dGam[..., l, j, k, i]`` is ``e_i(Gamma^l_jk)``; pass None when the
    symbols are constant.
    """
    eps = np.asarray(signs, dtype=float)
    Ge = Gam * eps[:, None, None]  # weight the summed (upper) index
    quad = (np.einsum("...lim,...mjk->...ijkl", Gam, Ge) - np.einsum("...ljm,...mik->...ijkl", Gam, Ge)
            - np.einsum("...mij,...lmk->...ijkl", Ge, Gam) + np.einsum("...mji,...lmk->...ijkl", Ge, Gam))
    if dGam is None:
        return quad
    return quad + np.einsum("...ljki->...ijkl", dGam) - np.einsum("...likj->...ijkl", dGam)


def frame_ricci_from_christoffel(Gam: np.ndarray, signs, dGam: np.ndarray | None = None) -> np.ndarray:
    """``Ric(e_i, e_j) = sum_k eps_k Riem(e_i, e_k, e_k, e_j)``."""
    eps = np.asarray(signs, dtype=float)
    R = frame_riemann_from_christoffel(Gam, eps, dGam)
    return np.einsum("k,...ikkj->...ij", eps, R)


# causal character --------------------------------------------------------------

def switch_norm_sq(G: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Squared norm for ``|G|``, the switch of ``G`` along its negative eigenspace."""
    w, U = np.linalg.eigh(G)
    comp = np.einsum("...ab,...a->...b", U, v)
    return np.einsum("...b,...b->...", np.abs(w), comp * comp)


def causal_classify(g: MetricField, x, v, band: float = CAUSAL_BAND):
    """'timelike' | 'lightlike' | 'spacelike' | 'zero' with a relative lightlike band."""
    G = g(x)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return "zero"
    q = float(v @ G @ v)
    h = float(switch_norm_sq(G, v))
    if abs(q) <= band * h:
        return "lightlike"
    return "timelike" if q < 0 else "spacelike"


# geodesics ----------------------------------------------------------------------

@dataclass
class GeodesicPath:
    t: np.ndarray
    x: np.ndarray  # [step, ..., n]
    v: np.ndarray

    def norms(self, g: MetricField) -> np.ndarray:
        G = g(self.x)
        return np.einsum("...a,...ab,...b->...", self.v, G, self.v)


def geodesic_rhs(g: MetricField, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    Gam = christoffel_coordinates(g, x).entries
    return -np.einsum("...kij,...i,...j->...k", Gam, v, v)


def geodesic_integrate(g: MetricField, p, v, t_max: float, steps: int) -> GeodesicPath:
    """Classical RK4 for ``x'' = -Gamma(x)(x', x')``; ``p`` and ``v`` may be batched."""
    if steps < 1 or not t_max > 0:
        raise ContractError("need steps >= 1 and t_max > 0")
    x = np.array(p, dtype=float)
    u = np.array(v, dtype=float)
    h = t_max / steps
    xs = np.empty((steps + 1,) + x.shape)
    us = np.empty_like(xs)
    xs[0], us[0] = x, u
    for s in range(steps):
        try:
            k1x, k1u = u, geodesic_rhs(g, x, u)
            k2x = u + 0.5 * h * k1u
            k2u = geodesic_rhs(g, x + 0.5 * h * k1x, k2x)
            k3x = u + 0.5 * h * k2u
            k3u = geodesic_rhs(g, x + 0.5 * h * k2x, k3x)
            k4x = u + h * k3u
            k4u = geodesic_rhs(g, x + h * k3x, k4x)
        except (ArithmeticError, np.linalg.LinAlgError) as exc:
            raise BlowUpError(f"integration failed: {exc}", s * h) from exc
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            raise BlowUpError("state became non-finite", s * h)
        xs[s + 1], us[s + 1] = x, u
    return GeodesicPath(np.linspace(0.0, t_max, steps + 1), xs, us)

