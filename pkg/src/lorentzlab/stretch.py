"""Switching and stretching a metric along a timelike distribution.

For ``TM = V (+) H`` with ``H = perp_g V`` write ``g = (-g_V) (+) g_H`` where
``g_V = -g|_V`` is Riemannian.  Then

* ``switch(g, V) = g_V (+) g_H`` (Riemannian),
* ``stretch(g, f, V) = (-f^-2 g_V) (+) g_H``.

The map ``u -> f u_V + u_H`` is an isometry from ``g`` to the stretched metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from . import jet as J
from .cone import cone_slice
from .curvature import Frame, curvature, frame_tensor
from .distributions import Distribution, _BasisField, bracket_table, graph_matrix, orthogonal_complement
from .errors import ContractError, UnsupportedIndexError
from .fields import DerivedMetric, MetricField, ScalarField, derived_vector

SKEW_TOL = 1e-10


@dataclass
class StretchSpec:
    g: MetricField
    V: Distribution
    f: ScalarField

    def check(self, x) -> None:
        Vb = self.V.basis(x)
        M = np.einsum("...ai,...ab,...bj->...ij", Vb, self.g(x), Vb)
        if np.any(np.linalg.eigvalsh(M)[..., -1] >= 0):
            raise ContractError("V must be timelike")
        if np.any(self.f(x) <= 0):
            raise ContractError("the stretch function must be positive")


def _v_projector_form(G, B):
    """``G B (B^T G B)^-1 B^T G`` which equals ``P_V^T G P_V``."""
    GB = J.matmul(G, B)
    M = J.matmul(J.transpose(B), GB)
    return J.matmul(GB, J.matmul(J.inv(M), J.transpose(GB)))


def switch(spec: StretchSpec, x) -> np.ndarray:
    """Matrix of ``g_V (+) g_H`` at ``x``."""
    G = spec.g(x)
    return G - 2 * _v_projector_form(G, spec.V.basis(x))


def stretch(spec: StretchSpec) -> MetricField:
    """The stretched metric as a field (derivatives through jets)."""
    g = spec.g

    def fn(G, B, f, x):
        s = 1.0 / (f * f) - 1.0
        return G + s[..., None, None] * _v_projector_form(G, B)

    return DerivedMetric(g.n, g.index, fn, [g, _BasisField(spec.V), spec.f], name=f"stretch({g.name})")


def bar(spec: StretchSpec, x, u) -> np.ndarray:
    """``f u_V + u_H`` at ``x``."""
    G = spec.g(x)
    B = spec.V.basis(x)
    u = np.asarray(u, dtype=float)
    M = B.T @ G @ B
    uV = B @ np.linalg.solve(M, B.T @ G @ u)
    return float(spec.f(x)) * uV + (u - uV)


def bar_frame(frame: Frame, f: ScalarField, q: int) -> Frame:
    """Frame ``(f e_1, ..., f e_q, e_{q+1}, ...)``, orthonormal for the stretched metric."""
    n = frame.n
    fields = [derived_vector(lambda e, fv, y: fv[..., None] * e, [frame.fields[i], f], n) if i < q
              else frame.fields[i] for i in range(n)]
    return Frame(fields, frame.signs)


# stretched Christoffel table --------------------------------------------------------

def stretched_christoffel_table(Gam: np.ndarray, f_value: float, df_in_frame, split) -> np.ndarray:
    """Frame Christoffel symbols of the stretched metric.

    ``Gam[k, i, j] = g(nabla_{e_i} e_j, e_k)`` in a g-orthonormal frame adapted
    to ``V (+) H``; ``split[i]`` is True for ``e_i`` in ``V``.  The result is
    taken in the frame with ``e_i`` replaced by ``f e_i`` for ``e_i`` in ``V``.
    ``df_in_frame[j] = df(e_j)``.
    """
    Gam = np.asarray(Gam, dtype=float)
    isV = np.asarray(split, dtype=bool)
    df = np.asarray(df_in_frame, dtype=float)
    eps = np.where(isV, -1.0, 1.0)
    f = float(f_value)
    n = len(isV)
    out = np.empty((n, n, n))
    G = lambda k, i, j: Gam[k, i, j]  # noqa: E731
    for i in range(n):
        for j in range(n):
            for k in range(n):
                vi, vj, vk = isV[i], isV[j], isV[k]
                if not vi and not vj and not vk:
                    val = G(k, i, j)
                elif not vi and not vj and vk:
                    val = 0.5 * ((G(k, i, j) - G(k, j, i)) / f + f * (G(k, i, j) + G(k, j, i)))
                elif not vi and vj and not vk:
                    val = -0.5 * ((G(j, i, k) - G(j, k, i)) / f + f * (G(j, i, k) + G(j, k, i)))
                elif vi and not vj and not vk:
                    val = f * G(k, i, j) + 0.5 * (1 / f - f) * (G(i, k, j) - G(i, j, k))
                elif not vi and vj and vk:
                    val = G(k, i, j) - 0.5 * (1 - f * f) * (G(i, k, j) - G(i, j, k))
                elif vi and not vj and vk:
                    val = (-0.5 * ((G(j, i, k) + G(j, k, i)) + f * f * (G(j, i, k) - G(j, k, i)))
                           - eps[k] * (i == k) / f * df[j])
                elif vi and vj and not vk:
                    val = (0.5 * ((G(k, i, j) + G(k, j, i)) + f * f * (G(k, i, j) - G(k, j, i)))
                           + eps[j] * (i == j) / f * df[k])
                else:
                    val = f * G(k, i, j) - eps[i] * (i == k) * df[j] + eps[i] * (i == j) * df[k]
                out[k, i, j] = val
    return out


# adapted frames and the b / beta tensors ---------------------------------------------

@dataclass
class AdaptedFrame:
    """Pointwise g-orthonormal basis, rows ``E[i]``, with ``V`` first."""

    E: np.ndarray
    signs: np.ndarray
    q: int
    H_coeffs: np.ndarray  # H-vectors as combinations of the spanning fields of H


def adapted_frame(g: MetricField, H: Distribution, x) -> AdaptedFrame:
    """Orthonormal basis at ``x``: a basis of ``perp H`` followed by one of ``H``.

    ``H`` must be spacelike.
    """
    G = g(x)
    Hb = H.basis(x)
    gram = Hb.T @ G @ Hb
    ev = np.linalg.eigvalsh(gram)
    if ev[0] <= 0:
        raise ContractError("H must be spacelike")
    L = np.linalg.cholesky(gram)
    C = np.linalg.inv(L).T  # columns: coefficients of an orthonormal basis of H
    EH = (Hb @ C).T
    Vb = orthogonal_complement(g, Hb, x)
    gv = Vb.T @ G @ Vb
    w, U = np.linalg.eigh(gv)
    EV = (Vb @ U / np.sqrt(np.abs(w))).T
    q = EV.shape[0]
    return AdaptedFrame(np.vstack([EV, EH]), np.array([-1.0] * q + [1.0] * EH.shape[0]), q, C.T)


@dataclass
class BBeta:
    frame: AdaptedFrame
    A: np.ndarray       # A[a, b] = g([e_a, e_b], e_0) for e_a, e_b in H
    b: np.ndarray       # in the adapted frame
    beta: np.ndarray
    trace_b: float

    @property
    def lam_sq(self) -> float:
        """``|lambda|^2 = sum_i lambda_i^2 = |A|_F^2 / 2``."""
        return 0.5 * float(np.sum(self.A**2))


def b_beta(g: MetricField, H: Distribution, x) -> BBeta:
    """The tensors ``b`` and ``beta = b - tr_g(b) g / 2`` of a spacelike hyperplane field."""
    x = np.asarray(x, dtype=float)
    if H.n - H.rank != 1:
        raise UnsupportedIndexError("b and beta are implemented for codimension one (q = 1) only")
    fr = adapted_frame(g, H, x)
    G = g(x)
    br = bracket_table(H, x)                                   # [i, j, :]
    brE = np.einsum("ai,bj,ijc->abc", fr.H_coeffs, fr.H_coeffs, br)  # brackets of the frame extensions
    A = np.einsum("abc,cd,d->ab", brE, G, fr.E[0])
    n = H.n
    b = np.zeros((n, n))
    b[0, 0] = np.sum(A**2)
    b[1:, 1:] = 2 * A @ A.T
    tr = float(np.sum(fr.signs * np.diag(b)))
    beta = b - 0.5 * tr * np.diag(fr.signs)
    return BBeta(fr, A, b, beta, tr)


def skew_normal_form(A) -> tuple[np.ndarray, np.ndarray]:
    """Normal form of a skew matrix.

    Returns ``(lam, P)`` with ``lam`` sorted descending (all >= 0) and ``P``
    orthogonal with rows ``(u_1..u_r, v_1..v_r, [w])`` such that
    ``P.T @ N @ P = A`` where ``N[i, r + i] = lam_i = -N[r + i, i]``.
    """
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A + A.T), initial=0.0) >= SKEW_TOL:
        raise ContractError("matrix is not skew-symmetric")
    m = A.shape[0]
    T, Z = schur(A, output="real")
    pairs, zeros = [], []
    i = 0
    while i < m:
        if i + 1 < m and abs(T[i + 1, i]) > 1e-14 * max(1.0, np.abs(T).max()):
            a = T[i, i + 1]
            u, v = Z[:, i], Z[:, i + 1]
            pairs.append((a, u, v) if a >= 0 else (-a, v, u))
            i += 2
        else:
            zeros.append(Z[:, i])
            i += 1
    while len(zeros) >= 2:
        pairs.append((0.0, zeros.pop(0), zeros.pop(0)))
    pairs.sort(key=lambda p: -p[0])
    rows = [p[1] for p in pairs] + [p[2] for p in pairs] + zeros
    lam = np.array([p[0] for p in pairs])
    return lam, np.array(rows).reshape(m, m) if m else np.zeros((0, 0))


def normal_block(lam: np.ndarray, m: int) -> np.ndarray:
    r = len(lam)
    N = np.zeros((m, m))
    for i, l in enumerate(lam):
        N[i, r + i] = l
        N[r + i, i] = -l
    return N


# niceness ----------------------------------------------------------------------------

@dataclass
class NicenessPoint:
    point: np.ndarray
    lam: np.ndarray
    lam_sq: float
    c_weak: float
    c_semidom: float
    c_causal: float
    slack_b_lower: float      # min b(v,v) - |lambda|^2
    slack_beta_b: float       # min beta(v,v) - b(v,v)
    slack_momentum: float     # min -g(#beta v, #beta v) - 8 |lambda|^4 v0^2
    identity_b00: float       # b(e0,e0) - 2 |lambda|^2
    identity_trace: float     # tr_g b - 2 |lambda|^2


@dataclass
class NicenessCertificate:
    points: list = field(default_factory=list)

    @property
    def c_weak(self) -> float:
        return min(p.c_weak for p in self.points)

    @property
    def c_semidom(self) -> float:
        return min(p.c_semidom for p in self.points)

    @property
    def c_causal(self) -> float:
        return min(p.c_causal for p in self.points)

    def nice(self, tol: float = 1e-12) -> dict:
        return {"weak": self.c_weak > tol, "semi-dominant": self.c_semidom > tol, "causal": self.c_causal > tol}


def niceness_certificate(g: MetricField, H: Distribution, samples, trials: int = 1000,
                         seed: int = 0) -> NicenessCertificate:
    """Sample the niceness inequalities at each point of ``samples``.

    Causal test vectors are drawn on the slice ``v0 = 1`` of the cone in the
    adapted frame (boundary and interior) and rescaled to unit switch norm,
    which in the adapted frame is the Euclidean norm of the components.
    """
    cert = NicenessCertificate()
    for x in np.atleast_2d(np.asarray(samples, dtype=float)):
        bb = b_beta(g, H, x)
        n = g.n
        vs = cone_slice(n - 1, max(trials // 2, 1), max(trials - trials // 2, 1), seed)
        vs = vs / np.linalg.norm(vs, axis=-1, keepdims=True)
        eps = bb.frame.signs
        bvv = np.einsum("mi,ij,mj->m", vs, bb.b, vs)
        betavv = np.einsum("mi,ij,mj->m", vs, bb.beta, vs)
        bv = vs @ bb.beta.T
        mom = -np.einsum("i,mi,mi->m", eps, bv, bv)
        lam, _ = skew_normal_form(bb.A)
        l2 = bb.lam_sq
        cert.points.append(NicenessPoint(
            x, lam, l2,
            float(np.min(betavv)), float(np.min(mom)), float(np.min(bvv)),
            float(np.min(bvv - l2)), float(np.min(betavv - bvv)),
            float(np.min(mom - 8 * l2**2 * vs[:, 0] ** 2)),
            float(bb.b[0, 0] - 2 * l2), float(bb.trace_b - 2 * l2)))
    return cert


# Ricci asymptotics ----------------------------------------------------------------

@dataclass
class AsymptoticsReport:
    eps: np.ndarray
    r_HH: np.ndarray
    r_VV: np.ndarray
    r_mix: np.ndarray
    scaled: list          # eps^2 Ric(bar e_i, bar e_j) per eps
    quarter_b: np.ndarray
    C0: float
    C1: float
    C: float
    exponents: dict
    bounded: dict


def _fit_exponent(eps: np.ndarray, r: np.ndarray) -> float:
    r = np.maximum(np.abs(r), 1e-300)
    if np.max(r * eps**2) < 1e-9:
        return 0.0  # at round-off level relative to the leading eps^-2 terms
    return float(np.polyfit(np.log(eps), np.log(r), 1)[0])


def ricci_asymptotics(g: MetricField, H: Distribution, x, eps_list=(0.1, 0.05, 0.02, 0.01),
                      V: Distribution | None = None) -> AsymptoticsReport:
    """Compare the Ricci tensor of ``stretch(g, eps, V)`` with ``b / (4 eps^2)``.

    ``V`` defaults to the orthogonal complement of ``H``.  The residuals are
    maxima over adapted frame pairs; boundedness is judged by the fitted power
    of eps (a blow-up shows as an exponent <= -1).
    """
    from .distributions import orthogonal_distribution

    x = np.asarray(x, dtype=float)
    if V is None:
        V = orthogonal_distribution(g, H, x)
    bb = b_beta(g, H, x)
    E = bb.frame.E
    q = bb.frame.q
    eps_arr = np.asarray(eps_list, dtype=float)
    rHH, rVV, rmix, scaled = [], [], [], []
    for e in eps_arr:
        spec = StretchSpec(g, V, ScalarField.constant(float(e), g.n))
        gb = stretch(spec)
        Ric = curvature(gb, x).ricci
        Eb = E.copy()
        Eb[:q] *= e
        R = frame_tensor(Ric, Eb)
        D = R - bb.b / (4 * e * e)
        rHH.append(np.max(np.abs(D[q:, q:])))
        rVV.append(np.max(np.abs(D[:q, :q])))
        rmix.append(np.max(np.abs(R[:q, q:])))
        scaled.append(e * e * R)
    rHH, rVV, rmix = map(np.array, (rHH, rVV, rmix))
    ex = {"HH": _fit_exponent(eps_arr, rHH), "VV": _fit_exponent(eps_arr, rVV),
          "mix_scaled": _fit_exponent(eps_arr, eps_arr * rmix)}
    bounded = {k: v > -0.5 for k, v in ex.items()}
    return AsymptoticsReport(eps_arr, rHH, rVV, rmix, scaled, bb.b / 4, float(rHH.max()), float(rVV.max()),
                             float((eps_arr * rmix).max()), ex, bounded)


# key lemma ------------------------------------------------------------------------

@dataclass
class KeyLemmaResult:
    nontimelike: bool
    operator_norm: float
    bound: float
    slack: float
    witness: np.ndarray | None


def key_lemma_bound(g: MetricField, V, H, f_value: float, P, x) -> KeyLemmaResult:
    """Check ``|lambda[P](w)|_{g_V} <= f |w|_{g_H}`` for a plane ``P`` transversal to ``V``.

    ``P`` (columns) must contain no timelike vector of ``(-f^-2 g_V) (+) g_H``;
    otherwise such a vector is returned as the witness and no bound is claimed.
    """
    x = np.asarray(x, dtype=float)
    G = g(x)
    Vb = V.basis(x) if isinstance(V, Distribution) else np.asarray(V, dtype=float)
    Hb = H.basis(x) if isinstance(H, Distribution) else np.asarray(H, dtype=float)
    Pb = np.asarray(P, dtype=float)
    lam, _, _ = graph_matrix(Pb, Hb, Vb)
    gV = -(Vb.T @ G @ Vb)
    gH = Hb.T @ G @ Hb
    Q = gH - lam.T @ gV @ lam / f_value**2
    Lh = np.linalg.cholesky(gH)
    Li = np.linalg.inv(Lh)
    ev, U = np.linalg.eigh(Li @ Q @ Li.T)
    M = Li @ lam.T @ gV @ lam @ Li.T
    opnorm = float(np.sqrt(max(np.linalg.eigvalsh(M)[-1], 0.0)))
    if ev[0] < 0:
        w = Li.T @ U[:, 0]
        wit = Hb @ w + Vb @ (lam @ w)
        return KeyLemmaResult(False, opnorm, f_value, f_value - opnorm, wit)
    return KeyLemmaResult(True, opnorm, f_value, f_value - opnorm, None)
