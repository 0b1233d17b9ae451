"""Distributions (subbundles given by spanning vector fields) and graph maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfinv
from scipy.stats import qmc

from . import jet as J
from .curvature import christoffel_coordinates
from .errors import ContractError, DegeneracyError, TransversalityError
from .fields import DerivedField, MetricField, ScalarField, VectorField, jacobian, lie_bracket, linear_combination

TRANSVERSALITY_COND = 1e12
INDEPENDENCE_TOL = 1e-10


class Distribution:
    """A distribution spanned pointwise by the given vector fields."""

    def __init__(self, fields: Sequence[VectorField], name: str | None = None):
        fields = list(fields)
        if not fields:
            raise ContractError("a distribution needs at least one spanning field")
        n = fields[0].n
        if any(f.n != n for f in fields):
            raise ContractError("spanning fields live on different spaces")
        self.fields = fields
        self.n = n
        self.name = name or "distribution"

    @property
    def rank(self) -> int:
        return len(self.fields)

    def basis(self, x, check: bool = True) -> np.ndarray:
        """Matrix ``[..., a, i]`` whose columns are the spanning vectors at ``x``."""
        B = np.stack([f(x) for f in self.fields], axis=-1)
        if check:
            s = np.linalg.svd(B, compute_uv=False)
            if np.any(s[..., -1] <= INDEPENDENCE_TOL * np.maximum(1.0, s[..., 0])):
                raise DegeneracyError(f"spanning fields of {self.name} are dependent at the point")
        return B

    def basis_jet(self, x, order: int = 1) -> J.Jet:
        return J.stack([f.jet(x, order) for f in self.fields], axis=-1)

    @classmethod
    def coordinate(cls, indices: Sequence[int], n: int) -> "Distribution":
        return cls([VectorField.coordinate(i, n) for i in indices], name=f"span d{list(indices)}")

    @classmethod
    def kernel(cls, form, n: int, pivot: int = 0, name: str | None = None) -> "Distribution":
        """Kernel of the 1-form ``form(x) -> (..., n)``, spanned by ``d_j - (w_j / w_p) d_p``.

        ``form`` is written with generic arithmetic; ``pivot`` must have a
        nonvanishing coefficient.
        """
        fields = []
        for j in range(n):
            if j == pivot:
                continue

            def f(x, j=j):
                w = form(x)
                comps = [0.0] * n
                comps[j] = 1.0
                comps[pivot] = -1.0 * w[..., j] / w[..., pivot]
                return J.vector(comps, like=x)

            fields.append(VectorField(f, n, name=f"ker_{j}"))
        return cls(fields, name=name or "kernel")


def _span_matrix(U, x) -> np.ndarray:
    if isinstance(U, Distribution):
        return U.basis(x)
    return np.asarray(U, dtype=float)


# graph maps -------------------------------------------------------------------

@dataclass
class GraphMap:
    """``lambda[Z] : W -> V`` with ``w + lambda(w)`` in ``Z``.

    ``matrix[..., :, j]`` holds the V-basis coefficients of ``lambda(w_j)``;
    ``vectors[..., :, j]`` the image vectors themselves.
    """

    matrix: np.ndarray
    vectors: np.ndarray
    condition: np.ndarray

    def apply(self, coeffs) -> np.ndarray:
        return np.einsum("...aj,...j->...a", self.vectors, np.asarray(coeffs, dtype=float))


def graph_matrix(Zb: np.ndarray, Wb: np.ndarray, Vb: np.ndarray, cond_max: float = TRANSVERSALITY_COND):
    """Batched core of :func:`graph_map` on basis matrices (columns are vectors)."""
    p = Zb.shape[-1]
    if Wb.shape[-1] != p or Zb.shape[-2] != p + Vb.shape[-1]:
        raise ContractError("ranks of Z, W and V do not fit together")
    M = np.concatenate([Zb, -Vb], axis=-1)
    cond = np.linalg.cond(M)
    if np.any(~np.isfinite(cond)) or np.any(cond > cond_max):
        raise TransversalityError("Z is not transversal to V at the point")
    sol = np.linalg.solve(M, Wb)
    lam = sol[..., p:, :]
    return lam, np.einsum("...ak,...kj->...aj", Vb, lam), cond


def graph_map(Z, W, V, x) -> GraphMap:
    """Graph map of ``Z`` over ``W`` along ``V`` at ``x``.

    Each argument is a :class:`Distribution` or a basis matrix with vectors as
    columns.  ``W`` and ``V`` must be complementary.
    """
    Zb, Wb, Vb = _span_matrix(Z, x), _span_matrix(W, x), _span_matrix(V, x)
    lam, vecs, cond = graph_matrix(Zb, Wb, Vb)
    return GraphMap(lam, vecs, cond)


# twistedness ------------------------------------------------------------------

def bracket_table(H: Distribution, x) -> np.ndarray:
    """``[h_i, h_j]`` at ``x`` as ``out[..., i, j, :]``."""
    vals, jacs = zip(*(jacobian(f, x) for f in H.fields))
    k = H.rank
    out = np.empty(np.shape(vals[0])[:-1] + (k, k, H.n))
    for i in range(k):
        for j in range(k):
            out[..., i, j, :] = (np.einsum("...b,...ab->...a", vals[i], jacs[j])
                                 - np.einsum("...b,...ab->...a", vals[j], jacs[i]))
    return out


@dataclass
class Twistedness:
    """``Tw(h_i, h_j)``: the C-part of ``[h_i, h_j]`` along H."""

    coefficients: np.ndarray  # [..., i, j, c] in the C basis
    vectors: np.ndarray       # [..., i, j, :]


def twistedness(H: Distribution, C, x) -> Twistedness:
    Hb = H.basis(x)
    Cb = _span_matrix(C, x)
    k = H.rank
    M = np.concatenate([Hb, Cb], axis=-1)
    if M.shape[-1] != M.shape[-2]:
        raise ContractError("H and C must have complementary ranks")
    cond = np.linalg.cond(M)
    if np.any(cond > TRANSVERSALITY_COND):
        raise TransversalityError("H and C are not complementary at the point")
    br = bracket_table(H, x)
    sol = np.linalg.solve(M[..., None, None, :, :], br[..., None])[..., 0]
    coeff = sol[..., k:]
    vec = np.einsum("...ac,...ijc->...ija", Cb, coeff)
    return Twistedness(coeff, vec)


def _coefficients_in(Ub: np.ndarray, u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    a, *_ = np.linalg.lstsq(Ub, u, rcond=None)
    if np.max(np.abs(Ub @ a - u)) > tol * max(1.0, float(np.max(np.abs(u)))):
        raise ContractError("vector does not lie in the distribution")
    return a


def extension(U: Distribution, x, u) -> DerivedField:
    """Section of ``U`` through ``u`` at ``x`` with constant coefficients."""
    if isinstance(u, VectorField) or (isinstance(u, DerivedField) and u.kind == "vector"):
        return u
    a = _coefficients_in(U.basis(x), np.asarray(u, dtype=float))
    return linear_combination(list(a), U.fields)


@dataclass
class TwSw:
    tw: float
    sw: float


def tw_sw_metric(g: MetricField, U: Distribution, x, u, v, w) -> TwSw:
    """``Tw = g([u, v], w)`` and ``Sw = g(nabla_u v, w) + g(nabla_v u, w)``.

    ``u`` and ``v`` are vectors in ``U_x`` (extended with constant coefficients)
    or sections of ``U``; ``w`` must be g-orthogonal to ``U_x``.  Both values are
    independent of the extensions.
    """
    x = np.asarray(x, dtype=float)
    G = g(x)
    w = np.asarray(w, dtype=float)
    Ub = U.basis(x)
    gw = Ub.T @ G @ w
    if np.max(np.abs(gw)) > 1e-10 * max(1.0, float(np.max(np.abs(G @ w)))):
        raise ContractError("w is not orthogonal to U at the point")
    uf, vf = extension(U, x, u), extension(U, x, v)
    uval, du = jacobian(uf, x)
    vval, dv = jacobian(vf, x)
    br = lie_bracket(uf, vf, x)
    Gam = christoffel_coordinates(g, x).entries
    nab_uv = dv @ uval + np.einsum("kij,i,j->k", Gam, uval, vval)
    nab_vu = du @ vval + np.einsum("kij,i,j->k", Gam, vval, uval)
    return TwSw(float(br @ G @ w), float((nab_uv + nab_vu) @ G @ w))


# orthogonal complements -------------------------------------------------------

def orthogonal_complement(g: MetricField, H, x, tol: float = 1e-10) -> np.ndarray:
    """Basis (columns) of the g-orthogonal complement of ``H_x``."""
    G = g(x)
    Hb = _span_matrix(H, x)
    gram = Hb.T @ G @ Hb
    ev = np.linalg.eigvalsh(gram)
    if np.min(np.abs(ev)) <= tol * max(1.0, float(np.max(np.abs(ev)))):
        raise DegeneracyError("g restricted to the subspace is degenerate")
    _, s, Vt = np.linalg.svd(Hb.T @ G)
    return Vt[Hb.shape[1]:].T


def orthogonal_distribution(g: MetricField, H: Distribution, x_ref) -> Distribution:
    """``perp_g H`` as a distribution.

    Spanned by ``d_m - P_H d_m`` for the coordinate directions most transverse
    to ``H`` at ``x_ref``, where ``P_H`` is the g-orthogonal projection onto H.
    """
    n, k = H.n, H.rank
    Hb = H.basis(x_ref)
    # pick coordinate directions completing H to a basis, greedily
    chosen: list[int] = []
    cur = Hb
    for _ in range(n - k):
        best, best_s = None, -1.0
        for m in range(n):
            if m in chosen:
                continue
            s = np.linalg.svd(np.column_stack([cur, np.eye(n)[m]]), compute_uv=False)[-1]
            if s > best_s:
                best, best_s = m, s
        chosen.append(best)
        cur = np.column_stack([cur, np.eye(n)[best]])
    fields = []
    for m in chosen:
        def fn(G, B, x, m=m):
            GB = J.matmul(G, B)
            M = J.matmul(J.transpose(B), GB)
            col = J.matmul(B, J.matmul(J.inv(M), J.transpose(GB)))[..., :, m]
            e = np.zeros(n)
            e[m] = 1.0
            return -1.0 * col + e
        fields.append(DerivedField("vector", n, fn, [g, _BasisField(H)], name=f"perp_{m}"))
    return Distribution(fields, name=f"perp {H.name}")


class _BasisField(DerivedField):
    """The spanning matrix of a distribution viewed as a matrix-valued field."""

    def __init__(self, H: Distribution):
        super().__init__("vector", H.n, None, H.fields, name="basis")
        self.H = H

    def __call__(self, x):
        return self.H.basis(x, check=False)

    def jet(self, x, order: int = 1):
        return self.H.basis_jet(x, order)

    def with_mode(self, mode, fd_step=None):
        return _BasisField(Distribution([f.with_mode(mode, fd_step) for f in self.H.fields], self.H.name))


# local twisting ----------------------------------------------------------------

def _plateau(s):
    """Smooth function equal to 1 for s <= 1/4 and 0 for s >= 1."""
    sv = np.asarray(J.value(s), dtype=float)
    t = np.clip((sv - 0.25) / 0.75, 0.0, 1.0)

    def e(u):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        return out

    def de(u):
        with np.errstate(divide="ignore", invalid="ignore"):
            uu = np.where(u > 0, u, 1.0)
            return np.where(u > 0, e(u) / uu**2, 0.0)

    def d2e(u):
        with np.errstate(divide="ignore", invalid="ignore"):
            uu = np.where(u > 0, u, 1.0)
            return np.where(u > 0, e(u) * (1.0 / uu**4 - 2.0 / uu**3), 0.0)

    a, b = e(t), e(1 - t)
    da, db = de(t), -de(1 - t)
    d2a, d2b = d2e(t), d2e(1 - t)
    den = a + b
    st = a / den
    dst = (da * den - a * (da + db)) / den**2
    # second derivative of a / (a + b)
    dden, d2den = da + db, d2a + d2b
    d2st = (d2a * den - a * d2den) / den**2 - 2 * dden * (da * den - a * dden) / den**3
    inside = (sv > 0.25) & (sv < 1.0)
    k = 1.0 / 0.75
    f0 = 1.0 - st
    f1 = np.where(inside, -dst * k, 0.0)
    f2 = np.where(inside, -d2st * k * k, 0.0)
    return J.apply(s, f0, f1, f2)


def bump_field(center, direction, radius: float) -> ScalarField:
    """``beta(y) = <a, y - center> psi(|y - center|^2 / r^2)`` with ``<a, direction> = 1``."""
    center = np.asarray(center, dtype=float)
    direction = np.asarray(direction, dtype=float)
    a = direction / float(direction @ direction)
    n = len(center)

    def f(y):
        d = [y[..., i] - center[i] for i in range(n)]
        lin = sum(a[i] * d[i] for i in range(n))
        r2 = sum(d[i] * d[i] for i in range(n)) / radius**2
        return lin * _plateau(r2)

    return ScalarField(f, n, name="bump")


@dataclass
class TwistResult:
    distribution: Distribution
    bracket_before: np.ndarray
    bracket_after: np.ndarray
    twist: float
    transverse: VectorField
    bump: ScalarField
    spacelike_threshold: float
    spacelike: bool


def _spacelike_everywhere(g: MetricField, D: Distribution, pts: np.ndarray) -> bool:
    B = D.basis(pts, check=False)
    gram = np.einsum("...ai,...ab,...bj->...ij", B, g(pts), B)
    ev = np.linalg.eigvalsh(gram)
    return bool(np.all(ev[..., 0] > 0))


def twist_locally(g: MetricField, H: Distribution, x, c_twist: float, radius: float = 0.5,
                  samples: int = 64, seed: int = 0) -> TwistResult:
    """Replace ``e1`` by ``e1 - c beta e_n`` so that ``[e1^c, e2](x) = [e1, e2](x) + c e_n(x)``.

    ``e_n`` is the constant coordinate field most transverse to ``H`` at ``x``
    and ``beta`` a bump with ``beta(x) = 0`` and ``d beta(e2) = 1`` supported
    in the ball of the given radius.  The largest ``c`` keeping the new
    distribution spacelike on the support is bracketed and bisected.
    """
    x = np.asarray(x, dtype=float)
    n = H.n
    q = n - H.rank
    if q == 0 or H.rank < 2:
        raise ContractError("local twisting needs 0 < q and rank >= 2")
    Hb = H.basis(x)
    scores = [np.linalg.svd(np.column_stack([Hb, np.eye(n)[m]]), compute_uv=False)[-1] for m in range(n)]
    m = int(np.argmax(scores))
    en = VectorField.coordinate(m, n)
    e1, e2 = H.fields[0], H.fields[1]
    beta = bump_field(x, e2(x), radius)

    def twisted(c: float) -> Distribution:
        e1c = linear_combination([1.0, _ScaledScalar(beta, -c)], [e1, en], )
        return Distribution([e1c] + H.fields[1:], name=f"{H.name} twisted")

    D = twisted(c_twist)
    before = lie_bracket(e1, e2, x)
    after = lie_bracket(D.fields[0], e2, x)
    twist = float((after - before)[m])

    sob = qmc.Sobol(d=n, scramble=True, seed=seed).random(samples)
    dirs = qmc.Sobol(d=n, scramble=True, seed=seed + 1).random(samples)
    u = np.sqrt(2.0) * _erfinv(2 * dirs - 1)
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    pts = x + radius * u * sob[:, :1] ** (1.0 / n)
    pts = np.vstack([x, pts])

    def ok(c: float) -> bool:
        return _spacelike_everywhere(g, twisted(c), pts)

    if not ok(0.0):
        threshold = 0.0
    else:
        lo, hi = 0.0, 1.0
        while ok(hi) and hi < 1e8:
            lo, hi = hi, hi * 2
        if hi >= 1e8:
            threshold = float("inf")
        else:
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                lo, hi = (mid, hi) if ok(mid) else (lo, mid)
            threshold = lo
    return TwistResult(D, before, after, twist, en, beta, threshold, bool(ok(c_twist)))


def _erfinv(y):
    return erfinv(np.clip(y, -1 + 1e-12, 1 - 1e-12))


class _ScaledScalar(DerivedField):
    def __init__(self, f: ScalarField, c: float):
        super().__init__("scalar", f.n, lambda v, x: c * v, [f], name=f"{c}*{f.name}")
