"""Energy and convergence conditions, sampled on the causal cone.

At a point an orthonormal frame is fixed (``e_0`` timelike) and causal
directions are sampled on the slice ``v = (1, s)``, ``|s| <= 1``.  Every margin
is normalised by the Euclidean frame norm ``|v|_h`` (squared, or to the fourth
power for the quartic semi-dominant quantity).  Non-strict conditions hold iff
``margin >= -tol``; strict conditions hold iff ``margin > tol`` where the
margin is the infimum over the closed slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import cone_slice
from .curvature import Frame, curvature, frame_tensor
from .errors import ContractError, UnsupportedIndexError
from .fields import MetricField

CONDITIONS = (
    "weak", "semi-dominant", "dominant",
    "strict-weak", "strict-semi-dominant", "strict-dominant",
    "timelike-convergence", "strict-timelike-convergence",
    "lightlike-convergence", "strict-lightlike-convergence",
    "strict-causal-convergence",
)
STRICT = {c for c in CONDITIONS if c.startswith("strict")}
USES_RICCI = {c for c in CONDITIONS if c.endswith("convergence")}


@dataclass(frozen=True)
class SamplerConfig:
    n_sphere: int = 2048
    n_interior: int = 512
    seed: int = 0
    tol: float = 1e-9


@dataclass
class ConditionVerdict:
    condition: str
    status: str               # "holds" | "violated"
    margin: float
    witness: np.ndarray | None = None

    def __post_init__(self):
        if self.status == "violated" and self.witness is None:
            raise ContractError("a violated verdict needs a witness")


def _decide(condition: str, margin: float, tol: float) -> str:
    if condition in STRICT:
        return "holds" if margin > tol else "violated"
    return "violated" if margin < -tol else "holds"


def eigen_frame(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis (rows) from the eigenvectors of ``G``, negative ones first."""
    w, U = np.linalg.eigh(G)
    E = np.swapaxes(U / np.sqrt(np.abs(w))[..., None, :], -1, -2)
    return E, np.sign(w)


def _margins(M: np.ndarray, eps: np.ndarray, vs: np.ndarray, sphere_mask: np.ndarray):
    """Per-sample quantities for a frame bilinear form ``M``."""
    h2 = np.sum(vs * vs, axis=-1)
    quad = np.einsum("mi,ij,mj->m", vs, M, vs) / h2
    Mv = vs @ M.T
    semi = -np.einsum("i,mi,mi->m", eps, Mv, Mv) / h2**2
    orient = Mv[:, 0] / h2
    return quad, semi, orient


def _verdict_from_frame_tensors(condition: str, T: np.ndarray, Ric: np.ndarray, eps: np.ndarray,
                                E: np.ndarray, vs: np.ndarray, sphere_mask: np.ndarray,
                                tol: float) -> ConditionVerdict:
    M = Ric if condition in USES_RICCI else T
    quad, semi, orient = _margins(M, eps, vs, sphere_mask)
    base = condition.removeprefix("strict-")
    if base in ("weak", "timelike-convergence", "causal-convergence"):
        vals = quad
    elif base == "lightlike-convergence":
        vals = np.where(sphere_mask, quad, np.inf)
    elif base == "semi-dominant":
        vals = semi
    elif base == "dominant":
        vals = np.minimum(np.minimum(quad, semi), orient)
    else:
        raise ContractError(f"unknown condition {condition!r}")
    k = int(np.argmin(vals))
    margin = float(vals[k])
    status = _decide(condition, margin, tol)
    witness = vs[k] @ E
    return ConditionVerdict(condition, status, margin, witness)


def check_condition(g: MetricField, lam: float, x, condition: str, config: SamplerConfig = SamplerConfig(),
                    frame: Frame | None = None) -> ConditionVerdict:
    """Verdict for one condition at ``x``; the witness is a coordinate vector."""
    if condition not in CONDITIONS:
        raise ContractError(f"unknown condition {condition!r}")
    if g.index != 1:
        raise UnsupportedIndexError("energy conditions are implemented for Lorentzian metrics only")
    x = np.asarray(x, dtype=float)
    rep = curvature(g, x)
    T = rep.ricci - (0.5 * rep.scalar - lam) * rep.metric
    if frame is None:
        E, eps = eigen_frame(rep.metric)
    else:
        frame.check(g, x)
        E, eps = frame.vectors(x), frame.signs
    vs, mask = _samples(g.n, config)
    return _verdict_from_frame_tensors(condition, frame_tensor(T, E), frame_tensor(rep.ricci, E), eps, E, vs,
                                       mask, config.tol)


def check_frame_tensor(M, condition: str, config: SamplerConfig = SamplerConfig()) -> ConditionVerdict:
    """Sampled verdict for a bilinear form given in a Lorentzian orthonormal frame.

    ``M`` plays the role of ``T`` or of ``Ric`` according to the condition.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    eps = np.array([-1.0] + [1.0] * (n - 1))
    vs, mask = _samples(n, config)
    return _verdict_from_frame_tensors(condition, M, M, eps, np.eye(n), vs, mask, config.tol)


_SAMPLE_CACHE: dict = {}


def _samples(n: int, config: SamplerConfig):
    key = (n, config.n_sphere, config.n_interior, config.seed)
    if key not in _SAMPLE_CACHE:
        sph = cone_slice(n - 1, config.n_sphere, 0, config.seed, interior=False)
        inner = cone_slice(n - 1, 0, config.n_interior, config.seed, boundary=False)
        vs = np.vstack([sph, inner])
        mask = np.r_[np.ones(len(sph), bool), np.zeros(len(inner), bool)]
        _SAMPLE_CACHE[key] = (vs, mask)
    return _SAMPLE_CACHE[key]


def diag_exact_check(T_diag, condition: str, tol: float = 1e-9) -> ConditionVerdict:
    """Closed-form verdict for a frame-diagonal tensor ``diag(rho, p_1, ..., p_m)``.

    The margins are the exact infima of the sampled quantities, e.g. the weak
    margin is ``min(rho, (rho + min p) / 2)`` and the semi-dominant one
    ``(rho^2 - max p^2) / 4``.
    """
    d = np.asarray(T_diag, dtype=float)
    rho, p = d[0], d[1:]
    m = len(p)
    if condition not in CONDITIONS:
        raise ContractError(f"unknown condition {condition!r}")
    i_min = int(np.argmin(p)) if m else 0
    i_max = int(np.argmax(p * p)) if m else 0

    def axis(i):
        v = np.zeros(m + 1)
        v[0] = 1.0
        if i is not None and m:
            v[1 + i] = 1.0
        return v

    pmin = p[i_min] if m else rho
    weak = min((rho, axis(None)), ((rho + pmin) / 2, axis(i_min)), key=lambda t: t[0])
    light = ((rho + pmin) / 2, axis(i_min))
    semi = ((rho * rho - (p[i_max] ** 2 if m else 0.0)) / 4, axis(i_max))
    orient = (rho, axis(None)) if rho < 0 else (rho / 2, axis(i_min))
    base = condition.removeprefix("strict-")
    if base in ("weak", "timelike-convergence", "causal-convergence"):
        margin, wit = weak
    elif base == "lightlike-convergence":
        margin, wit = light
    elif base == "semi-dominant":
        margin, wit = semi
    else:
        margin, wit = min(weak, semi, orient, key=lambda t: t[0])
    return ConditionVerdict(condition, _decide(condition, float(margin), tol), float(margin), wit)


@dataclass
class SweepResult:
    points: np.ndarray
    verdicts: dict = field(default_factory=dict)   # condition -> list of verdicts

    def min_margin(self, condition: str) -> float:
        return min(v.margin for v in self.verdicts[condition])

    def all_hold(self, condition: str) -> bool:
        return all(v.status == "holds" for v in self.verdicts[condition])


def region_sweep(g: MetricField, lam: float, grid, conditions, config: SamplerConfig = SamplerConfig(),
                 frame: Frame | None = None) -> SweepResult:
    """Evaluate conditions at every grid point (curvature computed in one batch)."""
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if g.index != 1:
        raise UnsupportedIndexError("energy conditions are implemented for Lorentzian metrics only")
    rep = curvature(g, pts)
    T = rep.ricci - (0.5 * rep.scalar - lam)[..., None, None] * rep.metric
    if frame is None:
        E, eps = eigen_frame(rep.metric)
    else:
        frame.check(g, pts)
        E = frame.vectors(pts)
        eps = np.broadcast_to(frame.signs, (len(pts), g.n))
    TF, RF = frame_tensor(T, E), frame_tensor(rep.ricci, E)
    vs, mask = _samples(g.n, config)
    out = SweepResult(pts)
    for c in conditions:
        out.verdicts[c] = [_verdict_from_frame_tensors(c, TF[i], RF[i], eps[i], E[i], vs, mask, config.tol)
                           for i in range(len(pts))]
    return out
