"""Verification suites shared by the command line and the acceptance tests.

Every check records what was measured, what was expected and the tolerance
used, so a report can be read without rerunning anything.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import catalog, gcn
from .curvature import (curvature, frame_ricci,
                        frame_riemann_from_christoffel, frame_tensor, geodesic_integrate, gram_schmidt_frame,
                        kulkarni_nomizu, orthonormal_christoffel, christoffel_coordinates, weyl)
from .distributions import Distribution
from .energy import SamplerConfig, diag_exact_check, region_sweep
from .errors import ContractError
from .fields import ScalarField
from . import foliation as fol
from .stretch import (StretchSpec, bar_frame, key_lemma_bound, niceness_certificate, ricci_asymptotics, stretch,
                      stretched_christoffel_table)

SUITES = ("curvature", "geodesics", "energy", "stretch", "foliation", "loop")


@dataclass
class RunConfig:
    mode: str = "dual"
    fd_step: float = 1e-5
    ode_steps: int = 500
    n_sphere: int = 2048
    seed: int = 0
    c: float | None = None
    lam: float | None = None
    tolerances: dict = field(default_factory=dict)
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.mode not in ("dual", "fd"):
            raise ContractError(f"unknown derivative mode {self.mode!r}")
        if self.format not in ("json", "csv"):
            raise ContractError(f"unknown output format {self.format!r}")
        if not self.fd_step > 0 or self.ode_steps < 1 or self.n_sphere < 1:
            raise ContractError("steps and counts must be positive")
        if self.c is not None and not self.c > 0:
            raise ContractError("c must be positive")
        if any(not (isinstance(v, (int, float)) and v > 0) for v in self.tolerances.values()):
            raise ContractError("tolerances must be positive numbers")

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        return d


@dataclass
class Check:
    name: str
    passed: bool
    measured: object
    expected: object
    tolerance: float | None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class SuiteReport:
    suite: str
    checks: list
    config: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _le(name, measured, bound, expected="<= tolerance"):
    return Check(name, bool(measured <= bound), float(measured), expected, float(bound))


def _cs(config: RunConfig, default):
    return [config.c] if config.c is not None else list(default)


# curvature ---------------------------------------------------------------------------

def check_christoffel_table(config: RunConfig) -> list:
    """Coordinate Christoffels of g^c_3 against the closed-form table, in both derivative modes."""
    out = []
    x = config.rng(1).uniform(-2, 2, (100, 3))
    for c in _cs(config, (1, 2, 5)):
        p = gcn.GcnParams(c, 3)
        g = gcn.gcn_metric(p)
        ref = gcn.gcn_coordinate_christoffel(p, x)
        dual = np.max(np.abs(christoffel_coordinates(g, x).entries - ref))
        fd = np.max(np.abs(christoffel_coordinates(g.with_mode("fd", config.fd_step), x).entries - ref))
        out.append(_le(f"christoffel c={c:g} dual", dual, config.tol("christoffel-dual", 1e-9)))
        out.append(_le(f"christoffel c={c:g} fd", fd, config.tol("christoffel-fd", 1e-5)))
    return out


def _frame_points(config, n, salt, count=20):
    return config.rng(salt).uniform(-2, 2, (count, n))


def check_frame_ricci(config: RunConfig) -> list:
    out = []
    tol = config.tol("frame-ricci", 1e-8)
    for c in _cs(config, (1, 2, 5)):
        for n in (3, 4, 5):
            p = gcn.GcnParams(c, n)
            g, fr = _metric(config, p), gcn.gcn_frame(p)
            x = _frame_points(config, n, 2)
            R = frame_ricci(g, fr, x)
            expected = np.asarray(gcn.gcn_ground_truth(p).ricci_diag)
            scal = curvature(g, x).scalar
            err = np.max(np.abs(R - np.diag(expected)))
            out.append(Check(f"frame ricci c={c:g} n={n}", bool(err <= tol),
                             [float(v) for v in np.diag(R[0])], [float(v) for v in expected], tol))
            out.append(_le(f"scalar curvature c={c:g} n={n}", np.max(np.abs(scal - c * c / 2)), tol))
    return out


def _metric(config: RunConfig, params):
    return gcn.gcn_metric(params).with_mode(config.mode, config.fd_step)


def frame_T(c: float, n: int, lam: float, x, config: RunConfig | None = None) -> np.ndarray:
    p = gcn.GcnParams(c, n, lam)
    g, fr = gcn.gcn_metric(p), gcn.gcn_frame(p)
    if config is not None:
        g = _metric(config, p)
    rep = curvature(g, x)
    T = rep.ricci - (0.5 * rep.scalar - lam)[..., None, None] * rep.metric
    return frame_tensor(T, fr.vectors(x))


def check_frame_T_literal(config: RunConfig) -> list:
    """``T = diag(3c^2/4 - L, c^2/4 + L, c^2/4 + L, 0, ...)`` exactly as stated (zero tail)."""
    out = []
    tol = config.tol("frame-T", 1e-8)
    for c in _cs(config, (1, 2, 5)):
        for n in (3, 4, 5):
            x = _frame_points(config, n, 3)
            for lam in (-1.0, 0.0, c * c / 4):
                expected = [0.75 * c * c - lam, 0.25 * c * c + lam, 0.25 * c * c + lam] + [0.0] * (n - 3)
                T = frame_T(c, n, lam, x, config)
                err = float(np.max(np.abs(T - np.diag(expected))))
                out.append(Check(f"frame T c={c:g} n={n} lambda={lam:g}", err <= tol,
                                 [float(v) for v in np.diag(T[0])], expected, tol))
    return out


def check_frame_T(config: RunConfig) -> list:
    """Frame T against the ground truth derived from the frame Ricci tensor (tail ``-c^2/4 + L``)."""
    out = []
    tol = config.tol("frame-T", 1e-8)
    for c in _cs(config, (1, 2, 5)):
        for n in (3, 4, 5):
            x = _frame_points(config, n, 3)
            lams = (-1.0, 0.0, c * c / 4) if config.lam is None else (config.lam,)
            for lam in lams:
                expected = np.asarray(gcn.gcn_ground_truth(gcn.GcnParams(c, n, lam)).energy_diag)
                T = frame_T(c, n, lam, x, config)
                err = float(np.max(np.abs(T - np.diag(expected))))
                out.append(Check(f"frame T c={c:g} n={n} lambda={lam:g}", err <= tol,
                                 [float(v) for v in np.diag(T[0])], [float(v) for v in expected], tol))
    return out


def check_weyl_vanishes(config: RunConfig) -> list:
    """Weyl tensor of g^c_4 compared with zero."""
    tol = config.tol("weyl", 1e-8)
    out = []
    for c in _cs(config, (1, 2, 5)):
        x = _frame_points(config, 4, 4, 10)
        W = weyl(gcn.gcn_metric(gcn.GcnParams(c, 4)), x)
        out.append(_le(f"weyl g^c_4 c={c:g}", np.max(np.abs(W)), tol, 0.0))
    return out


def _frame_weyl(Rf: np.ndarray, signs: np.ndarray) -> np.ndarray:
    n = len(signs)
    eta = np.diag(signs)
    Ric = np.einsum("i,ijki->jk", signs, Rf)
    scal = float(np.sum(signs * np.diag(Ric)))
    P = (Ric - scal / (2 * (n - 1)) * eta) / (n - 2)
    return Rf - kulkarni_nomizu(P, eta)


def check_weyl_routes(config: RunConfig) -> list:
    """Weyl of g^c_4 by two routes: coordinates, and the constant frame Christoffel symbols."""
    tol = config.tol("weyl-routes", 1e-8)
    out = []
    for c in _cs(config, (1, 2, 5)):
        p = gcn.GcnParams(c, 4)
        g, fr = gcn.gcn_metric(p), gcn.gcn_frame(p)
        x = _frame_points(config, 4, 4, 10)
        E = fr.vectors(x)
        Wc = np.einsum("...ijkl,...ai,...bj,...ck,...dl->...abcd", weyl(g, x), E, E, E, E)
        Rf = frame_riemann_from_christoffel(gcn.gcn_orthonormal_christoffel(p), fr.signs)
        Wf = _frame_weyl(Rf, fr.signs)
        err = float(np.max(np.abs(Wc - Wf)))
        out.append(Check(f"weyl routes g^c_4 c={c:g}", err <= tol, float(np.max(np.abs(Wf))),
                         "coordinate route equals frame route", tol))
    return out


def check_isometry(config: RunConfig) -> list:
    out = []
    tol = config.tol("isometry", 1e-12)
    for c in _cs(config, (2, 3)):
        for n in (3, 4, 5):
            x = config.rng(5).uniform(-2, 2, (100, n))
            out.append(_le(f"isometry c={c:g} n={n}", gcn.gcn_isometry_check(c, n, x), tol, 0.0))
    return out


# geodesics ---------------------------------------------------------------------------

def _geodesic_samples(config: RunConfig, count: int = 50):
    rng = config.rng(6)
    ps = rng.uniform(-1, 1, (count, 3))
    vs = rng.uniform(-1, 1, (count, 3))
    half = count // 2
    vs[:half, 0] = -ps[:half, 2] * vs[:half, 1]
    return ps, vs


def _rk4_error(params, ps, vs, steps):
    g = gcn.gcn_metric(params)
    path = geodesic_integrate(g, ps, vs, 5.0, steps)
    err = 0.0
    for i in range(len(ps)):
        ex = gcn.gcn_geodesic(params, ps[i], vs[i], path.t)
        err = max(err, float(np.max(np.abs(ex.x - path.x[:, i]))))
    nrm = path.norms(g)
    return err, float(np.max(np.abs(nrm - nrm[0])))


def check_geodesic_oracle(config: RunConfig) -> list:
    c = config.c if config.c is not None else 1.0
    params = gcn.GcnParams(c, 3)
    ps, vs = _geodesic_samples(config)
    omega = gcn.geodesic_omega(c, ps.T, vs.T)
    steps = config.ode_steps
    e1, d1 = _rk4_error(params, ps, vs, steps)
    e2, _ = _rk4_error(params, ps, vs, 2 * steps)
    return [
        Check("geodesic sample covers both branches", bool(np.any(omega == 0) and np.any(omega != 0)),
              [int(np.sum(omega == 0)), int(np.sum(omega != 0))], "both counts positive", None),
        _le("geodesic rk4 vs closed form", e1, config.tol("geodesic", 1e-6)),
        _le("geodesic norm drift", d1, config.tol("geodesic-drift", 1e-8)),
        Check("geodesic step halving gain", bool(e1 >= 8 * e2), e1 / e2 if e2 > 0 else math.inf, ">= 8", 8.0),
    ]


def _period_test(params, p, v, tol=1e-6) -> bool:
    w = gcn.geodesic_omega(params.c, p, v)
    if w == 0:
        return False
    T = 2 * math.pi / abs(w)
    s = gcn.gcn_geodesic(params, p, v, [T])
    return bool(np.max(np.abs(s.x[0] - p)) < tol and np.max(np.abs(s.v[0] - v)) < tol)


def check_closed_geodesics(config: RunConfig) -> list:
    out = []
    tol = config.tol("closed-geodesic", 1e-6)
    for c in _cs(config, (1, 2)):
        params = gcn.GcnParams(c, 3)
        p0, v0 = np.zeros(3), np.array([1.0, 0.0, math.sqrt(2) * c])
        T = 2 * math.pi / c**2
        s = gcn.gcn_geodesic(params, p0, v0, [T])
        path = geodesic_integrate(gcn.gcn_metric(params), p0, v0, T, 4 * config.ode_steps)
        err = max(float(np.max(np.abs(s.x[0] - p0))), float(np.max(np.abs(s.v[0] - v0))))
        rk = max(float(np.max(np.abs(path.x[-1] - p0))), float(np.max(np.abs(path.v[-1] - v0))))
        out.append(_le(f"closed geodesic returns c={c:g}", err, tol, 0.0))
        out.append(_le(f"closed geodesic returns (rk4) c={c:g}", rk, tol, 0.0))

        rng = config.rng(7)
        ps = rng.uniform(-1, 1, (1000, 3))
        vs = rng.uniform(-1, 1, (1000, 3))
        # half of the sample is put on the closed locus 2 c^2 (v0 + p2 v1)^2 = v1^2 + v2^2
        k = 500
        r = np.sqrt(vs[:k, 1] ** 2 + vs[:k, 2] ** 2)
        vs[:k, 0] = np.sign(vs[:k, 0]) * r / (math.sqrt(2) * c) - ps[:k, 2] * vs[:k, 1]
        disagree = causal_closed = 0
        for p, v in zip(ps, vs):
            verdict = gcn.closed_geodesic_classify(params, p, v)
            disagree += verdict.closed != _period_test(params, p, v)
            causal_closed += verdict.closed and gcn.causal_defect(params, p, v) <= 0
        out.append(Check(f"closed classifier vs period test c={c:g}", disagree == 0, disagree, 0, None))
        out.append(Check(f"no causal closed geodesic c={c:g}", causal_closed == 0, causal_closed, 0, None))
    return out


# loop --------------------------------------------------------------------------------

def check_timelike_loop(config: RunConfig) -> list:
    out = []
    tol = config.tol("loop-join", 1e-12)
    for p in (-5.0, 0.0, 17.0):
        parts = gcn.closed_timelike_loop(p)
        join = margin = 0.0
        margin = math.inf
        ends = []
        for plan, off in parts:
            val = plan.validate(1000)
            join = max(join, val.max_join_error)
            margin = min(margin, val.min_margin)
            shift = np.array([off, 0.0, 0.0])
            ends.append((val.start + shift, val.start_velocity, val.end + shift, val.end_velocity))
        for (_, _, xe, ve), (xs, vs_, _, _) in zip(ends, ends[1:] + ends[:1]):
            join = max(join, float(np.max(np.abs(xe - xs))), float(np.max(np.abs(ve - vs_))))
        e = np.array([1.0, 0.0, 0.0])
        vel = max(float(np.max(np.abs(ends[0][1] - e))), float(np.max(np.abs(ends[-1][3] - e))))
        out.append(_le(f"loop p={p:g} C1 joins", join, tol, 0.0))
        out.append(Check(f"loop p={p:g} timelike margin", margin > 0, margin, "> 0", None))
        out.append(_le(f"loop p={p:g} start/end velocity", vel, tol, [1.0, 0.0, 0.0]))
    return out


# energy ------------------------------------------------------------------------------

def _energy_grid(n: int) -> np.ndarray:
    ax = np.linspace(-1, 1, 5)
    pts = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    return np.concatenate([pts, np.zeros((len(pts), n - 3))], axis=-1)


def check_energy(config: RunConfig) -> list:
    out = []
    sc = SamplerConfig(n_sphere=config.n_sphere, seed=config.seed)
    c = config.c if config.c is not None else 2.0
    for n in (3, 4):
        grid = _energy_grid(n)
        fr = gcn.gcn_frame(gcn.GcnParams(c, n))
        g = gcn.gcn_metric(gcn.GcnParams(c, n))
        dom = region_sweep(g, c * c / 4, grid, ["dominant", "strict-lightlike-convergence",
                                                "strict-timelike-convergence"], sc, frame=fr)
        out.append(Check(f"dominant at lambda=c^2/4 n={n}", dom.min_margin("dominant") >= -1e-9,
                         dom.min_margin("dominant"), ">= -1e-9", 1e-9))
        for cond in ("strict-lightlike-convergence", "strict-timelike-convergence"):
            out.append(Check(f"{cond} n={n}", dom.all_hold(cond), dom.min_margin(cond), "> tol", sc.tol))
        weak = region_sweep(g, c * c, grid, ["weak"], sc, frame=fr)
        e0 = fr.vectors(grid)[:, 0]
        wit_err = 0.0
        for v, e in zip(weak.verdicts["weak"], e0):
            w = v.witness / np.linalg.norm(v.witness)
            wit_err = max(wit_err, float(np.linalg.norm(w - e / np.linalg.norm(e))))
        out.append(Check(f"weak violated at lambda=c^2 n={n}", not any(v.status == "holds" for v in
                                                                      weak.verdicts["weak"]),
                         weak.min_margin("weak"), "< -tol", sc.tol))
        out.append(_le(f"weak witness is e_0 n={n}", wit_err, 1e-9, "e_0"))
    if config.lam is not None:
        out.extend(check_energy_at(config, c, config.lam, sc))
    return out


def check_energy_at(config: RunConfig, c: float, lam: float, sc: SamplerConfig) -> list:
    """Sampled verdicts at one point against closed-form verdicts of the diagonal frame T."""
    from .energy import CONDITIONS

    out = []
    n = 3
    p = gcn.GcnParams(c, n, lam)
    g, fr = gcn.gcn_metric(p), gcn.gcn_frame(p)
    x = np.zeros((1, n))
    res = region_sweep(g, lam, x, CONDITIONS, sc, frame=fr)
    T = gcn.gcn_ground_truth(p)
    for cond in CONDITIONS:
        diag = T.ricci_diag if cond.endswith("convergence") else T.energy_diag
        exact = diag_exact_check(diag, cond, sc.tol)
        got = res.verdicts[cond][0]
        wit = None if got.witness is None else [float(w) for w in got.witness]
        out.append(Check(f"{cond} at lambda={lam:g}", got.status == exact.status,
                         {"status": got.status, "margin": got.margin, "witness": wit},
                         {"status": exact.status, "margin": exact.margin}, sc.tol))
    return out


# stretch -----------------------------------------------------------------------------

def check_stretched_table(config: RunConfig, count: int = 20) -> list:
    out = []
    tol = config.tol("stretched-table", 1e-7)
    for n in (3, 4):
        for kind in ("constant", "sin"):
            worst = {}
            for trial in range(count):
                seed = config.seed * 1000 + trial + 100 * n
                g = catalog.polynomial_metric(n, 1, seed=seed, scale=0.1)
                x = config.rng(8 + trial).uniform(-0.5, 0.5, n)
                fr = gram_schmidt_frame(g, x)
                V = Distribution(fr.fields[:1])
                f = (ScalarField.constant(0.7, n) if kind == "constant"
                     else ScalarField(lambda y: 1 + 0.1 * np.sin(y[..., 1]), n))
                gb = stretch(StretchSpec(g, V, f))
                brute = orthonormal_christoffel(gb, bar_frame(fr, f, 1), x).entries
                Gam = orthonormal_christoffel(g, fr, x).entries
                df = fr.vectors(x) @ f.jet(x, 1).grad
                tab = stretched_christoffel_table(Gam, float(f(x)), df, [i < 1 for i in range(n)])
                d = np.abs(tab - brute)
                for k in range(n):
                    for i in range(n):
                        for j in range(n):
                            key = "".join("V" if m == 0 else "H" for m in (i, j, k))
                            worst[key] = max(worst.get(key, 0.0), float(d[k, i, j]))
            out.append(Check(f"stretched table n={n} f={kind} covers 8 cases", len(worst) == 8, sorted(worst),
                             8, None))
            out.append(_le(f"stretched table n={n} f={kind}", max(worst.values()), tol))
    return out


def g1_family():
    """g^1_3 with ``H = span(d1 - x2 d0, d2)`` and ``V = span(d0)``."""
    params = gcn.GcnParams(1.0, 3)
    g = gcn.gcn_metric(params)
    fr = gcn.gcn_frame(params)
    return g, Distribution(fr.fields[1:], name="H"), Distribution(fr.fields[:1], name="V")


def check_ricci_asymptotics(config: RunConfig) -> list:
    out = []
    tol = config.tol("asymptotics", 1e-9)
    g, H, V = g1_family()
    x = config.rng(9).uniform(-1, 1, 3)
    rep = ricci_asymptotics(g, H, x, V=V)
    err = max(float(np.max(np.abs(s - rep.quarter_b))) for s in rep.scaled)
    out.append(_le("asymptotics exact family", err, tol, 0.0))
    gp = catalog.polynomial_metric(3, 1, seed=config.seed + 3, scale=0.02, base=g)
    rp = ricci_asymptotics(gp, H, x)
    fitted = {"C0": rp.C0, "C1": rp.C1, "C": rp.C, "exponents": rp.exponents}
    out.append(Check("asymptotics perturbed family bounded", all(rp.bounded.values()), fitted,
                     "exponents > -0.5", None))
    return out


def check_b_beta(config: RunConfig) -> list:
    out = []
    tol = config.tol("b-beta", 1e-9)
    g, H, _ = g1_family()
    cases = [("g^1_3", g, H)]
    for c in _cs(config, (2,)):
        for n in (4, 5):
            p = gcn.GcnParams(c, n)
            fr = gcn.gcn_frame(p)
            cases.append((f"g^{c:g}_{n}", gcn.gcn_metric(p), Distribution(fr.fields[1:])))
    cases.append(("perturbed g^1_3", catalog.polynomial_metric(3, 1, seed=config.seed + 3, scale=0.02, base=g), H))
    for label, gg, HH in cases:
        pts = config.rng(10).uniform(-0.5, 0.5, (3, gg.n))
        cert = niceness_certificate(gg, HH, pts, trials=1000, seed=config.seed)
        ident = max(max(abs(p.identity_b00), abs(p.identity_trace)) for p in cert.points)
        out.append(_le(f"b identities {label}", ident, tol, 0.0))
        for attr, what in (("slack_beta_b", "beta >= b"), ("slack_b_lower", "b >= |lambda|^2"),
                           ("slack_momentum", "momentum >= 8|lambda|^4 v0^2")):
            m = min(getattr(p, attr) for p in cert.points)
            out.append(Check(f"{what} {label}", m >= -tol, m, ">= 0", tol))
    return out


def check_key_lemma(config: RunConfig, count: int = 1000) -> list:
    out = []
    n = 4
    g = catalog.polynomial_metric(n, 1, seed=config.seed + 5, scale=0.05)
    x = np.zeros(n)
    fr = gram_schmidt_frame(g, x)
    E = fr.vectors(x)
    Vb, Hb = E[:1].T, E[1:].T
    rng = config.rng(11)
    for f in (1.0, 0.1, 0.01):
        accepted, worst, drawn = 0, math.inf, 0
        while accepted < count:
            drawn += 1
            lam = rng.normal(size=(1, n - 1))
            lam *= 1.5 * f * rng.uniform() / np.linalg.norm(lam)
            P = Hb + Vb @ lam
            res = key_lemma_bound(g, Vb, Hb, f, P, x)
            if not res.nontimelike:
                continue
            accepted += 1
            worst = min(worst, res.slack)
        out.append(Check(f"key lemma f={f:g}", worst >= -1e-12, worst, ">= -1e-12",
                         1e-12))
    return out


# foliation ---------------------------------------------------------------------------

def check_leaf_convergence(config: RunConfig) -> list:
    ks = [1, 2, 4, 8, 16]
    fam = [fol.phi_family(k) for k in ks]
    lim = fol.slope_family(0.0)
    box = fol.make_box(fam, lim, np.zeros(2), 1, 0.5, 1.0)
    ts = [[-0.3], [0.0], [0.2]]
    rep = fol.convergence_sweep(fam, ks, lim, box, ts)
    out = []
    for k, d in zip(ks, rep.distance_to_limit):
        out.append(_le(f"leaf distance k={k}", d, box.r_B / k + 1e-8, "<= r_B / k"))
    worst = max(c.lhs - c.rhs for c in rep.cauchy.values())
    out.append(Check("cauchy bound all pairs", rep.all_cauchy_pass, worst, "lhs - rhs <= 1e-8", 1e-8))
    out.append(Check("C1 diagnostic decreasing", rep.c1_decreasing, rep.c1_diagnostic, "strictly decreasing",
                     None))
    return out


# suite registry ----------------------------------------------------------------------

CRITERIA = {
    1: check_christoffel_table,
    2: check_frame_ricci,
    3: check_frame_T_literal,
    4: check_weyl_vanishes,
    5: check_geodesic_oracle,
    6: check_closed_geodesics,
    7: check_isometry,
    8: check_timelike_loop,
    9: check_energy,
    10: check_stretched_table,
    11: check_ricci_asymptotics,
    12: check_b_beta,
    13: check_key_lemma,
    14: check_leaf_convergence,
}

SUITE_CHECKS = {
    "curvature": [check_christoffel_table, check_frame_ricci, check_frame_T, check_weyl_routes, check_isometry],
    "geodesics": [check_geodesic_oracle, check_closed_geodesics],
    "loop": [check_timelike_loop],
    "energy": [check_energy],
    "stretch": [check_stretched_table, check_ricci_asymptotics, check_b_beta, check_key_lemma],
    "foliation": [check_leaf_convergence],
}


def thread_count() -> int:
    raw = os.environ.get("LORENTZLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ContractError(f"LORENTZLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ContractError("LORENTZLAB_THREADS must be positive")
    return n


def run_suite(name: str, config: RunConfig) -> SuiteReport:
    """Run one suite (or ``all``); checks are reported in declaration order."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITE_CHECKS:
        names = [name]
    else:
        raise ContractError(f"unknown suite {name!r}")
    fns = [fn for s in names for fn in SUITE_CHECKS[s]]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(lambda fn: fn(config), fns))
    return SuiteReport(name, [c for r in results for c in r], config.echo())
