"""Command line: verification suites and data exports.

Exit codes are 0 on success, 1 when a check fails and 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import catalog, gcn
from . import foliation as fol
from .curvature import geodesic_integrate
from .errors import ContractError, LorentzlabError
from .suites import SUITES, RunConfig, run_suite

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# formatting ----------------------------------------------------------------------------

def _plain(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return json.dumps(_plain(x), sort_keys=True)


def to_json(payload: dict) -> str:
    return json.dumps(_plain({"schema": SCHEMA, **payload}), indent=2, sort_keys=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _table(fmt: str, header, rows, meta: dict) -> str:
    if fmt == "csv":
        return to_csv(header, rows)
    return to_json({**meta, "columns": list(header), "rows": [list(r) for r in rows]})


def _vector(text: str, n: int | None = None, what: str = "vector") -> np.ndarray:
    try:
        v = np.array([float(s) for s in text.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"malformed {what}: {text!r}") from exc
    if n is not None and len(v) != n:
        raise UsageError(f"{what} needs {n} components, got {len(v)}")
    if not np.all(np.isfinite(v)):
        raise UsageError(f"{what} must be finite")
    return v


# commands ------------------------------------------------------------------------------

def _load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key in ("c", "lam", "seed", "mode", "fd_step", "ode_steps", "n_sphere", "format", "output"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    try:
        return RunConfig(**data)
    except (ContractError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_verify(args) -> int:
    config = _load_config(args)
    start = time.perf_counter()
    try:
        report = run_suite(args.suite, config)
    except ContractError as exc:
        raise UsageError(str(exc)) from exc
    print(f"wall time {time.perf_counter() - start:.3f} s", file=sys.stderr)
    checks = [{"name": c.name, "status": c.status, "measured": c.measured, "expected": c.expected,
               "tolerance": c.tolerance} for c in report.checks]
    status = "pass" if report.passed else "fail"
    if config.format == "csv":
        text = to_csv(["suite", "name", "status", "measured", "expected", "tolerance"],
                      [[report.suite, c["name"], c["status"], c["measured"], c["expected"], c["tolerance"]]
                       for c in checks])
    else:
        text = to_json({"suite": report.suite, "status": status, "checks": checks, "config": report.config})
    _emit(text, config.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_geodesic(args) -> int:
    if args.c <= 0 or args.n < 3 or args.steps < 1 or not args.t_max > 0:
        raise UsageError("need c > 0, n >= 3, steps >= 1 and t_max > 0")
    params = gcn.GcnParams(args.c, args.n)
    p = _vector(args.p, args.n, "position")
    v = _vector(args.v, args.n, "velocity")
    g = gcn.gcn_metric(params)
    if args.method == "rk4":
        path = geodesic_integrate(g, p, v, args.t_max, args.steps)
        t, x, u = path.t, path.x, path.v
    else:
        t = np.linspace(0.0, args.t_max, args.steps + 1)
        s = gcn.gcn_geodesic(params, p, v, t)
        x, u = s.x, s.v
    norm = np.einsum("ma,mab,mb->m", u, g(x), u)
    n = args.n
    header = ["t"] + [f"x{i}" for i in range(n)] + [f"v{i}" for i in range(n)] + ["g(v,v)"]
    rows = [[t[m], *x[m], *u[m], norm[m]] for m in range(len(t))]
    _emit(_table(args.format, header, rows, {"kind": "geodesic", "method": args.method, "c": args.c, "n": n}),
          args.output)
    return EXIT_OK


def cmd_ctc(args) -> int:
    if args.c <= 0 or args.samples < 2:
        raise UsageError("need c > 0 and samples >= 2")
    rows = []
    for k, (plan, off) in enumerate(gcn.closed_timelike_loop(args.p)):
        for name, t, x, v in plan.samples(args.samples):
            x = x + np.array([off, 0.0, 0.0])
            y, u, margin = gcn.pull_back_loop(args.c, x, v)
            rows.extend([k, name, t[m], *y[m], *u[m], margin[m]] for m in range(len(t)))
    header = ["part", "segment", "t", "x0", "x1", "x2", "v0", "v1", "v2", "margin"]
    _emit(_table(args.format, header, rows, {"kind": "ctc", "c": args.c, "p": args.p}), args.output)
    return EXIT_OK if all(r[-1] > 0 for r in rows) else EXIT_FAIL


def _sweep_family(metric_id: str):
    from .distributions import Distribution
    params = gcn.GcnParams(1.0, 3)
    fr = gcn.gcn_frame(params)
    H = Distribution(fr.fields[1:], name="H")
    if metric_id == "g1":
        return gcn.gcn_metric(params), H
    if metric_id == "perturbed":
        return catalog.polynomial_metric(3, 1, seed=3, scale=0.02, base=gcn.gcn_metric(params)), H
    if metric_id == "flat":
        return catalog.minkowski(3), Distribution.coordinate([1, 2], 3)
    raise UsageError(f"unknown metric id {metric_id!r}")


def cmd_stretch_sweep(args) -> int:
    from .stretch import ricci_asymptotics

    g, H = _sweep_family(args.metric)
    eps = _vector(args.eps, None, "eps list")
    if np.any(eps <= 0):
        raise UsageError("eps values must be positive")
    x = _vector(args.point, 3, "point")
    rep = ricci_asymptotics(g, H, x, eps)
    rows = []
    n = g.n
    for e, S in zip(rep.eps, rep.scaled):
        R = S / (e * e)
        lead = rep.quarter_b / (e * e)
        for i in range(n):
            for j in range(i, n):
                rows.append([e, f"{i}{j}", R[i, j], lead[i, j], R[i, j] - lead[i, j]])
    header = ["eps", "pair", "ric", "b/(4eps^2)", "residual"]
    meta = {"kind": "stretch-sweep", "metric": args.metric, "C0": rep.C0, "C1": rep.C1, "C": rep.C,
            "exponents": rep.exponents}
    _emit(_table(args.format, header, rows, meta), args.output)
    return EXIT_OK


def cmd_leaf(args) -> int:
    if args.family == "phi":
        H = fol.phi_family(args.k)
    else:
        H = fol.slope_family(args.k)
    lim = fol.slope_family(0.0)
    box = fol.make_box([H], lim, np.zeros(2), 1, args.r_b, args.r_j)
    leaf = fol.integrate_leaf(H, box, [args.t], args.grid, args.steps)
    rows = [[z[0], f[0]] for z, f, m in zip(leaf.z, leaf.values, leaf.mask) if m]
    meta = {"kind": "leaf", "family": args.family, "k": args.k, "t": args.t, "r_B": box.r_B, "r_J": box.r_J}
    _emit(_table(args.format, ["z", "f"], rows, meta), args.output)
    return EXIT_OK


# parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lorentzlab", description="Lorentzian geometry verification toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--c", type=float)
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--mode", choices=("dual", "fd"))
    v.add_argument("--fd-step", dest="fd_step", type=float)
    v.add_argument("--ode-steps", dest="ode_steps", type=int)
    v.add_argument("--n-sphere", dest="n_sphere", type=int)
    v.add_argument("--config")
    v.add_argument("--format", choices=("json", "csv"))
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="csv")
        p.add_argument("--output")

    geo = sub.add_parser("geodesic", help="export a geodesic of g^c_n")
    geo.add_argument("--c", type=float, default=1.0)
    geo.add_argument("--n", type=int, default=3)
    geo.add_argument("--p", required=True, help="comma separated start point")
    geo.add_argument("--v", required=True, help="comma separated start velocity")
    geo.add_argument("--t-max", dest="t_max", type=float, default=5.0)
    geo.add_argument("--steps", type=int, default=500)
    geo.add_argument("--method", choices=("closed", "rk4"), default="closed")
    common(geo)
    geo.set_defaults(func=cmd_geodesic)

    ctc = sub.add_parser("ctc", help="export a closed timelike curve of g^c_3")
    ctc.add_argument("--c", type=float, default=1.0)
    ctc.add_argument("--p", type=float, default=0.0)
    ctc.add_argument("--samples", type=int, default=100)
    common(ctc)
    ctc.set_defaults(func=cmd_ctc)

    st = sub.add_parser("stretch-sweep", help="Ricci asymptotics of a stretched metric")
    st.add_argument("--metric", default="g1", help="g1 | perturbed | flat")
    st.add_argument("--eps", default="0.1,0.05,0.02,0.01")
    st.add_argument("--point", default="0.1,0.2,0.3")
    common(st)
    st.set_defaults(func=cmd_stretch_sweep)

    lf = sub.add_parser("leaf", help="export a leaf graph")
    lf.add_argument("--family", choices=("phi", "slope"), default="phi")
    lf.add_argument("--k", type=float, default=1.0)
    lf.add_argument("--t", type=float, default=0.0)
    lf.add_argument("--grid", type=int, default=41)
    lf.add_argument("--steps", type=int, default=256)
    lf.add_argument("--r-b", dest="r_b", type=float, default=0.5)
    lf.add_argument("--r-j", dest="r_j", type=float, default=1.0)
    common(lf)
    lf.set_defaults(func=cmd_leaf)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"lorentzlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractError, LorentzlabError) as exc:
        print(f"lorentzlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ContractError) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
