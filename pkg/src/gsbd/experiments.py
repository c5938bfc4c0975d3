"""Seeded experiment sweeps for the two synthetic test cases.

Every grid cell draws its own random stream from ``(master_seed, cell index)``
so results do not depend on execution order or worker count.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import __version__
from .bdog import BdogConfig, solve_bdog
from .bounds import (
    BoundParams,
    a0,
    c1_upper_limit,
    calibrate_c1,
    error_matrix_E,
    q_factor,
    restrict_complement,
    stability_bound,
)
from .errors import InputError
from .filters import (
    controlled_inverse_response,
    filter_from_freq,
    perturbed_identity_taps,
    sample_bernoulli_gaussian,
    synthesize_observations,
)
from .graph import sample_graph_basis
from .io import emit_csv, emit_heatmap_svg, emit_summary_csv
from .metrics import acc_x, node_domain_operators, re_g, re_operator
from .perturbation import cayley_perturb, covariance_eigenbasis, random_unit_skew, xi_for_target_delta
from .rbdogs import RbdogsConfig, default_rho, rbdogs

FULL_REALIZATIONS = 100


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 20
    p_edge: float = 0.4
    P: int = 60
    theta: float = 0.15
    tau: float = 0.1
    alpha_grid: tuple = (0.0, 0.2, 0.4, 0.6, 0.8)
    target_delta_grid: tuple = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)
    P_grid: tuple = (60, 120, 240, 480)
    L: int = 5
    n_realizations: int = 20
    master_seed: int = 0
    tc1_rho_scale: float = 1.0
    tc2_rho_scale: float = 1000.0
    bdog: BdogConfig = field(default_factory=BdogConfig)
    rbdogs: RbdogsConfig = field(default_factory=RbdogsConfig)
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.alpha_grid and self.target_delta_grid and self.P_grid):
            raise InputError("grids must be non-empty")
        if self.n_realizations < 1:
            raise InputError("n_realizations must be >= 1")
        if self.tau <= 0:
            raise InputError("tau must be > 0")
        if self.tc1_rho_scale <= 0 or self.tc2_rho_scale <= 0:
            raise InputError("rho scales must be > 0")

    def bound_params(self, **overrides):
        kw = dict(self.bounds)
        kw.update(overrides)
        return BoundParams(theta=self.theta, **kw)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("alpha_grid", "target_delta_grid", "P_grid"):
            if key in d:
                d[key] = tuple(d[key])
        if "bdog" in d:
            d["bdog"] = _strict(BdogConfig, d["bdog"])
        if "rbdogs" in d:
            rb = dict(d["rbdogs"])
            if "inner" in rb:
                rb["inner"] = _strict(BdogConfig, rb["inner"])
            d["rbdogs"] = _strict(RbdogsConfig, rb)
        if "bounds" in d:
            BoundParams(theta=d.get("theta", cls.theta), **d["bounds"])
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return asdict(self)


def _strict(kind, d):
    if isinstance(d, kind):
        return d
    known = {f.name for f in fields(kind)}
    unknown = set(d) - known
    if unknown:
        raise InputError(f"unknown {kind.__name__} keys: {sorted(unknown)}")
    return kind(**d)


@dataclass
class MetricRow:
    testcase: int
    alpha: Optional[float]
    target_delta: Optional[float]
    xi: Optional[float]
    P: int
    realization: int
    method: str
    re_g: Optional[float]
    acc_x: float
    re_G: float
    re_H: float
    re_X: float
    iterations: int
    converged: bool
    status: str
    wall_time: float


# wall_time is kept out of the raw CSV so that reruns are byte-identical
RAW_EXCLUDE = ("wall_time",)


def cell_rng(master_seed, index):
    """Independent generator for one grid cell; ``index`` is a tuple of ints."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.PCG64(ss))


def _rbdogs_cfg(cfg, Y, scale):
    return replace(cfg.rbdogs, rho=scale * default_rho(Y)) if cfg.rbdogs.rho is None else cfg.rbdogs


def _score(testcase, ids, method, V_hat, g_hat, Y, truth, cfg, iterations, converged, wall):
    G_hat, H_hat = node_domain_operators(V_hat, g_hat)
    X_hat = G_hat @ Y
    return MetricRow(
        testcase=testcase,
        method=method,
        re_g=re_g(g_hat, truth["g0"]) if testcase == 1 else None,
        acc_x=acc_x(X_hat, truth["X0"], cfg.tau),
        re_G=re_operator(G_hat, truth["G0"]),
        re_H=re_operator(H_hat, truth["H0"]),
        re_X=re_operator(X_hat, truth["X0"]),
        iterations=int(iterations),
        converged=bool(converged),
        status="ok",
        wall_time=wall,
        **ids,
    )


def _failed(testcase, ids, method, exc):
    nan = float("nan")
    return MetricRow(
        testcase=testcase, method=method, re_g=nan, acc_x=nan, re_G=nan, re_H=nan, re_X=nan,
        iterations=0, converged=False, status=f"error: {type(exc).__name__}: {exc}",
        wall_time=0.0, **ids,
    )


def _run_methods(testcase, ids, Y, V_p, truth, cfg, rho_scale):
    rows = []
    try:
        rep = solve_bdog(Y, V_p, cfg.bdog)
        rows.append(_score(testcase, ids, "BDoG", V_p, rep.g_hat, Y, truth, cfg,
                           rep.iterations, rep.converged, rep.wall_time))
    except Exception as exc:  # recorded in the row; a sweep never aborts
        rows.append(_failed(testcase, ids, "BDoG", exc))
    try:
        rep = rbdogs(Y, V_p, _rbdogs_cfg(cfg, Y, rho_scale))
        rows.append(_score(testcase, ids, "RBDoGS", rep.V_hat, rep.g_hat, Y, truth, cfg,
                           rep.outer_iterations, rep.converged, rep.wall_time))
    except Exception as exc:
        rows.append(_failed(testcase, ids, "RBDoGS", exc))
    return rows


def tc1_instance(cfg, alpha, target_delta, rng):
    """Draw one test-case-1 instance: graph, controlled filter, sources, V_p."""
    _, _, basis = sample_graph_basis(cfg.n, cfg.p_edge, rng)
    g0, h0 = controlled_inverse_response(cfg.n, alpha, rng)
    x = sample_bernoulli_gaussian(cfg.n, cfg.P, cfg.theta, rng)
    Y = synthesize_observations(filter_from_freq(basis, h0), x)
    W = random_unit_skew(cfg.n, rng)
    xi = xi_for_target_delta(W, target_delta)
    V_p = cayley_perturb(basis.V, W, xi)
    return dict(basis=basis, g0=g0, h0=h0, x=x, Y=Y, W=W, xi=xi, V_p=V_p)


def _tc1_cell(cfg, ia, idl, r):
    alpha = float(cfg.alpha_grid[ia])
    target = float(cfg.target_delta_grid[idl])
    ids = dict(alpha=alpha, target_delta=target, xi=None, P=cfg.P, realization=r)
    try:
        inst = tc1_instance(cfg, alpha, target, cell_rng(cfg.master_seed, (1, ia, idl, r)))
    except Exception as exc:
        return [_failed(1, ids, m, exc) for m in ("BDoG", "RBDoGS")]
    ids["xi"] = float(inst["xi"])
    V = inst["basis"].V
    truth = dict(
        g0=inst["g0"],
        X0=inst["x"].X,
        G0=(V * inst["g0"]) @ V.T,
        H0=(V * inst["h0"]) @ V.T,
    )
    return _run_methods(1, ids, inst["Y"], inst["V_p"], truth, cfg, cfg.tc1_rho_scale)


def tc2_instance(cfg, P, rng):
    """Draw one test-case-2 instance with the ground truth rescaled so that
    the inverse response sums to N, the same normalisation the estimators use."""
    _, _, basis = sample_graph_basis(cfg.n, cfg.p_edge, rng)
    f = perturbed_identity_taps(basis, cfg.L, rng)
    x = sample_bernoulli_gaussian(cfg.n, P, cfg.theta, rng)
    Y = synthesize_observations(f, x)
    g0 = 1.0 / f.freq_response
    s = g0.sum()
    if abs(s) < 1e-8 * np.abs(g0).sum():
        raise InputError("inverse response sums to zero; scale undefined")
    c = cfg.n / s
    V = basis.V
    truth = dict(
        g0=c * g0,
        X0=c * x.X,
        G0=(V * (c * g0)) @ V.T,
        H0=(V * (f.freq_response / c)) @ V.T,
    )
    return dict(basis=basis, filter=f, x=x, Y=Y, truth=truth, V_p=covariance_eigenbasis(Y).V)


def _tc2_cell(cfg, ip, r):
    P = int(cfg.P_grid[ip])
    ids = dict(alpha=None, target_delta=None, xi=None, P=P, realization=r)
    try:
        inst = tc2_instance(cfg, P, cell_rng(cfg.master_seed, (2, ip, r)))
    except Exception as exc:
        return [_failed(2, ids, m, exc) for m in ("BDoG", "RBDoGS")]
    return _run_methods(2, ids, inst["Y"], inst["V_p"], inst["truth"], cfg, cfg.tc2_rho_scale)


def _call(args):
    fn, a = args
    return fn(*a)


def _execute(tasks, workers):
    if workers <= 1:
        results = [fn(*a) for fn, a in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_call, tasks))
    return [row for rows in results for row in rows]


def run_testcase1(cfg, workers=1):
    tasks = [
        (_tc1_cell, (cfg, ia, idl, r))
        for ia in range(len(cfg.alpha_grid))
        for idl in range(len(cfg.target_delta_grid))
        for r in range(cfg.n_realizations)
    ]
    return _execute(tasks, workers)


def run_testcase2(cfg, workers=1):
    tasks = [(_tc2_cell, (cfg, ip, r)) for ip in range(len(cfg.P_grid)) for r in range(cfg.n_realizations)]
    return _execute(tasks, workers)


def _finite(vals):
    return [v for v in vals if v is not None and not (isinstance(v, float) and math.isnan(v))]


def summarize(rows, keys, metrics):
    """Mean and median of each metric per group, groups in first-seen order."""
    groups = {}
    for r in rows:
        groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(r)
    out = []
    for gkey, members in groups.items():
        s = dict(zip(keys, gkey))
        s["count"] = len(members)
        s["failures"] = sum(m.status != "ok" for m in members)
        for m in metrics:
            vals = _finite([getattr(x, m) for x in members])
            s[f"mean_{m}"] = float(np.mean(vals)) if vals else float("nan")
            s[f"median_{m}"] = float(np.median(vals)) if vals else float("nan")
        out.append(s)
    return out


TC1_KEYS = ("alpha", "target_delta", "method")
TC2_KEYS = ("P", "method")
METRICS = ("re_g", "acc_x", "re_G", "re_H", "re_X")


def write_manifest(path, cfg, command):
    with open(path, "w") as fh:
        json.dump(
            {"command": command, "version": __version__, "master_seed": cfg.master_seed, "config": cfg.to_dict()},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def _write_timing(rows, path, keys):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*keys, "realization", "wall_time"])
        for r in rows:
            w.writerow([*(getattr(r, k) for k in keys), r.realization, repr(r.wall_time)])


def emit_tc1(rows, outdir, cfg):
    emit_csv(rows, f"{outdir}/tc1_raw.csv", MetricRow, exclude=RAW_EXCLUDE)
    emit_summary_csv(summarize(rows, TC1_KEYS, METRICS), f"{outdir}/tc1_summary.csv")
    _write_timing(rows, f"{outdir}/tc1_timing.csv", TC1_KEYS)
    emit_heatmap_svg(rows, "re_g", f"{outdir}/tc1_reg.svg", "alpha", "target_delta", invert=True,
                     title="1 - RE_g (mean)")
    emit_heatmap_svg(rows, "acc_x", f"{outdir}/tc1_accx.svg", "alpha", "target_delta", title="ACC_X (mean)")
    write_manifest(f"{outdir}/manifest.json", cfg, "exp-tc1")


def emit_tc2(rows, outdir, cfg):
    emit_csv(rows, f"{outdir}/tc2_raw.csv", MetricRow, exclude=RAW_EXCLUDE)
    emit_summary_csv(summarize(rows, TC2_KEYS, METRICS), f"{outdir}/tc2_summary.csv")
    _write_timing(rows, f"{outdir}/tc2_timing.csv", TC2_KEYS)
    emit_heatmap_svg(rows, "re_X", f"{outdir}/tc2_rex.svg", "method", "P", panel_key="testcase",
                     agg="median", invert=True, title="1 - RE_X (median)")
    emit_heatmap_svg(rows, "acc_x", f"{outdir}/tc2_accx.svg", "method", "P", panel_key="testcase",
                     agg="median", title="ACC_X (median)")
    write_manifest(f"{outdir}/manifest.json", cfg, "exp-tc2")


# ---------------------------------------------------------------------------
# stability-bound calibration


def bound_instance(cfg, alpha, target_delta, rng, params, solver=None):
    """Draw one instance, solve the perturbed convex problem and evaluate the
    pieces of the stability bound that do not depend on ``C1``."""
    inst = tc1_instance(cfg, alpha, target_delta, rng)
    V, V_p = inst["basis"].V, inst["V_p"]
    g0, h0, X0 = inst["g0"], inst["h0"], inst["x"].X
    a0_value, _ = a0(V, params)
    unit = replace(params, C1=1.0)
    q_unit = q_factor(g0, a0_value, unit)
    E_c = restrict_complement(error_matrix_E(V, V_p, g0, h0, X0), inst["x"].support)
    solver = solver or BdogConfig(epsilon=1e-6 * np.abs(inst["Y"]).mean(), max_iters=20000, grad_tol=1e-12)
    err = float(np.linalg.norm(solve_bdog(inst["Y"], V_p, solver).g_hat - g0))
    sb = stability_bound(g0, E_c, V, a0_value, q_unit, cfg.P)
    limit = c1_upper_limit(err, g0, E_c, V, a0_value, q_unit, cfg.P)
    return dict(
        err=err, c1_limit=limit, q_unit=q_unit, g0=g0, E_c=E_c, V=V, a0=a0_value,
        denominator_unit=sb.denominator,
    )


def evaluate_bound(instance, C1, P):
    sb = stability_bound(instance["g0"], instance["E_c"], instance["V"], instance["a0"],
                         C1 * instance["q_unit"], P)
    return sb


def run_bound_calibration(cfg, alpha=0.1, target_delta=0.05, n_train=20, n_test=40):
    """Fit ``C1`` on training seeds and report how often the bound holds on
    held-out seeds with a positive denominator."""
    params = cfg.bound_params()
    t0 = time.perf_counter()
    train = [bound_instance(cfg, alpha, target_delta, cell_rng(cfg.master_seed, (3, 0, i)), params)
             for i in range(n_train)]
    c1 = calibrate_c1([t["c1_limit"] for t in train])
    held = 0
    feasible = 0
    records = []
    for i in range(n_test):
        t = bound_instance(cfg, alpha, target_delta, cell_rng(cfg.master_seed, (3, 1, i)), params)
        sb = evaluate_bound(t, c1, cfg.P)
        ok = sb.feasible and t["err"] <= sb.bound
        feasible += sb.feasible
        held += bool(sb.feasible and ok)
        records.append(dict(err=t["err"], bound=sb.bound, denominator=sb.denominator))
    return dict(
        C1=float(c1),
        n_train=n_train,
        n_test=n_test,
        feasible=feasible,
        held=held,
        fraction=held / feasible if feasible else float("nan"),
        records=records,
        wall_time=time.perf_counter() - t0,
    )
