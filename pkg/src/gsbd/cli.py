"""Command-line interface.

    gsbd [--seed S] [--out DIR] [--workers N] [--full] <command> ...

Commands: gen, solve-bdog, solve-rbdogs, bounds, exp-tc1, exp-tc2.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bdog import BdogConfig, solve_bdog
from .bounds import (
    BoundParams,
    a0,
    error_matrix_E,
    m1_factor,
    q_factor,
    restrict_complement,
    stability_bound,
    tolerable_delta_bound,
)
from .errors import InputError
from .experiments import (
    FULL_REALIZATIONS,
    ExperimentConfig,
    cell_rng,
    emit_tc1,
    emit_tc2,
    run_testcase1,
    run_testcase2,
    tc1_instance,
)
from .graph import normalized_adjacency_gso, sample_graph_basis, write_edge_list
from .io import read_matrix_csv, write_matrix_csv
from .rbdogs import RbdogsConfig, rbdogs

log = logging.getLogger("gsbd")

MAX_TRACE_POINTS = 1000


def downsample(trace, limit=MAX_TRACE_POINTS):
    if len(trace) <= limit:
        return [float(v) for v in trace]
    idx = np.unique(np.linspace(0, len(trace) - 1, limit).round().astype(int))
    return [float(trace[i]) for i in idx]


def _dump_json(obj, path):
    if path in (None, "-"):
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")


def _outdir(args):
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def cmd_gen(args):
    """Write a graph and, optionally, a full synthetic instance."""
    out = _outdir(args)
    rng = cell_rng(args.seed, (0,))
    if args.alpha is None:
        g, S, basis = sample_graph_basis(args.n, args.p_edge, rng)
    else:
        cfg = ExperimentConfig(n=args.n, p_edge=args.p_edge, P=args.P, theta=args.theta)
        inst = tc1_instance(cfg, args.alpha, args.target_delta, rng)
        basis = inst["basis"]
        write_matrix_csv(inst["x"].X, f"{out}/X.csv")
        write_matrix_csv(inst["Y"], f"{out}/Y.csv")
        write_matrix_csv(inst["V_p"], f"{out}/Vp.csv")
        write_matrix_csv(inst["g0"], f"{out}/g0.csv")
        log.info("xi = %.6g", inst["xi"])
        g = None
    if g is not None:
        write_edge_list(g, f"{out}/graph.txt")
        write_matrix_csv(S, f"{out}/S.csv")
    write_matrix_csv(basis.V, f"{out}/V.csv")
    write_matrix_csv(basis.eigenvalues, f"{out}/eigenvalues.csv")
    return 0


def cmd_solve_bdog(args):
    Y = read_matrix_csv(args.y)
    V = read_matrix_csv(args.v)
    cfg = BdogConfig(epsilon=args.epsilon, grad_tol=args.tol, max_iters=args.max_iters)
    rep = solve_bdog(Y, V, cfg)
    _dump_json(
        dict(
            g_hat=rep.g_hat.tolist(),
            iterations=rep.iterations,
            converged=rep.converged,
            objective_trace=downsample(rep.objective_trace),
            wall_time=rep.wall_time,
        ),
        args.out_json,
    )
    return 0


def cmd_solve_rbdogs(args):
    Y = read_matrix_csv(args.y)
    V_p = read_matrix_csv(args.vp)
    cfg = RbdogsConfig(rho=args.rho, delta_stop=args.delta, max_outer=args.max_outer)
    rep = rbdogs(Y, V_p, cfg)
    base = os.path.splitext(args.out_json)[0] if args.out_json not in (None, "-") else "rbdogs"
    v_path = f"{base}_V_hat.csv"
    write_matrix_csv(rep.V_hat, v_path)
    _dump_json(
        dict(
            g_hat=rep.g_hat.tolist(),
            V_hat=v_path,
            F_trace=downsample(rep.F_trace),
            outer_iterations=rep.outer_iterations,
            converged=rep.converged,
            wall_time=rep.wall_time,
        ),
        args.out_json,
    )
    return 0


SCENARIO_KEYS = {
    "n", "p_edge", "P", "theta", "alpha", "target_delta", "seed",
    "C1", "sigma_q", "sigma1", "sigma2", "sigma3", "sigma4", "delta_prob", "solve",
}


def evaluate_scenario(sc, default_seed=0):
    """Compute the threshold, Q, M1, M2 and both bounds for one scenario dict."""
    unknown = set(sc) - SCENARIO_KEYS
    if unknown:
        raise InputError(f"unknown scenario keys: {sorted(unknown)}")
    cfg = ExperimentConfig(
        n=sc.get("n", 20), p_edge=sc.get("p_edge", 0.4), P=sc.get("P", 60), theta=sc.get("theta", 0.15)
    )
    pkw = {k: sc[k] for k in ("C1", "sigma1", "sigma2", "sigma3", "sigma4", "delta_prob") if k in sc}
    sigma_q = sc.get("sigma_q", 0.5)
    params = BoundParams(theta=cfg.theta, sigma_q=sigma_q, **pkw)
    inst = tc1_instance(cfg, sc.get("alpha", 0.1), sc.get("target_delta", 0.05),
                        cell_rng(sc.get("seed", default_seed), (0,)))
    V, V_p = inst["basis"].V, inst["V_p"]
    g0, h0, X0 = inst["g0"], inst["h0"], inst["x"].X
    a0_value, bracket_bad = a0(V, params)
    res = dict(a0=a0_value, a0_bracket_nonpositive=bracket_bad, xi=inst["xi"],
               delta_norm=float(np.linalg.norm(V - V_p)))
    try:
        Q = q_factor(g0, a0_value, params)
        Q_worst = q_factor(g0, a0_value, replace(params, sigma_q="worst-case"))
    except InputError as exc:
        res.update(Q=None, Q_worst_case=None, error=str(exc))
        return res
    E_c = restrict_complement(error_matrix_E(V, V_p, g0, h0, X0), inst["x"].support)
    sb = stability_bound(g0, E_c, V, a0_value, Q, cfg.P)
    res.update(Q=Q, Q_worst_case=Q_worst, M1=m1_factor(E_c, V, a0_value))
    D = V - V_p
    if np.linalg.norm(D) > 0:
        tol_bound, _, M2 = tolerable_delta_bound(g0, h0, X0, V, D / np.linalg.norm(D), a0_value, Q, cfg.P, V_p=V_p)
        res.update(M2=M2, tolerable_delta=tol_bound)
    else:
        res.update(M2=None, tolerable_delta=None)
    res["bound"] = sb.bound if sb.feasible else "infeasible"
    res["denominator"] = sb.denominator
    if sc.get("solve", False):
        rep = solve_bdog(inst["Y"], V_p)
        res["error"] = float(np.linalg.norm(rep.g_hat - g0))
    return res


def cmd_bounds(args):
    with open(args.scenario) as fh:
        sc = json.load(fh)
    res = evaluate_scenario(sc, default_seed=args.seed)
    json.dump(res, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")
    return 0


def _exp_config(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.seed_given:
        cfg = replace(cfg, master_seed=args.seed)
    if args.full:
        cfg = replace(cfg, n_realizations=FULL_REALIZATIONS)
    if args.realizations is not None:
        cfg = replace(cfg, n_realizations=args.realizations)
    return cfg


def cmd_exp_tc1(args):
    cfg = _exp_config(args)
    out = _outdir(args)
    rows = run_testcase1(cfg, workers=args.workers)
    emit_tc1(rows, out, cfg)
    log.info("wrote %d rows to %s", len(rows), out)
    return 0


def cmd_exp_tc2(args):
    cfg = _exp_config(args)
    out = _outdir(args)
    rows = run_testcase2(cfg, workers=args.workers)
    emit_tc2(rows, out, cfg)
    log.info("wrote %d rows to %s", len(rows), out)
    return 0


def build_parser():
    # no prefix matching, or "--v" of a subcommand collides with --version/--verbose
    p = argparse.ArgumentParser(prog="gsbd", description=__doc__.splitlines()[0], allow_abbrev=False)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    p.add_argument("--out", dest="out_dir", default="out", help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--full", action="store_true", help="100 realizations per cell")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph (and optionally an instance)")
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--p-edge", type=float, default=0.4)
    g.add_argument("--alpha", type=float, default=None, help="also write X, Y, Vp, g0")
    g.add_argument("--target-delta", type=float, default=0.0)
    g.add_argument("--P", type=int, default=60)
    g.add_argument("--theta", type=float, default=0.15)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("solve-bdog", help="convex blind deconvolution on a given basis")
    b.add_argument("--y", required=True)
    b.add_argument("--v", required=True)
    b.add_argument("--epsilon", type=float, default=None)
    b.add_argument("--tol", type=float, default=1e-8)
    b.add_argument("--max-iters", type=int, default=5000)
    b.add_argument("--out", dest="out_json", required=True)
    b.set_defaults(func=cmd_solve_bdog)

    r = sub.add_parser("solve-rbdogs", help="robust blind deconvolution with basis denoising")
    r.add_argument("--y", required=True)
    r.add_argument("--vp", required=True)
    r.add_argument("--rho", type=float, default=None)
    r.add_argument("--delta", type=float, default=1e-6)
    r.add_argument("--max-outer", type=int, default=200)
    r.add_argument("--out", dest="out_json", required=True)
    r.set_defaults(func=cmd_solve_rbdogs)

    s = sub.add_parser("bounds", help="evaluate recovery and stability bounds")
    s.add_argument("--scenario", required=True)
    s.set_defaults(func=cmd_bounds)

    for name, fn in (("exp-tc1", cmd_exp_tc1), ("exp-tc2", cmd_exp_tc2)):
        e = sub.add_parser(name)
        e.add_argument("--config", default=None, help="ExperimentConfig JSON")
        e.add_argument("--realizations", type=int, default=None)
        e.set_defaults(func=fn)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
