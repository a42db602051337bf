"""Command-line entry point.

Exit status: 0 on success, 1 on domain errors, 2 on usage errors.
"""
import argparse
import math
import sys

import numpy as np

from .baselines import noma_solve, oma_solve, noma_demands, noma_region, oma_region
from .caching import CacheCase, CacheSpec, InvalidCacheError, classify_case, subfile_volumes
from .channel import GeometryConfig, dbm_to_watts
from .config import ConfigError, load_config, resolve
from .delivery import solve_delivery, verify_lemma1
from .pareto import pareto_sweep, worker_count
from .region import evaluate_bounds, plan_admits, region_contains, region_plans
from .sim import SWEEP_VARS, ExperimentConfig, run_experiment, summarize, write_means_csv, write_trials_csv

DEFAULTS = {
    "alpha_i": 1e-3,
    "alpha_j": 1e-2,
    "tx_power_dbm": 36.0,
    "bandwidth_hz": 5e6,
    "c": (0.2, 0.8, 0.8, 0.2),
    "v_mbytes": (500.0, 500.0),
    "realizations": 100,
    "seed": 0,
}


class UsageError(Exception):
    pass


def _floats(text, count=None):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} values, got {len(vals)}")
    return vals


def _four(text):
    return _floats(text, 4)


def _two(text):
    return _floats(text, 2)


def _sweep_values(text):
    """``a,b,c`` or ``start:stop:step`` (stop included)."""
    if ":" in text:
        try:
            start, stop, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("need step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(n))
    return _floats(text)


def _add_instance(p, channel=True):
    p.add_argument("--config", help="key=value configuration file")
    if channel:
        p.add_argument("--alpha-i", type=float, help="effective noise variance of the strong UE (W)")
        p.add_argument("--alpha-j", type=float, help="effective noise variance of the weak UE (W)")
    p.add_argument("--power-dbm", type=float, help="transmit power budget (dBm)")
    p.add_argument("--c", type=_four, help="cache fractions c_iA,c_iB,c_jA,c_jB")
    p.add_argument("--v-mbytes", type=_two, help="file volumes V_A,V_B in MBytes")
    p.add_argument("--bw-hz", type=float, help="bandwidth (Hz)")


def build_parser():
    ap = argparse.ArgumentParser(prog="cache-noma", description="Two-user cache-aided NOMA toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="test a rate tuple against the achievable region")
    _add_instance(p)
    p.add_argument("--case", default="auto", help="I, II, III, IV or auto (from --c)")
    p.add_argument("--p", type=_four, required=True, help="powers p_i1,p_i2,p_j1,p_j2 (W)")
    p.add_argument("--r", type=_four, help="rates r_i1,r_i2,r_j1,r_j2 (bps/Hz)")

    p = sub.add_parser("pareto", help="trace the Pareto boundary of the rate region")
    _add_instance(p)
    p.add_argument("--case", default="I")
    p.add_argument("--grid", type=int, default=201, help="number of UE-share profiles (>= 2)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--baselines", action="store_true", help="append OMA and NOMA boundaries")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("delivery", help="minimum delivery time allocation")
    _add_instance(p)
    p.add_argument("--case", default="auto")
    p.add_argument("--refine", action="store_true", help="also search power-region boundaries")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("baseline", help="OMA or conventional NOMA delivery time")
    _add_instance(p)
    p.add_argument("--scheme", choices=("oma", "noma", "noma-nocache"), required=True)

    p = sub.add_parser("montecarlo", help="random placements and fading, all schemes")
    _add_instance(p, channel=False)
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int)
    for key in ("cell_radius_km", "r_i_km", "r_j_km", "noise_psd_dbm_hz", "pl_intercept_db", "pl_slope"):
        p.add_argument("--" + key.replace("_", "-"), type=float, dest=key)
    p.add_argument("--sweep-var", choices=SWEEP_VARS)
    p.add_argument("--sweep-values", type=_sweep_values, help="a,b,c or start:stop:step")
    p.add_argument("--independent-streams", action="store_true",
                   help="fresh random numbers per sweep point instead of common ones")
    p.add_argument("--closed-form", action="store_true",
                   help="use only the closed-form allocation for the proposed scheme")
    p.add_argument("--out", help="per-trial CSV path (default: stdout)")
    p.add_argument("--emit-means", metavar="PATH", help="also write per-point means to PATH")

    p = sub.add_parser("verify", help="check the optimality conditions of a delivery solution")
    _add_instance(p)
    p.add_argument("--case", default="auto")
    return ap


def _instance(args):
    fv = load_config(args.config) if getattr(args, "config", None) else {}
    c = args.c
    if c is None:
        keys = ("c_ia", "c_ib", "c_ja", "c_jb")
        c = tuple(resolve(k, None, fv, d) for k, d in zip(keys, DEFAULTS["c"]))
    v = args.v_mbytes
    if v is None:
        v = (resolve("v_a_mbytes", None, fv, DEFAULTS["v_mbytes"][0]),
             resolve("v_b_mbytes", None, fv, DEFAULTS["v_mbytes"][1]))
    inst = {
        "power_dbm": resolve("tx_power_dbm", args.power_dbm, fv, DEFAULTS["tx_power_dbm"]),
        "bw": resolve("bandwidth_hz", args.bw_hz, fv, DEFAULTS["bandwidth_hz"]),
        "spec": CacheSpec.from_mbytes(c, v[0], v[1]),
        "file": fv,
    }
    if hasattr(args, "alpha_i"):
        inst["alpha"] = (resolve("alpha_i", args.alpha_i, fv, DEFAULTS["alpha_i"]),
                         resolve("alpha_j", args.alpha_j, fv, DEFAULTS["alpha_j"]))
        if not 0 < inst["alpha"][0] <= inst["alpha"][1]:
            raise ValueError("need 0 < alpha_i <= alpha_j")
    if inst["bw"] <= 0:
        raise ValueError("bandwidth must be positive")
    inst["P"] = dbm_to_watts(inst["power_dbm"])
    return inst


def _case(arg, spec):
    if arg == "auto":
        return classify_case(spec).case
    try:
        return CacheCase(arg.upper())
    except ValueError:
        raise UsageError(f"unknown case {arg!r}")


def _g(x):
    return f"{x:.9g}"


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


def cmd_region(args):
    inst = _instance(args)
    case = _case(args.case, inst["spec"])
    p = np.array(args.p)
    if args.r is not None:
        plan = region_contains(case, p, np.array(args.r), inst["alpha"], p.sum())
        print("none" if plan is None else f"order={plan.label} delta={plan.delta}")
        return 0
    print("order,delta,c_i1,c_i2,c_j1,c_j2,c_i12,c_j12")
    for plan in region_plans(case):
        if plan_admits(plan, p, inst["alpha"]):
            c = evaluate_bounds(plan, p, inst["alpha"])
            print(",".join([plan.label, str(plan.delta)] + [_g(x) for x in c]))
    return 0


def cmd_pareto(args):
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    inst = _instance(args)
    case = _case(args.case, inst["spec"])
    pts = pareto_sweep(case, inst["alpha"], inst["P"], args.grid, tol=args.tol)
    out = _open_out(args.out)
    try:
        out.write("scheme,r_i,r_j,r_sigma,r_i1,r_i2,r_j1,r_j2,order_n,delta,p_i1,p_i2,p_j1,p_j2\n")
        for pt in pts:
            row = ["proposed", _g(pt.r_i), _g(pt.r_j), _g(pt.r_sigma)] + [_g(x) for x in pt.rates]
            row += [pt.plan.label, str(pt.plan.delta)] + [_g(x) for x in pt.powers]
            out.write(",".join(row) + "\n")
        if args.baselines:
            for name, reg in (("oma", oma_region(inst["alpha"], inst["P"], args.grid)),
                              ("noma", noma_region(inst["alpha"], inst["P"], args.grid))):
                for ri, rj in reg:
                    out.write(",".join([name, _g(ri), _g(rj), _g(ri + rj)] + [""] * 10) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _solve(args, inst, refine=False):
    spec = inst["spec"]
    case = _case(args.case, spec)
    beta = subfile_volumes(spec).beta
    return solve_delivery(case, beta, inst["alpha"], inst["P"], inst["bw"], refine_boundaries=refine), beta


def cmd_delivery(args):
    inst = _instance(args)
    sol, _ = _solve(args, inst, args.refine)
    out = _open_out(args.out)
    try:
        out.write("case,n,branch,T_s,gamma,p_i1,p_i2,p_j1,p_j2,r_i1,r_i2,r_j1,r_j2\n")
        row = [sol.case.value, sol.plan.label, sol.plan.branch.value, _g(sol.t_star), _g(sol.gamma_star)]
        row += [_g(x) for x in sol.powers] + [_g(x) for x in sol.rates]
        out.write(",".join(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_baseline(args):
    inst = _instance(args)
    spec = inst["spec"]
    if args.scheme == "oma":
        sol = oma_solve(*noma_demands(spec, True), inst["alpha"], inst["P"], inst["bw"])
        print("scheme,T_s,tau")
        print(f"oma,{_g(sol.t_star)},{_g(sol.tau_star)}")
    else:
        sol = noma_solve(0, 0, inst["alpha"], inst["P"], inst["bw"],
                         with_cache=args.scheme == "noma", cache_spec=spec)
        print("scheme,T_s,p_i,p_j,r_i,r_j")
        print(",".join([args.scheme] + [_g(x) for x in (sol.t_star, sol.p_i, sol.p_j, sol.r_i, sol.r_j)]))
    return 0


def cmd_montecarlo(args):
    inst = _instance(args)
    fv = inst["file"]
    geo_kw = {"tx_power_dbm": inst["power_dbm"], "bandwidth_hz": inst["bw"]}
    for key in ("cell_radius_km", "r_i_km", "r_j_km", "noise_psd_dbm_hz", "pl_intercept_db", "pl_slope"):
        val = resolve(key, getattr(args, key), fv, None)
        if val is not None:
            geo_kw[key] = val
    geometry = GeometryConfig(**geo_kw)
    realizations = resolve("realizations", args.realizations, fv, DEFAULTS["realizations"], int)
    seed = resolve("seed", args.seed, fv, DEFAULTS["seed"], int)
    if realizations < 1:
        raise UsageError("--realizations must be at least 1")
    if seed < 0:
        raise UsageError("--seed must be nonnegative")
    if (args.sweep_var is None) != (args.sweep_values is None):
        raise UsageError("--sweep-var and --sweep-values go together")
    cfg = ExperimentConfig(
        geometry=geometry, cache=inst["spec"], realizations=realizations, seed=seed,
        sweep_var=args.sweep_var, sweep_values=args.sweep_values or (),
        common_random_numbers=not args.independent_streams,
        refine_boundaries=not args.closed_form,
    )
    records = run_experiment(cfg, workers=worker_count())
    out = _open_out(args.out)
    try:
        write_trials_csv(records, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.emit_means:
        with open(args.emit_means, "w", encoding="utf-8", newline="") as fh:
            write_means_csv(summarize(records), fh)
    return 0


def cmd_verify(args):
    inst = _instance(args)
    sol, beta = _solve(args, inst)
    report = verify_lemma1(sol, beta, inst["P"])
    if report.ok:
        print("ok")
        return 0
    for name, msg in report.failures:
        print(f"{name}: {msg}", file=sys.stderr)
    return 1


COMMANDS = {
    "region": cmd_region,
    "pareto": cmd_pareto,
    "delivery": cmd_delivery,
    "baseline": cmd_baseline,
    "montecarlo": cmd_montecarlo,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, InvalidCacheError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
