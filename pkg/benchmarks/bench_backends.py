"""Time the numba and numpy backends on the same workloads.

    python benchmarks/bench_backends.py [--repeat 3]

Each backend runs in its own interpreter because the backend is fixed at
import time.  Numba compile time is reported separately from the warm runs.
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
t0 = time.perf_counter()
from cache_noma import BACKEND
from cache_noma.caching import CacheSpec, subfile_volumes
from cache_noma.delivery import solve_delivery
from cache_noma.pareto import pareto_sweep, solve_p0

alpha, P = (1e-3, 1e-2), 3.981
beta = subfile_volumes(CacheSpec.from_mbytes((0.2, 0.8, 0.8, 0.2), 500, 500)).beta

def p0():
    solve_p0("I", [0.1, 0.2, 0.3, 0.4], alpha, P)

def sweep():
    pareto_sweep("I", alpha, P, 101, threads=1)

def refined():
    solve_delivery("I", beta, alpha, P, 5e6, refine_boundaries=True)

jobs = {"solve_p0": p0, "pareto_sweep_101": sweep, "refined_delivery": refined}
for f in jobs.values():
    f()  # warm-up, includes compilation
out = {"backend": BACKEND, "startup_and_warmup_s": time.perf_counter() - t0}
for name, f in jobs.items():
    best = float("inf")
    for _ in range(int(sys.argv[1])):
        t = time.perf_counter()
        f()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run(backend, repeat):
    env = dict(os.environ, CACHE_NOMA_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = [run(b, args.repeat) for b in ("numba", "numpy")]
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'workload':<24}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<24}{a:>12.4f}{b:>12.4f}{b / a:>10.1f}")


if __name__ == "__main__":
    main()
