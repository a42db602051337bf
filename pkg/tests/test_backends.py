import json
import os
import subprocess
import sys

import pytest

SCRIPT = r"""
import json
from cache_noma import _accel
from cache_noma.caching import CacheSpec, subfile_volumes
from cache_noma.delivery import solve_delivery
from cache_noma.pareto import pareto_sweep, solve_p0

alpha, P = (1e-3, 1e-2), 3.981
out = {"backend": _accel.BACKEND}
out["p0"] = [solve_p0("I", nu, alpha, P).r_sigma
             for nu in ([0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0.1, 0.2, 0.3, 0.4])]
out["sweep"] = [p.r_sigma for p in pareto_sweep("III", alpha, P, 7, threads=1)]
beta = subfile_volumes(CacheSpec.from_mbytes((0.2, 0.8, 0.8, 0.2), 500, 500)).beta
out["T"] = [solve_delivery("I", beta, alpha, P, 5e6, refine_boundaries=r).t_star for r in (False, True)]
print(json.dumps(out))
"""


def _run(backend):
    env = dict(os.environ, CACHE_NOMA_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout)


def test_backends_agree():
    a, b = _run("numba"), _run("numpy")
    assert a["backend"] == "numba" and b["backend"] == "numpy"
    for key in ("p0", "sweep", "T"):
        assert b[key] == pytest.approx(a[key], rel=1e-9)


def test_unknown_backend_is_rejected():
    env = dict(os.environ, CACHE_NOMA_BACKEND="fortran")
    res = subprocess.run([sys.executable, "-c", "import cache_noma"], capture_output=True, text=True, env=env)
    assert res.returncode != 0 and "CACHE_NOMA_BACKEND" in res.stderr
