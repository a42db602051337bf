"""Pareto-boundary rate tuples by bisection over the sum rate.

For a rate profile ``nu`` the largest ``r_sigma`` with ``r = nu * r_sigma``
achievable is found by bisection.  At a fixed target every rate bound
``log2(1 + s.p/(d.p + alpha)) >= c`` is the halfspace
``(s - (2**c - 1) d).p >= (2**c - 1) alpha``, so each decoding plan reduces to
a small LP feasibility problem.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit
from .caching import CacheCase
from .lp import FEAS_TOL, MAX_ITER, PIVOT_TOL, _phase1_loop, _phase1_numpy
from .region import (
    ZERO_STREAMS, DecodingPlan, capacity, plan_table, region_plans, region_rows,
)

DEFAULT_TOL = 1e-6
REGION_MARGIN = 1e-12
TARGET_MARGIN = 1e-10  # LP targets are raised slightly so the returned p passes re-validation
VALIDATE_TOL = 1e-8


@dataclass(frozen=True)
class RateProfile:
    nu_i1: float
    nu_i2: float
    nu_j1: float
    nu_j2: float

    def __post_init__(self):
        w = self.as_array()
        if np.any(w < 0) or np.any(w > 1):
            raise ValueError("profile weights must lie in [0, 1]")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("profile weights must sum to 1")

    def as_array(self):
        return np.array([self.nu_i1, self.nu_i2, self.nu_j1, self.nu_j2], dtype=float)

    @classmethod
    def from_shares(cls, theta, a=0.5, b=0.5):
        """UE ``i`` gets ``theta`` of the sum rate, split ``a : 1-a`` over its
        two subfiles; UE ``j`` gets the rest split ``b : 1-b``."""
        return cls(theta * a, theta * (1 - a), (1 - theta) * b, (1 - theta) * (1 - b))

    def check_case(self, case):
        for s in ZERO_STREAMS[CacheCase(case)]:
            if self.as_array()[s] != 0:
                raise ValueError(f"case {CacheCase(case).value} requires a zero weight on stream {s}")


@dataclass
class ParetoPoint:
    r_sigma: float
    rates: np.ndarray
    powers: np.ndarray
    plan: DecodingPlan
    profile: RateProfile

    @property
    def r_i(self):
        return float(self.rates[0] + self.rates[1])

    @property
    def r_j(self):
        return float(self.rates[2] + self.rates[3])


def linearize_constraint(a, b, c):
    """Halfspace ``coef . p >= offset`` equivalent to ``log2(1 + a.p/(b.p + 1)) >= c``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = math.expm1(c * math.log(2.0))
    return a - k * b, k


class _PlanSet:
    """Plan tables stacked into arrays for the compiled driver."""

    def __init__(self, plans):
        self.plans = list(plans)
        m = len(self.plans)
        self.S = np.zeros((m, 6, 4))
        self.D = np.zeros((m, 6, 4))
        self.owner = np.zeros((m, 6), dtype=np.int64)
        self.has = np.zeros((m, 6), dtype=np.bool_)
        self.G = np.zeros((m, 2, 4))
        self.ca = np.zeros((m, 2))
        self.cj = np.zeros((m, 2))
        self.nG = np.zeros(m, dtype=np.int64)
        for q, plan in enumerate(self.plans):
            self.S[q], self.D[q], self.owner[q], self.has[q] = plan_table(plan)
            G, ca, cj = region_rows(plan)
            k = len(ca)
            self.nG[q] = k
            self.G[q, :k], self.ca[q, :k], self.cj[q, :k] = G, ca, cj

    def arrays(self):
        return self.S, self.D, self.owner, self.has, self.G, self.ca, self.cj, self.nG


_PLAN_SETS = {}


def _plan_set(case):
    case = CacheCase(case)
    if case not in _PLAN_SETS:
        _PLAN_SETS[case] = _PlanSet(region_plans(case))
    return _PLAN_SETS[case]


_PHASE1 = _phase1_loop if USE_NUMBA else _phase1_numpy


@njit
def _build_rows(S, D, owner, has, G, ca, cj, nG, q, zero, nu, r_sigma, alpha, budget):
    A = np.zeros((16, 4))
    b = np.zeros(16)
    m = 0
    for s in range(6):
        if s < 4:
            w = nu[s]
        elif s == 4:
            w = nu[0] + nu[1]
        else:
            w = nu[2] + nu[3]
        if w <= 0.0:
            continue
        if s >= 4 and not has[q, s]:
            continue
        k = math.expm1((w * r_sigma + TARGET_MARGIN) * 0.6931471805599453)
        for t in range(4):
            A[m, t] = -(S[q, s, t] - k * D[q, s, t])
        b[m] = -k * alpha[owner[q, s]]
        m += 1
    for t in range(4):
        A[m, t] = 1.0
    b[m] = budget
    m += 1
    scale = max(1.0, budget, alpha[1])
    for g in range(nG[q]):
        for t in range(4):
            A[m, t] = G[q, g, t]
        b[m] = ca[q, g] * alpha[0] + cj[q, g] * alpha[1] - REGION_MARGIN * scale
        m += 1
    for t in range(4):
        if zero[t]:
            A[m, t] = 1.0
            b[m] = 0.0
            m += 1
    A = A[:m].copy()
    b = b[:m].copy()
    for r in range(m):
        sc = abs(b[r])
        for t in range(4):
            sc = max(sc, abs(A[r, t]))
        if sc > 0.0:
            for t in range(4):
                A[r, t] /= sc
            b[r] /= sc
    return A, b


@njit
def _validate(S, D, owner, has, G, ca, cj, nG, q, nu, r_sigma, alpha, budget, p):
    for s in range(6):
        if s < 4:
            w = nu[s]
        elif s == 4:
            w = nu[0] + nu[1]
        else:
            w = nu[2] + nu[3]
        if w <= 0.0 or (s >= 4 and not has[q, s]):
            continue
        num = 0.0
        den = alpha[owner[q, s]]
        for t in range(4):
            num += S[q, s, t] * p[t]
            den += D[q, s, t] * p[t]
        c = math.log1p(num / den) / 0.6931471805599453
        if c < w * r_sigma - VALIDATE_TOL * max(1.0, w * r_sigma):
            return False
    tot = 0.0
    for t in range(4):
        tot += p[t]
    if tot > budget * (1.0 + 1e-9):
        return False
    scale = max(1.0, budget, alpha[1])
    for g in range(nG[q]):
        lhs = 0.0
        for t in range(4):
            lhs += G[q, g, t] * p[t]
        if lhs > ca[q, g] * alpha[0] + cj[q, g] * alpha[1] + 1e-12 * scale:
            return False
    return True


@njit
def _feasible(S, D, owner, has, G, ca, cj, nG, zero, nu, r_sigma, alpha, budget, only):
    for q in range(S.shape[0]):
        if only >= 0 and q != only:
            continue
        A, b = _build_rows(S, D, owner, has, G, ca, cj, nG, q, zero, nu, r_sigma, alpha, budget)
        ok, x = _PHASE1(A, b, FEAS_TOL, PIVOT_TOL, MAX_ITER)
        if not ok:
            continue
        for t in range(4):
            x[t] = max(x[t], 0.0)
        tot = 0.0
        for t in range(4):
            tot += x[t]
        if tot > budget:
            for t in range(4):
                x[t] *= budget / tot
        if _validate(S, D, owner, has, G, ca, cj, nG, q, nu, r_sigma, alpha, budget, x):
            return q, x
    return -1, np.zeros(4)


@njit
def _bisect(S, D, owner, has, G, ca, cj, nG, zero, nu, alpha, budget, ub, tol, floor, only):
    """Largest feasible r_sigma; returns (-1, ...) when ``floor`` is already infeasible."""
    lb = 0.0
    best_q, best_p = -1, np.zeros(4)
    if floor > 0.0:
        q, x = _feasible(S, D, owner, has, G, ca, cj, nG, zero, nu, floor, alpha, budget, only)
        if q < 0:
            return -1.0, -1, best_p
        lb, best_q, best_p = floor, q, x
    else:
        q, x = _feasible(S, D, owner, has, G, ca, cj, nG, zero, nu, 0.0, alpha, budget, only)
        best_q, best_p = q, x
    hi = ub
    while hi - lb >= tol:
        mid = 0.5 * (lb + hi)
        q, x = _feasible(S, D, owner, has, G, ca, cj, nG, zero, nu, mid, alpha, budget, only)
        if q >= 0:
            lb, best_q, best_p = mid, q, x
        else:
            hi = mid
    return lb, best_q, best_p


def worker_count():
    """Thread cap from ``NOMA_CACHE_OPT_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("NOMA_CACHE_OPT_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("NOMA_CACHE_OPT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _zero_mask(case):
    z = np.zeros(4, dtype=np.bool_)
    for s in ZERO_STREAMS[CacheCase(case)]:
        z[s] = True
    return z


def _sum_capacity(alpha, budget):
    return float(capacity(budget / alpha[0]) + capacity(budget / alpha[1]))


def _alpha_array(alpha):
    a = np.asarray(alpha, dtype=float).ravel()
    if a.shape != (2,) or np.any(a <= 0):
        raise ValueError("alpha must be two positive noise variances")
    return a


def feasible_p0n(n, branch, nu, r_sigma, alpha, budget):
    """A power vector achieving ``nu * r_sigma`` with order ``n``, or ``None``.

    Both values of the order-7 flag are tried.  ``branch`` does not change the
    constraint set: the per-UE sum bound already covers both decode sequences.
    """
    if r_sigma < 0:
        raise ValueError("r_sigma must be nonnegative")
    nu = np.asarray(nu, dtype=float)
    plans = [DecodingPlan(7, delta=1), DecodingPlan(7, delta=0)] if n == 7 else [DecodingPlan(n, branch)]
    ps = _PlanSet(plans)
    q, x = _feasible(*ps.arrays(), np.zeros(4, dtype=np.bool_), nu, float(r_sigma),
                     _alpha_array(alpha), float(budget), -1)
    return None if q < 0 else x


def _point(ps, nu, r, q, p, profile):
    return ParetoPoint(float(r), nu * r, p, ps.plans[q], profile)


def solve_p0(case, nu, alpha, budget, tol=DEFAULT_TOL):
    """Largest sum rate along the profile ``nu`` over all plans of ``case``.

    Among plans feasible at the final rate the first in (order, delta) sequence
    is reported.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    case = CacheCase(case)
    profile = nu if isinstance(nu, RateProfile) else RateProfile(*np.asarray(nu, dtype=float))
    profile.check_case(case)
    nu = profile.as_array()
    alpha = _alpha_array(alpha)
    ps = _plan_set(case)
    ub = _sum_capacity(alpha, budget)
    r, q, p = _bisect(*ps.arrays(), _zero_mask(case), nu, alpha, float(budget), ub, float(tol), 0.0, -1)
    return _point(ps, nu, r, q, p, profile)


def _split_axes(case):
    case = CacheCase(case)
    a_free = case in (CacheCase.I, CacheCase.III)
    b_free = case in (CacheCase.I, CacheCase.II)
    return a_free, b_free


def _best_for_share(case, theta, alpha, budget, tol, min_step):
    """Maximize the sum rate over the within-UE splits for one UE share ``theta``."""
    ps = _plan_set(case)
    arrays = ps.arrays()
    zero = _zero_mask(case)
    ub = _sum_capacity(alpha, budget)
    a_free, b_free = _split_axes(case)
    a_free = a_free and theta > 0
    b_free = b_free and theta < 1

    best = None

    def evaluate(a, b):
        nonlocal best
        prof = RateProfile.from_shares(theta, a, b)
        nu = prof.as_array()
        floor = best[0] + tol if best is not None else 0.0
        r, q, p = _bisect(*arrays, zero, nu, alpha, budget, ub, tol, floor, -1)
        if q >= 0 and (best is None or r > best[0]):
            best = (r, q, p, nu, prof, a, b)
            return True
        return False

    coarse = np.linspace(0.0, 1.0, 5)
    for a in (coarse if a_free else (0.0,)):
        for b in (coarse if b_free else (0.0,)):
            evaluate(a, b)
    h = 0.25
    while h >= min_step:
        moved = False
        a0, b0 = best[5], best[6]
        moves = []
        if a_free:
            moves += [(a0 + h, b0), (a0 - h, b0)]
        if b_free:
            moves += [(a0, b0 + h), (a0, b0 - h)]
        for a, b in moves:
            if 0.0 <= a <= 1.0 and 0.0 <= b <= 1.0 and evaluate(a, b):
                moved = True
                break
        if not moved:
            h /= 2.0
    r, q, p, nu, prof, _, _ = best
    return _point(ps, nu, r, q, p, prof)


def pareto_sweep(case, alpha, budget, grid, tol=DEFAULT_TOL, min_step=1.0 / 256, threads=None):
    """Boundary points for ``grid`` evenly spaced UE shares ``theta`` in [0, 1].

    ``theta`` is UE ``i``'s share of the sum rate; for every share the split
    between a UE's two subfiles is chosen to maximize the sum rate (coarse
    grid, then pattern search down to ``min_step``).  Points are sorted by
    ``r_i``.
    """
    grid = int(grid)
    if grid < 2:
        raise ValueError("grid must contain at least two profiles")
    case = CacheCase(case)
    alpha = _alpha_array(alpha)
    thetas = np.linspace(0.0, 1.0, grid)
    workers = min(threads or worker_count(), grid)

    def run(theta):
        return _best_for_share(case, float(theta), alpha, float(budget), tol, min_step)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            points = list(ex.map(run, thetas))
    else:
        points = [run(t) for t in thetas]
    points.sort(key=lambda pt: (pt.r_i, -pt.r_j))
    return points


def max_sum_rate(points):
    return max(pt.r_i + pt.r_j for pt in points)
