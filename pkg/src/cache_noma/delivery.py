"""Delivery-time-minimal power and rate allocation.

For a decoding plan the optimal powers satisfy ``p = (gamma**beta~ - 1) * I*(p)``
where ``I*`` is the plan's interference-plus-noise vector.  ``I*`` is affine in
``p`` (``I* = M p + noise``), so for a given ``gamma`` the powers follow from a
4x4 linear solve.  Total power grows with ``gamma`` until a pole (cyclic
orders 2 and 7); the largest ``gamma`` that exhausts the budget gives the
delivery time ``beta_ref / (BW * log2 gamma)``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit
from .caching import CacheCase
from .region import (
    BRANCHED_ORDERS, CASE_IV_ORDER, I1, I2, J1, J2, SUM_I, SUM_J, Branch,
    DecodingPlan, capacity, delta_consistent, evaluate_bounds, feasible_orders,
    power_region_contains,
)

LN2 = math.log(2.0)
GAMMA_REL_TOL = 1e-10
DOUBLING_CAP = 60.0  # gamma never exceeds 2**60
TIE_REL_TOL = 1e-9
REFINE_REL_GAIN = 1e-6  # the LP route must be this much faster to replace the closed form

_A_I, _A_J = 0, 1

# I* rows: tuple of interfering streams and noise owner per stream.
_F, _S = Branch.FIRST, Branch.SECOND
_IROWS = {
    (1, _F): (((I2, J2), _A_I), ((), _A_I), ((J2, I2), _A_J), ((I2,), _A_J)),
    (1, _S): (((I2, J2), _A_I), ((), _A_I), ((I2,), _A_J), ((I2, J1), _A_J)),
    (2, _F): (((I2, J2), _A_I), ((J2,), _A_I), ((), _A_J), ((I2, J1), _A_J)),
    (3, _F): (((I2,), _A_I), ((), _A_I), ((I2, J2), _A_J), ((I2,), _A_J)),
    (3, _S): (((), _A_I), ((I1,), _A_I), ((I2, J2), _A_J), ((I2,), _A_J)),
    (4, _F): (((J2,), _A_I), ((I1, J2), _A_I), ((I2, J2), _A_J), ((), _A_J)),
    (5, _F): (((I2, J2), _A_I), ((), _A_I), ((I2, J2), _A_J), ((I2,), _A_J)),
    (6, _F): (((I2,), _A_I), ((), _A_I), ((I2,), _A_J), ((J1, I2), _A_J)),
    (6, _S): (((), _A_I), ((I1,), _A_I), ((I2,), _A_J), ((J1, I2), _A_J)),
    (7, _F): (((J2,), _A_I), ((I1, J2), _A_I), ((), _A_J), ((I2, J1), _A_J)),
    (8, _F): (((J2,), _A_I), ((I1, J2), _A_I), ((J2,), _A_J), ((), _A_J)),
    (8, _S): (((J2,), _A_I), ((I1, J2), _A_I), ((), _A_J), ((J1,), _A_J)),
    (CASE_IV_ORDER, _F): (((), _A_I), ((), _A_I), ((), _A_J), ((I2,), _A_J)),
}


class DeliveryInvariantError(RuntimeError):
    """No decoding order produced an admissible allocation."""


def _branches(n):
    return (Branch.FIRST, Branch.SECOND) if n in BRANCHED_ORDERS else (Branch.FIRST,)


def interference_matrix(n, branch=Branch.FIRST, delta=0):
    """``(M, owner)`` with ``I*_s = (M p)_s + alpha[owner_s]``."""
    branch = Branch(branch)
    if n not in BRANCHED_ORDERS and branch is Branch.SECOND:
        raise ValueError(f"order {n} has no second branch")
    rows = _IROWS[(n, branch)]
    M = np.zeros((4, 4))
    owner = np.zeros(4, dtype=np.int64)
    for s, (streams, k) in enumerate(rows):
        for t in streams:
            M[s, t] = 1.0
        owner[s] = k
    if n == 7 and not delta:
        M[I1, J2] = 0.0
    return M, owner


def interference_for(n, branch, delta, p, alpha):
    """Interference-plus-noise power ``I*`` seen by each stream at power ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("powers must be nonnegative")
    M, owner = interference_matrix(n, branch, delta)
    return M @ p + np.asarray(alpha, dtype=float)[owner]


@njit
def _solve4(A, y):
    """Gaussian elimination with partial pivoting; NaNs when singular."""
    n = A.shape[0]
    A = A.copy()
    y = y.copy()
    for c in range(n):
        piv = c
        for r in range(c + 1, n):
            if abs(A[r, c]) > abs(A[piv, c]):
                piv = r
        if abs(A[piv, c]) < 1e-300:
            return np.full(n, np.nan)
        if piv != c:
            for k in range(n):
                tmp = A[c, k]
                A[c, k] = A[piv, k]
                A[piv, k] = tmp
            tmp = y[c]
            y[c] = y[piv]
            y[piv] = tmp
        for r in range(c + 1, n):
            f = A[r, c] / A[c, c]
            if f != 0.0:
                for k in range(c, n):
                    A[r, k] -= f * A[c, k]
                y[r] -= f * y[c]
    x = np.zeros(n)
    for r in range(n - 1, -1, -1):
        acc = y[r]
        for k in range(r + 1, n):
            acc -= A[r, k] * x[k]
        x[r] = acc / A[r, r]
    return x


@njit
def _powers_at(M, noise, beta_t, t):
    """Powers at ``log2 gamma = t``; ``inf`` entries past a pole."""
    n = M.shape[0]
    g = np.empty(n)
    for s in range(n):
        g[s] = math.expm1(beta_t[s] * t * 0.6931471805599453)
    A = np.eye(n)
    rhs = np.empty(n)
    for s in range(n):
        for k in range(n):
            A[s, k] -= g[s] * M[s, k]
        rhs[s] = g[s] * noise[s]
    p = _solve4(A, rhs)
    scale = 0.0
    for s in range(n):
        if not np.isfinite(p[s]):
            return np.full(n, np.inf)
        scale = max(scale, abs(p[s]))
    for s in range(n):
        if p[s] < -1e-12 * max(scale, 1e-300):
            return np.full(n, np.inf)
        if p[s] < 0.0 or g[s] == 0.0:
            p[s] = 0.0  # g == 0: no demand, drop solve round-off
    return p


@njit
def _bisect_log_gamma(M, noise, beta_t, budget, rel_tol, cap):
    """Largest ``t = log2 gamma <= cap`` whose total power stays within ``budget``.

    Returns -1 when even ``t = cap`` leaves power unused.
    """
    if budget <= 0.0:
        return 0.0
    hi = 1.0
    while np.sum(_powers_at(M, noise, beta_t, hi)) < budget:
        if hi >= cap:
            return -1.0
        hi = min(2.0 * hi, cap)
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        total = np.sum(_powers_at(M, noise, beta_t, mid))
        if total <= budget:
            lo = mid
            if hi - lo <= rel_tol * hi and budget - total <= 1e-12 * budget:
                break
        else:
            hi = mid
    return lo


def _normalized(beta):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (4,) or np.any(beta < 0) or not np.all(np.isfinite(beta)):
        raise ValueError("beta must be four finite nonnegative volumes")
    ref = float(beta.max())
    if ref <= 0:
        raise ValueError("at least one beta must be positive")
    return beta / ref, ref


def powers_for_gamma(n, branch, delta, gamma, beta, alpha):
    """Powers ``p = (gamma**beta~ - 1) * I*(p)`` for the given plan.

    ``beta`` is normalized by its maximum before exponentiation.  Returns an
    array of ``inf`` when ``gamma`` lies beyond the pole of a cyclic order.
    """
    if not gamma >= 1.0:
        raise ValueError("gamma must be >= 1")
    beta_t, _ = _normalized(beta)
    M, owner = interference_matrix(n, branch, delta)
    noise = np.asarray(alpha, dtype=float)[owner]
    return _powers_at(M, noise, beta_t, math.log2(gamma))


def _plan_for(n, branch, delta):
    return DecodingPlan(n, Branch(branch), delta if n == 7 else 0)


def _admissible(n, delta, p, alpha):
    if n == CASE_IV_ORDER:
        return True
    if not power_region_contains(n, p, alpha):
        return False
    return n != 7 or delta_consistent(delta, p, alpha)


def _log_gamma(n, branch, delta, beta, alpha, budget, rel_tol=GAMMA_REL_TOL):
    beta_t, _ = _normalized(beta)
    M, owner = interference_matrix(n, branch, delta)
    noise = np.asarray(alpha, dtype=float)[owner]
    t = _bisect_log_gamma(M, noise, beta_t, float(budget), rel_tol, DOUBLING_CAP)
    if t < 0:
        return None
    return t, _powers_at(M, noise, beta_t, t)


def solve_gamma(n, branch, delta, beta, alpha, budget, tol=GAMMA_REL_TOL):
    """``(gamma_n, p)`` exhausting ``budget`` for one plan, or ``None``.

    ``None`` is returned when the powers leave the order's power region or
    contradict the order-7 ``delta``.
    """
    out = _log_gamma(n, branch, delta, beta, alpha, budget, tol)
    if out is None:
        return None
    t, p = out
    if not _admissible(n, delta, p, alpha):
        return None
    return 2.0 ** t, p


@dataclass
class DeliverySolution:
    t_star: float
    gamma_star: float
    plan: DecodingPlan
    powers: np.ndarray
    rates: np.ndarray
    interference: np.ndarray
    case: CacheCase = CacheCase.I
    alpha: tuple = (1.0, 1.0)
    beta: np.ndarray = field(default_factory=lambda: np.zeros(4))
    bandwidth: float = 1.0
    rejected: list = field(default_factory=list)
    method: str = "closed-form"

    @property
    def t_normalized(self):
        """Delivery time in units of ``beta_ref / BW`` (equals ``1/log2 gamma``)."""
        return 1.0 / math.log2(self.gamma_star) if self.gamma_star > 1 else math.inf

    @property
    def branch(self):
        return self.plan.branch


def _trivial_solution(case, beta, alpha, bandwidth, t_star):
    plan = DecodingPlan(CASE_IV_ORDER if case is CacheCase.IV else 1)
    z = np.zeros(4)
    return DeliverySolution(t_star, 1.0, plan, z.copy(), z.copy(),
                            interference_for(plan.order_n, plan.branch, 0, z, alpha),
                            case, tuple(alpha), np.asarray(beta, dtype=float), bandwidth)


def _plans_of(case):
    for n in feasible_orders(case):
        for br in _branches(n):
            for delta in ((1, 0) if n == 7 else (0,)):
                yield n, br, delta


def solve_delivery(case, beta, alpha, budget, bandwidth, refine_boundaries=False):
    """Minimum delivery time over every decoding plan admissible for ``case``.

    ``beta`` holds the four subfile volumes in bits, ``alpha`` the effective
    noise variances ``(alpha_i, alpha_j)`` with ``alpha_i <= alpha_j``.

    By default only the closed-form allocations (equal per-bit rates, every
    rate bound tight, full power) are considered, and a plan whose closed form
    leaves its power region is dropped.  With ``refine_boundaries=True`` the
    problem is also solved exactly per plan as a bisection over LP feasibility
    checks, which recovers optima lying on a power-region boundary; the faster
    of the two allocations is returned (``method`` tells which).
    """
    case = CacheCase(case)
    beta = np.asarray(beta, dtype=float)
    alpha = (float(alpha[0]), float(alpha[1]))
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if np.any(beta < 0):
        raise ValueError("beta must be nonnegative")
    if beta.sum() == 0:
        return _trivial_solution(case, beta, alpha, bandwidth, 0.0)
    if budget == 0:
        return _trivial_solution(case, beta, alpha, bandwidth, math.inf)
    if case is CacheCase.IV:
        return solve_case_iv(beta[I2], beta[J2], alpha, budget, bandwidth)

    beta_t, ref = _normalized(beta)
    best = None
    rejected = []
    for n, br, delta in _plans_of(case):
        out = _log_gamma(n, br, delta, beta, alpha, budget)
        if out is None:
            rejected.append(((n, br.value, delta), "no gamma within cap"))
            continue
        t, p = out
        if not _admissible(n, delta, p, alpha):
            rejected.append(((n, br.value, delta), "outside power region"))
            continue
        if best is None or t > best[0] * (1 + TIE_REL_TOL):
            best = (t, n, br, delta, p)
    if refine_boundaries:
        refined = _boundary_solution(case, beta, alpha, budget, bandwidth)
        if refined is not None and (best is None or refined.t_star < ref / (bandwidth * best[0]) * (1 - REFINE_REL_GAIN)):
            refined.rejected = rejected
            return refined
    if best is None:
        raise DeliveryInvariantError(f"no admissible decoding plan; rejected={rejected}")
    t, n, br, delta, p = best
    I = interference_for(n, br, delta, p, alpha)
    rates = beta_t * t
    return DeliverySolution(
        t_star=ref / (bandwidth * t) if t > 0 else math.inf,
        gamma_star=2.0 ** t,
        plan=_plan_for(n, br, delta),
        powers=p,
        rates=rates,
        interference=I,
        case=case,
        alpha=alpha,
        beta=beta,
        bandwidth=bandwidth,
        rejected=rejected,
    )


def _boundary_solution(case, beta, alpha, budget, bandwidth, tol=1e-9):
    from .pareto import _bisect, _plan_set, _sum_capacity, _zero_mask

    total = float(beta.sum())
    nu = beta / total
    ps = _plan_set(case)
    a = np.asarray(alpha, dtype=float)
    r_sigma, q, p = _bisect(*ps.arrays(), _zero_mask(case), nu, a, float(budget),
                            _sum_capacity(a, budget), tol, 0.0, -1)
    if q < 0 or r_sigma <= 0:
        return None
    plan = ps.plans[q]
    ref = float(beta.max())
    t = ref * r_sigma / total
    return DeliverySolution(
        t_star=total / (bandwidth * r_sigma),
        gamma_star=2.0 ** t,
        plan=plan,
        powers=p,
        rates=nu * r_sigma,
        interference=interference_for(plan.order_n, plan.branch, plan.delta, p, alpha),
        case=case,
        alpha=alpha,
        beta=beta,
        bandwidth=bandwidth,
        method="boundary",
    )


def _case_iv_pj2(p_i2, rho, alpha):
    a_i, a_j = alpha
    with np.errstate(over="ignore"):
        growth = math.expm1(min(rho * math.log1p(p_i2 / a_i), 700.0))
    return growth * (p_i2 + a_j)


def solve_case_iv(beta_i2, beta_j2, alpha, budget, bandwidth, tol=1e-12):
    """Conventional SIC delivery: UE ``i`` cancels ``x_j2`` before decoding ``x_i2``.

    Bisects ``p_i2`` on ``p_i2 + p_j2(p_i2) = budget`` where ``p_j2`` keeps the
    two completion times equal.
    """
    alpha = (float(alpha[0]), float(alpha[1]))
    beta = np.array([0.0, beta_i2, 0.0, beta_j2], dtype=float)
    if beta_i2 < 0 or beta_j2 < 0:
        raise ValueError("beta must be nonnegative")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if beta_i2 + beta_j2 == 0:
        return _trivial_solution(CacheCase.IV, beta, alpha, bandwidth, 0.0)
    if budget <= 0:
        return _trivial_solution(CacheCase.IV, beta, alpha, bandwidth, math.inf)

    if beta_i2 == 0:
        p_i2, p_j2 = 0.0, float(budget)
    elif beta_j2 == 0:
        p_i2, p_j2 = float(budget), 0.0
    else:
        rho = beta_j2 / beta_i2
        lo, hi = 0.0, float(budget)
        while hi - lo > tol * budget:
            mid = 0.5 * (lo + hi)
            if mid + _case_iv_pj2(mid, rho, alpha) <= budget:
                lo = mid
            else:
                hi = mid
        p_i2 = lo
        p_j2 = budget - p_i2

    p = np.array([0.0, p_i2, 0.0, p_j2])
    I = interference_for(CASE_IV_ORDER, Branch.FIRST, 0, p, alpha)
    rates = np.where(beta > 0, capacity(p / I), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        times = np.where(beta > 0, beta / (bandwidth * rates), 0.0)
    t_star = float(times.max())
    ref = float(beta.max())
    k = int(np.argmax(beta))
    gamma = 2.0 ** (rates[k] / (beta[k] / ref))
    return DeliverySolution(t_star, gamma, DecodingPlan(CASE_IV_ORDER), p, rates, I,
                            CacheCase.IV, alpha, beta, bandwidth)


@dataclass
class LemmaReport:
    ok: bool
    failures: list

    def __bool__(self):
        return self.ok


def verify_lemma1(solution, beta, budget, ratio_tol=1e-6, rate_tol=1e-9, power_tol=1e-6):
    """Check proportional rates, dominant-face rates and an exhausted budget.

    Returns a :class:`LemmaReport` whose ``failures`` name the violated
    condition (``"proportional"``, ``"dominant-face"`` or ``"budget"``).
    """
    beta = np.asarray(beta, dtype=float)
    p = np.asarray(solution.powers, dtype=float)
    r = np.asarray(solution.rates, dtype=float)
    failures = []

    pos = beta > 0
    if budget > 0 and np.any(pos):
        per_bit = r[pos] / beta[pos]
        spread = per_bit.max() - per_bit.min()
        if per_bit.min() <= 0 or spread > ratio_tol * per_bit.max():
            failures.append(("proportional", f"rate per bit spread {spread:.3g} over {per_bit.tolist()}"))
    for s in np.flatnonzero(~pos):
        if r[s] != 0 or p[s] != 0:
            failures.append(("proportional", f"stream {s} has no demand but r={r[s]}, p={p[s]}"))

    I = np.asarray(solution.interference, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = capacity(p / I)
    if np.any(np.abs(direct - r) > rate_tol * np.maximum(1.0, r)):
        failures.append(("dominant-face", f"rates {r.tolist()} != C(p/I*) {direct.tolist()}"))
    c = evaluate_bounds(solution.plan, p, solution.alpha)
    slack = rate_tol * max(1.0, float(r.max()))
    if np.any(r > c[:4] + slack) or r[I1] + r[I2] > c[SUM_I] + slack or r[J1] + r[J2] > c[SUM_J] + slack:
        failures.append(("dominant-face", "rates exceed the plan's bounds"))
    for k, (s1, s2, sk) in enumerate(((I1, I2, SUM_I), (J1, J2, SUM_J))):
        if beta[s1] + beta[s2] == 0:
            continue
        if c[s1] + c[s2] > c[sk] + slack:
            tight = abs(r[s1] + r[s2] - c[sk]) <= slack
        else:
            tight = (abs(r[s1] - c[s1]) <= slack and beta[s1] > 0) or (abs(r[s2] - c[s2]) <= slack and beta[s2] > 0)
        if not tight:
            failures.append(("dominant-face", f"UE {'ij'[k]} is not on the dominant face"))

    # power budget
    if abs(p.sum() - budget) > power_tol * budget:
        failures.append(("budget", f"sum p = {p.sum():.9g}, budget = {budget:.9g}"))
    return LemmaReport(not failures, failures)
