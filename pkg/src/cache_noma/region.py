"""Rate bounds and power-region predicates for every CIC+SIC decoding order.

Streams are indexed ``0=(i,1), 1=(i,2), 2=(j,1), 3=(j,2)`` throughout the
package; UE ``i`` is the strong UE (``alpha_i <= alpha_j``).

Every bound has the linear-fractional form
``log2(1 + s.p / (d.p + alpha_k))``.  A decoding plan is stored as a table of
signal vectors ``s``, interference vectors ``d`` and the noise owner ``k`` for
the four per-stream bounds and the two per-UE sum bounds, plus the linear
inequalities defining its power region.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .caching import CacheCase

LN2 = np.log(2.0)
REGION_TOL = 1e-12
CASE_IV_ORDER = 0  # the single SIC plan of the degraded Case-IV channel

STREAMS = ("i1", "i2", "j1", "j2")
I1, I2, J1, J2 = range(4)
SUM_I, SUM_J = 4, 5


class Branch(Enum):
    """Selects between the two listed decode sequences of orders 1, 3, 6, 8."""

    FIRST = "First"
    SECOND = "Second"


BRANCHED_ORDERS = (1, 3, 6, 8)


class InfeasibleOrderError(ValueError):
    """Power allocation lies outside the power region of the requested order."""


class ContractError(ValueError):
    """Arguments are inconsistent with each other (e.g. a wrong delta flag)."""


@dataclass(frozen=True)
class DecodingPlan:
    order_n: int
    branch: Branch = Branch.FIRST
    delta: int = 0

    def __post_init__(self):
        if self.order_n not in range(0, 9):
            raise ValueError(f"order must be in 0..8, got {self.order_n}")
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")
        if self.delta and self.order_n != 7:
            raise ValueError("delta is only meaningful for order 7")

    @property
    def label(self):
        if self.order_n == CASE_IV_ORDER:
            return "IV"
        return str(self.order_n)


@dataclass(frozen=True)
class RateBounds:
    c_i1: float
    c_i2: float
    c_j1: float
    c_j2: float
    c_i12: float
    c_j12: float

    def as_array(self):
        return np.array([self.c_i1, self.c_i2, self.c_j1, self.c_j2, self.c_i12, self.c_j12])

    def dominates(self, r, tol=1e-12):
        """True when rate vector ``r`` satisfies every bound (C2 and C3)."""
        r = np.asarray(r, dtype=float)
        slack = tol * max(1.0, float(np.max(np.abs(r))))
        c = self.as_array()
        return bool(
            np.all(r <= c[:4] + slack)
            and r[0] + r[1] <= c[4] + slack
            and r[2] + r[3] <= c[5] + slack
        )


def capacity(snr):
    """Shannon capacity ``log2(1 + snr)`` in bps/Hz."""
    return np.log1p(snr) / LN2


def _e(*idx):
    v = np.zeros(4)
    for k in idx:
        v[k] = 1.0
    return v


_Z = np.zeros(4)

# (signal, interference, noise owner) for i1, i2, j1, j2, i12, j12.  A missing
# sum bound is None and defaults to the sum of the two per-stream bounds.
_A_I, _A_J = 0, 1
_TABLES = {
    1: [(_e(I1), _e(I2, J2), _A_I), (_e(I2), _Z, _A_I),
        (_e(J1), _e(I2), _A_J), (_e(J2), _e(I2), _A_J),
        None, (_e(J1, J2), _e(I2), _A_J)],
    2: [(_e(I1), _e(I2, J2), _A_I), (_e(I2), _e(J2), _A_I),
        (_e(J1), _Z, _A_J), (_e(J2), _e(I2, J1), _A_J),
        None, None],
    3: [(_e(I1), _Z, _A_I), (_e(I2), _Z, _A_I),
        (_e(J1), _e(I2, J2), _A_J), (_e(J2), _e(I2), _A_J),
        (_e(I1, I2), _Z, _A_I), None],
    4: [(_e(I1), _e(J2), _A_I), (_e(I2), _e(I1, J2), _A_I),
        (_e(J1), _e(I2, J2), _A_J), (_e(J2), _Z, _A_J),
        None, None],
    5: [(_e(I1), _e(I2, J2), _A_I), (_e(I2), _Z, _A_I),
        (_e(J1), _e(I2, J2), _A_J), (_e(J2), _e(I2), _A_J),
        None, None],
    6: [(_e(I1), _Z, _A_I), (_e(I2), _Z, _A_I),
        (_e(J1), _e(I2), _A_J), (_e(J2), _e(I2, J1), _A_J),
        (_e(I1, I2), _Z, _A_I), None],
    # order 7: the (i,1) interference carries p_j2 only when delta = 1
    (7, 1): [(_e(I1), _e(J2), _A_I), (_e(I2), _e(I1, J2), _A_I),
             (_e(J1), _Z, _A_J), (_e(J2), _e(I2, J1), _A_J),
             None, None],
    (7, 0): [(_e(I1), _Z, _A_I), (_e(I2), _e(I1, J2), _A_I),
             (_e(J1), _Z, _A_J), (_e(J2), _e(I2, J1), _A_J),
             None, None],
    8: [(_e(I1), _e(J2), _A_I), (_e(I2), _e(I1, J2), _A_I),
        (_e(J1), _Z, _A_J), (_e(J2), _Z, _A_J),
        None, (_e(J1, J2), _Z, _A_J)],
    CASE_IV_ORDER: [(_Z, _Z, _A_I), (_e(I2), _Z, _A_I),
                    (_Z, _Z, _A_J), (_e(J2), _e(I2), _A_J),
                    None, None],
}

# Power regions as rows ``g.p <= ca*alpha_i + cj*alpha_j``.
_REGIONS = {
    1: [],
    2: [(_e(J1) - _e(J2), 1.0, -1.0)],          # p_j2 - p_j1 > alpha_j - alpha_i
    3: [(_e(I1), -1.0, 1.0)],                   # p_i1 < alpha_j - alpha_i
    4: [(-_e(I1), 1.0, -1.0)],
    5: [(-_e(I1), 1.0, -1.0)],
    6: [(_e(I1) - _e(J1), -1.0, 1.0)],          # p_i1 < p_j1 + alpha_j - alpha_i
    (7, 1): [(_e(J1) - _e(I1), 1.0, -1.0),
             (_e(I1) - _e(I2) - _e(J1), -1.0, 1.0)],   # delta = 1
    (7, 0): [(_e(J1) - _e(I1), 1.0, -1.0),
             (_e(I2) + _e(J1) - _e(I1), 1.0, -1.0)],   # delta = 0
    8: [(_e(J1) - _e(I1), 1.0, -1.0)],
    CASE_IV_ORDER: [],
}


def _key(plan):
    if plan.order_n == 7:
        return (7, plan.delta)
    return plan.order_n


def plan_table(plan):
    """Arrays ``(S, D, owner, has_sum)`` describing the bounds of ``plan``.

    ``S`` and ``D`` are 6x4; rows 4 and 5 are the per-UE sum bounds and are
    only meaningful where ``has_sum`` is true.
    """
    rows = _TABLES[_key(plan)]
    S = np.zeros((6, 4))
    D = np.zeros((6, 4))
    owner = np.zeros(6, dtype=np.int64)
    has_sum = np.zeros(6, dtype=np.bool_)
    for r, entry in enumerate(rows):
        if entry is None:
            continue
        S[r], D[r], owner[r] = entry
        has_sum[r] = True
    owner[SUM_J] = _A_J
    return S, D, owner, has_sum


def region_rows(plan):
    """Power-region inequalities of ``plan`` as ``(G, coef_alpha_i, coef_alpha_j)``."""
    rows = _REGIONS[_key(plan)]
    G = np.array([g for g, _, _ in rows]).reshape(-1, 4)
    ca = np.array([c for _, c, _ in rows])
    cj = np.array([c for _, _, c in rows])
    return G, ca, cj


# Restrictions for Cases II / III: the stream cached at its own UE is absent.
ZERO_STREAMS = {
    CacheCase.I: (),
    CacheCase.II: (I1,),
    CacheCase.III: (J1,),
    CacheCase.IV: (I1, J1),
}


def feasible_orders(case):
    """Decoding orders available for a cache configuration."""
    case = CacheCase(case)
    if case is CacheCase.I:
        return tuple(range(1, 9))
    if case is CacheCase.II:
        return (1, 2)
    if case is CacheCase.III:
        return (3, 4, 5)
    return (CASE_IV_ORDER,)


def region_plans(case):
    """All (order, delta) plans whose union forms the rate region of ``case``.

    Branches are not enumerated: the bound set of an order already contains
    both braced decode sequences via its sum constraint.
    """
    plans = []
    for n in feasible_orders(case):
        if n == 7:
            plans.append(DecodingPlan(7, delta=1))
            plans.append(DecodingPlan(7, delta=0))
        else:
            plans.append(DecodingPlan(n))
    return plans


def _alphas(alpha):
    a_i, a_j = (float(x) for x in alpha)
    return a_i, a_j


def _tol(p, alpha):
    return REGION_TOL * max(1.0, float(np.sum(p)), float(max(alpha)))


def delta_indicator(p, alpha):
    """The order-7 flag ``1[p_i2 > p_i1 - p_j1 - alpha_j + alpha_i]``."""
    a_i, a_j = _alphas(alpha)
    return int(p[I2] > p[I1] - p[J1] - a_j + a_i)


def delta_consistent(delta, p, alpha):
    """Whether ``delta`` matches ``p``; both values are accepted at the boundary."""
    a_i, a_j = _alphas(alpha)
    gap = p[I2] - (p[I1] - p[J1] - a_j + a_i)
    tol = _tol(p, alpha)
    if abs(gap) <= tol:
        return True
    return delta == int(gap > 0)


def power_region_contains(n, p, alpha, delta=None):
    """Evaluate the power-region predicate of order ``n`` (strict inequalities closed).

    For ``n = 7`` the delta condition is also enforced when ``delta`` is given.
    """
    p = np.asarray(p, dtype=float)
    a_i, a_j = _alphas(alpha)
    tol = _tol(p, alpha)
    rows = _REGIONS[(7, 1)][:1] if n == 7 else _REGIONS[n]
    inside = all(float(g @ p) <= ca * a_i + cj * a_j + tol for g, ca, cj in rows)
    if inside and n == 7 and delta is not None:
        return delta_consistent(delta, p, alpha)
    return inside


def evaluate_bounds(plan, p, alpha):
    """Raw bound values ``[c_i1, c_i2, c_j1, c_j2, c_i12, c_j12]`` with no checks."""
    S, D, owner, has = plan_table(plan)
    noise = np.asarray(alpha, dtype=float)[owner]
    p = np.asarray(p, dtype=float)
    c = capacity((S @ p) / (D @ p + noise))
    if not has[SUM_I]:
        c[SUM_I] = c[I1] + c[I2]
    if not has[SUM_J]:
        c[SUM_J] = c[J1] + c[J2]
    return c


def rate_bounds(n, branch, delta, p, alpha):
    """Rate bounds of order ``n`` at power ``p``.

    ``branch`` does not change the bounds (both decode sequences of a braced
    order share the same region); it is accepted for interface symmetry with
    the delivery solver.  Raises :class:`InfeasibleOrderError` when ``p`` is
    outside the order's power region and :class:`ContractError` for an order-7
    ``delta`` that disagrees with ``p``.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("powers must be nonnegative")
    Branch(branch)
    if n == 7:
        if delta not in (0, 1):
            raise ContractError("order 7 needs delta in {0, 1}")
        if not delta_consistent(delta, p, alpha):
            raise ContractError(f"delta={delta} is inconsistent with p={p.tolist()}")
    if not power_region_contains(n, p, alpha):
        raise InfeasibleOrderError(f"p lies outside the power region of order {n}")
    plan = DecodingPlan(n, Branch(branch), delta if n == 7 else 0)
    return RateBounds(*evaluate_bounds(plan, p, alpha))


def plan_admits(plan, p, alpha):
    """Power-region and delta conditions of ``plan`` at ``p``."""
    if plan.order_n == 7:
        return power_region_contains(7, p, alpha) and delta_consistent(plan.delta, p, alpha)
    return power_region_contains(plan.order_n, p, alpha)


def region_contains(case, p, r, alpha, budget, tol=1e-12):
    """Return a plan whose bounds dominate ``r`` at power ``p``, or ``None``.

    Plans are tried in increasing (order, delta-descending) sequence, so the
    returned plan is the lexicographically first one that works.
    """
    case = CacheCase(case)
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(p < 0) or np.any(r < 0):
        raise ValueError("p and r must be nonnegative")
    if p.sum() > budget * (1 + 1e-12) + 1e-300:
        raise ValueError("p exceeds the power budget")
    for s in ZERO_STREAMS[case]:
        if r[s] > 0:
            return None
    for plan in region_plans(case):
        if not plan_admits(plan, p, alpha):
            continue
        bounds = RateBounds(*evaluate_bounds(plan, p, alpha))
        if bounds.dominates(r, tol):
            return plan
    return None
