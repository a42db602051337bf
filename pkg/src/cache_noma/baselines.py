"""Reference schemes: time-sharing OMA and conventional NOMA with or without caching.

Neither scheme exploits cached side information of the non-requested file;
with caching, a UE only skips the part of its own request it already holds.
"""
import math
from dataclasses import dataclass

import numpy as np

from .delivery import solve_case_iv
from .region import capacity


@dataclass(frozen=True)
class OmaSolution:
    tau_star: float
    t_star: float
    mu_i: float
    mu_j: float


@dataclass(frozen=True)
class NomaSolution:
    p_i: float
    p_j: float
    r_i: float
    r_j: float
    t_star: float


def oma_time(tau, mu_i, mu_j):
    """Delivery time ``mu_i/tau + mu_j/(1-tau)`` for the time share ``tau`` of UE ``i``."""
    if not 0.0 < tau < 1.0:
        return math.inf
    return mu_i / tau + mu_j / (1.0 - tau)


def oma_from_loads(mu_i, mu_j):
    if mu_i < 0 or mu_j < 0:
        raise ValueError("loads must be nonnegative")
    if mu_i == 0 and mu_j == 0:
        return OmaSolution(0.5, 0.0, 0.0, 0.0)
    if mu_j == 0:
        return OmaSolution(1.0, mu_i, mu_i, mu_j)
    if mu_i == 0:
        return OmaSolution(0.0, mu_j, mu_i, mu_j)
    si, sj = math.sqrt(mu_i), math.sqrt(mu_j)
    return OmaSolution(si / (si + sj), (si + sj) ** 2, mu_i, mu_j)


def oma_solve(beta_i_bits, beta_j_bits, alpha, budget, bandwidth):
    """Optimal TDMA split when each UE gets the full power in its slot."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if beta_i_bits + beta_j_bits == 0:
        return oma_from_loads(0.0, 0.0)
    if budget <= 0:
        return OmaSolution(0.5, math.inf, math.inf, math.inf)
    mu_i = beta_i_bits / (bandwidth * float(capacity(budget / alpha[0])))
    mu_j = beta_j_bits / (bandwidth * float(capacity(budget / alpha[1])))
    return oma_from_loads(mu_i, mu_j)


def noma_demands(cache_spec, with_cache):
    """Bits each UE must receive when only its own cached fraction is used."""
    if with_cache:
        return ((1.0 - cache_spec.c_iA) * cache_spec.v_a_bits,
                (1.0 - cache_spec.c_jB) * cache_spec.v_b_bits)
    return cache_spec.v_a_bits, cache_spec.v_b_bits


def noma_solve(beta_i_bits, beta_j_bits, alpha, budget, bandwidth, with_cache=True, cache_spec=None):
    """Conventional SIC-NOMA delivery time.

    When ``cache_spec`` is given the demands are derived from it (``with_cache``
    selects whether the requesting UE's own cache is used) and the explicit
    ``beta`` arguments are ignored.
    """
    if cache_spec is not None:
        beta_i_bits, beta_j_bits = noma_demands(cache_spec, with_cache)
    sol = solve_case_iv(beta_i_bits, beta_j_bits, alpha, budget, bandwidth)
    return NomaSolution(float(sol.powers[1]), float(sol.powers[3]),
                        float(sol.rates[1]), float(sol.rates[3]), sol.t_star)


def oma_region(alpha, budget, points=101):
    """Boundary ``(r_i, r_j)`` pairs of the time-sharing region."""
    tau = np.linspace(0.0, 1.0, points)
    ci, cj = capacity(budget / alpha[0]), capacity(budget / alpha[1])
    return np.column_stack([tau * ci, (1.0 - tau) * cj])


def noma_region(alpha, budget, points=101):
    """Boundary ``(r_i, r_j)`` pairs of SIC-NOMA; UE ``i`` cancels UE ``j``'s signal.

    The region does not depend on cache contents: caching only shrinks the
    demands, not the achievable rates.
    """
    lam = np.linspace(0.0, 1.0, points)
    p_i = lam * budget
    p_j = budget - p_i
    return np.column_stack([capacity(p_i / alpha[0]), capacity(p_j / (p_i + alpha[1]))])
