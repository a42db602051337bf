"""Brute-force reference implementations used only by the test suite.

Rate bounds are retyped from their printed inequalities rather than taken
from the library tables, so agreement between the two is meaningful.
"""
import numpy as np

LOG2 = np.log(2.0)


def C(x):
    return np.log1p(x) / LOG2


def _bounds(n, delta, p, ai, aj):
    """Six bounds ``(i1, i2, j1, j2, i12, j12)`` for arrays of powers (last axis 4)."""
    pi1, pi2, pj1, pj2 = (p[..., k] for k in range(4))
    if n == 1:
        b = [C(pi1 / (pi2 + pj2 + ai)), C(pi2 / ai),
             C(pj1 / (pi2 + aj)), C(pj2 / (pi2 + aj)), None, C((pj1 + pj2) / (pi2 + aj))]
    elif n == 2:
        b = [C(pi1 / (pi2 + pj2 + ai)), C(pi2 / (pj2 + ai)),
             C(pj1 / aj), C(pj2 / (pi2 + pj1 + aj)), None, None]
    elif n == 3:
        b = [C(pi1 / ai), C(pi2 / ai),
             C(pj1 / (pi2 + pj2 + aj)), C(pj2 / (pi2 + aj)), C((pi1 + pi2) / ai), None]
    elif n == 4:
        b = [C(pi1 / (pj2 + ai)), C(pi2 / (pi1 + pj2 + ai)),
             C(pj1 / (pi2 + pj2 + aj)), C(pj2 / aj), None, None]
    elif n == 5:
        b = [C(pi1 / (pi2 + pj2 + ai)), C(pi2 / ai),
             C(pj1 / (pi2 + pj2 + aj)), C(pj2 / (pi2 + aj)), None, None]
    elif n == 6:
        b = [C(pi1 / ai), C(pi2 / ai),
             C(pj1 / (pi2 + aj)), C(pj2 / (pj1 + pi2 + aj)), C((pi1 + pi2) / ai), None]
    elif n == 7:
        b = [C(pi1 / (ai + pj2 * delta)), C(pi2 / (pi1 + pj2 + ai)),
             C(pj1 / aj), C(pj2 / (pi2 + pj1 + aj)), None, None]
    elif n == 8:
        b = [C(pi1 / (pj2 + ai)), C(pi2 / (pi1 + pj2 + ai)),
             C(pj1 / aj), C(pj2 / aj), None, C((pj1 + pj2) / aj)]
    elif n == 0:  # degraded SIC channel without cache side information
        z = np.zeros_like(pi1)
        b = [z, C(pi2 / ai), z, C(pj2 / (pi2 + aj)), None, None]
    else:
        raise ValueError(n)
    if b[4] is None:
        b[4] = b[0] + b[1]
    if b[5] is None:
        b[5] = b[2] + b[3]
    return b


def _in_region(n, delta, p, ai, aj, tol):
    pi1, pi2, pj1, pj2 = (p[..., k] for k in range(4))
    ok = np.ones(pi1.shape, dtype=bool)
    if n == 2:
        ok = pj2 - pj1 >= aj - ai - tol
    elif n == 3:
        ok = pi1 <= aj - ai + tol
    elif n in (4, 5):
        ok = pi1 >= aj - ai - tol
    elif n == 6:
        ok = pi1 <= pj1 + aj - ai + tol
    elif n in (7, 8):
        ok = pi1 >= pj1 + aj - ai - tol
    if n == 7:
        gap = pi2 - (pi1 - pj1 - aj + ai)
        ok &= (np.abs(gap) <= tol) | ((gap > 0) == bool(delta))
    return ok


_CASE_PLANS = {
    "I": [(1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (6, 0), (7, 1), (7, 0), (8, 0)],
    "II": [(1, 0), (2, 0)],
    "III": [(3, 0), (4, 0), (5, 0)],
    "IV": [(0, 0)],
}
_ABSENT = {"I": (), "II": (0,), "III": (2,), "IV": (0, 2)}


def oracle_region_contains(case, p, r, alpha, tol=1e-12):
    """Exhaustive membership test of ``r`` at power ``p``."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    ai, aj = alpha
    if any(r[s] > 0 for s in _ABSENT[case]):
        return False
    rtol = 1e-12 * max(1.0, float(np.max(np.abs(r))))
    ptol = 1e-12 * max(1.0, float(p.sum()), aj)
    for n, d in _CASE_PLANS[case]:
        if not _in_region(n, d, p, ai, aj, ptol):
            continue
        c = _bounds(n, d, p, ai, aj)
        if (r[0] <= c[0] + rtol and r[1] <= c[1] + rtol and r[2] <= c[2] + rtol
                and r[3] <= c[3] + rtol and r[0] + r[1] <= c[4] + rtol
                and r[2] + r[3] <= c[5] + rtol):
            return True
    return False


def simplex_grid(steps, budget, absent=(), spacing="uniform"):
    """Power vectors on the budget simplex ``sum(p) = budget``.

    All but one present stream take levels ``budget*k/steps`` (``uniform``) or
    ``budget*(k/steps)**2`` (``quadratic``, which resolves small powers finely);
    the remaining stream absorbs the rest of the budget.  Every choice of
    remainder stream is included.  Also returns the integer level indices
    (remainder stream marked -1) for neighbour lookups.
    """
    free = [s for s in range(4) if s not in absent]
    frac = np.arange(steps + 1) / steps
    if spacing == "quadratic":
        frac = frac ** 2
    elif spacing != "uniform":
        raise ValueError(spacing)
    levels = budget * frac
    pts, idx = [], []
    for rem in free:
        others = [s for s in free if s != rem]
        mesh = np.meshgrid(*[np.arange(steps + 1)] * len(others), indexing="ij")
        k = np.stack([m.ravel() for m in mesh], axis=1) if others else np.zeros((1, 0), int)
        p = np.zeros((len(k), 4))
        p[:, others] = levels[k]
        p[:, rem] = budget - p[:, others].sum(axis=1)
        keep = p[:, rem] >= -1e-12 * budget
        p[:, rem] = np.maximum(p[:, rem], 0.0)
        ki = np.full((len(k), 4), -1)
        ki[:, others] = k
        ki[:, [s for s in range(4) if s not in others]] = -2
        ki[:, rem] = -1
        kk = np.concatenate([ki, np.full((len(k), 1), rem)], axis=1)
        pts.append(p[keep])
        idx.append(kk[keep])
    return np.concatenate(pts), np.concatenate(idx)


def _time_of(beta, c):
    """Minimal normalized time at fixed bounds: max over the polytope's facets."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = []
        for s in range(4):
            if beta[s] > 0:
                terms.append(beta[s] / c[s])
        for s1, s2, k in ((0, 1, 4), (2, 3, 5)):
            if beta[s1] + beta[s2] > 0:
                terms.append((beta[s1] + beta[s2]) / c[k])
    T = np.max(np.stack(terms), axis=0)
    return np.where(np.isnan(T), np.inf, T)


def oracle_time_field(case, beta, alpha, budget, steps, spacing="uniform"):
    """``(grid, T)`` with the best plan's delivery time (bits / (bps/Hz)) per grid point."""
    ai, aj = alpha
    beta = np.asarray(beta, dtype=float)
    grid, _ = simplex_grid(steps, budget, _ABSENT[case], spacing)
    best = np.full(len(grid), np.inf)
    ptol = 1e-12 * max(1.0, budget, aj)
    for n, d in _CASE_PLANS[case]:
        ok = _in_region(n, d, grid, ai, aj, ptol)
        T = _time_of(beta, _bounds(n, d, grid, ai, aj))
        best = np.where(ok, np.minimum(best, T), best)
    return grid, best


def oracle_delivery_time(case, beta, alpha, budget, steps, bandwidth=1.0, spacing="uniform"):
    """Grid minimum of the delivery time in seconds."""
    _, T = oracle_time_field(case, beta, alpha, budget, steps, spacing)
    return float(T.min()) / bandwidth


def discretization_bound(case, beta, alpha, budget, steps, spacing="uniform"):
    """Largest relative change of T from the grid argmin to its level neighbours."""
    grid, T = oracle_time_field(case, beta, alpha, budget, steps, spacing)
    _, idx = simplex_grid(steps, budget, _ABSENT[case], spacing)
    k = int(np.argmin(T))
    same_rem = idx[:, 4] == idx[k, 4]
    step = np.abs(idx[:, :4] - idx[k, :4]).max(axis=1)
    nb = same_rem & (step == 1) & np.isfinite(T)
    if not np.any(nb):
        return np.inf
    return float(np.max(np.abs(T[nb] - T[k])) / T[k])


# Explicit closed forms of the optimal powers, evaluated in dependency order.
def table_powers(n, branch, delta, gamma, beta, alpha):
    ai, aj = alpha
    A1, A2, B1, B2 = (gamma ** b - 1.0 for b in beta)
    gi1, gi2, gj1, gj2 = (gamma ** b for b in beta)
    first = branch == "First"
    if n == 1:
        pi2 = ai * A2
        if first:
            pj2 = B2 * (pi2 + aj)
            pj1 = B1 * (pi2 + pj2 + aj)
        else:
            pj1 = B1 * (pi2 + aj)
            pj2 = B2 * (pi2 + pj1 + aj)
        pi1 = A1 * (pi2 + pj2 + ai)
    elif n == 2:
        # p_i2 = A2(p_j2 + ai), p_j2 = B2(p_i2 + p_j1 + aj), p_j1 = B1 aj
        pj1 = B1 * aj
        pj2 = B2 * (A2 * ai + pj1 + aj) / (1.0 - A2 * B2)
        pi2 = A2 * (pj2 + ai)
        pi1 = A1 * (pi2 + pj2 + ai)
    elif n in (3, 6):
        if first:
            pi2 = ai * A2
            pi1 = A1 * (pi2 + ai)
        else:
            pi1 = ai * A1
            pi2 = A2 * (pi1 + ai)
        if n == 3:
            pj2 = B2 * (pi2 + aj)
            pj1 = B1 * (pi2 + pj2 + aj)
        else:
            pj1 = B1 * (pi2 + aj)
            pj2 = B2 * (pi2 + pj1 + aj)
    elif n == 4:
        pj2 = B2 * aj
        pi1 = A1 * (pj2 + ai)
        pi2 = A2 * (pi1 + pj2 + ai)
        pj1 = B1 * (pi2 + pj2 + aj)
    elif n == 5:
        pi2 = A2 * ai
        pj2 = B2 * (pi2 + aj)
        pi1 = A1 * (pi2 + pj2 + ai)
        pj1 = B1 * (pi2 + pj2 + aj)
    elif n == 7:
        pj1 = B1 * aj
        pj2 = B2 * (A2 * ai * gi1 + aj * gj1) / (1.0 - B2 * A2 * (1.0 + A1 * delta))
        pi1 = A1 * (ai + delta * pj2)
        pi2 = A2 * (pi1 + pj2 + ai)
    elif n == 8:
        if first:
            pj2 = B2 * aj
            pj1 = B1 * (pj2 + aj)
        else:
            pj1 = B1 * aj
            pj2 = B2 * (pj1 + aj)
        pi1 = A1 * (pj2 + ai)
        pi2 = A2 * (pi1 + pj2 + ai)
    else:
        raise ValueError(n)
    return np.array([pi1, pi2, pj1, pj2])
