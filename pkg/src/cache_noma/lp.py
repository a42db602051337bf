"""Phase-1 simplex for small dense feasibility problems.

Problems have the form ``A x <= b, x >= 0`` with a handful of variables.
Rows with a negative right-hand side receive an artificial variable, and the
sum of artificials is minimised with Bland's rule.  A zero optimum means the
system is feasible and the basic solution is returned.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12
MAX_ITER = 500


def _normalize_rows(A, b):
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0.0] = 1.0
    return A / scale[:, None], b / scale


@njit
def _phase1_loop(A, b, feas_tol, pivot_tol, max_iter):
    m, n = A.shape
    n_art = 0
    for r in range(m):
        if b[r] < 0.0:
            n_art += 1
    ncol = n + m + n_art + 1
    T = np.zeros((m + 1, ncol))
    basis = np.empty(m, dtype=np.int64)
    a = 0
    for r in range(m):
        sign = 1.0 if b[r] >= 0.0 else -1.0
        for c in range(n):
            T[r, c] = sign * A[r, c]
        T[r, n + r] = sign
        T[r, ncol - 1] = sign * b[r]
        if sign < 0.0:
            T[r, n + m + a] = 1.0
            basis[r] = n + m + a
            a += 1
        else:
            basis[r] = n + r
    # reduced costs of the phase-1 objective (sum of artificials)
    for r in range(m):
        if basis[r] >= n + m:
            for c in range(ncol):
                if c < n + m or c == ncol - 1:
                    T[m, c] -= T[r, c]

    for _ in range(max_iter):
        enter = -1
        for c in range(ncol - 1):
            if T[m, c] < -pivot_tol:
                enter = c
                break
        if enter < 0:
            break
        leave = -1
        best = np.inf
        for r in range(m):
            if T[r, enter] > pivot_tol:
                ratio = T[r, ncol - 1] / T[r, enter]
                if ratio < best - 1e-15 or (abs(ratio - best) <= 1e-15 and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            break
        piv = T[leave, enter]
        for c in range(ncol):
            T[leave, c] /= piv
        for r in range(m + 1):
            if r != leave:
                f = T[r, enter]
                if f != 0.0:
                    for c in range(ncol):
                        T[r, c] -= f * T[leave, c]
        basis[leave] = enter

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r, ncol - 1]
    infeas = -T[m, ncol - 1]
    return infeas <= feas_tol, x


def _phase1_numpy(A, b, feas_tol, pivot_tol, max_iter):
    m, n = A.shape
    neg = b < 0.0
    n_art = int(neg.sum())
    sign = np.where(neg, -1.0, 1.0)
    T = np.zeros((m + 1, n + m + n_art + 1))
    T[:m, :n] = sign[:, None] * A
    T[:m, n:n + m] = np.diag(sign)
    T[:m, -1] = sign * b
    art_rows = np.flatnonzero(neg)
    T[art_rows, n + m + np.arange(n_art)] = 1.0
    basis = n + np.arange(m)
    basis[art_rows] = n + m + np.arange(n_art)
    T[m, :n + m] = -T[art_rows, :n + m].sum(axis=0)
    T[m, -1] = -T[art_rows, -1].sum()

    for _ in range(max_iter):
        candidates = np.flatnonzero(T[m, :-1] < -pivot_tol)
        if candidates.size == 0:
            break
        enter = candidates[0]
        col = T[:m, enter]
        rows = np.flatnonzero(col > pivot_tol)
        if rows.size == 0:
            break
        ratios = T[rows, -1] / col[rows]
        ties = rows[ratios <= ratios.min() + 1e-15]
        leave = ties[np.argmin(basis[ties])]
        T[leave] /= T[leave, enter]
        factors = T[:, enter].copy()
        factors[leave] = 0.0
        T -= np.outer(factors, T[leave])
        basis[leave] = enter

    x = np.zeros(n)
    in_x = basis < n
    x[basis[in_x]] = T[:m, -1][in_x]
    return -T[m, -1] <= feas_tol, x


def find_feasible(A, b, feas_tol=FEAS_TOL):
    """Return a point of ``{x >= 0 : A x <= b}`` or ``None`` if it is empty.

    Rows are rescaled to unit max-norm before pivoting, so ``feas_tol`` acts
    on normalized constraint violations.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[0] != b.shape[0]:
        raise ValueError("A and b have mismatched row counts")
    A, b = _normalize_rows(A, b)
    if USE_NUMBA:
        ok, x = _phase1_loop(A, b, feas_tol, PIVOT_TOL, MAX_ITER)
    else:
        ok, x = _phase1_numpy(A, b, feas_tol, PIVOT_TOL, MAX_ITER)
    if not ok:
        return None
    return np.maximum(x, 0.0)
