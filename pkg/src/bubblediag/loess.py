"""Locally weighted polynomial regression with a tunable equivalent df.

The smoother is linear in the responses, so its hat (smoothing) matrix L is
well defined; we use trace(L) as the equivalent degrees of freedom. Only the
diagonal of L is ever materialized: the local fit at x_i weights the point's
own response by the (0,0) element of the inverse local normal matrix, since
the point sits at the center of its own neighborhood with tricube weight 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class LoessFit:
    fitted: np.ndarray
    hat_diag: np.ndarray
    trace: float
    k: int
    degree: int


@njit(cache=True)
def _solve_sym(a, rhs):
    """Cholesky solve for a small SPD system with multiple right-hand sides.

    Returns False when a pivot collapses (singular to working precision).
    """
    p = a.shape[0]
    for j in range(p):
        d = a[j, j]
        for t in range(j):
            d -= a[j, t] * a[j, t]
        if d <= 1e-300:
            return False
        d = np.sqrt(d)
        a[j, j] = d
        for i in range(j + 1, p):
            s = a[i, j]
            for t in range(j):
                s -= a[i, t] * a[j, t]
            a[i, j] = s / d
    for r in range(rhs.shape[1]):
        for i in range(p):
            s = rhs[i, r]
            for t in range(i):
                s -= a[i, t] * rhs[t, r]
            rhs[i, r] = s / a[i, i]
        for i in range(p - 1, -1, -1):
            s = rhs[i, r]
            for t in range(i + 1, p):
                s -= a[t, i] * rhs[t, r]
            rhs[i, r] = s / a[i, i]
    return True


@njit(cache=True)
def _loess_kernel(x, y, k, degree):
    n = x.size
    p = degree + 1
    fitted = np.empty(n)
    hat = np.empty(n)
    a = np.empty((p, p))
    rhs = np.empty((p, 2))
    for i in range(n):
        lo = i - k // 2
        if lo < 0:
            lo = 0
        if lo > n - k:
            lo = n - k
        while lo + k < n and x[lo + k] - x[i] < x[i] - x[lo]:
            lo += 1
        while lo > 0 and x[i] - x[lo - 1] < x[lo + k - 1] - x[i]:
            lo -= 1
        h = max(x[i] - x[lo], x[lo + k - 1] - x[i])
        for r in range(p):
            for c in range(p):
                a[r, c] = 0.0
            rhs[r, 0] = 0.0
            rhs[r, 1] = 1.0 if r == 0 else 0.0
        for j in range(lo, lo + k):
            d = abs(x[j] - x[i]) / h
            if d >= 1.0:
                continue
            w = (1.0 - d * d * d) ** 3
            u = (x[j] - x[i]) / h
            um = 1.0
            pow_u = np.empty(p)
            for r in range(p):
                pow_u[r] = um
                um *= u
            for r in range(p):
                wr = w * pow_u[r]
                for c in range(r, p):
                    a[r, c] += wr * pow_u[c]
                rhs[r, 0] += wr * y[j]
        for r in range(p):
            for c in range(r):
                a[r, c] = a[c, r]
        ok = _solve_sym(a, rhs)
        if not ok:
            # fall back to the local weighted mean
            sw = 0.0
            sy = 0.0
            for j in range(lo, lo + k):
                d = abs(x[j] - x[i]) / h
                if d >= 1.0:
                    continue
                w = (1.0 - d * d * d) ** 3
                sw += w
                sy += w * y[j]
            fitted[i] = sy / sw
            hat[i] = 1.0 / sw
        else:
            fitted[i] = rhs[0, 0]
            hat[i] = rhs[0, 1]
    return fitted, hat


def loess_fit(x: np.ndarray, y: np.ndarray, k: int, degree: int) -> LoessFit:
    """Local polynomial fit using the k nearest neighbors of each point.

    x must be strictly increasing. Tricube weights are scaled so the farthest
    of the k neighbors gets weight zero, so k must exceed degree + 2.
    """
    n = len(x)
    k = int(min(max(k, degree + 3), n))
    fitted, hat = _loess_kernel(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        k,
        degree,
    )
    return LoessFit(fitted=fitted, hat_diag=hat, trace=float(hat.sum()), k=k, degree=degree)


def trace_for_k(x: np.ndarray, k: int, degree: int) -> float:
    # trace of the hat matrix does not involve the responses
    return loess_fit(x, np.zeros_like(x), k, degree).trace


def span_for_df(x: np.ndarray, degree: int, target_df: float, tol: float = 0.1) -> int | None:
    """Smallest-error neighborhood size whose hat-matrix trace hits target_df.

    Integer bisection; the trace decreases (up to small wiggles) as k grows.
    Returns None when no k lands within tol of the target.
    """
    n = len(x)
    k_lo = degree + 3
    k_hi = n
    tr_lo = trace_for_k(x, k_lo, degree)
    tr_hi = trace_for_k(x, k_hi, degree)
    if target_df > tr_lo + tol or target_df < tr_hi - tol:
        return None
    while k_hi - k_lo > 1:
        mid = (k_lo + k_hi) // 2
        if trace_for_k(x, mid, degree) > target_df:
            k_lo = mid
        else:
            k_hi = mid
    best_k, best_err = None, np.inf
    for k in range(max(degree + 3, k_lo - 3), min(n, k_hi + 3) + 1):
        err = abs(trace_for_k(x, k, degree) - target_df)
        if err < best_err:
            best_k, best_err = k, err
    if best_err <= tol:
        return best_k
    return None
