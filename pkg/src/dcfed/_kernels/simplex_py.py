"""Pure-numpy twin of the compiled simplex kernel.

Two-phase bounded-variable revised simplex with an explicit dense basis
inverse. Pivot rules (shared with the Cython kernel, and load-bearing for
the determinism contract):
  * entering: largest reduced-cost improvement, lowest index on ties;
    Bland's rule (lowest eligible index) after `bland_after` consecutive
    degenerate pivots
  * leaving: minimum ratio, lowest basis position on ties; bound flips
    preferred when they tie the basic ratio
"""

from __future__ import annotations

import numpy as np

AT_LOWER, AT_UPPER, FREE, BASIC = 0, 1, 2, 3
OPTIMAL, INFEASIBLE, UNBOUNDED, ITER_LIMIT = 0, 1, 2, 3

_REFRESH = 256  # recompute basic values every this many pivots


def simplex_kernel(A, b, c, lb, ub, status0, basis0, xB0, art_start,
                   max_iter, tol, bland_after):
    """Solve min c.x s.t. A x = b, lb <= x <= ub.

    Columns from `art_start` on are artificial +/- unit columns forming the
    initial basis. Returns (status_code, x, iterations).
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    m, n = A.shape
    lb = lb.astype(np.float64).copy()
    ub = ub.astype(np.float64).copy()
    status = status0.astype(np.int8).copy()
    basis = basis0.astype(np.int64).copy()
    x_B = xB0.astype(np.float64).copy()
    B_inv = np.zeros((m, m))
    for p in range(m):
        B_inv[p, p] = A[p, basis[p]]

    c1 = np.zeros(n)
    c1[art_start:] = 1.0
    c2 = c.astype(np.float64).copy()

    nb_value = _nonbasic_values(lb, ub, status)
    iters = 0
    ftol = 1e-7 * (1.0 + float(np.max(np.abs(b))))

    for phase, cvec in ((1, c1), (2, c2)):
        if phase == 2:
            if _artificial_mass(x_B, basis, art_start) > ftol:
                return INFEASIBLE, np.zeros(n), iters
            # artificials are pinned at zero from here on
            lb[art_start:] = 0.0
            ub[art_start:] = 0.0
            nb_value[art_start:] = 0.0
        code, iters = _run_phase(
            A, b, cvec, lb, ub, status, basis, x_B, B_inv, nb_value,
            max_iter, iters, tol, bland_after)
        if code != OPTIMAL:
            return code, np.zeros(n), iters

    x = nb_value.copy()
    x[basis] = x_B
    return OPTIMAL, x, iters


def _nonbasic_values(lb, ub, status):
    v = np.where(status == AT_UPPER, ub, np.where(status == AT_LOWER, lb, 0.0))
    v[status == BASIC] = 0.0
    return v.astype(np.float64)


def _artificial_mass(x_B, basis, art_start):
    sel = basis >= art_start
    return float(np.abs(x_B[sel]).sum()) if np.any(sel) else 0.0


def _run_phase(A, b, c, lb, ub, status, basis, x_B, B_inv, nb_value,
               max_iter, iters, tol, bland_after):
    m, n = A.shape
    degenerate_run = 0
    while iters < max_iter:
        y = c[basis] @ B_inv
        rc = c - y @ A
        movable = (ub - lb) > tol
        gain = np.zeros(n)
        low = (status == AT_LOWER) & movable & (rc < -tol)
        upp = (status == AT_UPPER) & movable & (rc > tol)
        fre = (status == FREE) & (np.abs(rc) > tol)
        gain[low] = -rc[low]
        gain[upp] = rc[upp]
        gain[fre] = np.abs(rc[fre])
        if not gain.any():
            return OPTIMAL, iters
        if degenerate_run >= bland_after:
            q = int(np.argmax(gain > 0.0))
        else:
            q = int(np.argmax(gain))
        sigma = 1.0
        if status[q] == AT_UPPER or (status[q] == FREE and rc[q] > 0):
            sigma = -1.0

        w = B_inv @ A[:, q]
        g = -sigma * w
        ub_B = ub[basis]
        lb_B = lb[basis]
        ratios = np.full(m, np.inf)
        pos = g > tol
        neg = g < -tol
        ratios[pos] = (ub_B[pos] - x_B[pos]) / g[pos]
        ratios[neg] = (lb_B[neg] - x_B[neg]) / g[neg]
        np.maximum(ratios, 0.0, out=ratios)
        p = int(np.argmin(ratios))
        t_basic = float(ratios[p])
        span = ub[q] - lb[q]
        t_flip = span if np.isfinite(span) else np.inf

        iters += 1
        if t_flip <= t_basic:
            if not np.isfinite(t_flip):
                return UNBOUNDED, iters
            x_B += g * t_flip
            status[q] = AT_UPPER if status[q] == AT_LOWER else AT_LOWER
            nb_value[q] = ub[q] if status[q] == AT_UPPER else lb[q]
            degenerate_run = 0
        else:
            start = nb_value[q]
            x_B += g * t_basic
            leaving = int(basis[p])
            hit_upper = g[p] > 0
            status[leaving] = AT_UPPER if hit_upper else AT_LOWER
            nb_value[leaving] = ub[leaving] if hit_upper else lb[leaving]
            x_B[p] = start + sigma * t_basic
            status[q] = BASIC
            nb_value[q] = 0.0
            basis[p] = q
            piv = w[p]
            B_inv[p, :] /= piv
            other = w.copy()
            other[p] = 0.0
            B_inv -= np.outer(other, B_inv[p, :])
            degenerate_run = degenerate_run + 1 if t_basic <= tol else 0

        if iters % _REFRESH == 0:
            x_B[:] = B_inv @ (b - A @ nb_value)
    return ITER_LIMIT, iters
