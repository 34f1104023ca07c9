# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of simplex_py: identical pivot rules, explicit C loops.

The per-pivot work (pricing, ratio test, basis-inverse update) is the hot
loop of branch-and-bound, where per-call numpy overhead dominates on the
small LPs typical of search nodes.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs, isfinite

cnp.import_array()

cdef int AT_LOWER = 0, AT_UPPER = 1, FREE = 2, BASIC = 3
cdef int OPTIMAL = 0, INFEASIBLE = 1, UNBOUNDED = 2, ITER_LIMIT = 3
cdef int _REFRESH = 256


def simplex_kernel(A, b, c, lb, ub, status0, basis0, xB0, art_start,
                   max_iter, tol, bland_after):
    """Same contract as simplex_py.simplex_kernel."""
    cdef double[:, ::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef int m = Av.shape[0]
    cdef int n = Av.shape[1]
    cdef double[::1] lbv = np.array(lb, dtype=np.float64)
    cdef double[::1] ubv = np.array(ub, dtype=np.float64)
    cdef signed char[::1] status = np.array(status0, dtype=np.int8)
    cdef long long[::1] basis = np.array(basis0, dtype=np.int64)
    cdef double[::1] x_B = np.array(xB0, dtype=np.float64)
    cdef double[:, ::1] B_inv = np.zeros((m, m))
    cdef double[::1] c1 = np.zeros(n)
    cdef double[::1] c2 = np.array(c, dtype=np.float64)
    cdef double[::1] nb_value = np.zeros(n)
    cdef double[::1] y = np.zeros(m)
    cdef double[::1] rc = np.zeros(n)
    cdef double[::1] w = np.zeros(m)
    cdef int art = art_start
    cdef int code = OPTIMAL
    cdef int iters = 0
    cdef int phase
    cdef Py_ssize_t i, j
    cdef double ftol, bmax, mass
    cdef long long maxit = max_iter
    cdef double tolv = tol
    cdef int bland = bland_after

    for j in range(art, n):
        c1[j] = 1.0
    for i in range(m):
        B_inv[i, i] = Av[i, basis[i]]
    for j in range(n):
        if status[j] == AT_UPPER:
            nb_value[j] = ubv[j]
        elif status[j] == AT_LOWER:
            nb_value[j] = lbv[j]
        else:
            nb_value[j] = 0.0

    bmax = 0.0
    for i in range(m):
        if fabs(bv[i]) > bmax:
            bmax = fabs(bv[i])
    ftol = 1e-7 * (1.0 + bmax)

    for phase in range(1, 3):
        if phase == 2:
            mass = 0.0
            for i in range(m):
                if basis[i] >= art:
                    mass += fabs(x_B[i])
            if mass > ftol:
                return INFEASIBLE, np.zeros(n), iters
            for j in range(art, n):
                lbv[j] = 0.0
                ubv[j] = 0.0
                nb_value[j] = 0.0
        code, iters = _run_phase(Av, bv, c1 if phase == 1 else c2, lbv, ubv,
                                 status, basis, x_B, B_inv, nb_value,
                                 y, rc, w, maxit, iters, tolv, bland)
        if code != OPTIMAL:
            return code, np.zeros(n), iters

    out = np.asarray(nb_value).copy()
    for i in range(m):
        out[basis[i]] = x_B[i]
    return OPTIMAL, out, iters


cdef tuple _run_phase(double[:, ::1] A, double[::1] b, double[::1] c,
                      double[::1] lb, double[::1] ub,
                      signed char[::1] status, long long[::1] basis,
                      double[::1] x_B, double[:, ::1] B_inv,
                      double[::1] nb_value, double[::1] y, double[::1] rc,
                      double[::1] w, long long max_iter, int iters,
                      double tol, int bland_after):
    cdef int m = A.shape[0]
    cdef int n = A.shape[1]
    cdef int degenerate_run = 0
    cdef Py_ssize_t i, j, q, p, leaving
    cdef double best, gain, sigma, t_basic, t_flip, ratio, span, piv, start
    cdef double g_i, acc
    cdef signed char sj
    cdef bint hit_upper

    while iters < max_iter:
        # pricing: y = c_B * B_inv; rc = c - y * A
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += c[basis[j]] * B_inv[j, i]
            y[i] = acc
        for j in range(n):
            acc = c[j]
            for i in range(m):
                acc -= y[i] * A[i, j]
            rc[j] = acc

        q = -1
        best = 0.0
        for j in range(n):
            sj = status[j]
            if sj == BASIC:
                continue
            if ub[j] - lb[j] <= tol and sj != FREE:
                continue
            gain = 0.0
            if sj == AT_LOWER and rc[j] < -tol:
                gain = -rc[j]
            elif sj == AT_UPPER and rc[j] > tol:
                gain = rc[j]
            elif sj == FREE and fabs(rc[j]) > tol:
                gain = fabs(rc[j])
            if gain > 0.0:
                if degenerate_run >= bland_after:
                    q = j
                    break
                if gain > best:
                    best = gain
                    q = j
        if q < 0:
            return OPTIMAL, iters

        sigma = 1.0
        if status[q] == AT_UPPER or (status[q] == FREE and rc[q] > 0):
            sigma = -1.0

        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += B_inv[i, j] * A[j, q]
            w[i] = acc

        p = -1
        t_basic = INFINITY
        for i in range(m):
            g_i = -sigma * w[i]
            if g_i > tol:
                ratio = (ub[basis[i]] - x_B[i]) / g_i
            elif g_i < -tol:
                ratio = (lb[basis[i]] - x_B[i]) / g_i
            else:
                continue
            if ratio < 0.0:
                ratio = 0.0
            if ratio < t_basic:
                t_basic = ratio
                p = i
        span = ub[q] - lb[q]
        t_flip = span if isfinite(span) else INFINITY

        iters += 1
        if t_flip <= t_basic:
            if not isfinite(t_flip):
                return UNBOUNDED, iters
            for i in range(m):
                x_B[i] += (-sigma * w[i]) * t_flip
            status[q] = AT_UPPER if status[q] == AT_LOWER else AT_LOWER
            nb_value[q] = ub[q] if status[q] == AT_UPPER else lb[q]
            degenerate_run = 0
        else:
            start = nb_value[q]
            for i in range(m):
                x_B[i] += (-sigma * w[i]) * t_basic
            leaving = basis[p]
            hit_upper = (-sigma * w[p]) > 0
            status[leaving] = AT_UPPER if hit_upper else AT_LOWER
            nb_value[leaving] = ub[leaving] if hit_upper else lb[leaving]
            x_B[p] = start + sigma * t_basic
            status[q] = BASIC
            nb_value[q] = 0.0
            basis[p] = q
            piv = w[p]
            for j in range(m):
                B_inv[p, j] /= piv
            for i in range(m):
                if i == p:
                    continue
                g_i = w[i]
                if g_i != 0.0:
                    for j in range(m):
                        B_inv[i, j] -= g_i * B_inv[p, j]
            degenerate_run = degenerate_run + 1 if t_basic <= tol else 0

        if iters % _REFRESH == 0:
            for i in range(m):
                acc = b[i]
                for j in range(n):
                    if nb_value[j] != 0.0:
                        acc -= A[i, j] * nb_value[j]
                w[i] = acc
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += B_inv[i, j] * w[j]
                x_B[i] = acc
    return ITER_LIMIT, iters
