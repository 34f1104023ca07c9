"""LP solves over MilpInstance with integrality relaxed.

Converts the instance to computational form (slack + artificial columns),
runs the selected simplex kernel, and maps kernel results back. Tolerances
are centralized here: feasibility 1e-7, reduced-cost optimality 1e-7.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .._kernels import simplex_py as _codes
from .instance import MilpInstance
from .solution import LpSolution

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
BLAND_AFTER = 50


class SimplexError(RuntimeError):
    """Numerical stall: pivot budget exhausted without convergence."""

    def __init__(self, message, iterations=0, size=(0, 0)):
        super().__init__(message)
        self.iterations = iterations
        self.size = size


def solve_lp(instance: MilpInstance,
             lower: np.ndarray | None = None,
             upper: np.ndarray | None = None,
             max_iter: int | None = None,
             backend: str | None = None) -> LpSolution:
    """Solve the LP relaxation, optionally with overriding variable bounds
    (used by branch-and-bound nodes). Deterministic for identical input."""
    c0, A0, senses, b, lb0, ub0, _ = instance.dense_arrays()
    lb = lb0 if lower is None else np.asarray(lower, dtype=float)
    ub = ub0 if upper is None else np.asarray(upper, dtype=float)
    if np.any(lb > ub + 1e-12):
        return LpSolution(np.zeros(instance.n_vars), np.inf, "infeasible", 0)

    m, n = A0.shape
    kernel = _kernels.simplex_kernel if backend is None else _kernels.get_kernel(backend)

    # computational form: structural | slack | artificial columns
    N = n + 2 * m
    A = np.zeros((m, N))
    A[:, :n] = A0
    c = np.zeros(N)
    c[:n] = c0
    full_lb = np.empty(N)
    full_ub = np.empty(N)
    full_lb[:n] = lb
    full_ub[:n] = ub
    for i, s in enumerate(senses):
        j = n + i
        A[i, j] = 1.0
        if s == "<=":
            full_lb[j], full_ub[j] = 0.0, np.inf
        elif s == ">=":
            full_lb[j], full_ub[j] = -np.inf, 0.0
        else:
            full_lb[j], full_ub[j] = 0.0, 0.0

    status = np.empty(N, dtype=np.int8)
    for j in range(n + m):
        if np.isfinite(full_lb[j]):
            status[j] = _codes.AT_LOWER
        elif np.isfinite(full_ub[j]):
            status[j] = _codes.AT_UPPER
        else:
            status[j] = _codes.FREE
    nb = np.where(status[:n + m] == _codes.AT_UPPER,
                  full_ub[:n + m], full_lb[:n + m])
    nb[status[:n + m] == _codes.FREE] = 0.0
    resid = b - A[:, :n + m] @ nb

    art = n + m
    for i in range(m):
        sgn = 1.0 if resid[i] >= 0 else -1.0
        A[i, art + i] = sgn
        full_lb[art + i], full_ub[art + i] = 0.0, np.inf
        status[art + i] = _codes.BASIC
    basis = np.arange(art, art + m, dtype=np.int64)
    x_B = np.abs(resid)

    if max_iter is None:
        max_iter = 2000 + 60 * (m + n)
    code, x_full, iters = kernel(A, b, c, full_lb, full_ub, status, basis,
                                 x_B, art, int(max_iter), PIVOT_TOL,
                                 BLAND_AFTER)
    if code == _codes.ITER_LIMIT:
        raise SimplexError(
            f"simplex stalled after {iters} pivots on {m}x{n} instance",
            iterations=iters, size=(m, n))
    if code == _codes.INFEASIBLE:
        return LpSolution(np.zeros(n), np.inf, "infeasible", iters)
    if code == _codes.UNBOUNDED:
        return LpSolution(np.zeros(n), -np.inf, "unbounded", iters)
    x = np.asarray(x_full)[:n].copy()
    return LpSolution(x, instance.objective_value(x), "optimal", iters)


def feasibility_residual(instance: MilpInstance, x: np.ndarray) -> float:
    """Max violation of rows and bounds at x."""
    _, A, senses, b, lb, ub, _ = instance.dense_arrays()
    ax = A @ x
    worst = 0.0
    for i, s in enumerate(senses):
        d = ax[i] - b[i]
        if s == "<=":
            worst = max(worst, d)
        elif s == ">=":
            worst = max(worst, -d)
        else:
            worst = max(worst, abs(d))
    worst = max(worst, float(np.max(np.maximum(lb - x, 0.0), initial=0.0)))
    worst = max(worst, float(np.max(np.maximum(x - ub, 0.0), initial=0.0)))
    return worst
