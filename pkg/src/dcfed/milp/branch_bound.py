"""Best-first branch-and-bound over the native simplex, plus an exhaustive
enumeration oracle for small instances.

Node order: lowest parent bound first, insertion order on ties. Branching:
most-fractional integer variable, lowest index on ties. Both rules make the
search path a pure function of the instance and budgets.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time

import numpy as np

from .instance import MilpInstance
from .simplex import solve_lp
from .solution import MilpSolution

INT_TOL = 1e-6
PRUNE_EPS = 1e-9


class EnumerationCapError(RuntimeError):
    """Integer domain product exceeds the allowed enumeration budget."""


def solve_milp(instance: MilpInstance,
               gap_target: float = 1e-6,
               node_budget: int = 200_000,
               time_budget: float = math.inf,
               backend: str | None = None) -> MilpSolution:
    t0 = time.perf_counter()
    int_idx = np.array(instance.integer_indices(), dtype=int)
    _, _, _, _, lb0, ub0, _ = instance.dense_arrays()

    inc_obj = math.inf
    inc_x = None
    heap = []  # (bound, seq, lb, ub)
    seq = itertools.count()
    heapq.heappush(heap, (-math.inf, next(seq), lb0, ub0))
    nodes = 0
    unbounded = False

    while heap:
        parent_bound, _, lb, ub = heapq.heappop(heap)
        if parent_bound >= inc_obj - PRUNE_EPS:
            continue
        gap = _gap(inc_obj, _best_bound(heap, parent_bound, inc_obj))
        if gap <= gap_target and inc_x is not None:
            heapq.heappush(heap, (parent_bound, -1, lb, ub))
            break
        if nodes >= node_budget or time.perf_counter() - t0 > time_budget:
            heapq.heappush(heap, (parent_bound, -1, lb, ub))
            break
        nodes += 1

        lp = solve_lp(instance, lower=lb, upper=ub, backend=backend)
        if lp.status == "infeasible":
            continue
        if lp.status == "unbounded":
            unbounded = True
            break
        bound = lp.objective
        if bound >= inc_obj - PRUNE_EPS:
            continue

        frac = np.zeros(len(int_idx))
        if len(int_idx):
            v = lp.x[int_idx]
            frac = np.minimum(v - np.floor(v), np.ceil(v) - v)
        if not len(int_idx) or float(frac.max(initial=0.0)) <= INT_TOL:
            x = lp.x.copy()
            if len(int_idx):
                x[int_idx] = np.round(x[int_idx])
            obj = instance.objective_value(x)
            if obj < inc_obj - PRUNE_EPS:
                inc_obj, inc_x = obj, x
            continue

        j = int(int_idx[int(np.argmax(frac))])
        split = math.floor(lp.x[j])
        lb_hi = lb.copy()
        ub_lo = ub.copy()
        ub_lo[j] = split
        lb_hi[j] = split + 1
        if lb[j] <= ub_lo[j]:
            heapq.heappush(heap, (bound, next(seq), lb, ub_lo))
        if lb_hi[j] <= ub[j]:
            heapq.heappush(heap, (bound, next(seq), lb_hi, ub))

    wall = time.perf_counter() - t0
    if unbounded:
        return MilpSolution(None, -math.inf, -math.inf, nodes, wall, "unbounded")
    if inc_x is None:
        return MilpSolution(None, math.inf, math.inf, nodes, wall, "infeasible")
    bound = _best_bound(heap, math.inf, inc_obj)
    sol = MilpSolution(inc_x, inc_obj, bound, nodes, wall)
    if sol.gap <= gap_target:
        sol.status = "optimal"
    elif nodes >= node_budget:
        sol.status = "node_limit"
    else:
        sol.status = "time_limit"
    return sol


def _best_bound(heap, current, inc_obj):
    lo = min((h[0] for h in heap), default=math.inf)
    return min(lo, current, inc_obj)


def _gap(inc_obj, bound):
    if not math.isfinite(inc_obj):
        return math.inf
    return abs(inc_obj - bound) / max(1.0, abs(inc_obj))


def brute_force_milp(instance: MilpInstance,
                     enumeration_cap: int = 4096,
                     backend: str | None = None) -> MilpSolution:
    """Exact optimum by enumerating all integer assignments and solving the
    residual LP for each. Refuses when the assignment count exceeds the cap."""
    t0 = time.perf_counter()
    int_idx = instance.integer_indices()
    _, _, _, _, lb0, ub0, _ = instance.dense_arrays()

    domains = []
    size = 1
    for j in int_idx:
        lo = math.ceil(lb0[j] - 1e-9)
        hi = math.floor(ub0[j] + 1e-9)
        domains.append(range(lo, hi + 1))
        size *= max(len(domains[-1]), 0)
        if size > enumeration_cap:
            raise EnumerationCapError(
                f"{size}+ integer assignments exceed cap {enumeration_cap}")

    best_obj = math.inf
    best_x = None
    count = 0
    for assign in itertools.product(*domains):
        count += 1
        lb = lb0.copy()
        ub = ub0.copy()
        for j, v in zip(int_idx, assign):
            lb[j] = ub[j] = float(v)
        lp = solve_lp(instance, lower=lb, upper=ub, backend=backend)
        if lp.status != "optimal":
            continue
        x = lp.x.copy()
        for j, v in zip(int_idx, assign):
            x[j] = float(v)
        obj = instance.objective_value(x)
        if obj < best_obj - 1e-12:
            best_obj, best_x = obj, x
    wall = time.perf_counter() - t0
    if best_x is None:
        return MilpSolution(None, math.inf, math.inf, count, wall, "infeasible")
    return MilpSolution(best_x, best_obj, best_obj, count, wall, "optimal")
