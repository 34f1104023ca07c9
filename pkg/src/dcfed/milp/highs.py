"""Optional HiGHS-backed engine (via scipy) for instances past the native
solver's comfortable size. The native branch-and-bound stays the reference
implementation; this path exists so desk-scale pipeline solves finish in
seconds rather than minutes."""

from __future__ import annotations

import math
import time

import numpy as np

from .instance import MilpInstance
from .solution import MilpSolution


def have_highs() -> bool:
    try:
        from scipy.optimize import milp  # noqa: F401
        return True
    except ImportError:
        return False


def solve_milp_highs(instance: MilpInstance,
                     gap_target: float = 1e-6,
                     time_budget: float = math.inf) -> MilpSolution:
    from scipy.optimize import Bounds, LinearConstraint, milp

    t0 = time.perf_counter()
    c, A, senses, b, lb, ub, int_mask = instance.dense_arrays()
    lo = np.where([s == "<=" for s in senses], -np.inf, b)
    hi = np.where([s == ">=" for s in senses], np.inf, b)
    constraints = [LinearConstraint(A, lo, hi)] if len(b) else []
    options = {"mip_rel_gap": gap_target, "presolve": True}
    if math.isfinite(time_budget):
        options["time_limit"] = time_budget
    res = milp(c, constraints=constraints,
               integrality=int_mask.astype(int),
               bounds=Bounds(lb, ub), options=options)
    wall = time.perf_counter() - t0

    if res.status == 2:
        return MilpSolution(None, math.inf, math.inf, 0, wall,
                            "infeasible", engine="highs")
    if res.x is None:
        return MilpSolution(None, math.inf, -math.inf, 0, wall,
                            "time_limit", engine="highs")
    x = np.asarray(res.x, dtype=float).copy()
    idx = np.where(int_mask)[0]
    x[idx] = np.round(x[idx])
    obj = instance.objective_value(x)
    rel_gap = res.mip_gap if res.mip_gap is not None else 0.0
    bound = obj - abs(rel_gap) * max(1.0, abs(obj))
    status = "optimal" if res.status == 0 else "time_limit"
    nodes = int(res.mip_node_count or 0)
    return MilpSolution(x, obj, bound, nodes, wall, status, engine="highs")


def solve_milp_auto(instance: MilpInstance, gap_target: float = 1e-6,
                    node_budget: int = 200_000,
                    time_budget: float = math.inf) -> MilpSolution:
    """HiGHS when available, otherwise the native branch-and-bound."""
    if have_highs():
        return solve_milp_highs(instance, gap_target, time_budget)
    from .branch_bound import solve_milp
    return solve_milp(instance, gap_target, node_budget, time_budget)
