"""Solution records for the LP and MILP solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str  # optimal | infeasible | unbounded
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class MilpSolution:
    x: np.ndarray
    objective: float
    bound: float
    node_count: int = 0
    wall_time: float = 0.0
    status: str = "optimal"  # optimal | infeasible | gap_limit | node_limit | time_limit
    engine: str = "native"
    meta: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        if not np.isfinite(self.objective) or not np.isfinite(self.bound):
            return float("inf")
        return abs(self.objective - self.bound) / max(1.0, abs(self.objective))

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "gap_limit", "node_limit", "time_limit") and \
            self.x is not None and np.all(np.isfinite(self.x))
