from .instance import (
    InstanceBuilder,
    LinearRow,
    MilpInstance,
    Variable,
    write_lp_text,
)
from .solution import LpSolution, MilpSolution
from .simplex import SimplexError, solve_lp
from .branch_bound import EnumerationCapError, brute_force_milp, solve_milp

__all__ = [
    "Variable",
    "LinearRow",
    "MilpInstance",
    "InstanceBuilder",
    "write_lp_text",
    "LpSolution",
    "MilpSolution",
    "solve_lp",
    "solve_milp",
    "brute_force_milp",
    "SimplexError",
    "EnumerationCapError",
]
