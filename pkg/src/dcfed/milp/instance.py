"""Solver-neutral MILP instances: variables with bounds and integrality
marks, sparse linear rows, a linear objective with constant offset."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SENSES = ("<=", ">=", "==")

INF = float("inf")


class ModelError(ValueError):
    """Raised when an instance violates its structural invariants."""


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float
    integer: bool = False


@dataclass(frozen=True)
class LinearRow:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""

    @property
    def family(self) -> str:
        """Constraint family tag: the row name up to the first '['."""
        return self.name.split("[", 1)[0]


@dataclass
class MilpInstance:
    variables: list[Variable]
    rows: list[LinearRow]
    objective: dict[int, float]
    obj_offset: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def var_index(self, name: str) -> int:
        lookup = self.meta.get("_index")
        if lookup is None:
            lookup = {v.name: i for i, v in enumerate(self.variables)}
            self.meta["_index"] = lookup
        return lookup[name]

    def integer_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.integer]

    def validate(self) -> None:
        n = self.n_vars
        for v in self.variables:
            if v.lower > v.upper:
                raise ModelError(f"variable {v.name}: lower {v.lower} > upper {v.upper}")
            if v.integer and not (np.isfinite(v.lower) and np.isfinite(v.upper)):
                raise ModelError(f"integer variable {v.name} must have finite bounds")
        for r in self.rows:
            if r.sense not in SENSES:
                raise ModelError(f"row {r.name}: bad sense {r.sense!r}")
            for j in r.coeffs:
                if not 0 <= j < n:
                    raise ModelError(f"row {r.name} references undeclared variable {j}")
        for j in self.objective:
            if not 0 <= j < n:
                raise ModelError(f"objective references undeclared variable {j}")

    def objective_value(self, x: np.ndarray) -> float:
        val = self.obj_offset
        for j, c in self.objective.items():
            val += c * x[j]
        return val

    def dense_arrays(self):
        """Return (c, A, senses, b, lb, ub, integer_mask) dense views."""
        n, m = self.n_vars, self.n_rows
        c = np.zeros(n)
        for j, v in self.objective.items():
            c[j] = v
        A = np.zeros((m, n))
        b = np.zeros(m)
        senses = []
        for i, r in enumerate(self.rows):
            for j, v in r.coeffs.items():
                A[i, j] = v
            b[i] = r.rhs
            senses.append(r.sense)
        lb = np.array([v.lower for v in self.variables])
        ub = np.array([v.upper for v in self.variables])
        mask = np.array([v.integer for v in self.variables], dtype=bool)
        return c, A, senses, b, lb, ub, mask


class InstanceBuilder:
    """Incremental construction with name-based variable lookup."""

    def __init__(self):
        self._vars: list[Variable] = []
        self._rows: list[LinearRow] = []
        self._obj: dict[int, float] = {}
        self._offset = 0.0
        self._names: dict[str, int] = {}

    def var(self, name: str, lower: float = 0.0, upper: float = INF,
            integer: bool = False) -> int:
        if name in self._names:
            raise ModelError(f"duplicate variable name {name}")
        if lower > upper:
            raise ModelError(f"variable {name}: lower {lower} > upper {upper}")
        idx = len(self._vars)
        self._vars.append(Variable(name, float(lower), float(upper), integer))
        self._names[name] = idx
        return idx

    def row(self, coeffs: dict[int, float], sense: str, rhs: float,
            name: str = "") -> None:
        if sense not in SENSES:
            raise ModelError(f"bad sense {sense!r} for row {name}")
        self._rows.append(LinearRow(dict(coeffs), sense, float(rhs), name))

    def obj(self, idx: int, coeff: float) -> None:
        self._obj[idx] = self._obj.get(idx, 0.0) + float(coeff)

    def offset(self, value: float) -> None:
        self._offset += float(value)

    def index(self, name: str) -> int:
        return self._names[name]

    def build(self, meta: dict | None = None) -> MilpInstance:
        inst = MilpInstance(
            variables=list(self._vars),
            rows=list(self._rows),
            objective=dict(self._obj),
            obj_offset=self._offset,
            meta=dict(meta or {}),
        )
        inst.validate()
        return inst


def write_lp_text(instance: MilpInstance) -> str:
    """Plain-text LP-style dump for cross-checking with external solvers."""
    out = ["Minimize", " obj:"]
    terms = [f" {c:+.12g} {instance.variables[j].name}"
             for j, c in sorted(instance.objective.items())]
    out[-1] += "".join(terms) or " 0"
    if instance.obj_offset:
        out[-1] += f" {instance.obj_offset:+.12g}"
    out.append("Subject To")
    op = {"<=": "<=", ">=": ">=", "==": "="}
    for i, r in enumerate(instance.rows):
        body = "".join(
            f" {v:+.12g} {instance.variables[j].name}"
            for j, v in sorted(r.coeffs.items())
        )
        out.append(f" {r.name or f'c{i}'}:{body} {op[r.sense]} {r.rhs:.12g}")
    out.append("Bounds")
    for v in instance.variables:
        lo = f"{v.lower:.12g}" if np.isfinite(v.lower) else "-inf"
        hi = f"{v.upper:.12g}" if np.isfinite(v.upper) else "+inf"
        out.append(f" {lo} <= {v.name} <= {hi}")
    ints = [v.name for v in instance.variables if v.integer]
    if ints:
        out.append("General")
        out.append(" " + " ".join(ints))
    out.append("End")
    return "\n".join(out) + "\n"
