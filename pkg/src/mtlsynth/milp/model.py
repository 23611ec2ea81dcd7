"""Mixed-integer linear program container and solution record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

INF = math.inf
SENSES = ("<=", ">=", "=")


class ModelError(ValueError):
    pass


@dataclass
class Row:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str

    def activity(self, x: np.ndarray) -> float:
        return float(sum(c * x[j] for j, c in self.coeffs.items()))

    def violation(self, x: np.ndarray) -> float:
        a = self.activity(x)
        if self.sense == "<=":
            return max(0.0, a - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - a)
        return abs(a - self.rhs)


@dataclass
class MilpModel:
    """Minimization problem over named continuous and binary variables."""

    names: list[str] = field(default_factory=list)
    lb: list[float] = field(default_factory=list)
    ub: list[float] = field(default_factory=list)
    binary: list[bool] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    big_m: float = 1e4
    metadata: dict = field(default_factory=dict)
    index: dict[str, int] = field(default_factory=dict, repr=False)

    # -- construction -------------------------------------------------------

    def add_var(self, name: str, lb: float = -INF, ub: float = INF, binary: bool = False) -> int:
        if name in self.index:
            raise ModelError(f"duplicate variable {name!r}")
        if binary:
            lb, ub = max(0.0, lb), min(1.0, ub)
        lb, ub = float(lb), float(ub)
        if math.isnan(lb) or math.isnan(ub):
            raise ModelError(f"variable {name!r} has NaN bounds")
        self.index[name] = len(self.names)
        self.names.append(name)
        self.lb.append(lb)
        self.ub.append(ub)
        self.binary.append(bool(binary))
        return self.index[name]

    def set_bounds(self, j: int, lb: float | None = None, ub: float | None = None):
        if lb is not None:
            self.lb[j] = float(lb)
        if ub is not None:
            self.ub[j] = float(ub)

    def add_constr(self, coeffs: Mapping[int, float] | Iterable[tuple[int, float]], sense: str,
                   rhs: float, name: str | None = None) -> int:
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        row: dict[int, float] = {}
        for j, c in items:
            if not 0 <= j < len(self.names):
                raise ModelError(f"row references undeclared variable {j}")
            row[j] = row.get(j, 0.0) + float(c)
        row = {j: c for j, c in sorted(row.items()) if c != 0.0}
        if not row:
            raise ModelError("constraint rows need at least one nonzero coefficient")
        if not math.isfinite(rhs):
            raise ModelError("right-hand sides must be finite")
        name = name or f"c{len(self.rows)}"
        self.rows.append(Row(row, sense, float(rhs), name))
        return len(self.rows) - 1

    def add_objective(self, coeffs: Mapping[int, float]):
        for j, c in coeffs.items():
            self.objective[j] = self.objective.get(j, 0.0) + float(c)
        self.objective = {j: c for j, c in sorted(self.objective.items()) if c != 0.0}

    # -- queries ------------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def num_binaries(self) -> int:
        return sum(self.binary)

    def var(self, name: str) -> int:
        return self.index[name]

    def objective_value(self, x) -> float:
        return float(sum(c * x[j] for j, c in self.objective.items()))

    def cost_vector(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for j, v in self.objective.items():
            c[j] = v
        return c

    def matrices(self):
        """``(A_ub, b_ub, A_eq, b_eq)`` as CSR matrices with ``>=`` rows negated."""
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for row in self.rows:
            if row.sense == "=":
                eq_rows.append(row.coeffs)
                eq_rhs.append(row.rhs)
            elif row.sense == "<=":
                ub_rows.append(row.coeffs)
                ub_rhs.append(row.rhs)
            else:
                ub_rows.append({j: -c for j, c in row.coeffs.items()})
                ub_rhs.append(-row.rhs)
        return (_csr(ub_rows, self.num_vars), np.array(ub_rhs, dtype=float),
                _csr(eq_rows, self.num_vars), np.array(eq_rhs, dtype=float))

    def max_violation(self, x) -> float:
        """Largest violation of any row or bound at assignment ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for j in range(self.num_vars):
            worst = max(worst, self.lb[j] - x[j], x[j] - self.ub[j])
        for row in self.rows:
            worst = max(worst, row.violation(x))
        return worst

    def max_integrality_gap(self, x) -> float:
        x = np.asarray(x, dtype=float)
        idx = [j for j, b in enumerate(self.binary) if b]
        return float(np.max(np.abs(x[idx] - np.round(x[idx])))) if idx else 0.0

    def copy(self) -> "MilpModel":
        return MilpModel(list(self.names), list(self.lb), list(self.ub), list(self.binary),
                         [Row(dict(r.coeffs), r.sense, r.rhs, r.name) for r in self.rows],
                         dict(self.objective), self.big_m, dict(self.metadata), dict(self.index))

    def same_as(self, other: "MilpModel") -> bool:
        """Structural equality: variables, bounds, rows, objective and metadata."""
        return (self.names == other.names and self.lb == other.lb and self.ub == other.ub
                and self.binary == other.binary and self.objective == other.objective
                and self.big_m == other.big_m and self.metadata == other.metadata
                and [(r.coeffs, r.sense, r.rhs, r.name) for r in self.rows]
                == [(r.coeffs, r.sense, r.rhs, r.name) for r in other.rows])


def _csr(rows: list[dict[int, float]], n: int) -> sparse.csr_matrix:
    data, cols, ptr = [], [], [0]
    for r in rows:
        cols.extend(r.keys())
        data.extend(r.values())
        ptr.append(len(cols))
    return sparse.csr_matrix((np.array(data, dtype=float), np.array(cols, dtype=int),
                              np.array(ptr, dtype=int)), shape=(len(rows), n))


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    BUDGET_EXCEEDED = "BudgetExceeded"
    UNBOUNDED = "Unbounded"


@dataclass
class Solution:
    status: Status
    objective: float | None = None
    x: np.ndarray | None = None
    nodes: int = 0
    wall_time: float = 0.0
    lp_solves: int = 0
    backend: str = "embedded"
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    def value(self, model: MilpModel, name: str) -> float:
        if self.x is None:
            raise ModelError("solution carries no assignment")
        return float(self.x[model.var(name)])

    def to_dict(self) -> dict:
        return {"status": self.status.value, "objective": self.objective, "nodes": self.nodes,
                "lp_solves": self.lp_solves, "wall_time": self.wall_time,
                "backend": self.backend, "message": self.message}


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 100_000
    time_limit: float = 60.0
