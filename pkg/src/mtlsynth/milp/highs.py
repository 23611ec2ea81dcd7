"""Optional backend delegating to the HiGHS solver bundled with SciPy."""

from __future__ import annotations

import time

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse import vstack

from .model import Budget, MilpModel, Solution, Status


def solve_highs(model: MilpModel, budget: Budget = Budget()) -> Solution:
    start = time.perf_counter()
    A_ub, b_ub, A_eq, b_eq = model.matrices()
    bins = np.array(model.binary, dtype=bool)
    if not np.any(bins & (np.array(model.lb) < np.array(model.ub))):
        return _solve_lp(model, A_ub, b_ub, A_eq, b_eq, start)
    constraints = []
    if A_ub.shape[0] or A_eq.shape[0]:
        A = vstack([A_ub, A_eq]).tocsr()
        lo = np.concatenate([np.full(A_ub.shape[0], -np.inf), b_eq])
        hi = np.concatenate([b_ub, b_eq])
        constraints.append(LinearConstraint(A, lo, hi))
    res = milp(model.cost_vector(), constraints=constraints,
               integrality=np.array(model.binary, dtype=int),
               bounds=Bounds(np.array(model.lb), np.array(model.ub)),
               options={"time_limit": budget.time_limit, "node_limit": budget.max_nodes,
                        "mip_rel_gap": 1e-9, "presolve": True})
    wall = time.perf_counter() - start
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.status == 0:
        x = np.array(res.x, dtype=float)
        x = _polish(model, x, bins, A_ub, b_ub, A_eq, b_eq)
        wall = time.perf_counter() - start
        return Solution(Status.OPTIMAL, model.objective_value(x), x, nodes, wall, 1, "highs")
    if res.status == 2:
        return Solution(Status.INFEASIBLE, nodes=nodes, wall_time=wall, backend="highs")
    if res.status == 3:
        return Solution(Status.UNBOUNDED, nodes=nodes, wall_time=wall, backend="highs")
    x = None if res.x is None else np.array(res.x, dtype=float)
    obj = None if x is None else model.objective_value(x)
    return Solution(Status.BUDGET_EXCEEDED, obj, x, nodes, wall, 0, "highs", str(res.message))


def _polish(model, x, bins, A_ub, b_ub, A_eq, b_eq):
    """Re-solve the LP with binaries fixed at their rounded values."""
    lb, ub = np.array(model.lb), np.array(model.ub)
    lb[bins] = ub[bins] = np.round(x[bins])
    res = linprog(model.cost_vector(), A_ub=A_ub if A_ub.shape[0] else None,
                  b_ub=b_ub if A_ub.shape[0] else None, A_eq=A_eq if A_eq.shape[0] else None,
                  b_eq=b_eq if A_eq.shape[0] else None, bounds=np.column_stack([lb, ub]),
                  method="highs")
    if res.status != 0:
        x = x.copy()
        x[bins] = np.round(x[bins])
        return x
    out = np.array(res.x, dtype=float)
    out[bins] = np.round(x[bins])
    return out


def _solve_lp(model, A_ub, b_ub, A_eq, b_eq, start) -> Solution:
    """Models without free binaries go straight to the LP solver."""
    lb, ub = np.array(model.lb), np.array(model.ub)
    if np.any(lb > ub):
        return Solution(Status.INFEASIBLE, wall_time=time.perf_counter() - start, backend="highs")
    res = linprog(model.cost_vector(), A_ub=A_ub if A_ub.shape[0] else None,
                  b_ub=b_ub if A_ub.shape[0] else None, A_eq=A_eq if A_eq.shape[0] else None,
                  b_eq=b_eq if A_eq.shape[0] else None, bounds=np.column_stack([lb, ub]),
                  method="highs")
    wall = time.perf_counter() - start
    if res.status == 0:
        x = np.array(res.x, dtype=float)
        return Solution(Status.OPTIMAL, model.objective_value(x), x, 0, wall, 1, "highs")
    status = {2: Status.INFEASIBLE, 3: Status.UNBOUNDED}.get(res.status, Status.BUDGET_EXCEEDED)
    return Solution(status, nodes=0, wall_time=wall, lp_solves=1, backend="highs",
                    message=str(res.message))
