"""Best-first branch-and-bound over simplex relaxations."""

from __future__ import annotations

import heapq
import itertools
import time

import numpy as np

from .model import Budget, MilpModel, Solution, Status
from .simplex import solve_lp

INT_TOL = 1e-6
GAP_TOL = 1e-9


class _Relaxation:
    """Dense LP data of a model; node subproblems only change bounds."""

    def __init__(self, model: MilpModel):
        A_ub, b_ub, A_eq, b_eq = model.matrices()
        self.c = model.cost_vector()
        self.A_ub, self.b_ub = A_ub.toarray(), b_ub
        self.A_eq, self.b_eq = A_eq.toarray(), b_eq
        self.lb = np.array(model.lb, dtype=float)
        self.ub = np.array(model.ub, dtype=float)
        self.solves = 0

    def solve(self, lb, ub):
        self.solves += 1
        return solve_lp(self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq, lb, ub)


def _most_fractional(x: np.ndarray, bins: np.ndarray) -> int | None:
    if bins.size == 0:
        return None
    frac = np.abs(x[bins] - np.round(x[bins]))
    k = int(np.argmax(frac))
    return int(bins[k]) if frac[k] > INT_TOL else None


def _cutoff(best: float) -> float:
    return best if best == np.inf else best - GAP_TOL * (1.0 + abs(best))


def solve_lp_relaxation(model: MilpModel) -> Solution:
    """Solve the model with integrality dropped."""
    start = time.perf_counter()
    rel = _Relaxation(model)
    res = rel.solve(rel.lb, rel.ub)
    status = {"optimal": Status.OPTIMAL, "infeasible": Status.INFEASIBLE,
              "unbounded": Status.UNBOUNDED}.get(res.status, Status.BUDGET_EXCEEDED)
    return Solution(status, res.objective, res.x, 1, time.perf_counter() - start, 1)


def branch_and_bound(model: MilpModel, budget: Budget = Budget()) -> Solution:
    """Depth-first dive to a first incumbent, then best-first search.

    Branching is on the most fractional binary; the child rounding toward
    the relaxed value is explored first while diving.

    Integral leaves are polished by re-solving with the binaries fixed to
    their rounded values, so returned binaries are exactly 0 or 1.
    """
    start = time.perf_counter()
    rel = _Relaxation(model)
    bins = np.flatnonzero(np.array(model.binary, dtype=bool))
    counter = itertools.count()
    best_obj, best_x = np.inf, None
    nodes = 0
    exhausted = True
    unbounded = False

    root = rel.solve(rel.lb, rel.ub)
    heap = []
    if root.status == "optimal":
        heap.append((0.0, next(counter), rel.lb.copy(), rel.ub.copy(), root, 0))
    elif root.status == "unbounded":
        unbounded = True

    while heap:
        if nodes >= budget.max_nodes or time.perf_counter() - start > budget.time_limit:
            exhausted = False
            break
        _, _, lb, ub, res, depth = heapq.heappop(heap)
        nodes += 1
        if res.objective >= _cutoff(best_obj):
            continue
        j = _most_fractional(res.x, bins)
        if j is None:
            lb_f, ub_f = lb.copy(), ub.copy()
            lb_f[bins] = ub_f[bins] = np.round(res.x[bins])
            leaf = rel.solve(lb_f, ub_f)
            if leaf.status == "optimal" and leaf.objective < best_obj:
                if best_x is None:
                    heap = [(e[4].objective,) + e[1:] for e in heap]
                    heapq.heapify(heap)
                best_obj, best_x = leaf.objective, leaf.x
                best_x[bins] = np.round(best_x[bins])
            continue
        near = float(np.round(res.x[j]))
        for val in (near, 1.0 - near):
            lb_c, ub_c = lb.copy(), ub.copy()
            lb_c[j] = ub_c[j] = val
            child = rel.solve(lb_c, ub_c)
            if child.status == "optimal" and child.objective < _cutoff(best_obj):
                key = child.objective if best_x is not None else -(depth + 1)
                heapq.heappush(heap, (key, next(counter), lb_c, ub_c, child, depth + 1))

    wall = time.perf_counter() - start
    if not exhausted:
        return Solution(Status.BUDGET_EXCEEDED, None if best_x is None else best_obj, best_x,
                        nodes, wall, rel.solves, message="node or time budget exhausted")
    if best_x is None:
        status = Status.UNBOUNDED if unbounded else Status.INFEASIBLE
        return Solution(status, None, None, nodes, wall, rel.solves)
    return Solution(Status.OPTIMAL, best_obj, best_x, nodes, wall, rel.solves)
