"""Mixed-integer encoding of the planning problem and its solvers."""

import math

from .bnb import branch_and_bound, solve_lp_relaxation
from .encode import (EncodingError, Lin, PlanVars, default_big_m, encode_dynamics,
                     encode_input_bounds, encode_mtl, encode_objective, pin_inputs,
                     propagate_state_bounds)
from .lpformat import LpFormatError, export_lp, parse_lp
from .model import Budget, MilpModel, ModelError, Row, Solution, Status
from .simplex import LpResult, solve_lp

BACKENDS = ("embedded", "highs")


def solve(model: MilpModel, budget: Budget = Budget(), backend: str = "embedded") -> Solution:
    """Solve ``model`` with the embedded branch-and-bound or with HiGHS."""
    if backend == "embedded":
        return branch_and_bound(model, budget)
    if backend == "highs":
        from .highs import solve_highs
        return solve_highs(model, budget)
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def secondary_solve(model: MilpModel, sol: Solution, budget: Budget = Budget(),
                    backend: str = "embedded") -> Solution:
    """Lexicographic second stage for the variables in ``metadata["secondary"]``.

    Binaries are fixed at ``sol``, the primary objective is held at its
    optimum, and the 1-norm of the secondary variables is minimized.
    Returns ``sol`` unchanged when there is nothing to do or the stage fails.
    """
    extra = model.metadata.get("secondary")
    if not extra or not sol.ok:
        return sol
    stage = model.copy()
    for j, b in enumerate(stage.binary):
        if b:
            stage.lb[j] = stage.ub[j] = float(round(sol.x[j]))
    if stage.objective:
        slack = 1e-9 * (1.0 + abs(sol.objective))
        stage.add_constr(dict(stage.objective), "<=", sol.objective + slack, "primary")
    stage.objective = {}
    for j in extra:
        s = stage.add_var(f"abs_{model.names[j]}", 0.0, math.inf)
        stage.add_constr({s: 1.0, j: -1.0}, ">=", 0.0)
        stage.add_constr({s: 1.0, j: 1.0}, ">=", 0.0)
        stage.add_objective({s: 1.0})
    res = solve(stage, budget, backend)
    if not res.ok:
        return sol
    x = res.x[:model.num_vars]
    return Solution(Status.OPTIMAL, model.objective_value(x), x, sol.nodes + res.nodes,
                    sol.wall_time + res.wall_time, sol.lp_solves + res.lp_solves, sol.backend)


__all__ = [
    "BACKENDS", "Budget", "EncodingError", "Lin", "LpFormatError", "LpResult", "MilpModel",
    "ModelError", "PlanVars", "Row", "Solution", "Status", "branch_and_bound", "default_big_m",
    "encode_dynamics", "encode_input_bounds", "encode_mtl", "encode_objective", "export_lp",
    "parse_lp", "pin_inputs", "propagate_state_bounds", "secondary_solve", "solve", "solve_lp",
    "solve_lp_relaxation",
]
