"""Shared random generators and oracles for formulas, traces and small MILPs."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, linprog

from mtlsynth.dynamics import DiscreteLTI
from mtlsynth.milp import MilpModel, encode_dynamics, encode_mtl, pin_inputs, propagate_state_bounds
from mtlsynth.logic import (Always, And, Atom, BoxRegion, Eventually, Not, Or,
                            PairwiseSeparation, Until, horizon)


def random_predicate(rng: np.random.Generator, n: int, separation: bool = True):
    if separation and n >= 2 and rng.random() < 0.2:
        a, b = rng.choice(n, 2, replace=False)
        return PairwiseSeparation((int(a),), (int(b),), float(rng.uniform(0.5, 2.0)))
    k = int(rng.integers(1, min(n, 2) + 1))
    idx = rng.choice(n, k, replace=False)
    lo = rng.uniform(-2.0, 1.0, k)
    hi = lo + rng.uniform(0.5, 3.0, k)
    lo = np.where(rng.random(k) < 0.2, -np.inf, lo)
    hi = np.where(rng.random(k) < 0.2, np.inf, hi)
    if np.all(np.isinf(lo) & np.isinf(hi)):
        lo[0] = 0.0
    return BoxRegion(tuple(int(i) for i in idx), tuple(lo), tuple(hi))


def random_formula(rng: np.random.Generator, n: int, depth: int = 4, separation: bool = True):
    if depth == 0 or rng.random() < 0.25:
        return Atom(f"p{rng.integers(100)}", random_predicate(rng, n, separation))
    t = int(rng.integers(6))
    sub = lambda: random_formula(rng, n, depth - 1, separation)  # noqa: E731
    if t == 0:
        return Not(sub())
    if t == 1:
        return And(sub(), sub())
    if t == 2:
        return Or(sub(), sub())
    lo = int(rng.integers(0, 3))
    hi = lo + int(rng.integers(0, 4))
    if t == 3:
        return Eventually(lo, hi, sub())
    if t == 4:
        return Always(lo, hi, sub())
    return Until(lo, hi, sub(), sub())


def bounded_formula(rng, n, depth=4, max_horizon=15, separation=True):
    while True:
        phi = random_formula(rng, n, depth, separation)
        if horizon(phi) <= max_horizon:
            return phi


def random_walk(rng, steps: int, n: int, scale: float = 0.7) -> np.ndarray:
    return np.cumsum(rng.normal(size=(steps, n)) * scale, axis=0)


def random_milp(rng, n_bin: int, n_cont: int, n_rows: int, feasible: bool = True):
    """Random bounded MILP.  With ``feasible`` a hidden point satisfies every row."""
    m = MilpModel()
    for j in range(n_cont):
        m.add_var(f"y{j}", -10.0, 10.0)
    for j in range(n_bin):
        m.add_var(f"b{j}", binary=True)
    point = np.concatenate([rng.uniform(-5, 5, n_cont), rng.integers(0, 2, n_bin)])
    n = n_cont + n_bin
    for i in range(n_rows):
        cols = rng.choice(n, int(rng.integers(1, min(n, 4) + 1)), replace=False)
        coeffs = {int(j): float(rng.integers(-5, 6) or 1) for j in cols}
        act = sum(c * point[j] for j, c in coeffs.items())
        sense = ["<=", ">=", "="][int(rng.choice(3, p=[0.45, 0.45, 0.1]))]
        slack = float(rng.uniform(0, 3)) if feasible else float(rng.uniform(-3, 3))
        rhs = act + slack if sense == "<=" else act - slack if sense == ">=" else act
        m.add_constr(coeffs, sense, float(rhs))
    m.add_objective({j: float(rng.integers(-5, 6)) for j in range(n)})
    return m


def integrator(n=1):
    return DiscreteLTI(np.eye(n), np.eye(n), np.eye(n), np.zeros((n, n)))


def enumerate_binaries(model: MilpModel):
    """Best objective over every binary assignment, each LP solved by scipy."""
    A_ub, b_ub, A_eq, b_eq = model.matrices()
    c = model.cost_vector()
    bins = [j for j, b in enumerate(model.binary) if b]
    best = math.inf
    for bits in itertools.product((0.0, 1.0), repeat=len(bins)):
        lb, ub = np.array(model.lb), np.array(model.ub)
        lb[bins] = ub[bins] = bits
        res = linprog(c, A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if A_ub.shape[0] else None,
                      A_eq=A_eq if A_eq.shape[0] else None, b_eq=b_eq if A_eq.shape[0] else None,
                      bounds=list(zip(lb, ub)), method="highs")
        if res.status == 0:
            best = min(best, res.fun)
    return best


def pinned_model(phi, xs, beta=None, mode="robustness"):
    n = xs.shape[1]
    H = max(xs.shape[0] - 1, 1)
    if xs.shape[0] == 1:
        xs = np.vstack([xs, xs])
    m = MilpModel(big_m=1e3)
    pv = encode_dynamics(m, integrator(n), xs[0], H)
    pin_inputs(m, pv, np.diff(xs, axis=0))
    propagate_state_bounds(m, pv, integrator(n))
    r = encode_mtl(m, phi, pv, beta, mode)
    return m, r


def q_quad(y):
    """Normal tail from the defining integral."""
    val, _ = quad(lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi), y, math.inf,
                  epsabs=1e-14, epsrel=1e-13)
    return val


def sigma_oracle(dl2, eps, delta):
    iota = brentq(lambda y: q_quad(y) - delta, -10, 10, xtol=1e-14)
    return dl2 / (2 * eps) * (iota + math.sqrt(iota ** 2 + 2 * eps))


def small_config_doc(**over) -> dict:
    """One unicycle agent that must visit a nearby box; solves in well under a second."""
    doc = {
        "schema": 1, "name": "small",
        "agents": [{"name": "a", "model": {"kind": "unicycle", "b": 0.01},
                    "x0": [0.0, 0.0, 0.0, 0.0],
                    "privacy": {"epsilon": 1.5, "delta": 0.2}}],
        "predicates": {
            "home": {"type": "box", "indices": [0, 1], "lo": [-2.0, -2.0], "hi": [2.0, 2.0]},
            "goal": {"type": "box", "indices": [0, 1], "lo": [8.0, -2.0], "hi": [12.0, 2.0]},
        },
        "formula": "F[2,6] goal",
        "timing": {"T": 3, "T_max": 6, "dt": 1.0},
        "probability": {"gamma": 0.95, "eta": 0.95, "chi": 0.9},
        "inputs": {"u_min": -20.0, "u_max": 20.0},
        "seed": 7,
        "solver": {"backend": "embedded", "encoding": "threshold"},
    }
    for key, val in over.items():
        doc[key] = val
    return doc


# criterion id -> (passed, detail), filled by the acceptance module
VERDICTS: dict[str, tuple[bool, str]] = {}


def verdict(key: str, ok: bool, detail: str):
    VERDICTS[key] = (bool(ok), detail)
    print(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{key}: {detail}"
