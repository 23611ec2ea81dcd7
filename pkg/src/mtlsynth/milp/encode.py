"""Building blocks that turn a planning problem into a :class:`MilpModel`.

Robustness values are handled as affine expressions over model variables.
Every formula node, evaluated at a time index, is first expanded into a
*max over groups of min over elements* structure; structures are merged
across nodes where that is free and materialized into a fresh variable
otherwise.  Materialization is one-sided and polarity aware: in positive
polarity the new variable is only bounded above by the true value, in
negative polarity only below, so binaries are needed only for a ``max`` in
positive polarity or a ``min`` in negative polarity.

The threshold mode encodes the weaker statement ``robustness >= beta`` with
Boolean literals instead.  It needs far fewer binaries because atom literals
are shared by every temporal window that mentions them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..dynamics import DiscreteLTI, NetworkModel
from ..logic import (Always, And, Atom, Bottom, BoxRegion, Eventually, Formula, Not, Or,
                     PairwiseSeparation, Top, Until, horizon)
from .model import INF, MilpModel


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dynamics, inputs, objective


@dataclass
class PlanVars:
    """Variable indices of a planning horizon.

    ``X[k, j]`` is aggregated state coordinate ``j`` at step ``k``
    (``k = 0..H``); ``U[k, l]`` is the physical input; ``V`` holds the free
    inputs when a prefeedback gain is present, otherwise it aliases ``U``.
    """

    X: np.ndarray
    U: np.ndarray
    V: np.ndarray
    H: int
    state_offsets: list[int]
    input_offsets: list[int]

    @property
    def has_prefeedback(self) -> bool:
        return self.V is not self.U


def _blocks(net) -> tuple[DiscreteLTI, list[int], list[int]]:
    if isinstance(net, NetworkModel):
        return net.discrete, list(net.state_offsets), list(net.input_offsets)
    if isinstance(net, DiscreteLTI):
        return net, [0, net.n], [0, net.m]
    raise EncodingError(f"expected a NetworkModel or DiscreteLTI, got {type(net).__name__}")


def _agent_of(offsets: list[int], j: int) -> tuple[int, int]:
    for a in range(len(offsets) - 1):
        if offsets[a] <= j < offsets[a + 1]:
            return a, j - offsets[a]
    raise EncodingError(f"coordinate {j} outside the aggregate")


def encode_dynamics(model: MilpModel, net, x_init, H: int, K=None) -> PlanVars:
    """Nominal rollout rows ``x[k+1] = A x[k] + B v[k]`` with ``x[0]`` pinned.

    With a prefeedback gain ``K`` the model's ``(A, B)`` must already be the
    closed loop, ``v`` is the free input and physical inputs
    ``u[k] = K x[k] + v[k]`` are added as separate variables.
    """
    if H < 1:
        raise EncodingError("planning horizon must be at least one step")
    d, s_off, u_off = _blocks(net)
    n, m = d.n, d.m
    x_init = np.asarray(x_init, dtype=float)
    if x_init.shape != (n,):
        raise EncodingError(f"initial state has shape {x_init.shape}, expected ({n},)")

    X = np.empty((H + 1, n), dtype=int)
    for k in range(H + 1):
        for j in range(n):
            a, c = _agent_of(s_off, j)
            lo = hi = x_init[j] if k == 0 else None
            X[k, j] = model.add_var(f"x_a{a}_s{k}_c{c}",
                                    -INF if lo is None else lo, INF if hi is None else hi)
    U = np.empty((H, m), dtype=int)
    for k in range(H):
        for j in range(m):
            a, c = _agent_of(u_off, j)
            U[k, j] = model.add_var(f"u_a{a}_s{k}_c{c}")
    V = U
    if K is not None:
        K = np.atleast_2d(np.asarray(K, dtype=float))
        if K.shape != (m, n):
            raise EncodingError(f"gain has shape {K.shape}, expected ({m}, {n})")
        V = np.empty((H, m), dtype=int)
        for k in range(H):
            for j in range(m):
                a, c = _agent_of(u_off, j)
                V[k, j] = model.add_var(f"v_a{a}_s{k}_c{c}")
        for k in range(H):
            for j in range(m):
                a, c = _agent_of(u_off, j)
                row = {U[k, j]: 1.0, V[k, j]: -1.0}
                for i in np.flatnonzero(K[j]):
                    row[X[k, i]] = -K[j, i]
                model.add_constr(row, "=", 0.0, f"fb_a{a}_s{k}_c{c}")

    for k in range(H):
        for i in range(n):
            a, c = _agent_of(s_off, i)
            row = {X[k + 1, i]: 1.0}
            for j in np.flatnonzero(d.A[i]):
                row[X[k, j]] = row.get(X[k, j], 0.0) - d.A[i, j]
            for l in np.flatnonzero(d.B[i]):
                row[V[k, l]] = row.get(V[k, l], 0.0) - d.B[i, l]
            model.add_constr(row, "=", 0.0, f"dyn_a{a}_s{k}_c{c}")
    model.metadata.setdefault("horizon_steps", H)
    return PlanVars(X, U, V, H, s_off, u_off)


def _per_step(v, H: int, m: int) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        return np.full((H, m), float(arr))
    if arr.shape == (m,):
        return np.tile(arr, (H, 1))
    if arr.shape == (H, m):
        return arr
    raise EncodingError(f"bound has shape {arr.shape}; expected scalar, ({m},) or ({H}, {m})")


def encode_input_bounds(model: MilpModel, pv: PlanVars, u_min, u_max):
    """Box ``u_min <= u[k] <= u_max`` on every physical input and step."""
    H, m = pv.U.shape
    lo, hi = _per_step(u_min, H, m), _per_step(u_max, H, m)
    if np.any(lo > hi):
        raise EncodingError("input lower bound exceeds upper bound")
    for k in range(H):
        for j in range(m):
            idx = pv.U[k, j]
            model.set_bounds(idx, max(model.lb[idx], lo[k, j]), min(model.ub[idx], hi[k, j]))


def propagate_state_bounds(model: MilpModel, pv: PlanVars, net, K=None,
                           state_lo=None, state_hi=None):
    """Interval bounds on the nominal states, intersected with a workspace box.

    Reachable intervals follow ``x[k+1] = (A - B K) x[k] + B u[k]`` from the
    pinned initial state and the current input bounds; the workspace box is
    a genuine constraint and is imposed from step 1 on.
    """
    d, _, _ = _blocks(net)
    n = d.n
    F = d.A if K is None else d.A - d.B @ np.atleast_2d(np.asarray(K, dtype=float))
    ws_lo = np.full(n, -INF) if state_lo is None else np.asarray(state_lo, dtype=float)
    ws_hi = np.full(n, INF) if state_hi is None else np.asarray(state_hi, dtype=float)
    lo = np.array([model.lb[i] for i in pv.X[0]])
    hi = np.array([model.ub[i] for i in pv.X[0]])
    Fp, Fn = np.clip(F, 0, None), np.clip(F, None, 0)
    Bp, Bn = np.clip(d.B, 0, None), np.clip(d.B, None, 0)
    for k in range(pv.H):
        ulo = np.array([model.lb[i] for i in pv.U[k]])
        uhi = np.array([model.ub[i] for i in pv.U[k]])
        with np.errstate(invalid="ignore"):
            nlo = _safe(Fp, lo) + _safe(Fn, hi) + _safe(Bp, ulo) + _safe(Bn, uhi)
            nhi = _safe(Fp, hi) + _safe(Fn, lo) + _safe(Bp, uhi) + _safe(Bn, ulo)
        lo, hi = np.maximum(nlo, ws_lo), np.minimum(nhi, ws_hi)
        for j in range(n):
            model.set_bounds(pv.X[k + 1, j], lo[j], hi[j])


def _safe(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``M @ v`` with ``0 * inf = 0``."""
    out = np.zeros(M.shape[0])
    for i in range(M.shape[0]):
        nz = np.flatnonzero(M[i])
        out[i] = float(np.sum(M[i, nz] * v[nz])) if nz.size else 0.0
    return out


def pin_inputs(model: MilpModel, pv: PlanVars, U):
    """Fix every free input to the given ``(H, m)`` array.

    Existing bounds are kept, so a value outside them leaves crossed bounds
    and the model infeasible.
    """
    U = np.asarray(U, dtype=float)
    if U.shape != pv.V.shape:
        raise EncodingError(f"inputs have shape {U.shape}, expected {pv.V.shape}")
    for idx, val in zip(pv.V.ravel(), U.ravel()):
        model.set_bounds(idx, max(model.lb[idx], val), min(model.ub[idx], val))


def encode_objective(model: MilpModel, pv: PlanVars, tie_weight: float = 1e-9,
                     steps: int | None = None):
    """Minimize the 1-norm of the physical inputs of the first ``steps`` steps.

    ``steps=None`` penalizes the whole horizon.  The inputs of later
    steps are listed under ``metadata["secondary"]``.  A tiny extra weight,
    decreasing with the step index, prefers plans that spend less effort
    early, which makes equal-cost optima reproducible.
    """
    H, m = pv.U.shape
    if steps is not None and not 1 <= steps <= H:
        raise EncodingError(f"objective steps must lie in [1, {H}], got {steps}")
    steps = H if steps is None else steps
    for k in range(steps):
        w = 1.0 + tie_weight * (H - k) / H
        for j in range(m):
            a, c = _agent_of(pv.input_offsets, j)
            s = model.add_var(f"s_a{a}_s{k}_c{c}", 0.0, INF)
            u = pv.U[k, j]
            model.add_constr({s: 1.0, u: -1.0}, ">=", 0.0, f"abs_p_a{a}_s{k}_c{c}")
            model.add_constr({s: 1.0, u: 1.0}, ">=", 0.0, f"abs_n_a{a}_s{k}_c{c}")
            model.add_objective({s: w})
    if steps < H:
        # their 1-norm is minimized afterwards by secondary_solve
        model.metadata["secondary"] = [int(j) for j in pv.U[steps:].ravel()]
    model.metadata["objective"] = "l1_inputs"
    model.metadata["objective_steps"] = H if steps is None else steps
    model.metadata["tie_weight"] = tie_weight


def default_big_m(workspace_diameter: float, u_max: float, steps: int, dt: float) -> float:
    """Scenario-level big-M: twice the workspace diameter plus input growth."""
    return 2.0 * (workspace_diameter + abs(u_max) * steps * dt * dt)


# ---------------------------------------------------------------------------
# affine expressions


@dataclass(frozen=True)
class Lin:
    coeffs: tuple[tuple[int, float], ...]
    const: float = 0.0

    @staticmethod
    def var(j: int, c: float = 1.0) -> "Lin":
        return Lin(((j, c),))

    @staticmethod
    def constant(v: float) -> "Lin":
        return Lin((), v)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def __neg__(self) -> "Lin":
        return Lin(tuple((j, -c) for j, c in self.coeffs), -self.const)

    def scaled(self, s: float, offset: float = 0.0) -> "Lin":
        return Lin(tuple((j, s * c) for j, c in self.coeffs), s * self.const + offset)


def _lin_sub(a: Lin, b: Lin) -> Lin:
    d: dict[int, float] = {}
    for j, c in a.coeffs:
        d[j] = d.get(j, 0.0) + c
    for j, c in b.coeffs:
        d[j] = d.get(j, 0.0) - c
    return Lin(tuple((j, c) for j, c in d.items() if c != 0.0), a.const - b.const)


Groups = list[list[Lin]]  # max over groups of min over elements


class _Encoder:
    def __init__(self, model: MilpModel, X: np.ndarray, phi: Formula):
        self.model = model
        self.X = X
        self.ival: dict[int, tuple[float, float]] = {}
        self.ids: dict[int, int] = {}
        for i, node in enumerate(_preorder(phi)):
            self.ids.setdefault(id(node), i)

    # -- bookkeeping ---------------------------------------------------------

    def fresh(self, base: str, lb=-INF, ub=INF, binary=False) -> int:
        name, c = base, 1
        while name in self.model.index:
            name = f"{base}_{c}"
            c += 1
        return self.model.add_var(name, lb, ub, binary)

    def bounds(self, e: Lin) -> tuple[float, float]:
        lo = hi = e.const
        for j, c in e.coeffs:
            vlo, vhi = self.ival.get(j, (self.model.lb[j], self.model.ub[j]))
            if c > 0:
                lo, hi = lo + c * vlo, hi + c * vhi
            else:
                lo, hi = lo + c * vhi, hi + c * vlo
        return lo, hi

    def big_m(self, value: float) -> float:
        if math.isfinite(value):
            return max(value, 0.0)
        self.model.metadata["big_m_fallbacks"] = self.model.metadata.get("big_m_fallbacks", 0) + 1
        return self.model.big_m

    def row(self, e: Lin, sense: str, rhs: float, extra: dict[int, float] | None = None,
            name: str | None = None):
        """Add ``e + extra (sense) rhs``."""
        coeffs: dict[int, float] = {}
        for j, c in e.coeffs:
            coeffs[j] = coeffs.get(j, 0.0) + c
        for j, c in (extra or {}).items():
            coeffs[j] = coeffs.get(j, 0.0) + c
        coeffs = {j: c for j, c in coeffs.items() if c != 0.0}
        rhs = rhs - e.const
        if not coeffs:
            ok = {"<=": 0.0 <= rhs + 1e-12, ">=": 0.0 >= rhs - 1e-12, "=": abs(rhs) <= 1e-12}[sense]
            if not ok:
                self.infeasible()
            return
        self.model.add_constr(coeffs, sense, rhs, name)

    def infeasible(self):
        j = self.fresh("k_infeasible", 0.0, 0.0)
        self.model.add_constr({j: 1.0}, ">=", 1.0, self.model.names[j])

    # -- atoms ---------------------------------------------------------------

    def state(self, k: int, j: int) -> Lin:
        if j >= self.X.shape[1]:
            raise EncodingError(f"predicate references state coordinate {j} of {self.X.shape[1]}")
        return Lin.var(int(self.X[k, j]))

    def atom_groups(self, pred, k: int) -> Groups:
        if isinstance(pred, BoxRegion):
            elems = []
            for i, lo, hi in zip(pred.indices, pred.lo, pred.hi):
                x = self.state(k, i)
                if lo > -INF:
                    elems.append(x.scaled(1.0, -lo))
                if hi < INF:
                    elems.append(x.scaled(-1.0, hi))
            return [elems] if elems else [[Lin.constant(INF)]]
        if isinstance(pred, PairwiseSeparation):
            groups = []
            for a, b in zip(pred.first, pred.second):
                diff = _lin_sub(self.state(k, a), self.state(k, b))
                groups.append([diff.scaled(0.5, -pred.d_safe / 2)])
                groups.append([diff.scaled(-0.5, -pred.d_safe / 2)])
            return groups
        raise EncodingError(f"no linear encoding for predicate {pred!r}")


def _preorder(phi: Formula):
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Not, Eventually, Always)):
            stack.append(node.arg)
        elif isinstance(node, (And, Or, Until)):
            stack.extend([node.right, node.left])


def _clean(groups: Groups) -> Groups | float:
    """Fold infinite constants; returns a float when the value is decided."""
    out = []
    for g in groups:
        g2 = []
        dead = False
        for e in g:
            if e.is_const and e.const == INF:
                continue
            if e.is_const and e.const == -INF:
                dead = True
                break
            g2.append(e)
        if dead:
            continue
        if not g2:
            return INF
        out.append(g2)
    return out if out else -INF


class _RobustnessEncoder(_Encoder):
    def __init__(self, model, X, phi):
        super().__init__(model, X, phi)
        self.memo: dict[tuple[int, int, int], Lin] = {}

    def term(self, node: Formula, k: int, pol: int) -> Lin:
        key = (id(node), k, pol)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.materialize(self.groups(node, k, pol), pol, self.ids[id(node)], k)
            self.memo[key] = hit
        return hit

    def single(self, node: Formula, k: int, pol: int) -> list[Lin]:
        """Elements whose min is ``node`` at ``k`` (flattened when possible)."""
        g = self.groups(node, k, pol)
        if len(g) == 1:
            return g[0]
        return [self.term(node, k, pol)]

    def groups(self, node: Formula, k: int, pol: int) -> Groups:
        if isinstance(node, Top):
            return [[Lin.constant(INF)]]
        if isinstance(node, Bottom):
            return [[Lin.constant(-INF)]]
        if isinstance(node, Atom):
            return self.atom_groups(node.predicate, k)
        if isinstance(node, Not):
            inner = self.groups(node.arg, k, -pol)
            if len(inner) == 1:
                return [[-e] for e in inner[0]]
            if all(len(g) == 1 for g in inner):
                return [[-g[0] for g in inner]]
            return [[-self.term(node.arg, k, -pol)]]
        if isinstance(node, And):
            return [self.single(node.left, k, pol) + self.single(node.right, k, pol)]
        if isinstance(node, Or):
            return self.groups(node.left, k, pol) + self.groups(node.right, k, pol)
        if isinstance(node, Eventually):
            out: Groups = []
            for j in range(k + node.lo, k + node.hi + 1):
                out += self.groups(node.arg, j, pol)
            return out
        if isinstance(node, Always):
            elems: list[Lin] = []
            for j in range(k + node.lo, k + node.hi + 1):
                elems += self.single(node.arg, j, pol)
            return [elems]
        if isinstance(node, Until):
            out = []
            prefix: list[Lin] = []
            for j in range(k, k + node.hi + 1):
                if j >= k + node.lo:
                    out.append(self.single(node.right, j, pol) + prefix)
                if j < k + node.hi:
                    prefix = prefix + self.single(node.left, j, pol)
            return out
        raise EncodingError(f"not a formula: {node!r}")

    def materialize(self, groups: Groups, pol: int, node_id: int, k: int) -> Lin:
        cleaned = _clean(groups)
        if isinstance(cleaned, float):
            return Lin.constant(cleaned)
        groups = cleaned
        if len(groups) == 1 and len(groups[0]) == 1:
            return groups[0][0]
        gb = [[self.bounds(e) for e in g] for g in groups]
        lo = max(min(b[0] for b in g) for g in gb)
        hi = max(min(b[1] for b in g) for g in gb)
        suffix = "" if pol > 0 else "_n"
        r = self.fresh(f"r_{node_id}_{k}{suffix}")
        self.ival[r] = (lo, hi)
        if pol > 0:
            if len(groups) == 1:
                for e in groups[0]:
                    self.row(e, ">=", 0.0, {r: -1.0})
            else:
                zs = [self.fresh(f"b_{node_id}_{k}_{g}{suffix}", binary=True)
                      for g in range(len(groups))]
                self.model.add_constr({z: 1.0 for z in zs}, "=", 1.0)
                for z, g, bounds in zip(zs, groups, gb):
                    for e, (elo, _) in zip(g, bounds):
                        M = self.big_m(hi - elo)
                        # r <= e + M (1 - z)
                        self.row(e, ">=", -M, {r: -1.0, z: -M})
        else:
            for gi, (g, bounds) in enumerate(zip(groups, gb)):
                if len(g) == 1:
                    self.row(g[0], "<=", 0.0, {r: -1.0})
                    continue
                ys = [self.fresh(f"b_{node_id}_{k}_{gi}_{e}{suffix}", binary=True)
                      for e in range(len(g))]
                self.model.add_constr({y: 1.0 for y in ys}, "=", 1.0)
                for y, e, (_, ehi) in zip(ys, g, bounds):
                    M = self.big_m(ehi - lo)
                    # r >= e - M (1 - y)
                    self.row(e, "<=", M, {r: -1.0, y: M})
        return Lin.var(r)


class _ThresholdEncoder(_Encoder):
    """Literals ``z`` with ``z = 1`` implying robustness ``>= beta`` (or ``<= -beta``)."""

    def __init__(self, model, X, phi, beta: float):
        super().__init__(model, X, phi)
        self.beta = beta
        self.memo: dict[tuple[int, int, int], object] = {}

    # literal values: True, False or a binary variable index

    def sat(self, node: Formula, k: int, pol: int, req: bool):
        if not req:
            key = (id(node), k, pol)
            if key in self.memo:
                return self.memo[key]
        lit = self._sat(node, k, pol, req)
        if not req:
            self.memo[(id(node), k, pol)] = lit
        return lit

    def _sat(self, node, k, pol, req):
        nid = self.ids[id(node)]
        tag = f"{nid}_{k}_{'p' if pol > 0 else 'n'}"
        sub = lambda child, j, p=pol: (lambda r: self.sat(child, j, p, r))
        if isinstance(node, Top):
            return self.const(pol > 0, req)
        if isinstance(node, Bottom):
            return self.const(pol < 0, req)
        if isinstance(node, Not):
            return self.sat(node.arg, k, -pol, req)
        if isinstance(node, Atom):
            return self.atom(node.predicate, k, pol, req, tag)
        if isinstance(node, (And, Or)):
            items = [sub(node.left, k), sub(node.right, k)]
            conj = isinstance(node, And) == (pol > 0)
            return self.combine(items, conj, req, tag)
        if isinstance(node, (Eventually, Always)):
            items = [sub(node.arg, j) for j in range(k + node.lo, k + node.hi + 1)]
            conj = isinstance(node, Always) == (pol > 0)
            return self.combine(items, conj, req, tag)
        if isinstance(node, Until):
            windows = []
            for j in range(k + node.lo, k + node.hi + 1):
                parts = [sub(node.right, j)] + [sub(node.left, i) for i in range(k, j)]
                windows.append((j, parts))
            if pol > 0:
                items = [(lambda r, p=p, j=j: self.combine(p, True, r, f"{tag}_{j}"))
                         for j, p in windows]
                return self.combine(items, False, req, tag)
            items = [(lambda r, p=p, j=j: self.combine(p, False, r, f"{tag}_{j}"))
                     for j, p in windows]
            return self.combine(items, True, req, tag)
        raise EncodingError(f"not a formula: {node!r}")

    def const(self, value: bool, req: bool):
        if req and not value:
            self.infeasible()
        return value

    def combine(self, items: list[Callable], conj: bool, req: bool, tag: str):
        if conj:
            if req:
                for it in items:
                    it(True)
                return True
            lits = []
            for it in items:
                lit = it(False)
                if lit is False:
                    return False
                if lit is not True:
                    lits.append(lit)
            if not lits:
                return True
            if len(lits) == 1:
                return lits[0]
            z = self.fresh(f"z_{tag}", binary=True)
            for lit in lits:
                self.model.add_constr({z: 1.0, lit: -1.0}, "<=", 0.0)
            return z
        if req and len(items) == 1:
            return items[0](True)
        lits = []
        for it in items:
            lit = it(False)
            if lit is True:
                return True
            if lit is not False:
                lits.append(lit)
        if not lits:
            return self.const(False, req)
        if req:
            self.model.add_constr({lit: 1.0 for lit in lits}, ">=", 1.0)
            return True
        if len(lits) == 1:
            return lits[0]
        z = self.fresh(f"z_{tag}", binary=True)
        row = {z: 1.0}
        for lit in lits:
            row[lit] = row.get(lit, 0.0) - 1.0
        self.model.add_constr(row, "<=", 0.0)
        return z

    def affine(self, exprs: list[Lin], conj: bool, req: bool, tag: str):
        """Literal for ``e >= 0`` holding for all (conj) or some (disj) ``e``."""
        decided = [e.const >= 0 for e in exprs if e.is_const]
        open_ = [e for e in exprs if not e.is_const]
        if conj:
            if not all(decided):
                return self.const(False, req)
            if not open_:
                return True
            if req:
                for e in open_:
                    self.row(e, ">=", 0.0)
                return True
            z = self.fresh(f"z_{tag}", binary=True)
            for e in open_:
                M = self.big_m(-self.bounds(e)[0])
                # e >= -M (1 - z)
                self.row(e, ">=", -M, {z: -M})
            return z
        if any(decided):
            return True
        if not open_:
            return self.const(False, req)
        if len(open_) == 1:
            return self.affine(open_, True, req, tag)
        items = [(lambda r, e=e, i=i: self.affine([e], True, r, f"{tag}_{i}"))
                 for i, e in enumerate(open_)]
        return self.combine(items, False, req, tag)

    def atom(self, pred, k: int, pol: int, req: bool, tag: str):
        groups = self.atom_groups(pred, k)
        b = self.beta
        if pol > 0:
            # max_g min_e e >= beta
            shifted = [[e.scaled(1.0, -b) for e in g] for g in groups]
            if len(shifted) == 1:
                return self.affine(shifted[0], True, req, tag)
            if all(len(g) == 1 for g in shifted):
                return self.affine([g[0] for g in shifted], False, req, tag)
            items = [(lambda r, g=g, i=i: self.affine(g, True, r, f"{tag}_{i}"))
                     for i, g in enumerate(shifted)]
            return self.combine(items, False, req, tag)
        # max_g min_e e <= -beta  <=>  for every group some -e - beta >= 0
        flipped = [[e.scaled(-1.0, -b) for e in g] for g in groups]
        if all(len(g) == 1 for g in flipped):
            return self.affine([g[0] for g in flipped], True, req, tag)
        if len(flipped) == 1:
            return self.affine(flipped[0], False, req, tag)
        items = [(lambda r, g=g, i=i: self.affine(g, False, r, f"{tag}_{i}"))
                 for i, g in enumerate(flipped)]
        return self.combine(items, True, req, tag)


def _state_array(handles) -> np.ndarray:
    return handles.X if isinstance(handles, PlanVars) else np.asarray(handles, dtype=int)


def encode_mtl(model: MilpModel, phi: Formula, handles, beta_hat: float | None = 0.0,
               mode: str = "robustness") -> int | None:
    """Constrain the planned trajectory to satisfy ``phi`` with margin ``beta_hat``.

    ``mode="robustness"`` returns a variable that is at most the robustness
    of the planned trajectory and can reach it, so maximizing it recovers the
    robustness exactly.  ``mode="threshold"`` only encodes
    ``robustness >= beta_hat`` and returns ``None``.
    """
    X = _state_array(handles)
    steps = X.shape[0]
    need = horizon(phi)
    if need > steps - 1:
        raise EncodingError(f"formula horizon {need} exceeds the {steps - 1} planned steps")
    model.metadata["mtl_mode"] = mode
    if mode == "robustness":
        enc = _RobustnessEncoder(model, X, phi)
        root_id = enc.ids[id(phi)]
        term = enc.term(phi, 0, 1)
        if term.is_const:
            r = enc.fresh("r_root")
            if term.const == -INF:
                enc.infeasible()
            elif term.const < INF:
                model.set_bounds(r, -INF, term.const)
        elif len(term.coeffs) == 1 and term.coeffs[0][1] == 1.0 and term.const == 0.0:
            r = term.coeffs[0][0]
        else:
            r = enc.fresh(f"r_{root_id}_0")
            enc.row(term, ">=", 0.0, {r: -1.0})
        if beta_hat is not None:
            model.add_constr({r: 1.0}, ">=", float(beta_hat), "task")
        model.metadata["robustness_var"] = model.names[r]
        return r
    if mode == "threshold":
        if beta_hat is None:
            raise EncodingError("threshold mode needs a margin")
        enc = _ThresholdEncoder(model, X, phi, float(beta_hat))
        enc.sat(phi, 0, 1, True)
        return None
    raise EncodingError(f"unknown encoding mode {mode!r}")
