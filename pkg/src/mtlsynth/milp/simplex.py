"""Dense bounded-variable primal simplex.

Solves ``min c^T x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``lb <= x <= ub``.  Variables are shifted/mirrored/split so that every
working column lives in ``[0, h]`` (``h`` possibly infinite); nonbasic
columns sit at either bound.  Phase 1 minimizes the sum of artificials.
Pricing is Dantzig's rule until a run of degenerate pivots, then Bland's rule
for the rest of the solve, which rules out cycling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf
PIVOT_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-7
DEGENERATE_RUN = 50


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration_limit"
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, h: np.ndarray, basis: list[int],
                 at_upper: np.ndarray, enterable: np.ndarray):
        m = A.shape[0]
        self.A0, self.b0 = A, b
        self.h = h
        self.basis = list(basis)
        self.at_upper = at_upper
        self.enterable = enterable
        B = A[:, self.basis]
        Binv = np.linalg.inv(B) if m else np.zeros((0, 0))
        self.T = Binv @ A
        self.xB = Binv @ (b - A[:, at_upper] @ h[at_upper]) if m else np.zeros(0)
        self.is_basic = np.zeros(A.shape[1], dtype=bool)
        self.is_basic[self.basis] = True
        self.iterations = 0
        self.bland = False

    def values(self) -> np.ndarray:
        y = np.where(self.at_upper, self.h, 0.0)
        y[self.basis] = self.xB
        return y

    def refine(self):
        """Recompute basic values from the original columns to shed drift."""
        if not self.basis:
            return
        N = ~self.is_basic & self.at_upper
        rhs = self.b0 - self.A0[:, N] @ self.h[N]
        try:
            self.xB = np.linalg.solve(self.A0[:, self.basis], rhs)
        except np.linalg.LinAlgError:
            pass

    def pivot(self, r: int, j: int):
        T = self.T
        prow = T[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        if rows.size:
            T[rows] -= col[rows, None] * prow
        T[r] = prow
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.basis[r] = j

    def run(self, cost: np.ndarray, max_iter: int) -> str:
        degenerate = 0
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            d = cost - cost[self.basis] @ self.T
            candidates = self.enterable & ~self.is_basic
            improve = candidates & ((~self.at_upper & (d < -OPT_TOL))
                                    | (self.at_upper & (d > OPT_TOL)))
            if not improve.any():
                return "optimal"
            if self.bland:
                j = int(np.flatnonzero(improve)[0])
            else:
                score = np.where(improve, np.abs(d), -1.0)
                j = int(np.argmax(score))
            s = -1.0 if self.at_upper[j] else 1.0
            alpha = s * self.T[:, j]

            t_best, r_best, to_upper = self.h[j], -1, False
            rows = np.flatnonzero(np.abs(alpha) > PIVOT_TOL)
            if rows.size:
                a = alpha[rows]
                xb = self.xB[rows]
                hb = self.h[np.asarray(self.basis)[rows]]
                with np.errstate(invalid="ignore"):
                    t = np.where(a > 0, np.maximum(xb, 0.0) / a,
                                 np.where(hb == INF, INF, np.maximum(hb - xb, 0.0) / -a))
                t_min = t.min()
                if t_min < t_best - 1e-12:
                    tie = np.flatnonzero(t <= t_min + 1e-12)
                    if self.bland:
                        k = tie[np.argmin(np.asarray(self.basis)[rows[tie]])]
                    else:
                        k = tie[np.argmax(np.abs(a[tie]))]
                    t_best, r_best, to_upper = float(t[k]), int(rows[k]), bool(a[k] < 0)
            if t_best == INF:
                return "unbounded"
            self.iterations += 1
            self.xB -= s * t_best * self.T[:, j]
            if r_best < 0:
                # bound flip, no basis change
                self.at_upper[j] = not self.at_upper[j]
                continue
            entering_value = t_best if s > 0 else self.h[j] - t_best
            leaving = self.basis[r_best]
            self.pivot(r_best, j)
            self.xB[r_best] = entering_value
            self.at_upper[leaving] = to_upper
            self.at_upper[j] = False
            if t_best <= 1e-12:
                degenerate += 1
                if degenerate >= DEGENERATE_RUN:
                    self.bland = True
            else:
                degenerate = 0


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lb=None, ub=None,
             max_iter: int = 50_000) -> LpResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, INF) if ub is None else np.asarray(ub, dtype=float)
    if A_ub.shape[1] != n or A_eq.shape[1] != n:
        A_ub = A_ub.reshape(-1, n)
        A_eq = A_eq.reshape(-1, n)
    if np.any(lb > ub + 1e-12) or np.any(lb == INF) or np.any(ub == -INF):
        return LpResult("infeasible")
    fixed = lb >= ub
    if fixed.any():
        return _solve_reduced(c, A_ub, b_ub, A_eq, b_eq, lb, ub, fixed, max_iter)

    # x = shift + S y, y in [0, h]
    cols, shift, h = [], np.zeros(n), []
    for i in range(n):
        lo, hi = lb[i], ub[i]
        if lo > -INF:
            shift[i] = lo
            cols.append((i, 1.0))
            h.append(max(hi - lo, 0.0))
        elif hi < INF:
            shift[i] = hi
            cols.append((i, -1.0))
            h.append(INF)
        else:
            cols.append((i, 1.0))
            h.append(INF)
            cols.append((i, -1.0))
            h.append(INF)
    ny = len(cols)
    S = np.zeros((n, ny))
    for k, (i, sgn) in enumerate(cols):
        S[i, k] = sgn

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    A = np.zeros((m, ny + m_ub))
    A[:m_ub, :ny] = A_ub @ S
    A[:m_ub, ny:] = np.eye(m_ub)
    A[m_ub:, :ny] = A_eq @ S
    b = np.concatenate([b_ub - A_ub @ shift, b_eq - A_eq @ shift])
    cy = np.concatenate([S.T @ c, np.zeros(m_ub)])
    h = np.concatenate([np.array(h, dtype=float), np.full(m_ub, INF)])

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # initial basis: slacks where usable, artificials elsewhere
    basis, art_rows = [], []
    for r in range(m):
        if r < m_ub and not neg[r]:
            basis.append(ny + r)
        else:
            basis.append(-1)
            art_rows.append(r)
    n_work = ny + m_ub
    n_art = len(art_rows)
    A_full = np.zeros((m, n_work + n_art))
    A_full[:, :n_work] = A
    for k, r in enumerate(art_rows):
        A_full[r, n_work + k] = 1.0
        basis[r] = n_work + k
    h_full = np.concatenate([h, np.full(n_art, INF)])
    at_upper = np.zeros(n_work + n_art, dtype=bool)
    enterable = np.ones(n_work + n_art, dtype=bool)
    enterable[h_full == 0.0] = False

    tab = _Tableau(A_full, b, h_full, basis, at_upper, enterable)
    if n_art:
        cost1 = np.zeros(n_work + n_art)
        cost1[n_work:] = 1.0
        status = tab.run(cost1, max_iter)
        if status == "iteration_limit":
            return LpResult(status, iterations=tab.iterations)
        tab.refine()
        if tab.values()[n_work:].sum() > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return LpResult("infeasible", iterations=tab.iterations)
        # retire artificials: pin to zero and never let them re-enter
        tab.h[n_work:] = 0.0
        tab.enterable[n_work:] = False
        tab.at_upper[n_work:] = False
        for r, j in enumerate(tab.basis):
            if j >= n_work:
                tab.xB[r] = 0.0
                nz = np.flatnonzero((np.abs(tab.T[r, :n_work]) > 1e-7) & ~tab.is_basic[:n_work])
                if nz.size:
                    k = int(nz[np.argmax(np.abs(tab.T[r, nz]))])
                    val = tab.h[k] if tab.at_upper[k] else 0.0
                    tab.pivot(r, k)
                    tab.xB[r] = val
                    tab.at_upper[k] = False
    cost2 = np.concatenate([cy, np.zeros(n_art)])
    tab.bland = False
    status = tab.run(cost2, max_iter)
    if status != "optimal":
        return LpResult(status, iterations=tab.iterations)
    tab.refine()
    y = tab.values()[:ny]
    x = shift + S @ y
    return LpResult("optimal", x, float(c @ x), tab.iterations)


def _solve_reduced(c, A_ub, b_ub, A_eq, b_eq, lb, ub, fixed, max_iter) -> LpResult:
    """Substitute fixed columns and drop rows that no longer involve free ones."""
    xf = lb[fixed]
    free = ~fixed
    tol = FEAS_TOL * max(1.0, np.abs(b_ub).max(initial=0.0), np.abs(b_eq).max(initial=0.0))
    rb_ub = b_ub - A_ub[:, fixed] @ xf
    rb_eq = b_eq - A_eq[:, fixed] @ xf
    keep_ub = np.any(A_ub[:, free] != 0.0, axis=1)
    keep_eq = np.any(A_eq[:, free] != 0.0, axis=1)
    if np.any(rb_ub[~keep_ub] < -tol) or np.any(np.abs(rb_eq[~keep_eq]) > tol):
        return LpResult("infeasible")
    x = np.empty(c.size)
    x[fixed] = xf
    if not free.any():
        return LpResult("optimal", x, float(c @ x), 0)
    res = solve_lp(c[free], A_ub[keep_ub][:, free], rb_ub[keep_ub], A_eq[keep_eq][:, free],
                   rb_eq[keep_eq], lb[free], ub[free], max_iter)
    if res.status != "optimal":
        return res
    x[free] = res.x
    return LpResult("optimal", x, float(c @ x), res.iterations)
