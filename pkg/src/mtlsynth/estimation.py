"""Steady-state Kalman filtering of privatized outputs at the local hubs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import DiscreteLTI


class EstimationError(RuntimeError):
    pass


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _solve_psd(S: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``S X = rhs`` for symmetric PSD ``S`` (pseudo-inverse if singular)."""
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return np.linalg.pinv(S, rcond=1e-13, hermitian=True) @ rhs
    y = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, y)


def riccati_map(Sigma, A, C, W, V) -> np.ndarray:
    """One step of the a priori covariance recursion."""
    S = C @ Sigma @ C.T + V
    gainT = _solve_psd(S, C @ Sigma @ A.T)
    return _sym(A @ Sigma @ A.T - A @ Sigma @ C.T @ gainT + W)


def dare_residual(Sigma, A, C, W, V) -> float:
    return float(np.linalg.norm(riccati_map(Sigma, A, C, W, V) - Sigma, "fro"))


def solve_dare(A, C, W, V, tol: float = 1e-12, max_iter: int = 100_000) -> np.ndarray:
    """A priori steady-state error covariance by fixed-point iteration from ``W``."""
    A, C, W, V = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, C, W, V))
    Sigma = _sym(W.copy())
    for _ in range(max_iter):
        nxt = riccati_map(Sigma, A, C, W, V)
        change = np.linalg.norm(nxt - Sigma, "fro")
        Sigma = nxt
        if change < tol:
            return Sigma
    raise EstimationError(f"Riccati iteration did not converge in {max_iter} steps")


def posterior_cov(Sigma, C, V) -> np.ndarray:
    """A posteriori covariance from the a priori one."""
    Sigma, C, V = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (Sigma, C, V))
    S = C @ Sigma @ C.T + V
    return _sym(Sigma - Sigma @ C.T @ _solve_psd(S, C @ Sigma))


@dataclass
class HubFilter:
    """Kalman filter run by one local hub with the steady-state gain.

    ``x_hat`` is the a posteriori estimate and is mutated by
    :meth:`predict`/:meth:`update`.
    """

    model: DiscreteLTI
    V: np.ndarray
    x_hat: np.ndarray
    Sigma: np.ndarray = field(init=False)
    Sigma_bar: np.ndarray = field(init=False)
    gain: np.ndarray = field(init=False)
    x_prior: np.ndarray = field(init=False)

    def __post_init__(self):
        self.V = np.atleast_2d(np.asarray(self.V, dtype=float))
        self.x_hat = np.asarray(self.x_hat, dtype=float).copy()
        self.x_prior = self.x_hat.copy()
        m = self.model
        self.Sigma = solve_dare(m.A, m.C, m.W, self.V)
        self.Sigma_bar = posterior_cov(self.Sigma, m.C, self.V)
        if np.all(np.linalg.eigvalsh(self.V) > 0):
            self.gain = self.Sigma_bar @ m.C.T @ np.linalg.inv(self.V)
        else:
            # Same matrix, written in a form that survives V = 0.
            S = m.C @ self.Sigma @ m.C.T + self.V
            self.gain = _solve_psd(S, m.C @ self.Sigma).T

    @property
    def dare_residual(self) -> float:
        m = self.model
        return dare_residual(self.Sigma, m.A, m.C, m.W, self.V)

    def predict(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.model.m,):
            raise EstimationError(f"input has shape {u.shape}, expected ({self.model.m},)")
        self.x_prior = self.model.A @ self.x_hat + self.model.B @ u
        return self.x_prior

    def update(self, y_priv) -> np.ndarray:
        y_priv = np.asarray(y_priv, dtype=float)
        if y_priv.shape != (self.model.q,):
            raise EstimationError(f"output has shape {y_priv.shape}, expected ({self.model.q},)")
        prior = self.x_prior
        self.x_hat = prior + self.gain @ (y_priv - self.model.C @ prior)
        return self.x_hat


def predict(filt: HubFilter, u) -> np.ndarray:
    return filt.predict(u)


def update(filt: HubFilter, y_priv) -> np.ndarray:
    return filt.update(y_priv)


@dataclass(frozen=True)
class MseBounds:
    lower: float
    upper: float


def mse_bounds(M, trace_min: float, trace_max: float) -> MseBounds:
    """Bounds on ``E[(x - x_hat)^T M (x - x_hat)]`` over the privacy box."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.allclose(M, M.T):
        raise EstimationError("M must be symmetric")
    eig = np.linalg.eigvalsh(M)
    if eig[0] < -1e-12:
        raise EstimationError("M must be positive semidefinite")
    if trace_min > trace_max:
        raise EstimationError("trace_min exceeds trace_max")
    lo, hi = max(float(eig[0]), 0.0), max(float(eig[-1]), 0.0)
    return MseBounds(lo * trace_min, hi * trace_max)


def markov_bound(M, Sigma_bar, beta: float) -> float:
    """Upper bound on ``P[(x - x_hat)^T M (x - x_hat) >= beta]``."""
    if not beta > 0:
        raise EstimationError("beta must be positive")
    t = float(np.trace(np.atleast_2d(M) @ np.atleast_2d(Sigma_bar)))
    return min(1.0, t / beta)


def beta_for_gamma(M, Sigma_bar, gamma: float) -> float:
    """Threshold whose Markov bound on the estimation error equals ``1 - gamma``."""
    if not 0.0 < gamma < 1.0:
        raise EstimationError("gamma must lie in (0, 1)")
    t = float(np.trace(np.atleast_2d(M) @ np.atleast_2d(Sigma_bar)))
    return t / (1.0 - gamma)
