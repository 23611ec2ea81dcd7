"""Gaussian mechanism for output (input-perturbation) differential privacy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


class PrivacyError(ValueError):
    pass


def q_function(y: float) -> float:
    """Upper tail probability of the standard normal distribution."""
    return 0.5 * math.erfc(y / math.sqrt(2.0))


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on ``(0, 1)`` by bracketed root finding."""
    if not 0.0 < p < 1.0:
        raise PrivacyError(f"q_inverse needs p in (0, 1), got {p}")
    # Q is strictly decreasing; Q(-40) == 1 and Q(40) == 0 in double precision.
    return brentq(lambda y: q_function(y) - p, -40.0, 40.0, xtol=1e-15, rtol=1e-15, maxiter=500)


def sensitivity_bound(C, nu: float) -> float:
    """Upper bound ``||C||_2 * nu`` on the l2 sensitivity of the output map."""
    if not nu > 0:
        raise PrivacyError(f"adjacency radius must be positive, got {nu}")
    C = np.atleast_2d(np.asarray(C, dtype=float))
    eig = np.linalg.eigvalsh(C.T @ C)
    return math.sqrt(max(float(eig[-1]), 0.0)) * nu


def gaussian_sigma(delta_l2: float, eps: float, delta: float) -> float:
    """Smallest noise standard deviation giving (eps, delta)-privacy."""
    if not delta_l2 > 0:
        raise PrivacyError(f"sensitivity must be positive, got {delta_l2}")
    if not eps > 0:
        raise PrivacyError(f"epsilon must be positive, got {eps}")
    if not 0.0 < delta < 0.5:
        raise PrivacyError(f"delta must lie in (0, 1/2), got {delta}")
    iota = q_inverse(delta)
    return delta_l2 / (2.0 * eps) * (iota + math.sqrt(iota * iota + 2.0 * eps))


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float
    nu: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise PrivacyError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.delta < 0.5:
            raise PrivacyError(f"delta must lie in (0, 1/2), got {self.delta}")
        if not self.nu > 0:
            raise PrivacyError(f"nu must be positive, got {self.nu}")

    def check_range(self, eps_range: tuple[float, float], delta_range: tuple[float, float]):
        """Raise unless the parameters sit inside the admissible box."""
        e_lo, e_hi = eps_range
        d_lo, d_hi = delta_range
        if not 0 < e_lo <= e_hi:
            raise PrivacyError(f"bad epsilon range {eps_range}")
        if not 0 < d_lo <= d_hi < 0.5:
            raise PrivacyError(f"bad delta range {delta_range}")
        tol = 1e-12
        if not e_lo - tol <= self.epsilon <= e_hi + tol:
            raise PrivacyError(f"epsilon {self.epsilon} outside [{e_lo}, {e_hi}]")
        if not d_lo - tol <= self.delta <= d_hi + tol:
            raise PrivacyError(f"delta {self.delta} outside [{d_lo}, {d_hi}]")


@dataclass(frozen=True)
class GaussianMechanism:
    """Adds i.i.d. ``N(0, sigma^2)`` noise to each output coordinate."""

    sigma: float
    dim: int
    enabled: bool = True

    @classmethod
    def calibrate(cls, C, params: PrivacyParams, enabled: bool = True) -> "GaussianMechanism":
        C = np.atleast_2d(np.asarray(C, dtype=float))
        sigma = gaussian_sigma(sensitivity_bound(C, params.nu), params.epsilon, params.delta)
        return cls(sigma if enabled else 0.0, C.shape[0], enabled)

    @property
    def covariance(self) -> np.ndarray:
        return self.sigma ** 2 * np.eye(self.dim)


def privatize(y, mech: GaussianMechanism, rng: np.random.Generator) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (mech.dim,):
        raise PrivacyError(f"output has shape {y.shape}, mechanism expects ({mech.dim},)")
    if not mech.enabled or mech.sigma == 0.0:
        return y.copy()
    return y + rng.normal(0.0, mech.sigma, size=mech.dim)
