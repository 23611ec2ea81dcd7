"""Quadratic stochastic bisimulation certificates and robustness margins.

A certificate is ``phi(x, x') = (x - x')^T M (x - x')`` with ``M`` solving
the Lyapunov-type inequality ``A^T M + M A + mu M <= 0`` for the closed-loop
drift ``A``.  For fixed ``mu`` the inequality is met with equality margin
``-I`` by the Lyapunov equation of ``A + (mu/2) I``, which is what we solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_continuous_are


class CertificateError(ValueError):
    pass


def spectral_abscissa(A) -> float:
    return float(np.max(np.linalg.eigvals(np.atleast_2d(A)).real))


def _double_integrator_axes(A: np.ndarray, B: np.ndarray) -> int | None:
    n = A.shape[0]
    if n % 2 or B.shape != (n, n // 2):
        return None
    k = n // 2
    A_ref = np.zeros((n, n))
    A_ref[:k, k:] = np.eye(k)
    B_ref = np.zeros((n, k))
    B_ref[k:, :] = np.eye(k)
    if np.array_equal(A, A_ref) and np.array_equal(B, B_ref):
        return k
    return None


def stabilize(A, B, margin: float = 0.25, poles: tuple[float, float] | None = None,
              max_shifts: int = 30) -> np.ndarray:
    """Gain ``K`` with every eigenvalue of ``A + B K`` at real part ``<= -margin``.

    Already-stable drifts get ``K = 0``.  Per-axis double integrators get
    closed-form pole placement (default poles ``-2*margin`` and
    ``-4*margin``); anything else gets an LQR gain on the shifted drift
    ``A + s I``, doubling ``s`` until the check passes.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n, m = B.shape
    if spectral_abscissa(A) <= -margin:
        return np.zeros((m, n))

    if n == m and not A.any() and abs(np.linalg.det(B)) > 1e-12:
        # pure integrators: place every pole at -4*margin
        return -4.0 * margin * np.linalg.inv(B)

    axes = _double_integrator_axes(A, B)
    if axes is not None:
        p1, p2 = poles if poles is not None else (2 * margin, 4 * margin)
        p1, p2 = abs(p1), abs(p2)
        K = np.hstack([-p1 * p2 * np.eye(axes), -(p1 + p2) * np.eye(axes)])
        if spectral_abscissa(A + B @ K) <= -margin + 1e-12:
            return K

    shift = margin
    for _ in range(max_shifts):
        try:
            P = solve_continuous_are(A + shift * np.eye(n), B, np.eye(n), np.eye(m))
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise CertificateError(f"pair (A, B) is not stabilizable: {exc}") from exc
        K = -B.T @ P
        if spectral_abscissa(A + B @ K) <= -margin:
            return K
        shift *= 2.0
    raise CertificateError("could not place eigenvalues left of -margin")


def solve_lyapunov(A, Q) -> np.ndarray:
    """Solve ``A^T M + M A = -Q`` through the Kronecker-vectorized linear system."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    eye = np.eye(n)
    # column-major vec: vec(A^T M) = (I kron A^T) vec M, vec(M A) = (A^T kron I) vec M
    L = np.kron(eye, A.T) + np.kron(A.T, eye)
    vec = np.linalg.solve(L, -np.asarray(Q, dtype=float).reshape(-1, order="F"))
    M = vec.reshape(n, n, order="F")
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class BisimCertificate:
    M: np.ndarray
    mu: float
    alpha: float
    A_cl: np.ndarray
    Upsilon: np.ndarray
    K: np.ndarray | None = field(default=None)

    @property
    def norm_M(self) -> float:
        return float(np.linalg.norm(self.M, 2))

    @property
    def lmi_residual(self) -> float:
        R = self.A_cl.T @ self.M + self.M @ self.A_cl + self.mu * self.M
        return float(np.linalg.eigvalsh(0.5 * (R + R.T))[-1])

    @property
    def drift_residual(self) -> float:
        R = self.A_cl.T @ self.M + self.M @ self.A_cl
        return float(np.linalg.eigvalsh(0.5 * (R + R.T))[-1])

    def phi(self, x, x_other) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(x_other, dtype=float)
        return float(d @ self.M @ d)


def default_mu(A_cl) -> float:
    a = spectral_abscissa(A_cl)
    if a >= 0:
        raise CertificateError(f"closed-loop drift is not Hurwitz (abscissa {a:.3g})")
    return min(1.0, abs(a))


def compute_certificate(A_cl, Upsilon, mu: float | None = None, K=None) -> BisimCertificate:
    A_cl = np.atleast_2d(np.asarray(A_cl, dtype=float))
    Upsilon = np.atleast_2d(np.asarray(Upsilon, dtype=float))
    if mu is None:
        mu = default_mu(A_cl)
    if not mu > 0:
        raise CertificateError("mu must be positive")
    n = A_cl.shape[0]
    shifted = A_cl + 0.5 * mu * np.eye(n)
    if spectral_abscissa(shifted) >= 0:
        raise CertificateError(
            f"mu = {mu} exceeds twice the closed-loop decay rate "
            f"({-2 * spectral_abscissa(A_cl):.6g}); no positive definite solution")
    M = solve_lyapunov(shifted, np.eye(n))
    if np.linalg.eigvalsh(M)[0] <= 0:
        raise CertificateError("Lyapunov solution is not positive definite")
    alpha = float(np.trace(Upsilon.T @ M @ Upsilon))
    return BisimCertificate(M, float(mu), alpha, A_cl, Upsilon,
                            None if K is None else np.asarray(K, dtype=float))


def deviation_bound(cert: BisimCertificate, t: float, eta: float) -> float:
    """Level that the certificate stays below over ``[0, t]`` with probability > ``eta``."""
    if not 0.0 <= eta < 1.0:
        raise CertificateError("eta must lie in [0, 1)")
    if t < 0:
        raise CertificateError("t must be nonnegative")
    return cert.alpha * t / (1.0 - eta)


def beta_hat(beta: float, cert: BisimCertificate, elapsed: float, eta: float) -> float:
    """Robustness margin the nominal plan needs so the true trajectory keeps its sign."""
    if beta < 0:
        raise CertificateError("beta must be nonnegative")
    dev = deviation_bound(cert, elapsed, eta)
    return (math.sqrt(beta) + math.sqrt(dev)) / math.sqrt(cert.norm_M)


@dataclass
class CertificateReport:
    passed: bool
    min_eig_M: float
    lmi_residual: float
    drift_residual: float
    alpha: float
    failures: list[str]

    def lines(self) -> list[str]:
        status = "pass" if self.passed else "FAIL"
        out = [f"certificate: {status}",
               f"  min eig(M)          = {self.min_eig_M:.6g}",
               f"  LMI residual        = {self.lmi_residual:.6g}",
               f"  drift residual      = {self.drift_residual:.6g}",
               f"  alpha               = {self.alpha:.6g}"]
        out += [f"  failure: {f}" for f in self.failures]
        return out


def verify_certificate(cert: BisimCertificate, tol: float = 1e-9, samples: int = 64,
                       seed: int = 0) -> CertificateReport:
    """Check positivity, both matrix inequalities and the bisimulation-function axioms."""
    failures = []
    M = cert.M
    min_eig = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
    if not np.allclose(M, M.T, atol=1e-12):
        failures.append("M is not symmetric")
    if min_eig <= 0:
        failures.append(f"M is not positive definite (min eigenvalue {min_eig:.3g})")
    lmi = cert.lmi_residual
    if lmi > tol:
        failures.append(f"LMI residual {lmi:.3g} > {tol}")
    drift = cert.drift_residual
    if drift > tol:
        failures.append(f"drift residual {drift:.3g} > {tol}")
    alpha = float(np.trace(cert.Upsilon.T @ M @ cert.Upsilon))
    if alpha < 0 or not math.isclose(alpha, cert.alpha, rel_tol=1e-9, abs_tol=1e-15):
        failures.append("alpha does not match tr(Upsilon^T M Upsilon)")
    rng = np.random.default_rng(seed)
    n = M.shape[0]
    for _ in range(samples):
        x = rng.normal(size=n)
        y = x + rng.normal(size=n)
        if cert.phi(x, x) != 0.0:
            failures.append("phi(x, x) != 0")
            break
        if not cert.phi(x, y) > 0:
            failures.append("phi(x, y) <= 0 for some x != y")
            break
    return CertificateReport(not failures, min_eig, lmi, drift, alpha, failures)
