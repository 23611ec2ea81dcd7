"""Linear agent models, exact discretization, aggregation and simulation.

Also holds the feedback-linearized unicycle used by the bundled scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag, expm


class DynamicsError(ValueError):
    pass


def _mat(M, rows=None, cols=None, name="matrix") -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if rows is not None and M.shape[0] != rows or cols is not None and M.shape[1] != cols:
        raise DynamicsError(f"{name} has shape {M.shape}, expected ({rows}, {cols})")
    if not np.all(np.isfinite(M)):
        raise DynamicsError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class ContinuousLTI:
    """``dx = (A x + B u) dt + Upsilon dw``."""

    A: np.ndarray
    B: np.ndarray
    Upsilon: np.ndarray

    def __post_init__(self):
        A = _mat(self.A, name="A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DynamicsError(f"A must be square, got {A.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _mat(self.B, n, None, "B"))
        object.__setattr__(self, "Upsilon", _mat(self.Upsilon, n, None, "Upsilon"))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.Upsilon.shape[1]

    def with_feedback(self, K) -> "ContinuousLTI":
        """Closed loop under ``u = K x + zeta``, with ``zeta`` the new input."""
        K = _mat(K, self.m, self.n, "K")
        return ContinuousLTI(self.A + self.B @ K, self.B, self.Upsilon)


@dataclass(frozen=True)
class DiscreteLTI:
    """``x[k+1] = A x[k] + B u[k] + w[k]``, ``y[k] = C x[k]``, ``w ~ N(0, W)``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    W: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        A = _mat(self.A, name="A")
        n = A.shape[0]
        W = _mat(self.W, n, n, "W")
        if not np.allclose(W, W.T, atol=1e-12):
            raise DynamicsError("W must be symmetric")
        if np.linalg.eigvalsh(0.5 * (W + W.T))[0] < -1e-10 * max(1.0, np.abs(W).max()):
            raise DynamicsError("W must be positive semidefinite")
        if not self.dt > 0:
            raise DynamicsError("dt must be positive")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _mat(self.B, n, None, "B"))
        object.__setattr__(self, "C", _mat(self.C, None, n, "C"))
        object.__setattr__(self, "W", 0.5 * (W + W.T))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def q(self) -> int:
        return self.C.shape[0]

    @cached_property
    def noise_factor(self) -> np.ndarray:
        """``L`` with ``L L^T = W``; Cholesky when possible, eigen-root otherwise."""
        try:
            return np.linalg.cholesky(self.W)
        except np.linalg.LinAlgError:
            vals, vecs = np.linalg.eigh(self.W)
            return vecs * np.sqrt(np.clip(vals, 0.0, None))


def discretize(sys: ContinuousLTI, dt: float, C=None) -> DiscreteLTI:
    """Zero-order-hold discretization with the exact noise integral.

    ``W`` is ``int_0^dt e^{As} Upsilon Upsilon^T e^{A^T s} ds`` computed with
    Van Loan's block exponential.
    """
    if not dt > 0:
        raise DynamicsError("dt must be positive")
    n, m = sys.n, sys.m
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = sys.A
    aug[:n, n:] = sys.B
    E = expm(aug * dt)
    Ad, Bd = E[:n, :n], E[:n, n:]

    G = sys.Upsilon @ sys.Upsilon.T
    vl = np.zeros((2 * n, 2 * n))
    vl[:n, :n] = -sys.A
    vl[:n, n:] = G
    vl[n:, n:] = sys.A.T
    F = expm(vl * dt)
    W = F[n:, n:].T @ F[:n, n:]
    C = np.eye(n) if C is None else C
    return DiscreteLTI(Ad, Bd, C, 0.5 * (W + W.T), dt)


@dataclass
class NetworkModel:
    """Block-diagonal aggregation of independent agents."""

    agents: list[DiscreteLTI]
    continuous: list[ContinuousLTI] | None = None
    state_offsets: list[int] = field(init=False)
    input_offsets: list[int] = field(init=False)
    output_offsets: list[int] = field(init=False)
    discrete: DiscreteLTI = field(init=False)

    def __post_init__(self):
        if not self.agents:
            raise DynamicsError("network needs at least one agent")
        dts = {a.dt for a in self.agents}
        if len(dts) != 1:
            raise DynamicsError("agents must share one sampling period")
        self.state_offsets = list(np.cumsum([0] + [a.n for a in self.agents]))
        self.input_offsets = list(np.cumsum([0] + [a.m for a in self.agents]))
        self.output_offsets = list(np.cumsum([0] + [a.q for a in self.agents]))
        self.discrete = DiscreteLTI(
            block_diag(*[a.A for a in self.agents]),
            block_diag(*[a.B for a in self.agents]),
            block_diag(*[a.C for a in self.agents]),
            block_diag(*[a.W for a in self.agents]),
            self.agents[0].dt,
        )

    @property
    def n(self) -> int:
        return self.state_offsets[-1]

    @property
    def m(self) -> int:
        return self.input_offsets[-1]

    @property
    def dt(self) -> float:
        return self.discrete.dt

    def __len__(self):
        return len(self.agents)

    def state_slice(self, i: int) -> slice:
        return slice(self.state_offsets[i], self.state_offsets[i + 1])

    def input_slice(self, i: int) -> slice:
        return slice(self.input_offsets[i], self.input_offsets[i + 1])

    def output_slice(self, i: int) -> slice:
        return slice(self.output_offsets[i], self.output_offsets[i + 1])

    @property
    def A_continuous(self) -> np.ndarray:
        return block_diag(*[c.A for c in self._cont()])

    @property
    def B_continuous(self) -> np.ndarray:
        return block_diag(*[c.B for c in self._cont()])

    @property
    def Upsilon(self) -> np.ndarray:
        return block_diag(*[c.Upsilon for c in self._cont()])

    def _cont(self) -> list[ContinuousLTI]:
        if self.continuous is None:
            raise DynamicsError("network was built from discrete models only")
        return self.continuous


def aggregate(agents: Sequence[DiscreteLTI | ContinuousLTI], dt: float = 1.0) -> NetworkModel:
    """Aggregate agents; continuous models are discretized with ``dt`` first."""
    agents = list(agents)
    if not agents:
        raise DynamicsError("network needs at least one agent")
    if all(isinstance(a, ContinuousLTI) for a in agents):
        return NetworkModel([discretize(a, dt) for a in agents], agents)
    if all(isinstance(a, DiscreteLTI) for a in agents):
        return NetworkModel(agents)
    raise DynamicsError("cannot mix continuous and discrete agent models")


def step_nominal(model: DiscreteLTI | NetworkModel, x, u) -> np.ndarray:
    d = model.discrete if isinstance(model, NetworkModel) else model
    x, u = np.asarray(x, dtype=float), np.asarray(u, dtype=float)
    if x.shape != (d.n,) or u.shape != (d.m,):
        raise DynamicsError(f"state/input shapes {x.shape}/{u.shape} do not match ({d.n},)/({d.m},)")
    return d.A @ x + d.B @ u


def sample_noise(model: DiscreteLTI, rng: np.random.Generator) -> np.ndarray:
    return model.noise_factor @ rng.standard_normal(model.n)


def step_stochastic(model: DiscreteLTI | NetworkModel, x, u, rng) -> np.ndarray:
    """Nominal step plus process noise.

    For a network ``rng`` is a sequence with one generator per agent, so each
    agent's noise stream is the one it would see when simulated alone.
    """
    nxt = step_nominal(model, x, u)
    if isinstance(model, NetworkModel):
        if len(rng) != len(model.agents):
            raise DynamicsError("need one generator per agent")
        w = np.concatenate([sample_noise(a, g) for a, g in zip(model.agents, rng)])
    else:
        w = sample_noise(model, rng)
    return nxt + w


# ---------------------------------------------------------------------------
# Feedback-linearized unicycle


def build_unicycle_agent(b: float = 0.01) -> ContinuousLTI:
    """Double integrator per axis; state ``(rho, kappa, rho_dot, kappa_dot)``."""
    if b < 0:
        raise DynamicsError("diffusion coefficient must be nonnegative")
    A = np.zeros((4, 4))
    A[0, 2] = A[1, 3] = 1.0
    B = np.zeros((4, 2))
    B[2, 0] = B[3, 1] = 1.0
    Ups = np.zeros((4, 2))
    Ups[2, 0] = Ups[3, 1] = b
    return ContinuousLTI(A, B, Ups)


@dataclass(frozen=True)
class UnicycleState:
    rho: float
    kappa: float
    theta: float
    v: float
    omega: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.rho, self.kappa, self.theta, self.v, self.omega)):
            raise DynamicsError("unicycle state must be finite")


@dataclass(frozen=True)
class WheelCommands:
    v_dot: float
    v_omega: float
    omega: float
    v_right: float
    v_left: float
    clamped: bool


def recover_wheel_commands(u1: float, u2: float, state: UnicycleState,
                           half_axle: float = 0.3, v_floor: float = 1e-3) -> WheelCommands:
    """Map the linear inputs back to unicycle commands.

    ``(v_dot, v*omega)`` is ``(u1, u2)`` rotated by ``-theta``.  The turn rate
    divides by ``v``, which is clamped away from zero at ``v_floor``.  Wheel
    speeds follow from ``v = (v_r + v_l)/2`` and ``omega = (v_r - v_l)/(2 d)``.
    """
    c, s = math.cos(state.theta), math.sin(state.theta)
    v_dot = c * u1 + s * u2
    v_omega = -s * u1 + c * u2
    v = state.v
    clamped = abs(v) < v_floor
    if clamped:
        v = math.copysign(v_floor, v) if v != 0 else v_floor
    omega = v_omega / v
    return WheelCommands(v_dot, v_omega, omega,
                         state.v + omega * half_axle, state.v - omega * half_axle, clamped)


def _unicycle_rhs(z: np.ndarray, v_dot: float, v_omega: float, v_floor: float) -> np.ndarray:
    _, _, theta, v = z
    v_safe = v if abs(v) >= v_floor else (math.copysign(v_floor, v) if v != 0 else v_floor)
    return np.array([v * math.cos(theta), v * math.sin(theta), v_omega / v_safe, v_dot])


def simulate_unicycle_kinematics(state: UnicycleState, v_dot: float, v_omega: float,
                                 dt: float, v_floor: float = 1e-3) -> UnicycleState:
    """One fourth-order Runge-Kutta step with ``(v_dot, v*omega)`` held."""
    if not dt > 0:
        raise DynamicsError("dt must be positive")
    z = np.array([state.rho, state.kappa, state.theta, state.v])
    k1 = _unicycle_rhs(z, v_dot, v_omega, v_floor)
    k2 = _unicycle_rhs(z + 0.5 * dt * k1, v_dot, v_omega, v_floor)
    k3 = _unicycle_rhs(z + 0.5 * dt * k2, v_dot, v_omega, v_floor)
    k4 = _unicycle_rhs(z + dt * k3, v_dot, v_omega, v_floor)
    z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    v_safe = z[3] if abs(z[3]) >= v_floor else v_floor
    return UnicycleState(float(z[0]), float(z[1]), float(z[2]), float(z[3]), v_omega / v_safe)


def _linearized_rhs(z: np.ndarray, u1: float, u2: float, v_floor: float) -> np.ndarray:
    _, _, theta, v = z
    c, s = math.cos(theta), math.sin(theta)
    return _unicycle_rhs(z, c * u1 + s * u2, -s * u1 + c * u2, v_floor)


def simulate_linearized_unicycle(state: UnicycleState, u1: float, u2: float, dt: float,
                                 v_floor: float = 1e-3) -> UnicycleState:
    """RK4 step of the unicycle under the feedback-linearizing law for ``(u1, u2)``.

    The commands are recomputed from the state at every stage, so the
    position follows the double integrator up to the integration error.
    """
    if not dt > 0:
        raise DynamicsError("dt must be positive")
    z = np.array([state.rho, state.kappa, state.theta, state.v])
    k1 = _linearized_rhs(z, u1, u2, v_floor)
    k2 = _linearized_rhs(z + 0.5 * dt * k1, u1, u2, v_floor)
    k3 = _linearized_rhs(z + 0.5 * dt * k2, u1, u2, v_floor)
    k4 = _linearized_rhs(z + dt * k3, u1, u2, v_floor)
    z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    v_safe = z[3] if abs(z[3]) >= v_floor else v_floor
    omega = (-math.sin(z[2]) * u1 + math.cos(z[2]) * u2) / v_safe
    return UnicycleState(float(z[0]), float(z[1]), float(z[2]), float(z[3]), omega)


def unicycle_to_linear(state: UnicycleState) -> np.ndarray:
    """Linear-model state ``(rho, kappa, rho_dot, kappa_dot)`` of a unicycle."""
    return np.array([state.rho, state.kappa,
                     state.v * math.cos(state.theta), state.v * math.sin(state.theta)])
