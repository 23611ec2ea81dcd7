"""Receding-horizon synthesis loop and its Monte Carlo validation.

The cloud replans every ``T`` steps from the hub estimates.  Each agent runs
a local prefeedback ``u = K x + zeta`` on its own state, so planning,
filtering and simulation all work with the discretized closed loop and the
free input ``zeta``; physical inputs are recorded alongside.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import norm

from .bisimulation import (BisimCertificate, CertificateError, beta_hat, compute_certificate,
                           spectral_abscissa, stabilize, verify_certificate)
from .dynamics import ContinuousLTI, NetworkModel, aggregate, build_unicycle_agent
from .estimation import HubFilter, beta_for_gamma
from .logic import (Bottom, Formula, FormulaError, horizon, parse_formula,
                    predicate_from_dict, rewrite, robustness)
from .milp import (Budget, EncodingError, MilpModel, Status, default_big_m, encode_dynamics,
                   encode_input_bounds, encode_mtl, encode_objective, propagate_state_bounds,
                   secondary_solve, solve)
from .privacy import GaussianMechanism, PrivacyParams, gaussian_sigma, privatize, sensitivity_bound

log = logging.getLogger(__name__)

PROCESS_NOISE, PRIVACY_NOISE = 0, 1


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class AgentConfig:
    """One agent: either the feedback-linearized unicycle or a generic LTI model."""

    name: str
    x0: tuple[float, ...]
    epsilon: float
    delta: float
    nu: float = 1.0
    kind: str = "unicycle"
    b: float = 0.01
    A: tuple | None = None
    B: tuple | None = None
    Upsilon: tuple | None = None
    C: tuple | None = None
    K: tuple | None = None

    def continuous(self) -> ContinuousLTI:
        if self.kind == "unicycle":
            return build_unicycle_agent(self.b)
        if self.kind == "lti":
            if self.A is None or self.B is None or self.Upsilon is None:
                raise ConfigError(f"agent {self.name}: lti model needs A, B and Upsilon")
            return ContinuousLTI(np.array(self.A, dtype=float), np.array(self.B, dtype=float),
                                 np.array(self.Upsilon, dtype=float))
        raise ConfigError(f"agent {self.name}: unknown model kind {self.kind!r}")

    def output_matrix(self, n: int) -> np.ndarray:
        return np.eye(n) if self.C is None else np.atleast_2d(np.array(self.C, dtype=float))


@dataclass(frozen=True)
class ScenarioConfig:
    agents: tuple[AgentConfig, ...]
    predicates: dict
    formula: str
    T: int = 10
    T_max: int = 20
    dt: float = 1.0
    gamma: float = 0.95
    eta: float = 0.95
    chi: float = 0.9
    u_min: float = -50.0
    u_max: float = 50.0
    seed: int = 0
    epsilon_range: tuple[float, float] | None = None
    delta_range: tuple[float, float] | None = None
    privacy_enabled: bool = True
    process_noise: bool = True
    backend: str = "highs"
    max_nodes: int = 100_000
    time_limit: float = 120.0
    encoding: str = "threshold"
    mu: float | None = None
    stabilize_margin: float = 0.25
    beta_safety: float = 1e-6
    workspace_lo: tuple[float, ...] | None = None
    workspace_hi: tuple[float, ...] | None = None
    big_m: float | None = None

    def parsed_formula(self) -> Formula:
        preds = {name: predicate_from_dict(spec) for name, spec in self.predicates.items()}
        return parse_formula(self.formula, preds)

    @property
    def budget(self) -> Budget:
        return Budget(self.max_nodes, self.time_limit)


def check_config(cfg: ScenarioConfig):
    """Structural checks that make a configuration unusable when they fail."""
    if not cfg.agents:
        raise ConfigError("at least one agent is required")
    if cfg.T < 1:
        raise ConfigError("replanning period T must be at least 1")
    if cfg.T_max < 1:
        raise ConfigError("T_max must be at least 1")
    if not cfg.dt > 0:
        raise ConfigError("dt must be positive")
    for name, v in (("gamma", cfg.gamma), ("eta", cfg.eta), ("chi", cfg.chi)):
        if not 0.0 < v < 1.0:
            raise ConfigError(f"{name} must lie in (0, 1)")
    if cfg.u_min > cfg.u_max:
        raise ConfigError("u_min exceeds u_max")
    if cfg.encoding not in ("threshold", "robustness"):
        raise ConfigError(f"unknown encoding {cfg.encoding!r}")
    names = [a.name for a in cfg.agents]
    if len(set(names)) != len(names):
        raise ConfigError("agent names must be unique")


# ---------------------------------------------------------------------------
# compiled scenario


@dataclass
class Scenario:
    """Everything derived once from a configuration."""

    config: ScenarioConfig
    phi: Formula
    net: NetworkModel
    gains: list[np.ndarray]
    K: np.ndarray
    certificate: BisimCertificate
    mechanisms: list[GaussianMechanism]
    Sigma_bar: np.ndarray
    beta: float
    beta_hat: float
    beta_target: float
    x0: np.ndarray
    big_m: float
    _first_plan: "PlanResult | None" = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.net.n

    @property
    def m(self) -> int:
        return self.net.m

    @property
    def final_step(self) -> int:
        """Last index the true trajectory is simulated to."""
        return max(self.config.T_max, horizon(self.phi))


def _worst_case_sigma(agent: AgentConfig, C: np.ndarray, cfg: ScenarioConfig) -> float:
    # Noise is weakest at the largest admissible (epsilon, delta); the
    # estimation error is largest at the smallest, which is what beta needs.
    eps = cfg.epsilon_range[0] if cfg.epsilon_range else agent.epsilon
    dl = cfg.delta_range[0] if cfg.delta_range else agent.delta
    return gaussian_sigma(sensitivity_bound(C, agent.nu), eps, dl)


def compile_scenario(cfg: ScenarioConfig) -> Scenario:
    check_config(cfg)
    phi = cfg.parsed_formula()
    conts, gains, mechs, sig_bars, x0 = [], [], [], [], []
    for ag in cfg.agents:
        sys = ag.continuous()
        if len(ag.x0) != sys.n:
            raise ConfigError(f"agent {ag.name}: x0 has {len(ag.x0)} entries, model has {sys.n}")
        if ag.K is not None:
            Kc = np.atleast_2d(np.array(ag.K, dtype=float))
        else:
            Kc = stabilize(sys.A, sys.B, margin=cfg.stabilize_margin)
        closed = sys.with_feedback(Kc)
        C = ag.output_matrix(sys.n)
        params = PrivacyParams(ag.epsilon, ag.delta, ag.nu)
        if cfg.epsilon_range and cfg.delta_range:
            params.check_range(cfg.epsilon_range, cfg.delta_range)
        mech = GaussianMechanism.calibrate(C, params, cfg.privacy_enabled)
        conts.append(closed)
        gains.append(Kc)
        mechs.append(mech)
        x0.append(np.array(ag.x0, dtype=float))
    net = aggregate(conts, cfg.dt)
    # replace C of each discrete agent with the configured output map
    from .dynamics import DiscreteLTI
    discs = []
    for ag, d in zip(cfg.agents, net.agents):
        W = d.W if cfg.process_noise else np.zeros_like(d.W)
        discs.append(DiscreteLTI(d.A, d.B, ag.output_matrix(d.n), W, d.dt))
    net = NetworkModel(discs, conts)

    for ag, d in zip(cfg.agents, net.agents):
        s = _worst_case_sigma(ag, d.C, cfg) if cfg.privacy_enabled else 0.0
        filt = HubFilter(d, s * s * np.eye(d.q), np.zeros(d.n))
        sig_bars.append(filt.Sigma_bar)

    K = block_diag(*gains)
    cert = compute_certificate(net.A_continuous, net.Upsilon, cfg.mu, K)
    Sigma_bar = block_diag(*sig_bars)
    tr = float(np.trace(cert.M @ Sigma_bar))
    beta = beta_for_gamma(cert.M, Sigma_bar, cfg.gamma) if tr > 0 else 0.0
    bh = beta_hat(beta, cert, cfg.T * cfg.dt, cfg.eta)
    # the solver works to feasibility tolerances, so it is asked for a hair more
    target = bh + cfg.beta_safety
    big_m = cfg.big_m
    if big_m is None:
        if cfg.workspace_lo is not None and cfg.workspace_hi is not None:
            diam = float(np.max(np.array(cfg.workspace_hi) - np.array(cfg.workspace_lo)))
        else:
            diam = float(np.ptp(np.concatenate(x0))) + 1.0
        steps = max(cfg.T_max, horizon(phi))
        big_m = default_big_m(diam, max(abs(cfg.u_min), abs(cfg.u_max)), steps, cfg.dt)
    return Scenario(cfg, phi, net, gains, K, cert, mechs, Sigma_bar, beta, bh, target,
                    np.concatenate(x0), big_m)


# ---------------------------------------------------------------------------
# one replanning cycle


@dataclass
class PlanResult:
    ell: int
    status: str
    zeta: np.ndarray | None          # (H, m) free inputs of the whole lookahead
    u: np.ndarray | None             # (H, m) physical inputs along the nominal plan
    nominal: np.ndarray | None       # (H + 1, n) nominal states from ell on
    beta_hat: float
    beta_used: float | None
    fallback: int
    objective: float | None
    robustness: float | None
    formula: str
    horizon_steps: int
    nodes: int = 0
    wall_time: float = 0.0
    binaries: int = 0
    rows: int = 0
    big_m_fallbacks: int = 0
    model: MilpModel | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.zeta is not None

    @property
    def certified(self) -> bool:
        """Optimal at the full margin with nominal robustness at least ``beta_hat``."""
        return (self.status == "Optimal" and self.fallback == 0
                and self.robustness is not None and self.robustness >= self.beta_hat)

    def to_dict(self) -> dict:
        return {"ell": self.ell, "status": self.status, "beta_hat": self.beta_hat,
                "beta_used": self.beta_used, "fallback": self.fallback,
                "objective": self.objective, "robustness": _json_float(self.robustness),
                "formula": self.formula, "horizon_steps": self.horizon_steps,
                "nodes": self.nodes, "wall_time": self.wall_time, "binaries": self.binaries,
                "rows": self.rows, "big_m_fallbacks": self.big_m_fallbacks,
                "certified": self.certified}


def _json_float(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def build_plan_model(sc: Scenario, ell: int, x_hat: np.ndarray, phi_now: Formula,
                     margin: float) -> tuple[MilpModel, object, int]:
    """MILP over the lookahead ``max(ell + T, horizon(phi_now)) - ell`` steps."""
    cfg = sc.config
    H = max(ell + cfg.T, horizon(phi_now)) - ell
    model = MilpModel(big_m=sc.big_m)
    model.metadata.update({"ell": ell, "beta_hat": margin, "big_m_source": "scenario"})
    pv = encode_dynamics(model, sc.net, x_hat, H, sc.K)
    encode_input_bounds(model, pv, cfg.u_min, cfg.u_max)
    propagate_state_bounds(model, pv, sc.net, sc.K, cfg.workspace_lo, cfg.workspace_hi)
    encode_objective(model, pv, steps=min(cfg.T, H))
    # indices before ell are already substituted away by the rewrite and are
    # never referenced; they point at the pinned initial state
    X = np.vstack([np.repeat(pv.X[:1], ell, axis=0), pv.X])
    encode_mtl(model, phi_now, X, margin, cfg.encoding)
    return model, pv, H


def plan_cycle(sc: Scenario, ell: int, x_hat, history, phi: Formula | None = None) -> PlanResult:
    """Solve one replanning problem at ``ell`` from the estimate ``x_hat``.

    ``history`` holds the estimates ``x_hat[0..ell]`` used to discharge the
    already observed part of the formula.  On infeasibility the margin is
    halved, then dropped.
    """
    cfg = sc.config
    phi = sc.phi if phi is None else phi
    x_hat = np.asarray(x_hat, dtype=float)
    phi_now = rewrite(phi, np.asarray(history, dtype=float), ell) if ell > 0 else phi
    text = str(phi_now)
    H = max(ell + cfg.T, horizon(phi_now)) - ell
    if isinstance(phi_now, Bottom):
        return PlanResult(ell, "Infeasible", None, None, None, sc.beta_hat, None, 3, None, None,
                          text, H)
    last = None
    for level, margin in enumerate((sc.beta_target, sc.beta_target / 2.0, 0.0)):
        if level > 0 and margin == last:
            continue
        last = margin
        model, pv, H = build_plan_model(sc, ell, x_hat, phi_now, margin)
        sol = solve(model, cfg.budget, cfg.backend)
        sol = secondary_solve(model, sol, cfg.budget, cfg.backend)
        res = PlanResult(ell, sol.status.value, None, None, None, sc.beta_hat, margin, level,
                         sol.objective, None, text, H, sol.nodes, sol.wall_time,
                         model.num_binaries, len(model.rows),
                         int(model.metadata.get("big_m_fallbacks", 0)), model)
        if sol.status == Status.OPTIMAL:
            res.zeta = sol.x[pv.V].copy()
            res.u = sol.x[pv.U].copy()
            res.nominal = _rollout(sc, x_hat, res.zeta)
            full = np.vstack([np.repeat(res.nominal[:1], ell, axis=0), res.nominal])
            res.robustness = robustness(phi_now, full, 0)
            if level:
                log.warning("plan at step %d used degraded margin %.6g (level %d); "
                            "probabilistic guarantee void", ell, margin, level)
            return res
        log.warning("plan at step %d: %s at margin %.6g", ell, sol.status.value, margin)
        if sol.status != Status.INFEASIBLE:
            return res
    res.fallback = 3
    return res


def _rollout(sc: Scenario, x0: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    d = sc.net.discrete
    xs = [x0]
    for v in zeta:
        xs.append(d.A @ xs[-1] + d.B @ v)
    return np.array(xs)


# ---------------------------------------------------------------------------
# episodes


def agent_rngs(seed: int, n_agents: int, purpose: int) -> list[np.random.Generator]:
    """Independent streams keyed by ``(agent, purpose)`` under one master seed."""
    return [np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(a, purpose))))
            for a in range(n_agents)]


@dataclass
class RunTrace:
    seed: int
    dt: float
    states: np.ndarray       # (S + 1, n) true states
    estimates: np.ndarray    # (S + 1, n) hub estimates
    outputs: np.ndarray      # (S + 1, q) privatized outputs (row 0 is the known start)
    inputs: np.ndarray       # (S, m) physical inputs
    zeta: np.ndarray         # (S, m) free inputs
    plan_index: np.ndarray   # (S,) which plan supplied each input
    plans: list[PlanResult]
    robustness: float
    satisfied: bool
    degraded: bool
    T_max: int
    state_offsets: list[int]
    input_offsets: list[int]
    output_offsets: list[int]
    agent_names: list[str]

    @property
    def steps(self) -> int:
        return self.inputs.shape[0]

    def all_plans_certified(self) -> bool:
        return all(p.certified for p in self.plans)

    def summary(self) -> dict:
        return {"seed": self.seed, "robustness": _json_float(self.robustness),
                "satisfied": self.satisfied, "degraded": self.degraded,
                "steps": self.steps, "T_max": self.T_max,
                "replans": len(self.plans),
                "objective": float(np.sum(np.abs(self.inputs[:self.T_max]))),
                "plan_objectives": [p.objective for p in self.plans]}


def run_episode(sc: Scenario, seed: int | None = None) -> RunTrace:
    cfg = sc.config
    seed = cfg.seed if seed is None else seed
    net = sc.net
    n_ag = len(net.agents)
    proc = agent_rngs(seed, n_ag, PROCESS_NOISE)
    priv = agent_rngs(seed, n_ag, PRIVACY_NOISE)
    hubs = [HubFilter(d, (mech.sigma ** 2) * np.eye(d.q), sc.x0[net.state_slice(i)])
            for i, (d, mech) in enumerate(zip(net.agents, sc.mechanisms))]
    S = sc.final_step
    q = net.output_offsets[-1]
    X = np.zeros((S + 1, net.n))
    Xh = np.zeros((S + 1, net.n))
    Y = np.zeros((S + 1, q))
    U = np.zeros((S, net.m))
    Z = np.zeros((S, net.m))
    which = np.full(S, -1, dtype=int)
    X[0] = Xh[0] = sc.x0
    Y[0] = net.discrete.C @ sc.x0
    plans: list[PlanResult] = []
    current: PlanResult | None = None
    degraded = False
    for k in range(S):
        if k < cfg.T_max and k % cfg.T == 0:
            if k == 0 and sc._first_plan is not None:
                plan = sc._first_plan
            else:
                try:
                    plan = plan_cycle(sc, k, Xh[k], Xh[:k + 1])
                except (EncodingError, FormulaError) as exc:
                    log.error("planning failed at step %d: %s", k, exc)
                    plan = PlanResult(k, "Error", None, None, None, sc.beta_hat, None, 3,
                                      None, None, str(exc), 0)
                if k == 0:
                    sc._first_plan = plan
            plan = _detach(plan)
            plans.append(plan)
            if plan.ok:
                current = plan
            if not plan.ok or plan.fallback:
                degraded = True
        zeta = np.zeros(net.m)
        if current is not None and k - current.ell < current.zeta.shape[0]:
            zeta = current.zeta[k - current.ell]
            which[k] = len(plans) - 1 if current is plans[-1] else plans.index(current)
        Z[k] = zeta
        U[k] = sc.K @ X[k] + zeta
        nxt = np.empty(net.n)
        for i, (d, g) in enumerate(zip(net.agents, proc)):
            sl = net.state_slice(i)
            nxt[sl] = d.A @ X[k, sl] + d.B @ zeta[net.input_slice(i)] + d.noise_factor @ g.standard_normal(d.n)
        X[k + 1] = nxt
        for i, (hub, mech, g) in enumerate(zip(hubs, sc.mechanisms, priv)):
            y = hub.model.C @ X[k + 1, net.state_slice(i)]
            y_priv = privatize(y, mech, g)
            Y[k + 1, net.output_slice(i)] = y_priv
            hub.predict(zeta[net.input_slice(i)])
            Xh[k + 1, net.state_slice(i)] = hub.update(y_priv)
    rho = robustness(sc.phi, X, 0)
    return RunTrace(seed, cfg.dt, X, Xh, Y, U, Z, which, plans, rho, rho >= 0.0, degraded,
                    cfg.T_max, list(net.state_offsets), list(net.input_offsets),
                    list(net.output_offsets), [a.name for a in cfg.agents])


def _detach(plan: PlanResult) -> PlanResult:
    # traces keep statistics, not whole models
    if plan.model is None:
        return plan
    from dataclasses import replace
    return replace(plan, model=None)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloResult:
    runs: int
    seeds: list[int]
    satisfied: list[bool]
    robustness: list[float]
    certified: list[bool]
    rate: float
    ci_low: float
    ci_high: float
    confidence: float

    def to_dict(self) -> dict:
        hist_counts, hist_edges = robustness_histogram(self.robustness)
        return {"runs": self.runs, "rate": self.rate, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "confidence": self.confidence,
                "satisfied_count": int(sum(self.satisfied)),
                "certified_count": int(sum(self.certified)),
                "seeds": self.seeds,
                "histogram": {"counts": hist_counts, "edges": hist_edges}}


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / n
    den = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def robustness_histogram(values: Sequence[float], bins: int = 20):
    finite = np.array([v for v in values if math.isfinite(v)], dtype=float)
    if finite.size == 0:
        return [], []
    counts, edges = np.histogram(finite, bins=bins)
    return counts.tolist(), edges.tolist()


_WORKER_SCENARIO: Scenario | None = None


def _init_worker(cfg: ScenarioConfig, first: "PlanResult | None" = None):
    global _WORKER_SCENARIO
    _WORKER_SCENARIO = compile_scenario(cfg)
    # the step-0 plan only depends on the known start, so it is solved once
    # by the parent and shared
    _WORKER_SCENARIO._first_plan = first


def _episode_outcome(seed: int) -> tuple[int, bool, float, bool]:
    tr = run_episode(_WORKER_SCENARIO, seed)
    return seed, tr.satisfied, tr.robustness, tr.all_plans_certified()


def monte_carlo(cfg: ScenarioConfig, runs: int, seed: int | None = None, threads: int = 1,
                confidence: float = 0.95) -> MonteCarloResult:
    """Satisfaction statistics of the true trajectory over ``runs`` episodes.

    Episode ``i`` uses master seed ``seed + i``, so the result depends only on
    the seed set and never on how episodes are spread over processes.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    base = cfg.seed if seed is None else seed
    seeds = [base + i for i in range(runs)]
    sc = compile_scenario(cfg)
    first = _detach(plan_cycle(sc, 0, sc.x0, sc.x0[None, :]))
    if threads <= 1:
        _init_worker(cfg, first)
        outcomes = [_episode_outcome(s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                 initargs=(cfg, first)) as pool:
            outcomes = list(pool.map(_episode_outcome, seeds, chunksize=max(1, runs // (4 * threads))))
    outcomes.sort(key=lambda t: t[0])
    sat = [o[1] for o in outcomes]
    rob = [o[2] for o in outcomes]
    cert = [o[3] for o in outcomes]
    k = sum(sat)
    lo, hi = wilson_interval(k, runs, confidence)
    return MonteCarloResult(runs, seeds, sat, rob, cert, k / runs, lo, hi, confidence)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    passed: bool
    lines: list[str]
    warnings: list[str]

    def text(self) -> str:
        out = list(self.lines)
        out += [f"warning: {w}" for w in self.warnings]
        out.append("result: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(out)


def validate_problem(cfg: ScenarioConfig) -> ValidationReport:
    lines, warnings, ok = [], [], True
    prod = cfg.gamma * cfg.eta
    if prod >= cfg.chi:
        lines.append(f"gamma*eta = {prod:.6g} >= chi = {cfg.chi:.6g}: ok")
    else:
        ok = False
        lines.append(f"gamma*eta = {prod:.6g} < chi = {cfg.chi:.6g}: FAIL")
    try:
        check_config(cfg)
        phi = cfg.parsed_formula()
    except (ConfigError, FormulaError, KeyError) as exc:
        lines.append(f"configuration: FAIL ({exc})")
        return ValidationReport(False, lines, warnings)
    h = horizon(phi)
    lines.append(f"formula horizon = {h} steps, T_max = {cfg.T_max}")
    if h > cfg.T_max:
        warnings.append(f"formula horizon {h} exceeds T_max = {cfg.T_max}; obligations after "
                        f"T_max are planned with the full lookahead and the last plan's inputs "
                        f"are applied until step {h}")
    try:
        sc = compile_scenario(cfg)
    except (ConfigError, CertificateError, FormulaError, ValueError) as exc:
        lines.append(f"scenario: FAIL ({exc})")
        return ValidationReport(False, lines, warnings)
    for ag, K in zip(cfg.agents, sc.gains):
        sys = ag.continuous()
        a = spectral_abscissa(sys.A + sys.B @ K)
        status = "ok" if a < 0 else "FAIL"
        ok &= a < 0
        lines.append(f"agent {ag.name}: closed-loop spectral abscissa {a:.6g}: {status}")
    for ag, mech in zip(cfg.agents, sc.mechanisms):
        lines.append(f"agent {ag.name}: privacy noise sigma = {mech.sigma:.10g}")
    rep = verify_certificate(sc.certificate)
    ok &= rep.passed
    lines += rep.lines()
    lines.append(f"beta = {sc.beta:.6g}, beta_hat = {sc.beta_hat:.6g}, big-M = {sc.big_m:.6g}")
    return ValidationReport(bool(ok), lines, warnings)
