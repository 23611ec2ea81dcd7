"""MTL synthesis for privatized multi-agent stochastic systems."""

from .bisimulation import (BisimCertificate, CertificateError, beta_hat, compute_certificate,
                           deviation_bound, stabilize, verify_certificate)
from .dynamics import (ContinuousLTI, DiscreteLTI, NetworkModel, aggregate, build_unicycle_agent,
                       discretize, step_nominal, step_stochastic)
from .estimation import HubFilter, beta_for_gamma, markov_bound, mse_bounds, solve_dare
from .logic import (Always, And, Atom, BoxRegion, Eventually, Formula, Not, Or,
                    PairwiseSeparation, Until, boolean_sat, horizon, parse_formula, rewrite,
                    robustness)
from .privacy import GaussianMechanism, PrivacyParams, gaussian_sigma, privatize, q_function, q_inverse
from .synthesis import (RunTrace, Scenario, ScenarioConfig, compile_scenario, monte_carlo,
                        plan_cycle, run_episode, validate_problem)

__version__ = "0.1.0"

__all__ = [
    "Always", "And", "Atom", "BisimCertificate", "BoxRegion", "CertificateError",
    "ContinuousLTI", "DiscreteLTI", "Eventually", "Formula", "GaussianMechanism", "HubFilter",
    "NetworkModel", "Not", "Or", "PairwiseSeparation", "PrivacyParams", "RunTrace", "Scenario",
    "ScenarioConfig", "Until", "aggregate", "beta_for_gamma", "beta_hat", "boolean_sat",
    "build_unicycle_agent", "compile_scenario", "compute_certificate", "deviation_bound",
    "discretize", "gaussian_sigma", "horizon", "markov_bound", "monte_carlo", "mse_bounds",
    "parse_formula", "plan_cycle", "privatize", "q_function", "q_inverse", "rewrite",
    "robustness", "run_episode", "solve_dare", "stabilize", "step_nominal", "step_stochastic",
    "validate_problem", "verify_certificate",
]
