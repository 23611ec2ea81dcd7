import dataclasses
import math

import numpy as np
import pytest
from scipy.stats import norm

from helpers import small_config_doc
from mtlsynth.bisimulation import beta_hat as beta_hat_fn
from mtlsynth.estimation import beta_for_gamma
from mtlsynth.io import bundled_scenario_path, config_from_dict, load_config
from mtlsynth.logic import FALSE, horizon, rewrite, robustness
from mtlsynth.synthesis import (ConfigError, compile_scenario, monte_carlo, plan_cycle,
                                run_episode, validate_problem, wilson_interval)


def cfg_of(**over):
    return config_from_dict(small_config_doc(**over))


def quiet(**over):
    """No privacy noise and no diffusion: every trajectory is the nominal one."""
    doc = small_config_doc(**over)
    doc["agents"][0]["model"]["b"] = 0.0
    doc["noise"] = {"privacy": False, "process": False}
    return config_from_dict(doc)


@pytest.fixture(scope="module")
def scenario_cfg():
    return load_config(bundled_scenario_path())


def test_compile_numbers_consistent():
    sc = compile_scenario(cfg_of())
    tr = float(np.trace(sc.certificate.M @ sc.Sigma_bar))
    assert sc.beta == pytest.approx(tr / (1 - 0.95))
    assert sc.beta == pytest.approx(beta_for_gamma(sc.certificate.M, sc.Sigma_bar, 0.95))
    assert sc.beta_hat == pytest.approx(beta_hat_fn(sc.beta, sc.certificate, 3.0, 0.95))
    assert sc.beta_target == pytest.approx(sc.beta_hat + 1e-6)


def test_config_errors():
    with pytest.raises(ConfigError):
        compile_scenario(cfg_of(timing={"T": 0, "T_max": 6}))
    with pytest.raises(ConfigError):
        compile_scenario(dataclasses.replace(cfg_of(), u_min=5.0, u_max=-5.0))


def test_quiet_collapse_to_nominal():
    sc = compile_scenario(quiet())
    assert sc.beta == 0.0 and sc.beta_hat == 0.0
    tr = run_episode(sc, 1)
    assert np.array_equal(tr.states, tr.estimates)
    first = tr.plans[0]
    assert np.allclose(first.nominal[:4], tr.states[:4], atol=1e-9)
    assert tr.robustness >= first.beta_hat
    assert tr.satisfied


def test_trivially_satisfied_needs_no_input():
    sc = compile_scenario(quiet(formula="G[0,6] home"))
    plan = plan_cycle(sc, 0, sc.x0, sc.x0[None])
    assert plan.status == "Optimal" and plan.objective == pytest.approx(0.0, abs=1e-6)
    assert np.allclose(plan.u, 0.0, atol=1e-9)


def test_beta_hat_monotone_in_gamma():
    vals = [compile_scenario(cfg_of(probability={"gamma": g, "eta": 0.95, "chi": 0.5})).beta_hat
            for g in (0.6, 0.8, 0.9, 0.95, 0.99)]
    assert np.all(np.diff(vals) > 0)


def test_rewritten_lookahead_shrinks(scenario_cfg):
    phi = scenario_cfg.parsed_formula()
    prefix = np.zeros((21, 8))
    prefix[:, 4] = 100.0
    remaining = [horizon(rewrite(phi, prefix[:ell + 1], ell) if ell else phi) - ell
                 for ell in (0, 10, 20)]
    assert remaining == sorted(remaining, reverse=True) and remaining[0] > remaining[-1]


def test_plan_meets_margin():
    sc = compile_scenario(cfg_of())
    plan = plan_cycle(sc, 0, sc.x0, sc.x0[None])
    assert plan.certified
    assert robustness(sc.phi, np.vstack([plan.nominal]), 0) >= sc.beta_hat
    assert np.all(np.abs(plan.u) <= 20 + 1e-7)


def test_fallback_halves_margin():
    sc = compile_scenario(cfg_of())
    half = 0.75 * sc.beta_hat
    doc = small_config_doc()
    doc["predicates"]["goal"] = {"type": "box", "indices": [0, 1],
                                 "lo": [10 - half, -2.0], "hi": [10 + half, 2.0]}
    sc = compile_scenario(config_from_dict(doc))
    plan = plan_cycle(sc, 0, sc.x0, sc.x0[None])
    assert plan.status == "Optimal" and plan.fallback == 1 and not plan.certified
    assert plan.beta_used == pytest.approx(sc.beta_target / 2)


def test_unsatisfiable_formula_fallback():
    sc = compile_scenario(cfg_of())
    plan = plan_cycle(sc, 0, sc.x0, sc.x0[None], phi=FALSE)
    assert plan.fallback == 3 and not plan.ok


def test_episode_determinism_and_shapes():
    sc = compile_scenario(cfg_of())
    a, b = run_episode(sc, 11), run_episode(compile_scenario(cfg_of()), 11)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.outputs, b.outputs)
    assert a.states.shape == (7, 4) and a.inputs.shape == (6, 2)
    assert len(a.plans) == 2 and [p.ell for p in a.plans] == [0, 3]
    c = run_episode(sc, 12)
    assert not np.array_equal(a.outputs, c.outputs)


def test_applied_input_is_feedback_plus_free():
    sc = compile_scenario(cfg_of())
    tr = run_episode(sc, 4)
    for k in range(tr.steps):
        assert np.allclose(tr.inputs[k], sc.K @ tr.states[k] + tr.zeta[k])


def test_monte_carlo_deterministic_config():
    res = monte_carlo(quiet(), 5)
    assert res.rate == 1.0 and all(res.certified)


def test_monte_carlo_seed_set_determinism():
    cfg = cfg_of()
    a = monte_carlo(cfg, 6, seed=100)
    b = monte_carlo(cfg, 6, seed=100, threads=2)
    assert a.satisfied == b.satisfied and a.robustness == b.robustness
    assert a.seeds == list(range(100, 106))
    with pytest.raises(ValueError):
        monte_carlo(cfg, 0)


def test_wilson_interval_closed_form():
    k, n = 470, 500
    z = norm.ppf(0.975)
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    lo, hi = wilson_interval(k, n)
    assert (lo, hi) == pytest.approx((centre - half, centre + half), abs=1e-12)
    lo, hi = wilson_interval(n, n)
    assert hi == pytest.approx(1.0) and lo < 1.0


def test_validate_examples(scenario_cfg):
    rep = validate_problem(scenario_cfg)
    assert rep.passed
    assert any("horizon 30 exceeds T_max = 20" in w for w in rep.warnings)
    bad = dataclasses.replace(scenario_cfg, gamma=0.9, eta=0.9)
    assert not validate_problem(bad).passed
    missing = dataclasses.replace(scenario_cfg, formula="F[0,3] nowhere")
    rep = validate_problem(missing)
    assert not rep.passed and "nowhere" in rep.text()


def test_inputs_come_from_latest_plan():
    sc = compile_scenario(cfg_of())
    tr = run_episode(sc, 9)
    T = sc.config.T
    for k in range(tr.steps):
        j = min(k // T, len(tr.plans) - 1)
        assert tr.plan_index[k] == j
        plan = tr.plans[j]
        assert np.array_equal(tr.zeta[k], plan.zeta[k - plan.ell])


def test_trace_self_consistency():
    sc = compile_scenario(cfg_of())
    tr = run_episode(sc, 5)
    assert robustness(sc.phi, tr.states, 0) == tr.robustness
    assert tr.satisfied == (tr.robustness >= 0)
    assert tr.states.shape[0] == sc.final_step + 1
