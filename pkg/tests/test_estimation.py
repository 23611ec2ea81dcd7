import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtlsynth.dynamics import DiscreteLTI
from mtlsynth.estimation import (EstimationError, HubFilter, beta_for_gamma, dare_residual,
                                 markov_bound, mse_bounds, posterior_cov, solve_dare)


def lti(A, B, C, W):
    A = np.atleast_2d(np.asarray(A, float))
    return DiscreteLTI(A, np.atleast_2d(np.asarray(B, float)), np.atleast_2d(np.asarray(C, float)),
                       np.atleast_2d(np.asarray(W, float)), 1.0)


def test_dare_zero_dynamics():
    assert solve_dare([[0.0]], [[1.0]], [[0.7]], [[3.0]])[0, 0] == pytest.approx(0.7)


def test_dare_scalar_closed_form():
    # s = s - s^2/(s+1) + 1  =>  s^2 - s - 1 = 0
    root = (1 + math.sqrt(5)) / 2
    assert solve_dare([[1.0]], [[1.0]], [[1.0]], [[1.0]])[0, 0] == pytest.approx(root, abs=1e-9)


def test_dare_grows_with_noise():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    C = np.array([[1.0, 0.0]])
    W = 0.01 * np.eye(2)
    traces = [np.trace(solve_dare(A, C, W, [[v]])) for v in (0.1, 0.5, 1.0, 4.0)]
    assert np.all(np.diff(traces) > 0)


def _random_detectable(rng, n, q):
    A = rng.normal(size=(n, n))
    A *= 0.95 / max(1e-9, np.max(np.abs(np.linalg.eigvals(A))))
    C = rng.normal(size=(q, n))
    G = rng.normal(size=(n, n))
    W = G @ G.T * 0.1 + 1e-3 * np.eye(n)
    V = np.eye(q) * rng.uniform(0.1, 2.0)
    return A, C, W, V


@given(st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_dare_residual_and_ordering(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    A, C, W, V = _random_detectable(rng, n, int(rng.integers(1, n + 1)))
    S = solve_dare(A, C, W, V)
    assert dare_residual(S, A, C, W, V) <= 1e-9
    Sb = posterior_cov(S, C, V)
    assert np.min(np.linalg.eigvalsh(S)) >= -1e-9
    assert np.min(np.linalg.eigvalsh(Sb)) >= -1e-9
    assert np.min(np.linalg.eigvalsh(S - Sb)) >= -1e-9


def test_posterior_examples():
    S = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert np.allclose(posterior_cov(S, np.zeros((1, 2)), [[1.0]]), S)
    assert posterior_cov([[2.0]], [[1.0]], [[2.0]])[0, 0] == pytest.approx(1.0)
    tiny = posterior_cov(S, np.eye(2), 1e-10 * np.eye(2))
    assert np.max(np.abs(tiny)) < 1e-9


def test_filter_predict():
    f = HubFilter(lti(np.eye(2), np.eye(2), np.eye(2), np.eye(2)), np.eye(2), np.zeros(2))
    assert np.array_equal(f.predict(np.array([1.0, 0.0])), [1.0, 0.0])
    g = HubFilter(lti([[1.0, 2.0], [0.0, 1.0]], [[0.0], [1.0]], np.eye(2), np.eye(2)),
                  np.eye(2), np.array([1.0, -1.0]))
    # hand: [1 + 2*(-1), -1] + [0, 3]
    assert np.allclose(g.predict(np.array([3.0])), [-1.0, 2.0])
    with pytest.raises(EstimationError):
        g.predict(np.zeros(2))


def test_filter_update_scalar_worked_case():
    # A=1, W=1, V=2: a priori fixed point s = 2, posterior 1, gain 1/2
    f = HubFilter(lti([[1.0]], [[1.0]], [[1.0]], [[1.0]]), [[2.0]], np.zeros(1))
    assert f.Sigma[0, 0] == pytest.approx(2.0, abs=1e-9)
    assert f.Sigma_bar[0, 0] == pytest.approx(1.0, abs=1e-9)
    assert f.gain[0, 0] == pytest.approx(0.5, abs=1e-9)
    f.predict(np.zeros(1))
    assert f.update(np.array([4.0]))[0] == pytest.approx(2.0, abs=1e-8)


def test_filter_update_trivial_cases():
    f = HubFilter(lti(np.eye(2), np.eye(2), np.eye(2), np.eye(2)), np.eye(2), np.array([1.0, 2.0]))
    prior = f.predict(np.zeros(2)).copy()
    assert np.allclose(f.update(prior), prior)
    g = HubFilter(lti(0.5 * np.eye(2), np.eye(2), np.zeros((1, 2)), np.eye(2)), [[1.0]],
                  np.array([1.0, 2.0]))
    prior = g.predict(np.zeros(2)).copy()
    assert np.allclose(g.update(np.array([9.0])), prior)
    with pytest.raises(EstimationError):
        g.update(np.zeros(2))


def test_mse_bounds_examples():
    b = mse_bounds(np.eye(3), 0.2, 0.5)
    assert (b.lower, b.upper) == (0.2, 0.5)
    b = mse_bounds(np.diag([1.0, 3.0]), 2.0, 2.0)
    assert b.lower <= np.trace(np.diag([1.0, 3.0]) @ np.eye(2)) <= b.upper
    assert (b.lower, b.upper) == (2.0, 6.0)
    b = mse_bounds(np.zeros((2, 2)), 1.0, 2.0)
    assert (b.lower, b.upper) == (0.0, 0.0)
    with pytest.raises(EstimationError):
        mse_bounds(np.diag([1.0, -1.0]), 1.0, 2.0)


def test_markov_and_beta():
    M, Sb = np.eye(2), 0.5 * np.eye(2)
    assert markov_bound(M, Sb, 1.0) == 1.0
    assert markov_bound(M, Sb, 1e300) == pytest.approx(0.0)
    assert markov_bound(M, Sb, 10.0) == pytest.approx(0.1)
    assert beta_for_gamma(np.eye(1), [[1.0]], 0.5) == pytest.approx(2.0)
    assert beta_for_gamma(np.eye(1), [[0.1]], 0.95) == pytest.approx(2.0)
    for g in (0.5, 0.9, 0.95):
        assert markov_bound(M, Sb, beta_for_gamma(M, Sb, g)) == pytest.approx(1 - g, abs=1e-15)
    with pytest.raises(EstimationError):
        markov_bound(M, Sb, 0.0)
