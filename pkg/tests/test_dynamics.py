import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtlsynth.dynamics import (ContinuousLTI, DiscreteLTI, DynamicsError, UnicycleState, aggregate,
                               build_unicycle_agent, discretize, recover_wheel_commands,
                               simulate_linearized_unicycle,
                               simulate_unicycle_kinematics, step_nominal, step_stochastic,
                               unicycle_to_linear)


def test_zero_generator():
    B = np.array([[1.0], [2.0]])
    U = np.array([[0.5, 0.0], [0.1, 0.3]])
    d = discretize(ContinuousLTI(np.zeros((2, 2)), B, U), 0.3)
    assert np.allclose(d.A, np.eye(2))
    assert np.allclose(d.B, 0.3 * B)
    assert np.allclose(d.W, 0.3 * U @ U.T)


def test_double_integrator_closed_form():
    d = discretize(ContinuousLTI([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], np.zeros((2, 1))), 1.0)
    assert np.allclose(d.A, [[1, 1], [0, 1]], atol=1e-14)
    assert np.allclose(d.B, [[0.5], [1.0]], atol=1e-14)


def test_unicycle_discretization_closed_form():
    b, dt = 0.01, 1.0
    ag = build_unicycle_agent(b)
    assert not np.any(ag.A @ ag.A)  # nilpotent of index two
    d = discretize(ag, dt)
    Ad = np.eye(4) + ag.A * dt
    Bd = ag.B * dt + ag.A @ ag.B * dt ** 2 / 2
    # noise integral of a double integrator: b^2 [[t^3/3, t^2/2], [t^2/2, t]] per axis
    Wax = b ** 2 * np.array([[dt ** 3 / 3, dt ** 2 / 2], [dt ** 2 / 2, dt]])
    W = np.zeros((4, 4))
    for ax in range(2):
        idx = [ax, ax + 2]
        W[np.ix_(idx, idx)] = Wax
    assert np.allclose(d.A, Ad, atol=1e-14)
    assert np.allclose(d.B, Bd, atol=1e-14)
    assert np.allclose(d.W, W, atol=1e-16)
    assert not np.any(discretize(build_unicycle_agent(0.0), dt).W)


@given(st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_random_noise_covariance_psd(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    d = discretize(ContinuousLTI(rng.normal(size=(n, n)), rng.normal(size=(n, 1)),
                                 rng.normal(size=(n, 2))), float(rng.uniform(0.1, 2)))
    assert np.allclose(d.W, d.W.T)
    assert np.linalg.eigvalsh(d.W)[0] >= -1e-10 * max(1, np.abs(d.W).max())


def test_small_step_consistency():
    rng = np.random.default_rng(1)
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 2))
    sys = ContinuousLTI(A, B, np.zeros((3, 1)))
    errs = []
    for dt in (1e-2, 1e-3):
        d = discretize(sys, dt)
        errs.append(max(np.abs((d.A - np.eye(3)) / dt - A).max(), np.abs(d.B / dt - B).max()))
    # first-order decay: tenfold smaller step gives roughly tenfold smaller error
    assert errs[1] < errs[0] / 5


def test_invalid_models():
    with pytest.raises(DynamicsError):
        ContinuousLTI(np.eye(2), np.ones((3, 1)), np.zeros((2, 1)))
    with pytest.raises(DynamicsError):
        DiscreteLTI(np.eye(2), np.ones((2, 1)), np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(DynamicsError):
        discretize(build_unicycle_agent(), 0.0)
    with pytest.raises(DynamicsError):
        aggregate([])


def test_aggregate_single_and_pair():
    ag = build_unicycle_agent()
    one = aggregate([ag])
    d = discretize(ag, 1.0)
    assert np.array_equal(one.discrete.A, d.A) and np.array_equal(one.discrete.W, d.W)
    two = aggregate([ag, ag])
    assert two.n == 8 and two.m == 4
    for M in (two.discrete.A, two.discrete.W, two.discrete.C):
        assert not M[:4, 4:].any() and not M[4:, :4].any()
    assert two.state_offsets == [0, 4, 8]


def test_aggregate_projection_matches_solo():
    ag = build_unicycle_agent(0.3)
    net = aggregate([ag, ag])
    d = net.agents[0]
    x = np.arange(8, dtype=float)
    u = np.array([1.0, -1.0, 0.5, 2.0])
    rngs = [np.random.default_rng(10), np.random.default_rng(20)]
    solo = [np.random.default_rng(10), np.random.default_rng(20)]
    xs, ys = x.copy(), [x[:4].copy(), x[4:].copy()]
    for _ in range(20):
        xs = step_stochastic(net, xs, u, rngs)
        ys = [step_stochastic(d, ys[i], u[2 * i:2 * i + 2], solo[i]) for i in range(2)]
    assert np.array_equal(xs[:4], ys[0]) and np.array_equal(xs[4:], ys[1])


def test_nominal_and_stochastic_coincide_without_noise():
    d = discretize(build_unicycle_agent(0.0), 1.0)
    x, u = np.ones(4), np.array([0.5, -0.5])
    assert np.array_equal(step_nominal(d, x, u), step_stochastic(d, x, u, np.random.default_rng(0)))
    with pytest.raises(DynamicsError):
        step_nominal(d, np.ones(3), u)


def test_random_walk_increment_covariance():
    W = np.array([[0.5, 0.2], [0.2, 0.3]])
    d = DiscreteLTI(np.eye(2), np.zeros((2, 1)), np.eye(2), W)
    rng = np.random.default_rng(7)
    N = 100_000
    x = np.zeros(2)
    inc = np.empty((N, 2))
    for k in range(N):
        nxt = step_stochastic(d, x, np.zeros(1), rng)
        inc[k] = nxt - x
        x = nxt
    S = np.cov(inc.T)
    assert np.linalg.norm(S - W, "fro") <= 0.03 * np.linalg.norm(W, "fro")


def test_wheel_commands_rotation():
    c = recover_wheel_commands(3.0, -2.0, UnicycleState(0, 0, 0.0, 1.0))
    assert (c.v_dot, c.v_omega) == (3.0, -2.0)
    c = recover_wheel_commands(1.0, 0.0, UnicycleState(0, 0, math.pi / 2, 1.0))
    assert c.v_dot == pytest.approx(0.0, abs=1e-15)
    assert c.v_omega == pytest.approx(-1.0)
    c = recover_wheel_commands(0.0, 1.0, UnicycleState(0, 0, 0.0, 0.0))
    assert c.clamped


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-7, 7))
def test_rotation_preserves_norm(u1, u2, th):
    c = recover_wheel_commands(u1, u2, UnicycleState(0, 0, th, 1.0))
    assert math.hypot(c.v_dot, c.v_omega) == pytest.approx(math.hypot(u1, u2), abs=1e-12)


def test_kinematics_straight_and_still():
    s = simulate_unicycle_kinematics(UnicycleState(0, 0, 0, 2.0), 0.0, 0.0, 0.5)
    assert (s.rho, s.kappa) == pytest.approx((1.0, 0.0))
    s = simulate_unicycle_kinematics(UnicycleState(1, 2, 0.3, 0.0), 0.0, 0.0, 0.5)
    assert (s.rho, s.kappa) == (1.0, 2.0)


def test_kinematics_circle_returns():
    v, w = 1.5, 0.4
    s = UnicycleState(0.0, 0.0, 0.0, v)
    steps = 2000
    dt = 2 * math.pi / w / steps
    for _ in range(steps):
        s = simulate_unicycle_kinematics(s, 0.0, v * w, dt)
    assert math.hypot(s.rho, s.kappa) < 1e-6


def test_feedback_linearization_tracks_linear_model():
    ag = discretize(build_unicycle_agent(0.0), 1.0)
    s = UnicycleState(0.0, 0.0, 0.3, 2.0)
    x = unicycle_to_linear(s)
    sub = 1000
    for k in range(20):
        u = np.array([math.sin(0.3 * k), 0.5 * math.cos(0.2 * k)])
        x = step_nominal(ag, x, u)
        for _ in range(sub):
            s = simulate_linearized_unicycle(s, u[0], u[1], 1.0 / sub)
    assert abs(s.rho - x[0]) <= 1e-3 and abs(s.kappa - x[1]) <= 1e-3
