"""Adjoint gradients, Adam, and the training loop."""

import numpy as np
import pytest

from roughcontrol.dynamics import (batch_expected_cost, execution_problem,
                                   tracking_problem)
from roughcontrol.errors import SimulationError
from roughcontrol.optim import (TEST_INDEX_OFFSET, AdamState, adam_step,
                                grad_batch_cost, make_streams, train)
from roughcontrol.policy import init_policy


def _problem(kind):
    return tracking_problem() if kind == "tracking" else execution_problem()


def _fd_gradient(problem, stream, policy, h):
    base = policy.get_params()
    grad = np.empty_like(base)
    for i in range(len(base)):
        for sign in (+1, -1):
            params = base.copy()
            params[i] += sign * h
            policy.set_params(params)
            cost, _ = batch_expected_cost(problem, stream, policy)
            if sign > 0:
                up = cost
            else:
                down = cost
        grad[i] = (up - down) / (2.0 * h)
    policy.set_params(base)
    return grad


@pytest.mark.parametrize("problem_kind", ["tracking", "execution"])
@pytest.mark.parametrize("policy_kind", ["linear", "deep"])
def test_gradient_matches_finite_differences(problem_kind, policy_kind):
    problem = _problem(problem_kind)
    stream, _ = make_streams(problem, 0.5, 2, 0.05, 1, 64, 0, seed=2)
    if policy_kind == "linear":
        policy = init_policy("linear", 2, 2)
        rng = np.random.default_rng(0)
        policy.coeffs[0] = rng.standard_normal(policy.coeffs.shape[1]) * 0.3
        h = 1e-5
    else:
        # seeds chosen so every ReLU preactivation on the batch is bounded
        # away from its kink; central differences are only valid there
        seed = 5 if problem_kind == "tracking" else 0
        policy = init_policy("deep", 2, 2, seed=seed, hidden=6, depth=2)
        rng = np.random.default_rng(200 + seed)
        policy.set_params(policy.get_params()
                          + rng.standard_normal(policy.n_params) * 0.1 + 0.05)
        h = 1e-6
    _, grad = grad_batch_cost(problem, stream, policy)
    fd = _fd_gradient(problem, stream, policy, h)
    scale = np.maximum(np.abs(fd), 1e-6)
    assert np.max(np.abs(grad - fd) / scale) < 1e-3


def test_gradient_zero_for_unused_coordinate():
    # driver-word coefficients beyond the empty word are exercised, but a
    # coordinate paired with an identically-zero signature entry is inert;
    # freeze the driver to make all driver words vanish
    problem = execution_problem(sigma=0.0)
    stream, _ = make_streams(problem, 0.5, 2, 0.05, 1, 16, 0, seed=0)
    policy = init_policy("linear", 2, 2)
    _, grad = grad_batch_cost(problem, stream, policy)
    grad = grad.reshape(policy.coeffs.shape)
    # words containing the driver letter have zero signature coordinates
    from roughcontrol.words import index_to_word
    for i in range(grad.shape[1]):
        word = index_to_word(i, 2, 2)
        if 1 in word:
            assert grad[0, i] == pytest.approx(0.0, abs=1e-12)


def test_adam_step_bias_correction():
    state = AdamState(2, lr=0.1)
    params = np.zeros(2)
    grad = np.array([1.0, -2.0])
    new = adam_step(state, params, grad)
    # first step moves by lr in the gradient sign direction
    np.testing.assert_allclose(new, [-0.1, 0.1], atol=1e-6)
    assert state.step == 1


def test_train_zero_lr_keeps_policy():
    problem = tracking_problem()
    tr, te = make_streams(problem, 0.5, 2, 0.05, 1, 64, 64, seed=1)
    policy = init_policy("linear", 2, 2)
    before, _ = batch_expected_cost(problem, te, policy)
    curve, (after, _) = train(problem, policy, tr, te, n_steps=10,
                              batch_size=32, lr=0.0, seed=0)
    assert after == pytest.approx(before, abs=1e-14)
    assert np.all(policy.get_params() == 0.0)


def test_train_reproducible_under_seed():
    problem = tracking_problem()
    tr, te = make_streams(problem, 0.5, 2, 0.05, 1, 128, 64, seed=1)
    results = []
    for _ in range(2):
        policy = init_policy("linear", 2, 2)
        curve, (mean, _) = train(problem, policy, tr, te, n_steps=25,
                                 batch_size=64, seed=9)
        results.append((policy.get_params(), mean, curve))
    np.testing.assert_array_equal(results[0][0], results[1][0])
    assert results[0][1] == results[1][1]
    assert results[0][2] == results[1][2]


def test_training_reduces_tracking_cost():
    problem = tracking_problem()
    tr, te = make_streams(problem, 0.5, 2, 2e-2, 1, 1024, 1024, seed=3)
    policy = init_policy("linear", 2, 2)
    initial, _ = batch_expected_cost(problem, te, policy)
    train(problem, policy, tr, te, n_steps=300, batch_size=256, seed=0)
    final, se = batch_expected_cost(problem, te, policy)
    assert final < initial - 5.0 * se


def test_divergence_detection():
    problem = tracking_problem()
    tr, te = make_streams(problem, 0.5, 2, 0.05, 1, 64, 0, seed=1)
    policy = init_policy("linear", 2, 2)
    with pytest.raises(SimulationError):
        train(problem, policy, tr, None, n_steps=200, batch_size=64,
              lr=1e12, seed=0)


def test_train_and_test_paths_disjoint():
    problem = tracking_problem()
    tr, te = make_streams(problem, 0.5, 1, 0.25, 1, 8, 8, seed=0)
    assert TEST_INDEX_OFFSET >= 1 << 20
    # driver level-1 coordinates differ between the two pools
    a = tr.sigs[:, -1, 2]
    b = te.sigs[:, -1, 2]
    assert np.min(np.abs(a[:, None] - b[None, :])) > 0.0
