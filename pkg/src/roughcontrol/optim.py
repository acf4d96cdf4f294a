"""Training of signature policies by adjoint gradients and Adam.

The forward scheme is an explicit composition, so the exact reverse-mode
gradient of the Monte Carlo cost is a short backward recursion in the state
adjoint; no implicit-function machinery is needed.  Finite differences are
kept in the test suite as an oracle only.
"""

import numpy as np

from .dynamics import (batch_expected_cost, driver_increments_from_stream,
                       simulate)
from .errors import SimulationError
from .noise import FbmSampler, scale_shift
from .signature import SignatureStream, stream_signatures

#: path-index offset separating test paths from training paths
TEST_INDEX_OFFSET = 1 << 20


def policy_features(stream, policy):
    """Per-grid-point policy features, shape (M, n+1, F)."""
    m, npts, p = stream.sigs.shape
    feat = policy.features(stream.sigs.reshape(m * npts, p))
    return feat.reshape(m, npts, -1)


def grad_batch_cost(problem, stream, policy, features=None):
    """Mean cost over the batch and its gradient in the policy parameters.

    The state adjoint lam_j = d cost / d Y_j runs backward through the
    explicit scheme; the control adjoints mu_j are then pushed through the
    policy's parameter Jacobian in one batched call.
    """
    m, npts, p = stream.sigs.shape
    n = npts - 1
    if features is None:
        features = policy_features(stream, policy)
    nf = features.shape[-1]
    controls_flat, cache = policy.forward(features.reshape(m * npts, nf))
    controls = controls_flat.reshape(m, npts, -1)
    traj = simulate(problem, stream, policy, controls=controls)
    grid = stream.grid
    dt = np.diff(grid)
    y = traj.y
    k = problem.n_controls
    mu = np.zeros((m, npts, k))
    # lam_n = g_y + f_y(t_n) dt_n;  mu_n = f_u(t_n) dt_n
    lam = problem.g_y(y[:, n]) + problem.f_y(grid[n], y[:, n], controls[:, n]) * dt[n - 1]
    mu[:, n] = problem.f_u(grid[n], y[:, n], controls[:, n]) * dt[n - 1]
    for j in range(n - 1, -1, -1):
        by = problem.b_y(y[:, j], controls[:, j])
        bu = problem.b_u(y[:, j], controls[:, j])
        mu[:, j] = np.einsum("mi,mik->mk", lam, bu) * dt[j]
        lam = lam + np.einsum("mi,mij->mj", lam, by) * dt[j]
        if j >= 1:
            mu[:, j] += problem.f_u(grid[j], y[:, j], controls[:, j]) * dt[j - 1]
            lam = lam + problem.f_y(grid[j], y[:, j], controls[:, j]) * dt[j - 1]
    grad = policy.grad_params(cache, mu.reshape(m * npts, k)) / m
    mean_cost = float(np.mean(traj.cost))
    if not np.all(np.isfinite(grad)):
        bad = int(np.argwhere(~np.isfinite(grad))[0][0])
        raise SimulationError(f"non-finite gradient in parameter {bad}")
    return mean_cost, grad


class AdamState:
    """First/second moment accumulators for the Adam update."""

    def __init__(self, n_params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)


def adam_step(state, params, grad):
    """One Adam update with bias correction; returns the new parameters."""
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    mhat = state.m / (1.0 - state.beta1 ** state.step)
    vhat = state.v / (1.0 - state.beta2 ** state.step)
    return params - state.lr * mhat / (np.sqrt(vhat) + state.eps)


def make_streams(problem, hurst, level, dt, refinement, n_train, n_test,
                 seed=0, first_train_index=0):
    """Sample driver pools and build train/test signature streams.

    Test paths use indices offset by TEST_INDEX_OFFSET so the two pools are
    disjoint for any pool sizes below the offset.
    """
    horizon = problem.horizon
    n = int(round(horizon / dt))
    coarse = np.linspace(0.0, horizon, n + 1)
    fine = np.linspace(0.0, horizon, n * refinement + 1)
    sampler = FbmSampler(fine[1:], hurst, seed=seed)
    streams = []
    for count, first in ((n_train, first_train_index),
                         (n_test, TEST_INDEX_OFFSET)):
        if count == 0:
            streams.append(None)
            continue
        xi = sampler.sample_paths_with_origin(count, first)
        if problem.kind == "execution":
            driver = scale_shift(xi, problem.params["sigma"],
                                 problem.params["x0"])
        else:
            driver = xi
        streams.append(stream_signatures(fine, driver, coarse, level))
    return streams[0], streams[1]


def train(problem, policy, train_stream, test_stream, n_steps=2000,
          batch_size=1024, lr=None, seed=0, betas=(0.9, 0.999), eps=1e-8,
          test_every=0, callback=None):
    """Minibatch Adam on a fixed pool of training paths.

    Minibatches cycle through seeded random permutations of the pool, so a
    run is bit-reproducible under a fixed seed.  Returns the training-cost
    curve as a list of (iteration, minibatch cost, test cost or nan) and the
    final (test mean, test SE).
    """
    if lr is None:
        lr = 1e-2 if policy.kind == "linear" else 1e-3
    features = policy_features(train_stream, policy)
    m_pool = train_stream.n_paths
    batch_size = min(batch_size, m_pool)
    rng = np.random.default_rng(seed)
    order = rng.permutation(m_pool)
    pos = 0
    params = policy.get_params()
    state = AdamState(len(params), lr=lr, beta1=betas[0], beta2=betas[1],
                      eps=eps)
    curve = []
    ref_scale = None
    for it in range(n_steps):
        if pos + batch_size > m_pool:
            order = rng.permutation(m_pool)
            pos = 0
        idx = order[pos:pos + batch_size]
        pos += batch_size
        sub = SignatureStream(train_stream.grid, train_stream.sigs[idx],
                              train_stream.level)
        cost, grad = grad_batch_cost(problem, sub, policy,
                                     features=features[idx])
        if ref_scale is None:
            ref_scale = abs(cost) + 1.0
        if not np.isfinite(cost) or abs(cost) > 1e6 * ref_scale:
            raise SimulationError(
                f"training diverged at iteration {it}: cost {cost:g}")
        params = adam_step(state, params, grad)
        policy.set_params(params)
        test_cost = np.nan
        if test_every and (it + 1) % test_every == 0 and test_stream is not None:
            test_cost = batch_expected_cost(problem, test_stream, policy)[0]
        curve.append((it, cost, test_cost))
        if callback is not None:
            callback(it, cost, policy)
    if test_stream is not None:
        test_mean, test_se = batch_expected_cost(problem, test_stream, policy)
    else:
        test_mean, test_se = float("nan"), float("nan")
    return curve, (test_mean, test_se)


def save_curve(curve, path):
    """Training-curve CSV: iteration, minibatch cost, test cost (nan if unset)."""
    arr = np.asarray(curve, dtype=np.float64)
    np.savetxt(path, arr, delimiter=",",
               header="iteration,train_cost,test_cost", comments="")
