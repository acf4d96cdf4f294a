"""Forward simulation of drift-controlled dynamics over the coarse grid.

The scheme is the explicit step

    Y_j = Y_{j-1} + b(Y_{j-1}, U_{j-1}) dt_j + sigma * (driver increment)_j

with the control evaluated at the left endpoint, U_j = policy(S_j).  For the
two case studies sigma is constant, so the noise term is exact and the state
depends on the driver only through its coarse-grid increments.  The cost is
the Riemann sum over right endpoints,

    cost = sum_{j=1..n} f(t_j, Y_j, U_j) dt_j + g(Y_n),

which carries an O(dt) bias relative to the continuous-time integral; tests
account for it explicitly.
"""

import numpy as np

from . import _kernels as kernels
from .errors import SimulationError
from .tensor import total_words, word_to_index


class ProblemSpec:
    """Controlled dynamics with quadratic-cost callbacks and their derivatives.

    All callbacks are batched over a leading path axis: y has shape (M, m),
    u has shape (M, k).  sigma is a constant (m, d) matrix applied to the
    driver increments that built the signature stream.  The derivative
    callbacks (b_y, b_u, f_y, f_u, g_y) feed the reverse-mode adjoint pass.
    """

    def __init__(self, kind, horizon, y0, sigma, b, b_y, b_u,
                 f, f_y, f_u, g, g_y, n_controls=1):
        self.kind = kind
        self.horizon = float(horizon)
        self.y0 = np.atleast_1d(np.asarray(y0, dtype=np.float64))
        self.sigma = np.atleast_2d(np.asarray(sigma, dtype=np.float64))
        self.n_states = len(self.y0)
        self.n_controls = n_controls
        self.b, self.b_y, self.b_u = b, b_y, b_u
        self.f, self.f_y, self.f_u = f, f_y, f_u
        self.g, self.g_y = g, g_y


def tracking_problem(y0=0.0, kappa=0.1, horizon=1.0):
    """Track a noisy reference: dY = U dt - d(xi), cost (Y^2 + kappa U^2)/2.

    One state, one control; the driver is the raw fBM path xi.
    """
    def b(y, u):
        return u

    def b_y(y, u):
        return np.zeros(y.shape + (1,))

    def b_u(y, u):
        out = np.zeros(y.shape + (1,))
        out[..., 0, 0] = 1.0
        return out

    def f(t, y, u):
        return 0.5 * (y[..., 0] ** 2 + kappa * u[..., 0] ** 2)

    def f_y(t, y, u):
        return y.copy()

    def f_u(t, y, u):
        return kappa * u

    def g(y):
        return np.zeros(y.shape[:-1])

    def g_y(y):
        return np.zeros_like(y)

    return ProblemSpec("tracking", horizon, [y0], [[-1.0]],
                       b, b_y, b_u, f, f_y, f_u, g, g_y)


def execution_problem(q0=1.0, x0=1.0, kappa=1e-3, kappa_t=0.1,
                      sigma=0.02, horizon=1.0):
    """Optimal execution with state (W, Q, X) and selling rate U.

    dW = X U dt, dQ = -U dt, dX = sigma d(xi); running cost kappa U^2 and
    terminal cost -(W + Q X - kappa_t Q^2).  The driver handed to the
    signature stream is X itself, so the state noise matrix is unit on X.
    """
    def b(y, u):
        out = np.zeros_like(y)
        out[..., 0] = y[..., 2] * u[..., 0]
        out[..., 1] = -u[..., 0]
        return out

    def b_y(y, u):
        # out[..., i, j] = d b_i / d y_j
        out = np.zeros(y.shape + (3,))
        out[..., 0, 2] = u[..., 0]
        return out

    def b_u(y, u):
        out = np.zeros(y.shape + (1,))
        out[..., 0, 0] = y[..., 2]
        out[..., 1, 0] = -1.0
        return out

    def f(t, y, u):
        return kappa * u[..., 0] ** 2

    def f_y(t, y, u):
        return np.zeros_like(y)

    def f_u(t, y, u):
        return 2.0 * kappa * u

    def g(y):
        return -(y[..., 0] + y[..., 1] * y[..., 2] - kappa_t * y[..., 1] ** 2)

    def g_y(y):
        out = np.zeros_like(y)
        out[..., 0] = -1.0
        out[..., 1] = -y[..., 2] + 2.0 * kappa_t * y[..., 1]
        out[..., 2] = -y[..., 1]
        return out

    noise = np.array([[0.0], [0.0], [1.0]])
    spec = ProblemSpec("execution", horizon, [0.0, q0, x0], noise,
                       b, b_y, b_u, f, f_y, f_u, g, g_y)
    spec.params = {"q0": q0, "x0": x0, "kappa": kappa, "kappa_t": kappa_t,
                   "sigma": sigma}
    return spec


class Trajectory:
    """Batched simulation output: states, controls and per-path cost."""

    def __init__(self, grid, y, u, cost, fvals=None):
        self.grid = grid
        self.y = y
        self.u = u
        self.cost = cost
        self.fvals = fvals

    def to_csv(self, path, path_index=0):
        """Dump one path as rows (t, Y components, U components, running cost)."""
        n = len(self.grid)
        y = self.y[path_index]
        u = self.u[path_index]
        dt = np.diff(self.grid)
        running = np.zeros(n)
        if self.fvals is not None:
            running[1:] = np.cumsum(self.fvals[path_index, 1:] * dt)
        cols = ["t"] + [f"y{i}" for i in range(y.shape[-1])] \
            + [f"u{i}" for i in range(u.shape[-1])] + ["running_cost"]
        rows = np.column_stack([self.grid, y, u, running])
        np.savetxt(path, rows, delimiter=",", header=",".join(cols), comments="")


def driver_increments_from_stream(stream):
    """Coarse-grid driver increments recovered from level-1 signature entries."""
    d = stream.dim - 1
    idx = [word_to_index((i,), stream.dim) for i in range(1, d + 1)]
    vals = stream.sigs[:, :, idx]
    return np.diff(vals, axis=1)


def evaluate_controls(stream, policy):
    """Policy evaluated at every grid point, shape (M, n+1, k)."""
    m, npts, p = stream.sigs.shape
    flat = stream.sigs.reshape(m * npts, p)
    u = policy.evaluate(flat)
    return u.reshape(m, npts, -1)


def simulate(problem, stream, policy, controls=None):
    """Run the explicit scheme for every path in the stream.

    controls may be precomputed with evaluate_controls (reused during
    training); otherwise the policy is evaluated here.
    """
    if controls is None:
        controls = evaluate_controls(stream, policy)
    incr = driver_increments_from_stream(stream)
    grid = stream.grid
    dt = np.diff(grid)
    m_paths = stream.n_paths
    n = stream.n_steps
    y = np.empty((m_paths, n + 1, problem.n_states))
    y[:, 0] = problem.y0
    noise = incr @ problem.sigma.T
    cost = np.zeros(m_paths)
    fvals = np.zeros((m_paths, n + 1))
    for j in range(1, n + 1):
        y[:, j] = (y[:, j - 1]
                   + problem.b(y[:, j - 1], controls[:, j - 1]) * dt[j - 1]
                   + noise[:, j - 1])
        if not np.all(np.isfinite(y[:, j])):
            bad = int(np.argwhere(~np.isfinite(y[:, j]))[0][0])
            raise SimulationError(
                f"non-finite state at step {j} (path {bad})",
                path_index=bad, step=j)
        fvals[:, j] = problem.f(grid[j], y[:, j], controls[:, j])
        cost += fvals[:, j] * dt[j - 1]
    cost += problem.g(y[:, -1])
    return Trajectory(grid, y, controls, cost, fvals)


def simulate_closed_loop(problem, grid, driver_increments, policy, level):
    """Simulate with the policy fed the signature of the controlled state.

    The stream of the time-augmented state (t, Y) is built on-line: after
    each state update the augmented increment is folded in by Chen before
    the next control evaluation.  Forward evaluation only.
    """
    grid = np.asarray(grid, dtype=np.float64)
    dt = np.diff(grid)
    m_paths, n, _ = driver_increments.shape
    dim = problem.n_states + 1
    p = total_words(dim, level)
    sig = np.zeros((m_paths, p))
    sig[:, 0] = 1.0
    y = np.empty((m_paths, n + 1, problem.n_states))
    y[:, 0] = problem.y0
    u = np.empty((m_paths, n + 1, problem.n_controls))
    noise = driver_increments @ problem.sigma.T
    cost = np.zeros(m_paths)
    for j in range(1, n + 1):
        u[:, j - 1] = policy.evaluate(sig)
        y[:, j] = (y[:, j - 1]
                   + problem.b(y[:, j - 1], u[:, j - 1]) * dt[j - 1]
                   + noise[:, j - 1])
        if not np.all(np.isfinite(y[:, j])):
            bad = int(np.argwhere(~np.isfinite(y[:, j]))[0][0])
            raise SimulationError(
                f"non-finite state at step {j} (path {bad})",
                path_index=bad, step=j)
        delta = np.concatenate(
            [np.full((m_paths, 1), dt[j - 1]), y[:, j] - y[:, j - 1]], axis=1)
        sig = kernels.mul(sig, kernels.exp_increment(delta, dim, level),
                          dim, level)
        u[:, j] = policy.evaluate(sig)
        cost += problem.f(grid[j], y[:, j], u[:, j]) * dt[j - 1]
    cost += problem.g(y[:, -1])
    return Trajectory(grid, y, u, cost)


def batch_expected_cost(problem, stream, policy):
    """Monte Carlo mean and standard error of the cost over the batch."""
    traj = simulate(problem, stream, policy)
    m = len(traj.cost)
    if m == 0:
        raise ValueError("empty batch")
    mean = float(np.mean(traj.cost))
    se = float(np.std(traj.cost, ddof=1) / np.sqrt(m)) if m > 1 else 0.0
    return mean, se
