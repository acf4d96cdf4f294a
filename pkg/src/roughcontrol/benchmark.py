"""Closed-form reference values.

Tracking: the continuous-time minimal cost for tracking a fractional
Brownian motion, a sum of three terms; the two integral terms involve the
Volterra kernel z_H(t, s) whose endpoint singularities (algebraic exponents
H - 1/2 and H - 3/2) are handled by Gauss-Jacobi rules matching the exact
exponents, a logarithmic substitution for the wide smooth part, and
geometrically graded composite Gauss-Legendre panels for the outer
integrals.  Execution: the TWAP rate and value in closed form.

All quadrature sizes derive from a single (order, panels) pair so accuracy
can be certified by order-doubling.
"""

import numpy as np
from scipy.special import gamma, roots_jacobi, roots_legendre

from .errors import NumericError


def c_h(hurst):
    """Normalizing constant of the fBM Volterra representation kernel."""
    return np.sqrt(2.0 * hurst * gamma(1.5 - hurst)
                   / (gamma(hurst + 0.5) * gamma(2.0 - 2.0 * hurst)))


def tau(t, kappa, horizon):
    """Rescaled time to the horizon, (T - t)/sqrt(kappa)."""
    return (horizon - t) / np.sqrt(kappa)


def _gauss_jacobi_01(n, beta):
    """Nodes/weights for int_0^1 x^beta f(x) dx ~ sum w_i f(x_i)."""
    x, w = roots_jacobi(n, 0.0, beta)
    return (x + 1.0) / 2.0, w / 2.0 ** (beta + 1.0)


def _gauss_legendre_01(n):
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


def _inner_a_delta(s, delta, hurst, order):
    """A(s+delta, s) = int_s^(s+delta) u^(H-3/2) (u-s)^(H-1/2) du, vectorized.

    Parameterized by the offset delta = t - s so values remain accurate when
    t and s are closer than float spacing of t.  The (u-s) singularity is
    absorbed by a Gauss-Jacobi rule on [s, m] with m - s = min(s, delta);
    when delta > s the remaining smooth stretch is handled on a logarithmic
    scale (u spans many decades when s << t).
    """
    s = np.asarray(s, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    w1 = np.minimum(s, delta)
    xj, wj = _gauss_jacobi_01(order, hurst - 0.5)
    # [s, s+w1]: u = s + w1 x, weight x^(H-1/2)
    u1 = s[..., None] + w1[..., None] * xj
    part1 = w1 ** (hurst + 0.5) * np.sum(wj * u1 ** (hurst - 1.5), axis=-1)
    # [2s, s+delta] (if nonempty): u = 2s ((s+delta)/2s)^y on y in [0, 1]
    xl, wl = _gauss_legendre_01(order)
    wide = delta > s
    ratio = np.where(wide, (s + delta) / (2.0 * s), 1.0)
    lr = np.log(ratio)
    u2 = 2.0 * s[..., None] * ratio[..., None] ** xl
    f2 = u2 ** (hurst - 0.5) * (u2 - s[..., None]) ** (hurst - 0.5) * lr[..., None]
    part2 = np.where(wide, np.sum(wl * f2, axis=-1), 0.0)
    return part1 + part2


def z_from_delta(s, delta, hurst, order=12):
    """Volterra kernel z_H(s + delta, s), vectorized over s and delta > 0.

    z_H(t,s) = c_H [ (t/s)^(H-1/2) (t-s)^(H-1/2)
                     - (H-1/2) s^(1/2-H) int_s^t u^(H-3/2) (u-s)^(H-1/2) du ].
    Satisfies int_0^t z_H(t,s)^2 ds = t^(2H) (exact sampling covariance).
    """
    s = np.asarray(s, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if np.any(s <= 0) or np.any(delta <= 0):
        raise ValueError("z kernel requires 0 < s < t")
    if hurst == 0.5:
        return np.ones(np.broadcast_shapes(s.shape, delta.shape))
    s, delta = np.broadcast_arrays(s, delta)
    direct = (1.0 + delta / s) ** (hurst - 0.5) * delta ** (hurst - 0.5)
    corr = (hurst - 0.5) * s ** (0.5 - hurst) \
        * _inner_a_delta(s, delta, hurst, order)
    return c_h(hurst) * (direct - corr)


def z_kernel(t, s, hurst, order=12):
    """Volterra kernel z_H(t, s) for 0 < s < t, vectorized."""
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if np.any(s >= t):
        raise ValueError("z kernel requires 0 < s < t")
    return z_from_delta(s, np.broadcast_arrays(t, s)[0] - s, hurst, order)


def _graded_panels(n_panels):
    """Panel edges on [0, 1], geometrically refined toward 0."""
    frac = 2.0 ** -np.arange(n_panels, 0, -1)
    return np.concatenate([[0.0], frac / frac[-1]])


def _endpoint_half_nodes(a, m, order, n_panels, p, from_left):
    """Nodes/weights for int over the half-interval nearest one endpoint.

    The variable is mapped through y^p (y in [0, 1]) so an algebraic
    singularity u^(1/p - 1) at the endpoint becomes flat; graded panels in y
    mop up the remaining weaker fractional powers.  Panel depth is capped so
    the mapped offsets stay above float resolution.
    """
    n_panels = min(n_panels, max(3, int(45.0 / max(p, 1.0))))
    edges = _graded_panels(n_panels)
    x, w = _gauss_legendre_01(order)
    widths = np.diff(edges)
    y = (edges[:-1, None] + widths[:, None] * x).ravel()
    wy = (widths[:, None] * w).ravel()
    scale = m - a
    offs = scale * y ** p
    jac = scale * p * y ** (p - 1.0)
    return offs, wy * jac


def _outer_nodes(a, b, order, n_panels, p_left=1.0, p_right=1.0):
    """Composite rule on [a, b] with power maps toward both endpoints.

    Returns (nodes, weights, off_a, off_b) where off_a = node - a and
    off_b = b - node are carried exactly; nodes mapped very close to an
    endpoint keep full relative accuracy in the corresponding offset even
    when the node itself rounds onto the endpoint.
    """
    mid = 0.5 * (a + b)
    offl, wl = _endpoint_half_nodes(a, mid, order, n_panels, p_left, True)
    offr, wr = _endpoint_half_nodes(mid, b, order, n_panels, p_right, False)
    off_a = np.concatenate([offl, (b - a) - offr[::-1]])
    off_b = np.concatenate([(b - a) - offl, offr[::-1]])
    nodes = np.concatenate([a + offl, b - offr[::-1]])
    weights = np.concatenate([wl, wr[::-1]])
    return nodes, weights, off_a, off_b


def _g_of_t(t, rtime, kappa, hurst, order):
    """G(t) = int_t^T z_H(u, t) cosh(tau(u)) du (scalar t, rtime = T - t).

    Split at offset min(t, rtime) past t: Gauss-Jacobi absorbs the
    (u-t)^(H-1/2) factor near u = t (the remaining factor of z is smooth
    there), log-scale GL covers the wide remainder.  All u are handled as
    offsets from t so the result stays accurate as t approaches T.
    """
    if rtime <= 0.0:
        return 0.0
    w1 = min(t, rtime)
    xj, wj = _gauss_jacobi_01(order, hurst - 0.5)
    delta = w1 * xj
    smooth = z_from_delta(np.full_like(delta, t), delta, hurst, order) \
        * delta ** (0.5 - hurst)
    tau_u = (rtime - delta) / np.sqrt(kappa)
    val = w1 ** (hurst + 0.5) * np.sum(wj * smooth * np.cosh(tau_u))
    if rtime > t:
        # [2t, T]: u = 2t ((T/2t))^y, smooth on the log scale
        horizon = t + rtime
        xl, wl = _gauss_legendre_01(order)
        lr = np.log(horizon / (2.0 * t))
        u2 = 2.0 * t * (horizon / (2.0 * t)) ** xl
        f = z_from_delta(np.full_like(u2, t), u2 - t, hurst, order) \
            * np.cosh((horizon - u2) / np.sqrt(kappa)) * u2 * lr
        val += np.sum(wl * f)
    return val


def _term3(hurst, kappa, horizon, order, n_panels):
    """(1/2) int_0^T sqrt(k) tanh(tau) G(t)^2 / (k sinh^2 tau) dt.

    Integrand behaves like t^(2H-1) near 0 and (T-t)^(2H) near T; the
    endpoint power maps flatten both.
    """
    p_left = max(1.0, 0.5 / hurst)
    p_right = max(1.0, 2.0 / (2.0 * hurst + 1.0))
    nodes, weights, _, rtimes = _outer_nodes(0.0, horizon, order, n_panels,
                                             p_left, p_right)
    vals = np.empty_like(nodes)
    for i, (t, rtime) in enumerate(zip(nodes, rtimes)):
        g = _g_of_t(t, rtime, kappa, hurst, order)
        tt = rtime / np.sqrt(kappa)
        vals[i] = np.sqrt(kappa) * np.tanh(tt) * g * g \
            / (kappa * np.sinh(tt) ** 2)
    return 0.5 * np.sum(weights * vals)


def _term2_for_s(s, rtime_s, hurst, kappa, order, n_panels):
    """int_s^T [ z(t,s) - int_t^T z(u,s) K(t,u) du ]^2 dt at fixed s.

    K(t,u) = cosh(tau(u)) / (sqrt(k) sinh(tau(t))); rtime_s = T - s.  The t
    integral runs in offset coordinates delta = t - s (power-mapped toward
    the (t-s)^(2H-1) singularity at delta = 0); the inner integrals at all
    t-nodes are accumulated right-to-left over the segments between
    consecutive nodes, so each segment is integrated once.
    """
    p_left = max(1.0, 0.5 / hurst)
    deltas, t_weights, _, t_rtimes = _outer_nodes(
        0.0, rtime_s, order, n_panels, p_left, 1.0)
    z_ts = z_from_delta(np.full_like(deltas, s), deltas, hurst, order)
    # cumulative inner integral int_{t_i}^T z(u,s) cosh(tau(u)) du,
    # u parameterized as s + delta_u
    xl, wl = _gauss_legendre_01(order)
    seg_edges = np.concatenate([deltas, [rtime_s]])
    widths = np.diff(seg_edges)
    du = (seg_edges[:-1, None] + widths[:, None] * xl).ravel()
    fu = z_from_delta(np.full_like(du, s), du, hurst, order) \
        * np.cosh((rtime_s - du) / np.sqrt(kappa))
    seg = np.sum(fu.reshape(len(widths), -1) * wl, axis=1) * widths
    inner = np.cumsum(seg[::-1])[::-1]
    sinh_t = np.sinh(t_rtimes / np.sqrt(kappa))
    bracket = z_ts - inner / (np.sqrt(kappa) * sinh_t)
    return np.sum(t_weights * bracket * bracket)


def _term2(hurst, kappa, horizon, order, n_panels):
    if hurst == 0.5:
        return 0.0
    p_left = max(1.0, 0.5 / hurst)
    p_right = max(1.0, 2.0 / (2.0 * hurst + 1.0))
    s_nodes, s_weights, _, s_rtimes = _outer_nodes(
        0.0, horizon, order, n_panels, p_left, p_right)
    vals = np.array([
        _term2_for_s(s, rt, hurst, kappa, order, n_panels)
        for s, rt in zip(s_nodes, s_rtimes)])
    return 0.5 * np.sum(s_weights * vals)


def tracking_optimum_bm(kappa=0.1, horizon=1.0, y0=0.0):
    """Closed-form minimal tracking cost for Brownian motion (H = 1/2).

    With z = 1 the prediction error term vanishes and the quadratic
    variation term reduces to (kappa/2) log cosh(T/sqrt(kappa)).
    """
    t0 = tau(0.0, kappa, horizon)
    return 0.5 * np.sqrt(kappa) * np.tanh(t0) * y0 ** 2 \
        + 0.5 * kappa * np.log(np.cosh(t0))


def tracking_optimum(hurst, kappa=0.1, horizon=1.0, y0=0.0,
                     order=8, n_panels=24, rtol=2e-3, max_doublings=2,
                     full_output=False):
    """Continuous-time minimal cost for tracking fBM with Hurst index H.

    Three terms: a closed-form y0 contribution, the squared prediction
    error of the optimally tracked signal (double integral), and the
    tracking signal's quadratic variation weighted by tanh(tau).  Converged
    by doubling (order, panels) until successive values agree to rtol.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError("Hurst parameter must lie in (0, 1)")
    if kappa <= 0 or horizon <= 0:
        raise ValueError("kappa and horizon must be positive")

    def evaluate(order_, panels_):
        t1 = 0.5 * np.sqrt(kappa) * np.tanh(tau(0.0, kappa, horizon)) * y0 ** 2
        t2 = _term2(hurst, kappa, horizon, order_, panels_)
        t3 = _term3(hurst, kappa, horizon, order_, panels_)
        return t1 + t2 + t3

    value = evaluate(order, n_panels)
    if max_doublings == 0:
        # caller opted out of the convergence check, single evaluation
        return (value, float("nan")) if full_output else value
    err = float("inf")
    for _ in range(max_doublings):
        order *= 2
        n_panels *= 2
        new = evaluate(order, n_panels)
        err = abs(new - value)
        value = new
        if err <= rtol * max(1.0, abs(new)):
            return (value, err) if full_output else value
    raise NumericError(
        f"tracking optimum quadrature did not converge at H={hurst}: "
        f"estimate {value:.6g}, last change {err:.2g}")


def twap(q0=1.0, x0=1.0, kappa=1e-3, kappa_t=0.1, horizon=1.0):
    """Constant-rate execution benchmark: (rate, expected proceeds).

    rate = q0 kappa_t / (kappa + T kappa_t);
    J = x0 q0 - q0^2 kappa kappa_t / (kappa + T kappa_t).
    """
    denom = kappa + horizon * kappa_t
    if denom <= 0:
        raise ValueError("kappa + T*kappa_t must be positive")
    rate = q0 * kappa_t / denom
    value = x0 * q0 - q0 ** 2 * kappa * kappa_t / denom
    return rate, value
