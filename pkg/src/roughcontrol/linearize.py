"""Deterministic quadratic reformulation of the execution problem.

For a linear signature policy U_t = <l, S_t> every term of the execution
cost is a polynomial of degree <= 2 in the signature coordinates, so shuffle
products and right-concatenation with the time letter turn the expected cost
into an explicit quadratic in l paired against the expected signature:

    time integrals     int_0^T <a, S_t> dt = <a * time_letter, S_T>
    products           <a, S><b, S> = <a shuffle b, S>
    price              X_t = x0 <empty, S_t> + <driver_letter, S_t>
                       (the stream is built on X itself)

With words of l up to level N, the largest words produced are the shuffles
of two time-extended copies, of length 2N + 2; the expected signature must
be estimated at that level.  The assembled objective is certified against a
Monte Carlo evaluation of the same policies on the same paths, which is the
authoritative check on the word calculus.
"""

import numpy as np

from .dynamics import simulate
from .errors import NumericError
from .signature import stream_signatures
from .words import (level_offsets, shuffle_words, total_words, word_to_index,
                    index_to_word)

TIME, DRIVER = 0, 1


def expected_signature(stream):
    """Coordinate-wise mean of the terminal signatures of a stream."""
    return stream.terminal().mean(axis=0)


class QuadraticObjective:
    """Expected execution cost as J(l) = l' Q l + c' l + r over policy words."""

    def __init__(self, level, level_prime, quad, lin, const):
        self.level = level
        self.level_prime = level_prime
        self.quad = quad
        self.lin = lin
        self.const = const

    def value(self, ell):
        ell = np.asarray(ell, dtype=np.float64)
        return float(ell @ self.quad @ ell + self.lin @ ell + self.const)

    def gradient(self, ell):
        return 2.0 * self.quad @ np.asarray(ell) + self.lin


def _all_words(level):
    """All words over {time, driver} of length <= level, flat-index order."""
    return [index_to_word(i, 2, level) for i in range(total_words(2, level))]


def build_objective(level, expected_sig, q0=1.0, x0=1.0, kappa=1e-3,
                    kappa_t=0.1):
    """Assemble the quadratic expected-cost objective for policy level N.

    expected_sig is the flat expected signature at level N' = 2N + 2 of the
    time-augmented price path (t, X).  Cost convention: running kappa U^2
    plus terminal -(W + Q X - kappa_t Q^2), matching the simulator.
    """
    level_prime = 2 * level + 2
    p_needed = total_words(2, level_prime)
    expected_sig = np.asarray(expected_sig, dtype=np.float64)
    if expected_sig.shape[-1] < p_needed:
        raise ValueError(
            f"expected signature must reach level {level_prime} "
            f"({p_needed} coefficients)")
    offsets = level_offsets(2, level_prime)

    def pair(word_coeffs):
        return sum(c * expected_sig[word_to_index(w, 2, offsets)]
                   for w, c in word_coeffs.items())

    def concat_time(word_coeffs):
        return {w + (TIME,): c for w, c in word_coeffs.items()}

    words = _all_words(level)
    n = len(words)
    quad = np.zeros((n, n))
    lin = np.zeros(n)
    for a, wa in enumerate(words):
        # integral of U^2 and of the terminal quadratic in Q_T
        for b in range(a, n):
            wb = words[b]
            v = kappa * pair(concat_time(shuffle_words(wa, wb))) \
                + kappa_t * pair(shuffle_words(wa + (TIME,), wb + (TIME,)))
            quad[a, b] = v
            quad[b, a] = v
        # -W_T - Q_T X_T + kappa_t Q_T^2, linear parts (x0 terms cancel)
        lin[a] = (-pair(concat_time(shuffle_words((DRIVER,), wa)))
                  + pair(shuffle_words(wa + (TIME,), (DRIVER,)))
                  - 2.0 * q0 * kappa_t * pair({wa + (TIME,): 1.0}))
    const = -q0 * x0 - q0 * pair({(DRIVER,): 1.0}) + kappa_t * q0 ** 2
    return QuadraticObjective(level, level_prime, quad, lin, const)


def solve_linearized(objective, eig_floor=1e-8, ridge=1e-10):
    """Unconstrained minimizer of the quadratic objective.

    Solves (Q + lambda I) l = -c/2 with a trace-scaled ridge; rejects
    objectives whose smallest eigenvalue is negative beyond tolerance.
    """
    quad = objective.quad
    n = quad.shape[0]
    scale = np.trace(quad) / n
    min_eig = float(np.linalg.eigvalsh(quad)[0])
    if min_eig < -eig_floor * max(1.0, abs(scale)):
        raise NumericError(
            f"quadratic objective is indefinite (smallest eigenvalue "
            f"{min_eig:.3e})")
    lam = ridge * max(abs(scale), 1.0)
    ell = np.linalg.solve(quad + lam * np.eye(n), -0.5 * objective.lin)
    return ell, objective.value(ell)


def refined_mc_cost(problem, grid, driver_values, policy, refinement=8,
                    chunk=512):
    """Mean cost and standard error with sub-refined control evaluation.

    The quadratic objective is the expected continuous-time cost of the
    piecewise-linear driver paths, but the plain Riemann-sum cost estimator
    converges slowly in the step size when the control inherits the
    roughness of the driver (error of order dt^{2H}).  Interpolating each
    path onto a grid refined by the given factor and re-running the
    simulator removes that bias without adding randomness, so the
    consistency check |J_lin - MC| <= 3 SE holds at large coefficient
    norms.  Paths are processed in chunks to bound memory.
    """
    driver_values = np.asarray(driver_values, dtype=np.float64)
    m = driver_values.shape[0]
    grid = np.asarray(grid, dtype=np.float64)
    n = len(grid) - 1
    fine = np.linspace(grid[0], grid[-1], n * refinement + 1)
    costs = np.empty(m)
    for start in range(0, m, chunk):
        block = driver_values[start:start + chunk]
        if refinement > 1:
            refined = np.empty((block.shape[0], len(fine)))
            for i in range(block.shape[0]):
                refined[i] = np.interp(fine, grid, block[i])
        else:
            refined = block
        stream = stream_signatures(fine, refined, fine, policy.level)
        costs[start:start + block.shape[0]] = simulate(
            problem, stream, policy).cost
    return float(costs.mean()), float(costs.std(ddof=1) / np.sqrt(m))
