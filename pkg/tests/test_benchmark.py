"""Analytic reference values: singular quadrature and closed forms."""

import numpy as np
import pytest
from scipy.integrate import quad

from roughcontrol.benchmark import (c_h, tracking_optimum,
                                    tracking_optimum_bm, twap, z_kernel)
from roughcontrol.errors import NumericError


def test_kernel_normalization_at_half():
    assert c_h(0.5) == pytest.approx(1.0, abs=1e-14)


def test_kernel_degenerates_to_one_at_half():
    s = np.array([0.1, 0.3, 0.7])
    t = np.array([0.5, 0.6, 0.9])
    np.testing.assert_allclose(z_kernel(t, s, 0.5), np.ones(3), atol=1e-12)


@pytest.mark.parametrize("hurst", [0.25, 0.75])
@pytest.mark.parametrize("t_s", [(0.8, 0.3), (1.0, 0.05), (0.5, 0.45)])
def test_kernel_against_adaptive_quadrature(hurst, t_s):
    # independent evaluation of the integral term with scipy's algebraic
    # endpoint-weight handling
    t, s = t_s
    cc = c_h(hurst)
    direct = (t / s) ** (hurst - 0.5) * (t - s) ** (hurst - 0.5)
    integral = quad(lambda u: u ** (hurst - 1.5), s, t,
                    weight="alg", wvar=(hurst - 0.5, 0.0),
                    points=None)[0]
    expected = cc * (direct
                     - (hurst - 0.5) * s ** (0.5 - hurst) * integral)
    assert float(z_kernel(t, s, hurst)) == pytest.approx(expected, rel=1e-9)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("hurst", [0.0625, 0.25, 0.75])
def test_kernel_variance_identity(hurst):
    # int_0^t z(t,s)^2 ds = t^{2H}; checked by adaptive quadrature with
    # endpoint singularity s^{-|2H-1|} at s -> 0 handled by substitution
    t = 0.7

    def integrand(s):
        return float(z_kernel(t, s, hurst)) ** 2

    total = quad(integrand, 0.0, t, points=[t * 1e-6], limit=200)[0]
    assert total == pytest.approx(t ** (2.0 * hurst), rel=2e-4)


def test_brownian_closed_form():
    kappa = 0.1
    expected = 0.5 * kappa * np.log(np.cosh(1.0 / np.sqrt(kappa)))
    assert tracking_optimum_bm(kappa) == pytest.approx(expected, rel=1e-12)


def test_half_case_matches_closed_form():
    assert tracking_optimum(0.5) == pytest.approx(tracking_optimum_bm(),
                                                  abs=1e-4)


@pytest.mark.parametrize("hurst", [0.25, 0.75])
def test_order_doubling_stability(hurst):
    coarse = tracking_optimum(hurst, order=8, n_panels=24, max_doublings=0,
                              rtol=1.0)
    fine = tracking_optimum(hurst, order=16, n_panels=48, max_doublings=0,
                            rtol=1.0)
    assert abs(fine - coarse) < 1e-3


def test_optimum_decreases_with_smoothness():
    values = [tracking_optimum(h) for h in (0.25, 0.5, 0.75)]
    assert values[0] > values[1] > values[2]


def test_failed_convergence_raises():
    with pytest.raises(NumericError):
        tracking_optimum(0.25, order=2, n_panels=2, rtol=1e-12,
                         max_doublings=1)


def test_twap_closed_form():
    rate, value = twap()
    assert rate == pytest.approx(1.0 * 0.1 / (1e-3 + 0.1), rel=1e-12)
    assert 0.9989 <= value <= 0.9991
    # degenerate no-terminal-penalty case liquidates nothing
    rate0, value0 = twap(kappa_t=0.0)
    assert rate0 == 0.0
    assert value0 == pytest.approx(1.0)
