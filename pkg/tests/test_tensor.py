"""Truncated tensor algebra: product, exp/log, shuffle, Lyndon coordinates."""

import numpy as np
import pytest

from roughcontrol._kernels import python_impl
from roughcontrol.tensor import (LyndonBasis, TruncatedTensor, pair,
                                 shuffle_mul, tensor_exp, tensor_log,
                                 tensor_mul, unit)
from roughcontrol.words import total_words


def _random_group_like(dim, level, rng):
    # exp of a free Lie element (random Lyndon coordinates) is group-like
    basis = LyndonBasis(dim, level)
    lie = basis.to_tensor(rng.standard_normal(basis.eta) * 0.4)
    return tensor_exp(lie, dim, level)


def test_unit_is_identity():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(total_words(2, 3))
    e = unit(2, 3)
    np.testing.assert_allclose(tensor_mul(e, a, 2, 3), a, atol=1e-14)
    np.testing.assert_allclose(tensor_mul(a, e, 2, 3), a, atol=1e-14)


def test_mul_bilinearity_level2():
    # (1 + e1) (1 + e2) = 1 + e1 + e2 + e1 e2
    a = np.zeros(total_words(2, 2))
    b = np.zeros(total_words(2, 2))
    a[0] = b[0] = 1.0
    a[1] = 1.0   # word (0)
    b[2] = 1.0   # word (1)
    c = tensor_mul(a, b, 2, 2)
    expected = np.array([1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0])
    np.testing.assert_allclose(c, expected, atol=1e-14)


def test_associativity():
    rng = np.random.default_rng(1)
    dim, level = 2, 4
    p = total_words(dim, level)
    a, b, c = rng.standard_normal((3, p))
    left = tensor_mul(tensor_mul(a, b, dim, level), c, dim, level)
    right = tensor_mul(a, tensor_mul(b, c, dim, level), dim, level)
    np.testing.assert_allclose(left, right, atol=1e-12)


def test_exp_additivity_on_one_letter():
    # exp(e1) exp(e1) = exp(2 e1) since e1 commutes with itself
    dim, level = 2, 4
    e1 = np.zeros(total_words(dim, level))
    e1[1] = 1.0
    lhs = tensor_mul(tensor_exp(e1, dim, level), tensor_exp(e1, dim, level),
                     dim, level)
    np.testing.assert_allclose(lhs, tensor_exp(2.0 * e1, dim, level),
                               atol=1e-12)


def test_exp_log_round_trip():
    rng = np.random.default_rng(2)
    for level in (2, 3, 5):
        g = _random_group_like(2, level, rng)
        back = tensor_exp(tensor_log(g, 2, level), 2, level)
        np.testing.assert_allclose(back, g, rtol=1e-12, atol=1e-12)


def test_log_requires_unit_leading_term():
    bad = np.zeros(total_words(2, 2))
    with pytest.raises(ValueError):
        tensor_log(bad, 2, 2)


def test_shuffle_identity_on_group_like():
    # <a sh b, g> = <a, g> <b, g> for group-like g
    rng = np.random.default_rng(3)
    dim, level = 2, 4
    p = total_words(dim, level)
    g = _random_group_like(dim, level, rng)
    for _ in range(5):
        a = np.zeros(p)
        b = np.zeros(p)
        # restrict to low levels so the shuffle stays within truncation
        a[:total_words(dim, 2)] = rng.standard_normal(total_words(dim, 2))
        b[:total_words(dim, 2)] = rng.standard_normal(total_words(dim, 2))
        lhs = pair(shuffle_mul(a, b, dim, level), g)
        assert lhs == pytest.approx(pair(a, g) * pair(b, g), rel=1e-10)


def test_commutator_coefficient_in_log_of_product():
    # log(exp(e0) exp(e1)) has coefficient +1/2 on the word (0,1)
    dim, level = 2, 2
    e0 = np.zeros(total_words(dim, level))
    e1 = np.zeros(total_words(dim, level))
    e0[1] = 1.0
    e1[2] = 1.0
    g = tensor_mul(tensor_exp(e0, dim, level), tensor_exp(e1, dim, level),
                   dim, level)
    logg = tensor_log(g, dim, level)
    t = TruncatedTensor(dim, level, logg)
    assert t[(0, 1)] == pytest.approx(0.5, abs=1e-12)
    assert t[(1, 0)] == pytest.approx(-0.5, abs=1e-12)


def test_tensor_wrapper_word_access():
    t = TruncatedTensor.from_words(2, 2, {(): 1.0, (0, 1): 2.5})
    assert t[()] == 1.0
    assert t[(0, 1)] == 2.5
    t[(1,)] = -1.0
    assert t[(1,)] == -1.0


def test_lyndon_basis_sizes():
    expected = [2, 3, 5, 8, 14]
    for level, eta in enumerate(expected, start=1):
        assert LyndonBasis(2, level).eta == eta


def test_lyndon_coordinates_round_trip():
    rng = np.random.default_rng(4)
    basis = LyndonBasis(2, 3)
    coords = rng.standard_normal(basis.eta)
    lie = basis.to_tensor(coords)
    np.testing.assert_allclose(basis.coordinates(lie), coords, atol=1e-10)


def test_backends_agree():
    from roughcontrol._kernels import exp_increment, mul, sig_chain
    rng = np.random.default_rng(5)
    dim, level = 2, 5
    p = total_words(dim, level)
    a = rng.standard_normal((8, p))
    b = rng.standard_normal((8, p))
    np.testing.assert_allclose(mul(a, b, dim, level),
                               python_impl.mul(a, b, dim, level), atol=1e-12)
    v = rng.standard_normal((8, dim)) * 0.3
    np.testing.assert_allclose(exp_increment(v, dim, level),
                               python_impl.exp_increment(v, dim, level),
                               atol=1e-12)
    inc = rng.standard_normal((4, 20, dim)) * 0.1
    np.testing.assert_allclose(sig_chain(inc, dim, level, 5),
                               python_impl.sig_chain(inc, dim, level, 5),
                               atol=1e-12)
