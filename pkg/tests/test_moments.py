import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrmt.ensemble import QParams
from qrmt.errors import NumericalPrecisionError
from qrmt.moments import (
    Partition, cross_route_reldiff, hook_schur_average, jacobi_p, moment_by_quadrature,
    moment_recurrence_check, mu0, mu2, partitions, power_sum_moment, raw_moment, rs_moment,
    scaled_moment, schur_average_det, schur_average_product,
)


def test_partition_validation():
    assert Partition((3, 1, 0)).weight == 4
    assert Partition((2, 1)).padded(4) == (2, 1, 0, 0)
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, -1))
    with pytest.raises(ValueError):
        Partition((1, 1, 1)).padded(2)


def test_partition_counts():
    assert [len(list(partitions(n, 10))) for n in range(7)] == [1, 1, 2, 3, 5, 7, 11]
    assert len(list(partitions(4, 2))) == 3


def test_single_particle_moment():
    p = QParams.from_q(1, 0.5)
    assert float(power_sum_moment(1, p).value) == pytest.approx(math.sqrt(2), rel=1e-14)
    for l in range(1, 6):
        # N = 1: q^l m_l = q^{-l^2/2}
        assert float(power_sum_moment(l, p).value) == pytest.approx(0.5 ** (-l * l / 2), rel=1e-13)


@pytest.mark.parametrize("l,ref", [(1, 4.2426406871192851464), (2, 26.0), (3, 322.44069222106567113)])
def test_two_particle_moments_reference(l, ref):
    # frozen from 20-digit two-dimensional mpmath quadrature
    assert float(power_sum_moment(l, QParams.from_q(2, 0.5)).value) == pytest.approx(ref, rel=1e-13)


def test_three_particle_first_moment():
    assert float(power_sum_moment(1, QParams.from_q(3, 0.5)).value) == pytest.approx(9.8994949366116636, rel=1e-13)


def test_jacobi_value():
    assert jacobi_p(1, QParams.from_q(3, 0.5)) == pytest.approx(-7.0, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8), st.sampled_from([0.3, 0.5, 0.8]))
def test_cross_routes_agree(N, l, q):
    assert cross_route_reldiff(l, QParams.from_q(N, q)) < 1e-10


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("q", [0.3, 0.8])
def test_quadrature_oracle(N, q):
    p = QParams.from_q(N, q)
    for l in (1, 2, 5):
        assert moment_by_quadrature(l, p) == pytest.approx(float(power_sum_moment(l, p).value), rel=1e-9)


def test_negative_moments():
    p = QParams.from_q(3, 0.6)
    for l in (1, 2, 3):
        assert float(power_sum_moment(-l, p).value) == pytest.approx(float(power_sum_moment(l, p).value))
        # m_{-l} = q^{2 N l} m_l
        ratio = float(raw_moment(-l, p) / raw_moment(l, p))
        assert ratio == pytest.approx(p.q ** (2 * 3 * l), rel=1e-12)


def test_moment_l_zero_rejected():
    with pytest.raises(ValueError):
        power_sum_moment(0, QParams.from_q(2, 0.5))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.sampled_from([0.3, 0.5, 0.8]), st.integers(0, 4))
def test_schur_product_equals_determinant(N, q, n):
    p = QParams.from_q(N, q)
    for kappa in partitions(n, N):
        a = float(schur_average_product(kappa, p))
        b = float(schur_average_det(kappa, p))
        assert a == pytest.approx(b, rel=1e-10)


def test_schur_empty_partition_is_one():
    assert float(schur_average_product((), QParams.from_q(3, 0.5))) == pytest.approx(1.0)


def test_hook_equals_product_on_hooks():
    p = QParams.from_q(4, 0.5)
    for l in range(1, 5):
        for r in range(0, min(l, 4)):
            kappa = (l - r,) + (1,) * r
            assert float(hook_schur_average(l, r, p)) == pytest.approx(
                float(schur_average_product(kappa, p)), rel=1e-12)


def test_determinant_route_size_limit():
    with pytest.raises((ValueError, NumericalPrecisionError)):
        schur_average_det((1,), QParams.from_q(13, 0.5))


def test_moment_recurrence():
    assert moment_recurrence_check(6, QParams.from_q(4, 0.5)) < 1e-10


def test_mu_coefficients():
    assert mu0(1, 1.0) == pytest.approx(math.e - 1.0)
    # 2F1(-2, 2; 1; x) = 1 - 4x + 3x^2
    lam = 0.7
    x = math.exp(lam)
    assert mu0(2, lam) == pytest.approx((1 - 4 * x + 3 * x * x) / (2 * lam), rel=1e-12)
    frozen = [-0.0715951, 1.310884, 42.72624, 732.9104]
    for l, v in enumerate(frozen, start=1):
        assert mu2(l, 1.0) == pytest.approx(v, rel=1e-6)


def test_scaled_moment_large_N():
    for l in (1, 2, 3):
        d = scaled_moment(l, 200, 1.0) - mu0(l, 1.0)
        assert d * 200**2 == pytest.approx(mu2(l, 1.0), rel=5e-3)


def test_rs_moment_is_reflected_mu0():
    assert rs_moment(2, 1.0) == pytest.approx(mu0(2, -0.5))
