"""q-special functions against values frozen from 50-200 digit mpmath runs."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrmt import qcore as qc

qs = st.floats(min_value=0.05, max_value=0.95)


def test_qpochhammer_small_case():
    assert float(qc.qpochhammer(0.5, 0.5, 3)) == pytest.approx(0.328125, rel=1e-15)
    assert float(qc.qpochhammer(2.0, 0.5, 0)) == 1.0


def test_qpochhammer_infinite():
    assert qc.qpochhammer_inf(0.5) == pytest.approx(0.28878809508660242128, rel=1e-14)


@given(qs, st.integers(0, 12), st.integers(0, 12))
def test_qbinomial_symmetry_and_pascal(q, n, m):
    if m > n:
        n, m = m, n
    assert float(qc.qbinomial(n, m, q)) == pytest.approx(float(qc.qbinomial(n, n - m, q)), rel=1e-12)
    if 1 <= m <= n - 1:
        rhs = float(qc.qbinomial(n - 1, m - 1, q)) + q**m * float(qc.qbinomial(n - 1, m, q))
        assert float(qc.qbinomial(n, m, q)) == pytest.approx(rhs, rel=1e-11)


def test_qbinomial_limits():
    assert float(qc.qbinomial(6, 3, 1.0)) == pytest.approx(20.0, rel=1e-14)
    q = 2.0
    assert float(qc.qbinomial(4, 2, q)) == pytest.approx((1 + q * q) * (1 + q + q * q))


def test_theta3_against_reference():
    assert qc.theta3(1.7, 0.4) == pytest.approx(1.99948116005259583950, rel=1e-14)
    ref = complex(0.67562897824735079145, -0.10746413219374663209)
    assert abs(qc.theta3(complex(-0.3, 0.8), 0.4) - ref) < 1e-14


@given(qs, st.floats(min_value=0.2, max_value=5.0))
def test_theta3_inversion(q, z):
    # sum q^{n^2} z^n is invariant under z -> 1/z
    assert abs(qc.theta3(z, q) - qc.theta3(1.0 / z, q)) < 1e-12 * abs(qc.theta3(z, q))


def test_theta1_against_reference():
    assert qc.theta1(0.7, 0.3) == pytest.approx(0.83817877516948846973, rel=1e-14)
    assert qc.theta1_prime(0.7, 0.3) == pytest.approx(1.32879877815142239308, rel=1e-14)


@given(qs)
def test_theta1_prime_at_zero_is_jacobi_product(q):
    # theta1'(0) = 2 q^{1/4} (q^2; q^2)_inf^3
    n = np.arange(1, 400)
    prod = np.prod(1.0 - q ** (2 * n))
    assert qc.theta1_prime0(q) == pytest.approx(2 * q**0.25 * prod**3, rel=1e-12)


AQ_REF = [
    (0.5, 2.0, -0.38016192718951805904, -0.40318259416495087484),
    (0.9, 3.0, -0.0099300093746834324395, -0.027664177333699201442),
    (0.9, 0.2, 0.1189403533170313309, -1.5457600576987640256),
]


@pytest.mark.parametrize("q,z,val,der", AQ_REF)
def test_aq_against_reference(q, z, val, der):
    assert qc.aq(z, q) == pytest.approx(val, rel=1e-12)
    assert qc.aq_prime(z, q) == pytest.approx(der, rel=1e-12)


def test_aq_large_argument_near_q_one():
    # series terms reach 1e173 before cancelling down to 4.4e75
    sign, lg = qc.log_aq(25.0, 0.99)
    assert sign == 1.0
    assert lg == pytest.approx(math.log(4.412362093683068542e75), abs=1e-10)


@settings(max_examples=40)
@given(st.floats(min_value=0.3, max_value=0.97), st.floats(min_value=0.0, max_value=40.0))
def test_aq_satisfies_q_difference_equation(q, z):
    # A(z) - A(qz) + qz A(q^2 z) = 0, checked in relative terms
    a, b, c = (qc.aq(v, q) for v in (z, q * z, q * q * z))
    scale = abs(a) + abs(b) + abs(q * z * c)
    assert abs(a - b + q * z * c) <= 1e-9 * scale


def test_aq_vectorised_matches_scalar():
    z = np.linspace(0, 10, 7)
    vec = qc.aq(z, 0.8)
    assert np.allclose(vec, [qc.aq(v, 0.8) for v in z], rtol=1e-14)


def test_phi21_terminating_reference_values():
    assert float(qc.phi21_terminating(3, 4, 0.5)) == pytest.approx(-71715.0, rel=1e-13)
    assert float(qc.phi21_terminating(1, 3, 0.5)) == pytest.approx(-7.0, rel=1e-13)
    assert float(qc.phi21_terminating(5, 2, 0.8)) == pytest.approx(-170.011792036461883981, rel=1e-12)


def test_airy_kernel_reference_and_symmetry():
    assert qc.airy_kernel(0.5, -1.2) == pytest.approx(0.084203051419942964909, rel=1e-13)
    assert qc.airy_kernel(1.0, 1.0) == pytest.approx(0.0070238701595382203773, rel=1e-13)
    assert qc.airy_kernel(-1.2, 0.5) == qc.airy_kernel(0.5, -1.2)
    # diagonal rule joins the off-diagonal formula smoothly
    assert qc.airy_kernel(0.3, 0.3 + 2e-6) == pytest.approx(qc.airy_kernel(0.300001, 0.300001), rel=1e-8)


def test_check_q_rejects_bad_input():
    for bad in (0.0, 1.0, -0.2, 1.5, float("nan")):
        with pytest.raises(ValueError):
            qc.check_q(bad)


def test_aq_airy_asymptotics_refined_form():
    for eps in (1e-2, 1e-3):
        assert qc.aq_asymptotic_residual(eps, form="refined") <= 10 * eps


def test_aq_airy_asymptotics_naive_form_is_off_by_log2():
    # the naive constant 1/2 leaves an offset that does not shrink with eps
    r = qc.aq_asymptotic_residual(1e-4, t_values=[0.0], form="naive")
    assert r == pytest.approx(math.log(2.0), abs=0.1)
