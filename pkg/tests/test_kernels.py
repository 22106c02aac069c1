import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrmt import kernels as kr
from qrmt.ensemble import QParams, weight_sw
from qrmt.qcore import airy_kernel


def test_single_particle_kernel():
    p = QParams.from_q(1, 0.5)
    u, v = 0.7, 2.3
    expect = math.sqrt(weight_sw(u, p) * weight_sw(v, p)) * math.sqrt(0.5)
    assert kr.kernel_sw(u, v, p) == pytest.approx(expect, rel=1e-13)
    assert kr.kernel_sw(u, v, p, route="cd") == pytest.approx(expect, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.sampled_from([0.3, 0.6]),
       st.floats(min_value=0.2, max_value=3.0), st.floats(min_value=0.2, max_value=3.0))
def test_sum_and_christoffel_darboux_agree(N, q, a, b):
    p = QParams.from_q(N, q)
    s = q ** (-N / 2)
    u, v = a * s, b * s
    ks = kr.kernel_sw(u, v, p, route="sum")
    kc = kr.kernel_sw(u, v, p, route="cd")
    assert kc == pytest.approx(ks, rel=1e-9, abs=1e-12 * max(1.0, abs(ks)))


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3))
def test_kernels_are_symmetric(x, y):
    p = QParams.from_cL(4, 1.0, 2 * math.pi)
    assert kr.kernel_swe(x, y, p) == pytest.approx(kr.kernel_swe(y, x, p), rel=1e-12, abs=1e-14)
    assert kr.kernel_bulk(x, y, p) == pytest.approx(kr.kernel_bulk(y, x, p), rel=1e-12, abs=1e-14)
    assert kr.kernel_edge(x, y, p) == pytest.approx(kr.kernel_edge(y, x, p), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_trace_is_N(N):
    assert kr.kernel_trace(QParams.from_q(N, 0.5)) == pytest.approx(N, abs=1e-6)


def test_projection_spectrum():
    p = QParams.from_cL(5, 1.0, 2 * math.pi)
    half = abs(p.left_edge) + 9.0
    t, w = np.polynomial.legendre.leggauss(120)
    x, w = half * t, half * w
    X, Y = np.meshgrid(x, x, indexing="ij")
    K = np.asarray(kr.kernel_swe(X, Y, p))
    sw = np.sqrt(w)
    ev = np.linalg.eigvalsh(sw[:, None] * K * sw[None, :])
    assert ev.min() > -1e-8 and ev.max() < 1 + 1e-8
    assert np.sum(ev > 0.5) == 5


def test_diagonal_switchover_is_continuous():
    p = QParams.from_q(4, 0.5)
    u = 1.7
    assert kr.kernel_sw(u, u + 2e-6, p, route="cd") == pytest.approx(
        kr.kernel_sw(u + 1e-6, u + 1e-6, p, route="cd"), rel=1e-7)
    assert kr.kernel_edge(0.4, 0.4 + 2e-6, p) == pytest.approx(kr.kernel_edge(0.400001, 0.400001, p), rel=1e-7)


def test_ell_forms_agree_and_are_real():
    p = QParams.from_q(2, 0.5)
    y = np.linspace(-3, 3, 25)
    for xi in (-1, 1):
        a = np.asarray(kr.ell(y, p, xi, form="lattice"))
        b = np.asarray(kr.ell(y, p, xi, form="theta3"))
        assert np.max(np.abs(np.imag(b))) < 1e-12
        np.testing.assert_allclose(np.real(b), a, rtol=1e-10, atol=1e-12)


def test_bulk_forms_agree():
    c = 1.0
    L = math.sqrt(8.0) * math.pi
    g = np.linspace(-1.5, 1.5, 10)
    X, Y = np.meshgrid(g, g, indexing="ij")
    for N in (2, 3):
        p = QParams.from_cL(N, c, L)
        a = np.asarray(kr.kernel_bulk(X, Y, p, form="theta3"))
        b = np.asarray(kr.kernel_bulk(X, Y, p, form="theta1"))
        assert np.max(np.abs(a - b)) < 1e-8


def test_qhat_definition():
    p = QParams.from_cL(2, 0.8, 3.0)
    assert p.qhat == pytest.approx(math.exp(-0.8 * 9.0 / 2))


def test_auto_form_avoids_lattice_cancellation():
    p = QParams.from_cL(2, 1.0, 20.0)
    s = 2 * math.pi / 20.0
    assert s * kr.kernel_bulk(0.0, 0.0, p) == pytest.approx(1.0, abs=2e-2)
    # the lattice-sum form has lost every digit here
    assert abs(s * kr.kernel_bulk(0.0, 0.0, p, form="theta3") - 1.0) > 1.0


def test_bulk_diagonal_is_periodic():
    c, L = 1.0, 5.0
    p = QParams.from_cL(2, c, L)
    per = 2 * math.pi / (c * L)
    x = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(kr.kernel_bulk(x, x, p), kr.kernel_bulk(x + per, x + per, p), atol=1e-8)


def test_bulk_parity_assignment():
    assert kr.bulk_xi(4) == -1 and kr.bulk_xi(5) == 1


def test_finite_N_converges_to_bulk_and_edge():
    c, L = 1.0 / (2 * math.log(2)), 2 * math.pi
    Ns = list(range(10, 18))
    b = kr.bulk_convergence_errors(Ns, c, L)
    e = kr.edge_convergence_errors(Ns, c, L)
    assert b[-1] < b[0] / 5
    # edge error halves with every extra particle at q = 1/2
    assert kr.fitted_log_rate(Ns, e) == pytest.approx(math.log(0.5), rel=0.02)
    # bulk error halves every second particle: rate q^{N/2}
    assert kr.fitted_log_rate(Ns, b) == pytest.approx(0.5 * math.log(0.5), rel=0.05)


def test_edge_diagonal_positive_with_gaussian_left_tail():
    p = QParams.from_cL(1, 1.0, 2 * math.pi)
    s = np.linspace(-8, 4, 25)
    assert np.all(np.asarray(kr.kernel_edge(s, s, p)) > 0)
    h = 1e-4
    ratios = []
    for v in (-3.0, -5.0, -7.0):
        d = (math.log(kr.kernel_edge(v + h, v + h, p)) - math.log(kr.kernel_edge(v - h, v - h, p))) / (2 * h)
        ratios.append(d / (-2 * p.c * v))
    assert ratios[0] > ratios[1] > ratios[2] > 1.0
    assert ratios[2] < 1.1


def test_edge_recovers_bulk_deep_inside():
    # shifts must be whole bulk periods, so take c L = 2 pi; q ~ 0.28 here
    L = 2.5
    p = QParams.from_cL(1, 2 * math.pi / L, L)
    g = np.linspace(-0.5, 0.5, 7)
    X, Y = np.meshgrid(g, g, indexing="ij")
    M = 8
    assert np.max(np.abs(kr.kernel_edge(M + X, M + Y, p) - kr.kernel_bulk(X, Y, p, xi=-1))) < 1e-4
    assert np.max(np.abs(kr.kernel_edge(M - 0.5 + X, M - 0.5 + Y, p) - kr.kernel_bulk(X, Y, p, xi=1))) < 1e-4


def test_sine_limit_decreases():
    errs = kr.sine_limit_error([4.0, 6.0, 10.0, 20.0])
    assert all(np.diff(errs) < 0)
    assert errs[-1] < 1e-2
    p = QParams.from_cL(2, 1.0, 20.0)
    s = 2 * math.pi / 20.0
    assert s * kr.kernel_bulk(0.0, 0.0, p) == pytest.approx(1.0, abs=1e-2)


def test_airy_limit():
    eps = 1e-3
    assert kr.airy_limit_error(eps) < 5e-3
    L = math.pi * math.sqrt(2 / eps)
    p = QParams.from_cL(1, 1.0, L)
    a = kr.airy_rescaled_edge(0.3, -1.1, p)
    assert a == pytest.approx(kr.airy_rescaled_edge(-1.1, 0.3, p), rel=1e-10)
    assert a == pytest.approx(airy_kernel(0.3, -1.1), abs=5e-3)
    # the opposite overall sign is clearly wrong
    assert abs(kr.airy_rescaled_edge(0.0, 0.0, p, sign=-1) - airy_kernel(0.0, 0.0)) > 0.1


def test_airy_error_decreases_with_eps():
    errs = [kr.airy_limit_error(e, n=5) for e in (4e-3, 1e-3)]
    assert errs[1] < errs[0]
