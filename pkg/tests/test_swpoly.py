import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrmt.ensemble import QParams
from qrmt.errors import PrecisionWarning
from qrmt.swpoly import (
    leading_coefficient, log_potential_gap, qdifference_residual, sw_poly, sw_poly_log,
    sw_poly_monic, sw_symmetry_residual, wigert_expansion,
)


@pytest.mark.parametrize("q", [0.3, 0.6, 0.9])
def test_orthonormality(q):
    p = QParams.from_q(1, q)
    # int f(u) w(u) du with u = e^{y/k}: (1/sqrt(pi)) int e^{-y^2} f(u) u dy
    y, w = np.polynomial.hermite.hermgauss(120)
    u = np.exp(y / p.k)
    S = np.array([[float(sw_poly(l, v, q)) for v in u] for l in range(5)])
    G = (S * (w * u)) @ S.T / math.sqrt(math.pi)
    np.testing.assert_allclose(G, np.eye(5), atol=1e-10)


def test_low_degree_closed_forms():
    q = 0.5
    assert float(sw_poly(0, 3.0, q)) == pytest.approx(q**0.25)
    # monic S_1 has its zero at the ratio of the first two moments, q^{-3/2}
    with pytest.warns(PrecisionWarning):
        assert float(sw_poly_monic(1, q**-1.5, q)) == pytest.approx(0.0, abs=1e-13)
    assert float(sw_poly(1, 2.0, q)) == pytest.approx(
        float(leading_coefficient(1, q)) * float(sw_poly_monic(1, 2.0, q)), rel=1e-13)


def test_log_evaluation_matches_direct():
    u = np.array([0.3, 1.0, 4.5])
    s, lg = sw_poly_log(4, u, 0.7)
    direct = [float(sw_poly(4, v, 0.7)) for v in u]
    np.testing.assert_allclose(s * np.exp(lg), direct, rtol=1e-11)


@settings(max_examples=30)
@given(st.integers(1, 8), st.floats(min_value=0.2, max_value=5.0), st.floats(min_value=0.3, max_value=0.8))
def test_qdifference_equation_shifted_form(l, x, q):
    assert qdifference_residual(l, x, q, form="shifted") < 1e-9


def test_qdifference_other_readings_fail():
    assert qdifference_residual(3, 1.3, 0.5, form="monic") > 1e-3
    assert qdifference_residual(3, 1.3, 0.5, form="raw") > 1e-3


@settings(max_examples=30)
@given(st.integers(0, 8), st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=0.3, max_value=0.8))
def test_inversion_symmetry(n, z, q):
    assert sw_symmetry_residual(n, z, q, form="corrected") < 1e-9


def test_naive_symmetry_reading_fails():
    assert sw_symmetry_residual(3, 1.3, 0.5, form="naive") > 1e-2


def test_wigert_expansion_rates():
    q, z = 0.5, 1.3
    errs = []
    for N in (10, 20):
        lead, corr = wigert_expansion(N, z, q)
        exact = float(sw_poly(N, z, q))
        errs.append((abs(float(lead) / exact - 1), abs(float(corr) / exact - 1)))
    # leading remainder O(q^N), corrected O(q^{2N})
    assert errs[1][0] < errs[0][0] * q**10 * 4
    assert errs[1][1] < errs[0][1] * q**20 * 4
    assert errs[1][1] < 1e-10


def test_log_potential_gap_shrinks_with_N():
    lam = 1.0
    x = 0.05  # left of the SW-coordinate support
    g = [log_potential_gap(N, x, lam) for N in (20, 40, 80)]
    assert g[2] < g[1] < g[0]
    assert g[2] < 0.05
