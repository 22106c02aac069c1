"""Stieltjes-Wigert polynomials and the identities they satisfy.

    S_l(u; q) = (-1)^l q^{l/2 + 1/4} / sqrt((q;q)_l)
                * sum_nu [l, nu]_q q^{nu^2} (-q^{1/2} u)^nu

are orthonormal on (0, inf) for the log-normal weight.  Values are handled
as sign / log-magnitude pairs; the alternating sum is split into its positive
and negative parts which are subtracted once.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .ensemble import QParams
from .errors import PrecisionWarning
from .qcore import check_q, log_aq, log_qpochhammer_inf, qbinomial, qpochhammer
from .signedlog import SignedLog

CANCEL_LIMIT = 1e12


def _q(p) -> float:
    return check_q(p.q if isinstance(p, QParams) else float(p))


def coefficient_logs(l: int, q: float):
    """Signs and log magnitudes of the coefficients of u^nu in S_l."""
    lq = math.log(q)
    lpoch = qpochhammer(q, q, l).logmag
    nu = np.arange(l + 1)
    lbin = np.array([qbinomial(l, int(v), q).logmag for v in nu])
    logs = (0.5 * l + 0.25) * lq - 0.5 * lpoch + lbin + (nu**2 + 0.5 * nu) * lq
    signs = (-1.0) ** (l + nu)
    return signs, logs


def leading_coefficient(l: int, p) -> SignedLog:
    """C_l = q^{l^2 + l + 1/4} / sqrt((q;q)_l), the coefficient of u^l."""
    q = _q(p)
    return SignedLog(1, (l * l + l + 0.25) * math.log(q) - 0.5 * qpochhammer(q, q, l).logmag)


def _poly_log(signs, logs, u, warn=True):
    """Evaluate sum signs_nu exp(logs_nu) u^nu for u of either sign."""
    u = np.asarray(u, float)
    flat = u.ravel()
    nu = np.arange(len(logs))
    with np.errstate(divide="ignore"):
        lu = np.log(np.abs(flat))
    su = np.sign(flat)
    tl = logs[None, :] + np.where(nu[None, :] == 0, 0.0, nu[None, :] * lu[:, None])
    ts = signs[None, :] * np.where(nu[None, :] % 2 == 1, su[:, None], 1.0)
    ts = np.where((flat[:, None] == 0) & (nu[None, :] > 0), 0.0, ts)
    m = np.max(np.where(ts != 0, tl, -np.inf), axis=1, keepdims=True)
    e = np.exp(tl - m)
    pos = np.sum(np.where(ts > 0, e, 0.0), axis=1)
    neg = np.sum(np.where(ts < 0, e, 0.0), axis=1)
    val = pos - neg
    with np.errstate(divide="ignore"):
        lval = np.log(np.abs(val)) + m[:, 0]
        ratio = np.maximum(pos, neg) / np.abs(val)
    if warn and np.any(ratio > CANCEL_LIMIT):
        warnings.warn(f"cancellation up to {np.max(ratio):.3g} in polynomial sum",
                      PrecisionWarning, stacklevel=3)
    sgn = np.sign(val)
    return sgn.reshape(u.shape), lval.reshape(u.shape)


def sw_poly_log(l: int, u, p, warn: bool = True):
    """S_l(u) on an array, returned as (sign, log|S_l|)."""
    q = _q(p)
    s, lg = coefficient_logs(l, q)
    return _poly_log(s, lg, u, warn)


def sw_poly(l: int, u: float, p) -> SignedLog:
    """S_l(u; q) as a SignedLog."""
    s, lg = sw_poly_log(l, float(u), p)
    return SignedLog(int(s), float(lg)) if s != 0 else SignedLog.zero()


def sw_poly_monic(l: int, u: float, p) -> SignedLog:
    """S_l divided by its leading coefficient."""
    return sw_poly(l, u, p) / leading_coefficient(l, p)


def sw_poly_monic_log(l: int, u, p, warn: bool = True):
    s, lg = sw_poly_log(l, u, p, warn)
    return s, lg - leading_coefficient(l, p).logmag


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def qdifference_residual(l: int, x: float, p, form: str = "shifted") -> float:
    """Relative residual of f(xq) - f(x)/x + f(x/q)/x - q^l f(x).

    ``form`` selects f:

    * ``"shifted"``: f(x) = q^{l/2} S^_l(q^{-1/2} x), the monic polynomial
      whose zeros are q^{1/2} times those of S_l.  This is the one that
      satisfies the equation.
    * ``"monic"``: f = S^_l (monic in u).
    * ``"raw"``: f = S_l.

    The residual is normalised by the largest of the four terms.
    """
    q = _q(p)
    x = float(x)

    def f(t):
        if form == "shifted":
            v = sw_poly_monic(l, t / math.sqrt(q), q)
            return float(v) * q ** (0.5 * l)
        if form == "monic":
            return float(sw_poly_monic(l, t, q))
        if form == "raw":
            return float(sw_poly(l, t, q))
        raise ValueError(f"unknown form {form!r}")

    terms = [f(x * q), -f(x) / x, f(x / q) / x, -q**l * f(x)]
    scale = max(abs(t) for t in terms)
    return abs(math.fsum(terms)) / scale if scale > 0 else 0.0


def sw_symmetry_residual(n: int, z: float, p, form: str = "corrected") -> float:
    """Relative defect of the inversion symmetry of S_n.

    ``"corrected"``: S_n(z) = (-z q^{n+1/2})^n S_n(1/(z q^{2n+1})), which
    holds exactly.  ``"naive"``: S_n(z) = (-z q^n)^n S_n(1/(z q^{2n})),
    kept for comparison; it does not hold for n >= 1.
    """
    q = _q(p)
    lhs = sw_poly(n, z, q)
    if form == "corrected":
        a, w = z * q ** (n + 0.5), 1.0 / (z * q ** (2 * n + 1))
    elif form == "naive":
        a, w = z * q**n, 1.0 / (z * q ** (2 * n))
    else:
        raise ValueError(f"unknown form {form!r}")
    rhs = SignedLog.from_float(-a) ** n * sw_poly(n, w, q)
    if lhs.sign == 0:
        return abs(float(rhs))
    return abs(float(rhs / lhs) - 1.0)


def wigert_expansion(N: int, z: float, p):
    """Large-N form of S_N(z) in terms of Ramanujan's function.

    leading   = P * A_q(q^{1/2} z)
    corrected = P * (A_q(q^{1/2} z) - q^{N+1}/(1-q) A_q(q^{-1/2} z))

    with P = (q;q)_N^{1/2} / (q;q)_inf * (-1)^N q^{N/2 + 1/4}.  The
    remainders are O(q^N) and O(q^{2N}).
    """
    q = _q(p)
    lp = 0.5 * qpochhammer(q, q, N).logmag - log_qpochhammer_inf(q) + (0.5 * N + 0.25) * math.log(q)
    pref = SignedLog((-1) ** N, lp)
    s1, l1 = log_aq(math.sqrt(q) * z, q)
    s2, l2 = log_aq(z / math.sqrt(q), q)
    a1 = SignedLog(int(s1), l1) if s1 else SignedLog.zero()
    a2 = SignedLog(int(s2), l2) if s2 else SignedLog.zero()
    corr = a2 * SignedLog(1, (N + 1) * math.log(q) - math.log1p(-q))
    return pref * a1, pref * (a1 - corr)


def log_potential_gap(N: int, x: float, lam: float) -> float:
    """| (1/N) log|S^_N(x)| - int log|x - t| rho_SW(t) dt | at q = e^{-lam/N}.

    ``x`` must lie outside the support of the limiting density in SW
    coordinates, which is e^lam times the scaled support.
    """
    from .density import log_potential_sw

    q = math.exp(-lam / N)
    s, lg = sw_poly_monic_log(N, np.array([x]), q, warn=False)
    return abs(lg[0] / N - log_potential_sw(x, lam))
