"""Correlation kernels: finite N, bulk and edge limits, sine and Airy reductions.

Coordinates: ``u, v`` are SW coordinates, ``x, y`` exponential coordinates
with u = q^{-N} e^{2 pi x / L}, and ``X, Y`` edge coordinates measured from
the left edge -pi N / (L c).
"""

from __future__ import annotations

import math

import numpy as np

from .ensemble import QParams, log_weight_sw, x_to_u
from .errors import NumericalPrecisionError
from .qcore import airy_kernel, log_aq, log_qpochhammer_inf, theta1, theta1_prime, theta1_prime0, theta3
from .swpoly import _poly_log, coefficient_logs, leading_coefficient

_DIAG = 1e-6


def _out(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def _sw_log_and_deriv(l: int, u, q: float):
    s, lg = coefficient_logs(l, q)
    v = _poly_log(s, lg, u, warn=False)
    if l == 0:
        return v, (np.zeros_like(v[0]), np.full_like(v[1], -np.inf))
    nu = np.arange(1, l + 1)
    d = _poly_log(s[1:], lg[1:] + np.log(nu), u, warn=False)
    return v, d


# ---------------------------------------------------------------------------
# finite N
# ---------------------------------------------------------------------------

def kernel_sw(u, v, p: QParams, route: str = "sum"):
    """Christoffel-Darboux kernel of the SW ensemble (weights included).

    route ``"sum"``: sqrt(w(u) w(v)) sum_{j<N} S_j(u) S_j(v).
    route ``"cd"``: the two-term form with the ratio C_{N-1}/C_N of leading
    coefficients; on the diagonal (relative gap < 1e-6) the derivative
    limit is used at the midpoint.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    N, q = p.N, p.q
    hw = 0.5 * (log_weight_sw(u, p) + log_weight_sw(v, p))
    if route == "sum":
        tot = np.zeros(u.shape)
        for j in range(N):
            su, lu = _poly_log(*coefficient_logs(j, q), u, warn=False)
            sv, lv = _poly_log(*coefficient_logs(j, q), v, warn=False)
            tot = tot + su * sv * np.exp(lu + lv + hw)
        return _out(tot)
    if route != "cd":
        raise ValueError(f"unknown route {route!r}")
    lratio = leading_coefficient(N - 1, q).logmag - leading_coefficient(N, q).logmag
    (sNu, lNu), _ = _sw_log_and_deriv(N, u, q)
    (sMu, lMu), _ = _sw_log_and_deriv(N - 1, u, q)
    (sNv, lNv), _ = _sw_log_and_deriv(N, v, q)
    (sMv, lMv), _ = _sw_log_and_deriv(N - 1, v, q)
    num = sNu * sMv * np.exp(lNu + lMv + hw + lratio) - sMu * sNv * np.exp(lMu + lNv + hw + lratio)
    d = u - v
    near = np.abs(d) <= _DIAG * np.maximum(np.abs(u), np.abs(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        off = num / d
    if np.any(near):
        m = 0.5 * (u + v)
        (sN, lN), (dsN, dlN) = _sw_log_and_deriv(N, m, q)
        (sM, lM), (dsM, dlM) = _sw_log_and_deriv(N - 1, m, q)
        lw = log_weight_sw(m, p) + lratio
        diag = dsN * sM * np.exp(dlN + lM + lw) - dsM * sN * np.exp(dlM + lN + lw)
        off = np.where(near, diag, off)
    return _out(off)


def kernel_swe(x, y, p: QParams, route: str = "sum"):
    """Kernel in exponential coordinates, (2 pi / L) sqrt(u v) K_SW(u, v).

    This is the determinantal change-of-variables rule, so the trace
    int K(x, x) dx equals N.
    """
    u = x_to_u(x, p)
    v = x_to_u(y, p)
    return _out(2.0 * math.pi / p.L * np.sqrt(u * v) * kernel_sw(u, v, p, route))


def density_swe(x, p: QParams):
    """One-point density K(x, x) in exponential coordinates."""
    return kernel_swe(x, x, p)


# ---------------------------------------------------------------------------
# bulk limit
# ---------------------------------------------------------------------------

def bulk_xi(N: int) -> int:
    """Parity sign entering the bulk kernel: -1 for even N, +1 for odd N.

    This is the assignment under which the finite-N kernel converges.
    """
    return -1 if N % 2 == 0 else 1


def _lattice(y, p: QParams, xi: int, deriv: bool = False):
    y = np.asarray(y, float)
    q, c, L = p.q, p.c, p.L
    lq = math.log(q)
    K = int(math.ceil(math.sqrt(-40.0 / lq))) + 2
    shift = c * L * y / (2.0 * math.pi)
    nu = np.round(shift)[..., None] + np.arange(-K, K + 1)
    a = nu + 0.25 - shift[..., None]
    sg = np.where(nu % 2 == 0, 1.0, -1.0)
    t = sg * np.exp(a * a * lq)
    pre = np.exp(xi * math.pi * y / (2.0 * L) - lq / 16.0)
    val = pre * t.sum(-1)
    if not deriv:
        return val
    dsum = (t * 2.0 * a * lq * (-c * L / (2.0 * math.pi))).sum(-1)
    return val, xi * math.pi / (2.0 * L) * val + pre * dsum


def ell(y, p: QParams, xi: int, form: str = "lattice"):
    """The bulk building block, in lattice-sum or theta_3 form.

    lattice: e^{xi pi y/2L} q^{-1/16} sum_nu (-1)^nu q^{(nu + 1/4 - cLy/2pi)^2}
    theta3:  e^{(xi+1) pi y/2L} e^{-c y^2/2} theta_3(-q^{1/2} e^{2 pi y/L}; q)

    The two agree identically with the exponent 2 pi y / L inside theta_3.
    """
    if xi not in (-1, 1):
        raise ValueError("xi must be +1 or -1")
    if form == "lattice":
        return _out(_lattice(y, p, xi))
    if form != "theta3":
        raise ValueError(f"unknown form {form!r}")
    y = np.asarray(y, float)
    q, c, L = p.q, p.c, p.L
    flat = [theta3(-math.sqrt(q) * math.exp(2.0 * math.pi * t / L), q).real for t in y.ravel()]
    th = np.array(flat).reshape(y.shape)
    return _out(np.exp((xi + 1) * math.pi * y / (2.0 * L) - c * y * y / 2.0) * th)


def ell_hat(y, p: QParams, xi: int, deriv: bool = False):
    """e^{xi pi y/2L} theta_1(pi/4 + cLy/2 | qhat), qhat = e^{-cL^2/2}.

    With this sign of the exponential prefactor the theta_1 kernel equals
    the theta_3 kernel for the same xi.
    """
    y = np.asarray(y, float)
    qh = p.qhat
    arg = math.pi / 4.0 + p.c * p.L * y / 2.0
    pre = np.exp(xi * math.pi * y / (2.0 * p.L))
    val = pre * theta1(arg, qh)
    if not deriv:
        return _out(val)
    dv = xi * math.pi / (2.0 * p.L) * val + pre * theta1_prime(arg, qh) * p.c * p.L / 2.0
    return _out(val), _out(dv)


def kernel_bulk(x, y, p: QParams, form: str = "auto", xi: int | None = None):
    """N -> infinity kernel near the origin.

    ``form="theta3"`` uses ell with prefactor sqrt(c/pi)/(q;q)_inf^3;
    ``form="theta1"`` uses ell_hat with prefactor 1/(L theta_1'(0|qhat^2)).
    Both share the denominator 2 sinh(pi (x - y) / L).  The lattice sum
    behind ell cancels down to O(qhat) when q is close to 1, so ``"auto"``
    takes the theta_1 form whenever qhat < q.  ``xi`` defaults to the
    parity of ``p.N`` via :func:`bulk_xi`.
    """
    if xi is None:
        xi = bulk_xi(p.N)
    if form == "auto":
        form = "theta1" if p.qhat < p.q else "theta3"
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    L = p.L
    if form == "theta3":
        pref = math.sqrt(p.c / math.pi) * math.exp(-3.0 * log_qpochhammer_inf(p.q))
        f = lambda t: _lattice(t, p, xi)
        fd = lambda t: _lattice(t, p, xi, deriv=True)
    elif form == "theta1":
        pref = 1.0 / (L * theta1_prime0(p.qhat**2))
        f = lambda t: np.asarray(ell_hat(t, p, xi))
        fd = lambda t: tuple(np.asarray(a) for a in ell_hat(t, p, xi, deriv=True))
    else:
        raise ValueError(f"unknown form {form!r}")
    d = x - y
    near = np.abs(d) < _DIAG
    with np.errstate(divide="ignore", invalid="ignore"):
        off = pref * (f(x) * f(-y) - f(y) * f(-x)) / (2.0 * np.sinh(math.pi * d / L))
    if np.any(near):
        m = 0.5 * (x + y)
        v, dv = fd(m)
        vm, dvm = fd(-m)
        diag = pref * L / (2.0 * math.pi) * (dv * vm + v * dvm)
        off = np.where(near, diag, off)
    return _out(off)


def sine_limit_error(L_values, c: float = 1.0, n: int = 21, N_parity: int = 0):
    """sup |(2pi/cL) K_bulk(2pi x/cL, 2pi y/cL) - sinc(x - y)| on an n x n grid of [-2, 2]^2."""
    g = np.linspace(-2.0, 2.0, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    out = []
    for L in L_values:
        p = QParams.from_cL(2 if N_parity == 0 else 1, c, L)
        s = 2.0 * math.pi / (c * L)
        K = s * kernel_bulk(s * X, s * Y, p, form="theta1")
        out.append(float(np.max(np.abs(K - np.sinc(X - Y)))))
    return out


# ---------------------------------------------------------------------------
# edge limit
# ---------------------------------------------------------------------------

def _edge_parts(X, p: QParams, deriv: bool = False):
    """Log-domain A_q(q^{+1/2} a) and A_q(q^{-1/2} a), a = e^{2 pi X / L}."""
    q = p.q
    a = np.exp(2.0 * math.pi * np.asarray(X, float) / p.L)
    sq = math.sqrt(q)
    P = log_aq(sq * a, q, derivative=deriv)
    M = log_aq(a / sq, q, derivative=deriv)
    return a, P, M


def _signed_diff(s1, l1, s2, l2):
    """(sign, log) of s1 e^{l1} - s2 e^{l2}, stable when the two are close."""
    m = np.maximum(l1, l2)
    same = s1 == s2
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        gen = s1 * np.exp(l1 - m) - s2 * np.exp(l2 - m)
        # same signs: s1 e^{l1} (1 - e^{l2-l1}) = -s1 e^{l1} expm1(l2 - l1)
        stab = -s1 * np.exp(l1 - m) * np.expm1(l2 - l1)
        val = np.where(same, stab, gen)
        return np.sign(val), m + np.log(np.abs(val))


def kernel_edge(X, Y, p: QParams):
    """Left-edge kernel

        sqrt(c/pi)/(q;q)_inf * e^{-c (X^2+Y^2)/2}
        * [A(q^{1/2}a_X) A(q^{-1/2}a_Y) - A(q^{1/2}a_Y) A(q^{-1/2}a_X)]
        / (2 sinh(pi (X - Y)/L)),        a_X = e^{2 pi X / L}.

    The factor 2 in the denominator is what the finite-N kernel converges
    to.  Everything is assembled in log domain; the diagonal (|X-Y| < 1e-6)
    uses the derivative of the bracket.
    """
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    return _out(_edge_eval(X, Y, p))


def _edge_eval(X, Y, p: QParams, extra_log: float = 0.0):
    c, L = p.c, p.L
    logpref = 0.5 * math.log(c / math.pi) - log_qpochhammer_inf(p.q) + extra_log
    d = X - Y
    near = np.abs(d) < _DIAG
    out = np.empty(X.shape)
    if np.any(~near):
        Xo, Yo = X[~near], Y[~near]
        _, (sPx, lPx), (sMx, lMx) = _edge_parts(Xo, p)
        _, (sPy, lPy), (sMy, lMy) = _edge_parts(Yo, p)
        sb, lb = _signed_diff(sPx * sMy, lPx + lMy, sPy * sMx, lPy + lMx)
        t = math.pi * (Xo - Yo) / L
        ls = np.abs(t) + np.log(-np.expm1(-2.0 * np.abs(t)))    # log |2 sinh t|
        lg = logpref - c * (Xo**2 + Yo**2) / 2.0 + lb - ls
        out[~near] = sb * np.sign(t) * _safe_exp(lg)
    if np.any(near):
        m = 0.5 * (X[near] + Y[near])
        a, (sP, lP, dsP, dlP), (sM, lM, dsM, dlM) = _edge_parts(m, p, deriv=True)
        sq = math.sqrt(p.q)
        # d/dX of the bracket at X = Y, divided by 2 pi / L:
        # a [q^{1/2} A'(q^{1/2}a) A(q^{-1/2}a) - q^{-1/2} A(q^{1/2}a) A'(q^{-1/2}a)]
        sb, lb = _signed_diff(dsP * sM, dlP + lM + math.log(sq), sP * dsM, lP + dlM - math.log(sq))
        lg = logpref - c * m * m + np.log(a) + lb
        out[near] = sb * _safe_exp(lg)
    return out


def _safe_exp(lg):
    if np.any(lg > 709.0):
        raise NumericalPrecisionError("edge kernel overflows even after log-domain assembly")
    return np.exp(lg)


def kernel_edge_matrix(nodes, p: QParams):
    """Symmetric matrix K(x_i, x_j) on a node set, reusing the A_q values."""
    nodes = np.asarray(nodes, float)
    n = len(nodes)
    c, L = p.c, p.L
    logpref = 0.5 * math.log(c / math.pi) - log_qpochhammer_inf(p.q)
    a, (sP, lP, dsP, dlP), (sM, lM, dsM, dlM) = _edge_parts(nodes, p, deriv=True)
    sb, lb = _signed_diff((sP[:, None] * sM[None, :]), lP[:, None] + lM[None, :],
                          (sP[None, :] * sM[:, None]), lP[None, :] + lM[:, None])
    t = math.pi * (nodes[:, None] - nodes[None, :]) / L
    at = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ls = at + np.log(-np.expm1(-2.0 * at))
        g = -c * (nodes[:, None] ** 2 + nodes[None, :] ** 2) / 2.0
        K = sb * np.sign(t) * np.exp(logpref + g + lb - ls)
    sq = math.sqrt(p.q)
    sd, ld = _signed_diff(dsP * sM, dlP + lM + math.log(sq), sP * dsM, lP + dlM - math.log(sq))
    diag = sd * np.exp(logpref - c * nodes**2 + np.log(a) + ld)
    K[np.arange(n), np.arange(n)] = diag
    # enforce exact symmetry
    return 0.5 * (K + K.T)


def edge_to_x(X, p: QParams):
    """Exponential coordinate x = -pi N/(L c) + X."""
    return p.left_edge + np.asarray(X, float)


def airy_scaling(x, p: QParams):
    """X(x, L) = (L / 2pi) (log(1/4) - eps^{2/3} x), eps = 2 pi^2 / (c L^2)."""
    return p.L / (2.0 * math.pi) * (math.log(0.25) - p.eps ** (2.0 / 3.0) * np.asarray(x, float))


def airy_rescaled_edge(x, y, p: QParams, sign: int = 1):
    """sign * (L / 2pi) eps^{2/3} K_edge(X(x), Y(y)).

    With the 2 sinh denominator of :func:`kernel_edge` the limit eps -> 0 is
    the Airy kernel for sign = +1.  ``sign=-1`` reproduces the other sign
    convention for comparison.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    X = airy_scaling(x, p)
    Y = airy_scaling(y, p)
    lscale = math.log(p.L / (2.0 * math.pi)) + (2.0 / 3.0) * math.log(p.eps)
    return _out(sign * _edge_eval(X, Y, p, extra_log=lscale))


def airy_limit_error(eps: float, c: float = 1.0, n: int = 9) -> float:
    """sup |airy_rescaled_edge - airy_kernel| on an n x n grid of [-2, 2]^2."""
    L = math.pi * math.sqrt(2.0 / (c * eps))
    p = QParams.from_cL(1, c, L)
    g = np.linspace(-2.0, 2.0, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    return float(np.max(np.abs(airy_rescaled_edge(X, Y, p) - airy_kernel(X, Y))))


# ---------------------------------------------------------------------------
# finite-N convergence to the scaled kernels
# ---------------------------------------------------------------------------

def _grid(lo: float, hi: float, n: int):
    g = np.linspace(lo, hi, n)
    return np.meshgrid(g, g, indexing="ij")


def bulk_convergence_errors(Ns, c: float, L: float, n: int = 7, half: float = 1.0):
    """sup |K_SWe - K_bulk| near x = 0 for each N in ``Ns``."""
    X, Y = _grid(-half, half, n)
    out = []
    for N in Ns:
        p = QParams.from_cL(int(N), c, L)
        diff = kernel_swe(X.ravel(), Y.ravel(), p) - kernel_bulk(X.ravel(), Y.ravel(), p, xi=bulk_xi(int(N)))
        out.append(float(np.max(np.abs(diff))))
    return np.array(out)


def edge_convergence_errors(Ns, c: float, L: float, n: int = 7, lo: float = -2.0, hi: float = 2.0):
    """sup |K_SWe(left_edge + X, left_edge + Y) - K_edge(X, Y)| for each N."""
    X, Y = _grid(lo, hi, n)
    ref = np.asarray(kernel_edge(X.ravel(), Y.ravel(), QParams.from_cL(1, c, L)))
    out = []
    for N in Ns:
        p = QParams.from_cL(int(N), c, L)
        e = p.left_edge
        out.append(float(np.max(np.abs(kernel_swe(e + X.ravel(), e + Y.ravel(), p) - ref))))
    return np.array(out)


def fitted_log_rate(Ns, errors) -> float:
    """Slope of log(error) against N by least squares."""
    return float(np.polyfit(np.asarray(Ns, float), np.log(errors), 1)[0])


def kernel_trace(p: QParams, nodes: int = 200) -> float:
    """int K_SWe(x, x) dx by Gauss-Legendre over the Gaussian-truncated support."""
    half = abs(p.left_edge) + 9.0 / math.sqrt(p.c)
    t, w = np.polynomial.legendre.leggauss(nodes)
    return float(half * np.sum(w * np.asarray(density_swe(half * t, p))))
