"""Scalar q-special functions and the classical Airy function.

Everything here works for a real base ``0 < q < 1``.  Objects that are
naturally written in base ``1/q`` are reduced to finite products in base
``q`` before any arithmetic happens.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .signedlog import SignedLog, slsum

_TINY = 1e-17


def check_q(q: float) -> float:
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"base q must lie strictly inside (0, 1), got {q}")
    return q


# ---------------------------------------------------------------------------
# q-Pochhammer symbols and q-binomials
# ---------------------------------------------------------------------------

def qpochhammer(a: float, q: float, n: int) -> SignedLog:
    """Finite q-Pochhammer symbol (a; q)_n = prod_{j<n} (1 - a q^j).

    >>> float(qpochhammer(0.5, 0.5, 3))
    0.328125
    """
    check_q(q)
    if n < 0:
        raise ValueError("n must be non-negative")
    sign, acc = 1, 0.0
    for j in range(n):
        f = 1.0 - a * q**j
        if f == 0.0:
            return SignedLog.zero()
        if f < 0:
            sign = -sign
        acc += math.log(abs(f))
    return SignedLog(sign, acc)


def log_qpochhammer_inf(q: float) -> float:
    """log (q; q)_inf, summed with log1p until the factors stop mattering."""
    check_q(q)
    lq = math.log(q)
    jmax = int(math.ceil(math.log(_TINY) / lq)) + 1
    j = np.arange(1, jmax + 1, dtype=float)
    return float(math.fsum(np.log1p(-np.exp(j * lq))))


def qpochhammer_inf(q: float) -> float:
    """Infinite product (q; q)_inf."""
    return math.exp(log_qpochhammer_inf(q))


def qbinomial(n: int, m: int, q: float) -> SignedLog:
    """Gaussian binomial coefficient [n, m]_q.

    ``q`` may also be an inverse base (q > 1); then the identity
    [n, m]_{1/p} = p^{-m(n-m)} [n, m]_p is used so that only base-p
    products are ever formed.
    """
    if m < 0 or n < 0 or m > n:
        raise ValueError(f"q-binomial needs 0 <= m <= n, got n={n}, m={m}")
    q = float(q)
    if q <= 0:
        raise ValueError("q-binomial base must be positive")
    if q == 1.0:
        return SignedLog.from_float(math.comb(n, m))
    if q > 1.0:
        p = 1.0 / q
        b = qbinomial(n, m, p)
        return SignedLog(b.sign, b.logmag - m * (n - m) * math.log(p))
    acc = 0.0
    for j in range(1, m + 1):
        acc += math.log1p(-q ** (n - m + j)) - math.log1p(-q**j)
    return SignedLog(1, acc)


# ---------------------------------------------------------------------------
# theta functions
# ---------------------------------------------------------------------------

def _theta_window(q: float, center: float) -> np.ndarray:
    # terms q^{(n-center)^2} fall below 1e-17 of the peak once |n-center| > K
    K = int(math.ceil(math.sqrt(math.log(_TINY) / math.log(q)))) + 2
    return np.arange(math.floor(center) - K, math.ceil(center) + K + 1)


def theta3(z, q: float) -> complex:
    """theta_3(z; q) = sum_n q^{n^2} z^n for nonzero (possibly complex) z."""
    check_q(q)
    z = complex(z)
    if z == 0:
        raise ValueError("theta3 needs z != 0")
    lq = math.log(q)
    # the summand peaks near n0 = -log|z| / (2 log q)
    n0 = -math.log(abs(z)) / (2.0 * lq)
    n = _theta_window(q, n0)
    logterm = n * n * lq + n * np.log(z)
    return complex(np.sum(np.exp(logterm)))


def theta1(x, q: float):
    """theta_1(x | q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) x).

    Equal to -i sum_n (-1)^n q^{(n+1/2)^2} e^{2i(n+1/2)x} and real for real x.
    """
    check_q(q)
    x = np.asarray(x, dtype=float)
    n = np.arange(0, _theta_window(q, 0.0)[-1] + 1)
    w = 2.0 * (-1.0) ** n * q ** ((n + 0.5) ** 2)
    out = np.tensordot(np.sin(np.multiply.outer(x, 2 * n + 1)), w, axes=([-1], [0]))
    return out if out.ndim else float(out)


def theta1_prime(x, q: float):
    """Derivative of theta1 in x."""
    check_q(q)
    x = np.asarray(x, dtype=float)
    n = np.arange(0, _theta_window(q, 0.0)[-1] + 1)
    w = 2.0 * (-1.0) ** n * q ** ((n + 0.5) ** 2) * (2 * n + 1)
    out = np.tensordot(np.cos(np.multiply.outer(x, 2 * n + 1)), w, axes=([-1], [0]))
    return out if out.ndim else float(out)


def theta1_prime0(q: float) -> float:
    return float(theta1_prime(0.0, q))


# ---------------------------------------------------------------------------
# Ramanujan's function A_q(z) = sum q^{n^2} (-z)^n / (q;q)_n
# ---------------------------------------------------------------------------

def _aq_series(x: np.ndarray, q: float):
    """Direct series for A_q and A_q' on an array.

    Truncates once the term is below 1e-18 of the running maximum partial
    sum, which is robust to the alternating cancellation for x > 0.
    """
    x = np.asarray(x, dtype=float)
    s = np.ones_like(x)
    ds = np.zeros_like(x)
    term = np.ones_like(x)      # q^{k^2} (-x)^k / (q;q)_k
    dterm = np.ones_like(x)     # k q^{k^2} (-1)^k x^{k-1} / (q;q)_k, built from term
    runmax = np.ones_like(x)
    k = 0
    while True:
        k += 1
        qk = q**k
        if qk == 1.0:
            break
        ratio = -q ** (2 * k - 1) / (1.0 - qk)
        dterm = term * ratio * k           # uses the previous term, before multiplying by x
        term = term * ratio * x
        s = s + term
        ds = ds + dterm
        runmax = np.maximum(runmax, np.abs(s))
        big = np.maximum(np.abs(term), np.abs(dterm) * np.maximum(np.abs(x), 1.0))
        if k > 3 and np.all(big < 1e-18 * runmax):
            break
        if k > 100000:
            break
    return s, ds


def log_aq(z, q: float, derivative: bool = False):
    """A_q(z) (and optionally A_q'(z)) as sign and log magnitude arrays.

    For z above ~2*eps (q = e^{-eps}) the value is built upward from a
    small argument through the q-difference equation
    q z A(q^2 z) - A(q z) + A(z) = 0, rescaling as it goes.  This avoids
    the catastrophic cancellation of the power series when q is close to 1.

    Returns ``(sign, logabs)`` or, with ``derivative=True``,
    ``(sign, logabs, dsign, dlogabs)``.
    """
    check_q(q)
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    eps = -math.log(q)
    thresh = 2.0 * eps
    n = np.zeros(z.shape, dtype=np.int64)
    up = z > thresh
    n[up] = np.ceil(np.log(z[up] / thresh) / eps).astype(np.int64)

    f0 = np.empty_like(z)
    f1 = np.empty_like(z)
    d0 = np.empty_like(z)
    d1 = np.empty_like(z)
    x0 = z * q**n
    f0[:], d0[:] = _aq_series(x0, q)
    if np.any(up):
        a, b = _aq_series(x0[up] / q, q)
        f1[up], d1[up] = a, b
    f1[~up], d1[~up] = f0[~up], d0[~up]
    logscale = np.zeros_like(z)

    nmax = int(n.max()) if n.size else 0
    for j in range(2, nmax + 1):
        act = n >= j
        if not np.any(act):
            break
        x = z[act] * q ** (n[act] - j).astype(float)
        a0, a1, b0, b1 = f0[act], f1[act], d0[act], d1[act]
        f2 = a1 - q * x * a0
        d2 = q * b1 - q * a0 - q**3 * x * b0
        a0, a1, b0, b1 = a1, f2, b1, d2
        m = np.maximum.reduce([np.abs(a0), np.abs(a1), np.abs(b0), np.abs(b1)])
        resc = (m > 1e100) | (m < 1e-100)
        if np.any(resc):
            r = np.where(resc, m, 1.0)
            a0, a1, b0, b1 = a0 / r, a1 / r, b0 / r, b1 / r
            ls = logscale[act]
            ls += np.log(r)
            logscale[act] = ls
        f0[act], f1[act], d0[act], d1[act] = a0, a1, b0, b1

    # after the loop the value at z sits in f1 for stepped entries
    val = np.where(n >= 1, f1, f0)
    dval = np.where(n >= 1, d1, d0)
    with np.errstate(divide="ignore"):
        sgn = np.sign(val).reshape(shape)
        lg = (np.log(np.abs(val)) + logscale).reshape(shape)
        dsgn = np.sign(dval).reshape(shape)
        dlg = (np.log(np.abs(dval)) + logscale).reshape(shape)
    if shape == ():
        sgn, lg, dsgn, dlg = float(sgn), float(lg), float(dsgn), float(dlg)
    if derivative:
        return sgn, lg, dsgn, dlg
    return sgn, lg


def aq(z, q: float):
    """Ramanujan function A_q(z) = sum_n q^{n^2} (-z)^n / (q; q)_n."""
    s, l = log_aq(z, q)
    out = s * np.exp(l)
    return float(out) if np.ndim(out) == 0 else out


def aq_prime(z, q: float):
    """Derivative of A_q in z."""
    _, _, s, l = log_aq(z, q, derivative=True)
    out = s * np.exp(l)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# terminating basic hypergeometric sum
# ---------------------------------------------------------------------------

def phi21_terminating(l: int, N: int, q: float) -> SignedLog:
    """2phi1(q^l, q^{-l}; q^{-1} | q^{-1}; q^{-N-1}), a sum of l+1 terms.

    With 1 - q^{-m} = -q^{-m}(1 - q^m) every base-1/q Pochhammer symbol
    becomes a base-q one times a power of q, giving

        term_n = (-1)^n (q^{l-n+1}; q)_n (q^l; q)_n / (q; q)_n^2
                 * q^{n^2/2 + n/2 - n l - N n}.
    """
    check_q(q)
    if l < 1 or N < 1:
        raise ValueError("need l >= 1 and N >= 1")
    lq = math.log(q)
    terms = []
    for n in range(l + 1):
        num = qpochhammer(q ** (l - n + 1), q, n) * qpochhammer(q**l, q, n)
        den = qpochhammer(q, q, n) ** 2
        t = num / den
        expo = (0.5 * n * n + 0.5 * n - n * l - N * n) * lq
        terms.append(SignedLog((-1) ** n * t.sign, t.logmag + expo))
    return slsum(terms)


# ---------------------------------------------------------------------------
# Airy function and kernel
# ---------------------------------------------------------------------------

def airy_ai(x):
    """Airy function Ai(x)."""
    out = special.airy(x)[0]
    return float(out) if np.ndim(out) == 0 else out


def airy_ai_prime(x):
    """Derivative Ai'(x)."""
    out = special.airy(x)[1]
    return float(out) if np.ndim(out) == 0 else out


def airy_kernel(x, y):
    """Airy kernel (Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y).

    On (and within 1e-6 of) the diagonal the limit Ai'(m)^2 - m Ai(m)^2 is
    used at the midpoint m, which is second-order accurate.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    ax, apx, _, _ = special.airy(x)
    ay, apy, _, _ = special.airy(y)
    d = x - y
    near = np.abs(d) < 1e-6
    m = 0.5 * (x + y)
    am, apm, _, _ = special.airy(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (ax * apy - ay * apx) / d
    out = np.where(near, apm**2 - m * am**2, off)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# A_q near z = 1/4 as q -> 1
# ---------------------------------------------------------------------------

def log_aq_asymptotic(z, q: float, form: str = "refined"):
    """Leading Airy-type approximation to log A_q(z) near z = 1/4, q = e^{-eps}.

    Both forms share the exponential scale beta/eps with
    beta = log(z)^2/4 + pi^2/12.

    ``"naive"``: log((q;q)_inf / 2) + beta/eps
    + log(Ai(t) eps^{1/3} - Ai'(t) eps^{2/3}), with t = (1 - 4z)/eps^{2/3}.

    ``"refined"``: prefactor (q;q)_inf with no 1/2, Ai' weight 1/2, and
    t = -log(4z)/eps^{2/3}.  Numerically this one is within a few eps of
    the true value; the naive form carries a constant log 2 offset.
    """
    check_q(q)
    z = np.asarray(z, float)
    eps = -math.log(q)
    beta = np.log(z) ** 2 / 4.0 + math.pi**2 / 12.0
    if form == "naive":
        t = (1.0 - 4.0 * z) / eps ** (2.0 / 3.0)
        const, w = log_qpochhammer_inf(q) - math.log(2.0), 1.0
    elif form == "refined":
        t = -np.log(4.0 * z) / eps ** (2.0 / 3.0)
        const, w = log_qpochhammer_inf(q), 0.5
    else:
        raise ValueError(f"unknown form {form!r}")
    ai, aip, _, _ = special.airy(t)
    out = const + beta / eps + np.log(ai * eps ** (1.0 / 3.0) - w * aip * eps ** (2.0 / 3.0))
    return float(out) if out.ndim == 0 else out


def aq_asymptotic_residual(eps: float, t_values=None, form: str = "refined") -> float:
    """sup |log A_q(z) - log_aq_asymptotic(z)| over z = (1 - eps^{2/3} t)/4."""
    t = np.linspace(-2.0, 2.0, 41) if t_values is None else np.asarray(t_values, float)
    q = math.exp(-eps)
    z = (1.0 - eps ** (2.0 / 3.0) * t) / 4.0
    _, exact = log_aq(z, q)
    return float(np.max(np.abs(exact - log_aq_asymptotic(z, q, form))))
