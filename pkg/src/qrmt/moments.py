"""Exact finite-N averages: Schur averages, hooks and power-sum moments.

All values returned here are the scaled quantities q^{N|kappa|} <s_kappa>
and q^{N l} m_l, which stay of moderate size.  Base-1/q objects are turned
into base-q products via [n, m]_{1/q} = q^{-m(n-m)} [n, m]_q and
1 - q^{-m} = -q^{-m} (1 - q^m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import QParams, log_abs_sinh
from .errors import NumericalPrecisionError
from .qcore import check_q, phi21_terminating, qbinomial
from .signedlog import SignedLog, slsum


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing non-negative parts."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(k) for k in self.parts)
        if any(k < 0 for k in parts):
            raise ValueError("partition parts must be non-negative")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def padded(self, N: int) -> tuple:
        if len(self.parts) > N and any(self.parts[N:]):
            raise ValueError(f"partition {self.parts} has more than {N} nonzero parts")
        return (self.parts + (0,) * N)[:N]


@dataclass(frozen=True)
class MomentResult:
    """q^{N l} m_l together with the route that produced it."""

    l: int
    value: SignedLog
    route: str
    alternatives: dict

    def __float__(self):
        return float(self.value)


def _as_partition(kappa) -> Partition:
    return kappa if isinstance(kappa, Partition) else Partition(tuple(kappa))


def partitions(n: int, maxlen: int, maxpart: int | None = None):
    """All partitions of n with at most ``maxlen`` parts."""
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    if maxlen == 0:
        return
    for first in range(min(n, maxpart), 0, -1):
        for rest in partitions(n - first, maxlen - 1, first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# Schur averages
# ---------------------------------------------------------------------------

def schur_average_product(kappa, p: QParams) -> SignedLog:
    """q^{N|k|} <s_k> = q^{-sum k_l^2 / 2} prod_{j<k} (1 - q^{-(k_j - j - k_k + k)}) / (1 - q^{-(k - j)})."""
    N, q = p.N, p.q
    kap = _as_partition(kappa).padded(N)
    lq = math.log(q)
    sign, acc = 1, -0.5 * sum(k * k for k in kap) * lq
    for j in range(N):
        for k in range(j + 1, N):
            a = kap[j] - j - kap[k] + k      # >= k - j > 0
            b = k - j
            # (1 - q^{-a}) / (1 - q^{-b}) = q^{b-a} (1 - q^a) / (1 - q^b)
            acc += (b - a) * lq + math.log1p(-q**a) - math.log1p(-q**b)
    return SignedLog(sign, acc)


def _logdet_full_pivot(logM: np.ndarray):
    """Signed log-determinant of exp(logM) by elimination with full pivoting.

    Rows and columns are first rescaled by their log maxima so that every
    entry is at most 1; the scales are added back at the end.  Returns
    (sign, logdet, pivot_spread).
    """
    A = np.array(logM, dtype=float)
    n = A.shape[0]
    cs = A.max(axis=0)
    A = A - cs[None, :]
    rs = A.max(axis=1)
    A = np.exp(A - rs[:, None])
    sign, acc = 1.0, float(cs.sum() + rs.sum())
    piv = []
    for i in range(n):
        sub = np.abs(A[i:, i:])
        r, c = np.unravel_index(np.argmax(sub), sub.shape)
        r += i
        c += i
        if A[r, c] == 0.0:
            return 0.0, -math.inf, math.inf
        if r != i:
            A[[i, r]] = A[[r, i]]
            sign = -sign
        if c != i:
            A[:, [i, c]] = A[:, [c, i]]
            sign = -sign
        pv = A[i, i]
        piv.append(abs(pv))
        sign *= math.copysign(1.0, pv)
        acc += math.log(abs(pv))
        if i + 1 < n:
            f = A[i + 1:, i] / pv
            A[i + 1:, i:] -= np.outer(f, A[i, i:])
    spread = max(piv) / min(piv)
    return sign, acc, spread


def schur_average_det(kappa, p: QParams) -> SignedLog:
    """Determinant route: det[q^{-(j-k+kappa_k)^2/2}] / det[same at kappa = 0].

    The ratio of determinants of log-normal moments equals
    q^{N|kappa|} <s_kappa> directly; no further q-power bookkeeping is
    needed once the kappa = 0 normalisation is divided out.
    """
    N, q = p.N, p.q
    if N > 12:
        raise ValueError("determinant route is limited to N <= 12")
    kap = np.array(_as_partition(kappa).padded(N))
    lq = math.log(q)
    j = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    s1, l1, sp1 = _logdet_full_pivot(-0.5 * (j - k + kap[None, :]) ** 2 * lq)
    s0, l0, sp0 = _logdet_full_pivot(-0.5 * (j - k) ** 2 * lq * 1.0)
    relerr = np.finfo(float).eps * N * max(sp1, sp0)
    if relerr > 1e-8:
        raise NumericalPrecisionError(
            f"determinant route too ill-conditioned (estimated rel. error {relerr:.2g})")
    return SignedLog(int(s1 * s0), l1 - l0)


def hook_schur_average(l: int, r: int, p: QParams) -> SignedLog:
    """q^{N l} <s_{(l-r, 1^r)}> = q^{-(l-r)^2/2 - r/2} [N+l-r-1, l]_{1/q} [l-1, r]_{1/q}."""
    N, q = p.N, p.q
    if not (l - r >= 1 and 0 <= r <= N - 1):
        raise ValueError(f"hook needs l - r >= 1 and 0 <= r <= N-1 (l={l}, r={r}, N={N})")
    lq = math.log(q)
    b1 = qbinomial(N + l - r - 1, l, 1.0 / q)
    b2 = qbinomial(l - 1, r, 1.0 / q)
    return SignedLog(1, -(0.5 * (l - r) ** 2 + 0.5 * r) * lq) * b1 * b2


# ---------------------------------------------------------------------------
# power sums
# ---------------------------------------------------------------------------

def _phi21_route(l: int, p: QParams) -> SignedLog:
    q = p.q
    # -(-q^{-1/2})^l / (1 - q^{-l}) = (-1)^{l+1} q^{-l/2} * (-q^l / (1 - q^l)) ... written out:
    # 1 - q^{-l} = -q^{-l} (1 - q^l), so the prefactor is (-1)^l q^{l/2} / (1 - q^l)
    pref = SignedLog((-1) ** l, 0.5 * l * math.log(q) - math.log1p(-q**l))
    return pref * phi21_terminating(l, p.N, q)


def _hook_route(l: int, p: QParams) -> SignedLog:
    terms = []
    for r in range(min(l - 1, p.N - 1) + 1):
        h = hook_schur_average(l, r, p)
        terms.append(h if r % 2 == 0 else -h)
    return slsum(terms)


def _det_route(l: int, p: QParams) -> SignedLog:
    terms = []
    for r in range(min(l - 1, p.N - 1) + 1):
        kap = (l - r,) + (1,) * r
        h = schur_average_det(kap, p)
        terms.append(h if r % 2 == 0 else -h)
    return slsum(terms)


_ROUTES = {"phi21": _phi21_route, "hook": _hook_route, "det": _det_route}


def power_sum_moment(l: int, p: QParams, routes=("phi21", "hook")) -> MomentResult:
    """q^{N l} m_l, where m_l = <sum_j u_j^l> in SW coordinates.

    The first route in ``routes`` supplies ``value``; the others are kept in
    ``alternatives`` for cross-checking.  Negative l uses the inversion
    symmetry q^{-N l} m_{-l} = q^{N l} m_l, so the scaled value for -l is
    the same number as for +l (and m_{-l} = q^{2 N l} m_l).
    """
    if l == 0:
        raise ValueError("l = 0 is trivial (m_0 = N)")
    la = abs(l)
    vals = {}
    for r in routes:
        if r not in _ROUTES:
            raise ValueError(f"unknown route {r!r}")
        vals[r] = _ROUTES[r](la, p)
    first = routes[0]
    return MomentResult(l, vals[first], first, {k: v for k, v in vals.items() if k != first})


def raw_moment(l: int, p: QParams) -> SignedLog:
    """m_l itself (unscaled), for either sign of l."""
    v = power_sum_moment(l, p).value
    return v * SignedLog(1, l * p.N * p.eps)


def cross_route_reldiff(l: int, p: QParams, routes=("phi21", "hook", "det")) -> float:
    vals = [float(_ROUTES[r](abs(l), p)) for r in routes]
    ref = vals[0]
    return max(abs(v / ref - 1.0) for v in vals[1:]) if len(vals) > 1 else 0.0


def jacobi_p(l: int, p: QParams) -> float:
    """p_l = little q-Jacobi value recovered from the scaled moment.

    The moment is (-1)^l q^{l/2}/(1 - q^l) * p_l, inverted here.  p_0 = 1.
    """
    if l == 0:
        return 1.0
    q = p.q
    return float(phi21_terminating(l, p.N, q))


def recurrence_coefficient(l: int, q: float) -> float:
    """A_l = (q^{(l+1)/2} - q^{-(l+1)/2})(q^{l/2} - q^{-l/2}) / ((q^{l+1/2} - q^{-l-1/2})(q^l - q^{-l}))."""
    def sh(t):
        return q**t - q ** (-t)
    return sh((l + 1) / 2) * sh(l / 2) / (sh(l + 0.5) * sh(l))


def moment_recurrence_check(lmax: int, p: QParams) -> float:
    """Largest relative residual of -q^{-N} p_l = A_l p_{l+1} - (A_l + A_{-l}) p_l + A_{-l} p_{l-1}."""
    if lmax < 2:
        raise ValueError("lmax must be at least 2")
    q = check_q(p.q)
    ps = [jacobi_p(l, p) for l in range(lmax + 1)]
    worst = 0.0
    for l in range(1, lmax):
        A, Am = recurrence_coefficient(l, q), recurrence_coefficient(-l, q)
        lhs = -(q ** -p.N) * ps[l]
        terms = [A * ps[l + 1], -(A + Am) * ps[l], Am * ps[l - 1]]
        scale = max(abs(lhs), *(abs(t) for t in terms))
        worst = max(worst, abs(lhs - math.fsum(terms)) / scale)
    return worst


# ---------------------------------------------------------------------------
# scaled large-N coefficients
# ---------------------------------------------------------------------------

def mu0(l: int, lam: float) -> float:
    """Leading scaled moment (-1)^l / (lam l) 2F1(-l, l; 1; e^lam), summed exactly.

    2F1(-l, l; 1; x) = sum_k (-l)_k (l)_k / (k!)^2 x^k, a polynomial of degree l.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    x = math.exp(lam)
    terms = []
    for k in range(l + 1):
        # (-l)_k (l)_k / k!^2 = (-1)^k C(l, k) C(l+k-1, k)
        coef = (-1) ** k * math.comb(l, k) * (math.comb(l + k - 1, k) if k else 1)
        terms.append(coef * x**k)
    return (-1) ** l / (lam * l) * math.fsum(terms)


def mu2(l: int, lam: float) -> float:
    """1/N^2 correction to the scaled moment.

        (lam^2 / 24) sum_{p=1}^{l} (-1)^{l+p} (e^{lam p} - 1)/(lam p)
            C(l, p) C(l+p-1, l) ((2p - 1) l^2 - 2 p^2)

    The alternating factor (-1)^{l+p} is needed for agreement with the
    exact finite-N moments (checked by Richardson extrapolation in N).
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    terms = []
    for pp in range(1, l + 1):
        terms.append((-1) ** (l + pp) * math.expm1(lam * pp) / (lam * pp)
                     * math.comb(l, pp) * math.comb(l + pp - 1, l)
                     * ((2 * pp - 1) * l * l - 2 * pp * pp))
    return lam * lam / 24.0 * math.fsum(terms)


def rs_moment(l: int, lam: float) -> float:
    """Rogers-Szego scaled moment: mu0 with lam -> -lam/2."""
    if l < 1:
        raise ValueError("l must be a positive integer")
    return mu0(l, -0.5 * lam)


def scaled_moment(l: int, N: int, lam: float) -> float:
    """q^{N l} m_l / N at q = exp(-lam/N)."""
    p = QParams.scaled(N, lam)
    return float(power_sum_moment(l, p, routes=("phi21",)).value) / N


# ---------------------------------------------------------------------------
# direct quadrature oracle for small N
# ---------------------------------------------------------------------------

def moment_by_quadrature(l: int, p: QParams, nodes: int = 60) -> float:
    """<sum_j e^{2 pi l x_j / L}> = q^{N l} m_l by tensor Gauss-Hermite quadrature.

    By symmetry the average is N <e^{a x_1}> with a = 2 pi l / L.  Completing
    the square moves the factor e^{a x_1} into a shift of x_1 by a/(2c), so
    the Hermite nodes sit where the integrand lives.  Practical for N <= 3.
    """
    if p.N > 3:
        raise ValueError("tensor quadrature is only practical for N <= 3")
    t, w = np.polynomial.hermite.hermgauss(nodes)
    x1 = t / math.sqrt(p.c)
    X = np.stack([g.ravel() for g in np.meshgrid(*([x1] * p.N), indexing="ij")], axis=-1)
    W = np.ones(len(X))
    for g in np.meshgrid(*([w] * p.N), indexing="ij"):
        W = W * g.ravel()

    def log_pair(Z):
        out = np.zeros(len(Z))
        for j in range(p.N):
            for k in range(j + 1, p.N):
                out += 2.0 * log_abs_sinh(math.pi * (Z[:, j] - Z[:, k]) / p.L)
        return out

    a = 2.0 * math.pi * l / p.L
    Xs = X.copy()
    Xs[:, 0] += a / (2.0 * p.c)
    num = np.log(np.sum(W * np.exp(log_pair(Xs))))
    den = np.log(np.sum(W * np.exp(log_pair(X))))
    return float(p.N * np.exp(a * a / (4.0 * p.c) + num - den))
