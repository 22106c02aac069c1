"""Self-verification suite.

Each ``check_*`` function measures one group of properties and returns a
:class:`CheckResult` whose ``parts`` record the measured value, the
tolerance and the verdict for every sub-check.  The CLI ``verify``
command and the acceptance tests both run these.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import density as dn
from . import gap as gp
from . import kernels as kr
from . import moments as mo
from . import qcore as qc
from .ensemble import QParams


@dataclass
class Part:
    name: str
    value: float
    tol: float
    passed: bool
    note: str = ""


@dataclass
class CheckResult:
    criterion: int
    name: str
    parts: list = field(default_factory=list)
    seconds: float = 0.0
    budget: float = math.inf

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.parts) and self.seconds <= self.budget

    def add(self, name, value, tol, passed=None, note=""):
        value = float(value)
        ok = (value <= tol) if passed is None else bool(passed)
        self.parts.append(Part(name, value, float(tol), ok, note))

    def summary(self) -> str:
        bad = [p.name for p in self.parts if not p.passed]
        if self.seconds > self.budget:
            bad.append(f"runtime {self.seconds:.1f}s > {self.budget:.0f}s")
        tag = "PASS" if self.passed else "FAIL"
        tail = "" if not bad else " (failed: " + ", ".join(bad) + ")"
        return f"[{tag}] criterion {self.criterion:2d} {self.name} {self.seconds:.1f}s{tail}"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["budget"] = None if math.isinf(self.budget) else self.budget
        return d


def _timed(criterion, name, budget):
    def deco(fn):
        def run() -> CheckResult:
            res = CheckResult(criterion, name, budget=budget)
            t0 = time.perf_counter()
            fn(res)
            res.seconds = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@_timed(1, "moment cross-route identity", 10.0)
def check_moment_routes(res: CheckResult):
    worst = 0.0
    for q in (0.3, 0.5, 0.8):
        for N in range(1, 7):
            p = QParams.from_q(N, q)
            for l in range(1, 9):
                worst = max(worst, mo.cross_route_reldiff(l, p))
    res.add("phi21 / hook / det relative spread", worst, 1e-10)
    worst = 0.0
    for q in (0.3, 0.5, 0.8):
        for N in (1, 2, 3):
            p = QParams.from_q(N, q)
            for l in range(1, 9):
                exact = float(mo.power_sum_moment(l, p).value)
                worst = max(worst, abs(mo.moment_by_quadrature(l, p) / exact - 1.0))
    res.add("quadrature vs exact, N <= 3", worst, 1e-6)


@_timed(2, "Schur product vs determinant", 5.0)
def check_schur_product(res: CheckResult):
    worst = 0.0
    for q in (0.3, 0.5, 0.8):
        for N in range(1, 6):
            p = QParams.from_q(N, q)
            for n in range(0, 5):
                for kappa in mo.partitions(n, N):
                    a = float(mo.schur_average_product(kappa, p))
                    b = float(mo.schur_average_det(kappa, p))
                    worst = max(worst, abs(a / b - 1.0))
    res.add("product / determinant relative difference", worst, 1e-10)


@_timed(3, "scaled moments 1/N^2 correction", 10.0)
def check_scaled_moments(res: CheckResult, lam: float = 1.0, Ns=(40, 80, 160)):
    for l in range(1, 5):
        m0 = mo.mu0(l, lam)
        d = np.array([mo.scaled_moment(l, N, lam) - m0 for N in Ns])
        slope = np.polyfit(np.log(Ns), np.log(np.abs(d)), 1)[0]
        res.add(f"l={l} log-log slope + 2", abs(slope + 2.0), 0.05)
        e = d * np.asarray(Ns, float) ** 2
        coef = (4.0 * e[-1] - e[-2]) / 3.0
        res.add(f"l={l} 1/N^2 coefficient vs mu2 (rel)", abs(coef / mo.mu2(l, lam) - 1.0), 0.02)


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

@_timed(4, "global density", 30.0)
def check_density(res: CheckResult, lam: float = 1.0):
    res.add("|mass - 1|", abs(dn.integrate_rho(np.ones_like, lam) - 1.0), 1e-8)
    res.add("max |moment - mu0|, l <= 5",
            max(abs(dn.density_moment(l, lam) - mo.mu0(l, lam)) for l in range(1, 6)), 1e-7)
    sp = dn.support(lam)
    el = math.exp(lam)
    pts = [0.5 * sp.z_minus * el, el * (sp.z_minus + 0.3 * sp.width), el,
           el * (sp.z_minus + 0.8 * sp.width), 2.0 * sp.z_plus * el]
    res.add("functional equation residual, 5 points",
            max(dn.functional_eq_residual(x, lam) for x in pts), 1e-4)
    xs = sp.z_minus + sp.width * (np.arange(50) + 0.5) / 50
    res.add("Stieltjes inversion vs rho, 50 points",
            max(abs(dn.stieltjes_inversion(x, lam) - dn.rho(x, lam)) for x in xs), 1e-6)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@_timed(5, "finite-N and bulk/edge kernels", 60.0)
def check_kernels(res: CheckResult):
    rng = np.random.default_rng(12345)
    worst = 0.0
    for q in (0.3, 0.6):
        for N in range(1, 9):
            p = QParams.from_q(N, q)
            u, v = rng.uniform(0.2, 3.0, (2, 10)) * q ** (-N / 2)
            a = np.asarray(kr.kernel_sw(u, v, p, route="sum"))
            b = np.asarray(kr.kernel_sw(u, v, p, route="cd"))
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))))
    res.add("sum vs Christoffel-Darboux (rel)", worst, 1e-10)

    c = 1.0
    L = math.sqrt(8.0) * math.pi / math.sqrt(c)      # c L^2 = 8 pi^2
    g = np.linspace(-1.5, 1.5, 10)
    X, Y = np.meshgrid(g, g, indexing="ij")
    worst = 0.0
    for N in (2, 3):
        p = QParams.from_cL(N, c, L)
        a = np.asarray(kr.kernel_bulk(X, Y, p, form="theta3"))
        b = np.asarray(kr.kernel_bulk(X, Y, p, form="theta1"))
        worst = max(worst, float(np.max(np.abs(a - b))))
    res.add("bulk theta3 form vs theta1 form", worst, 1e-8)

    c, L = 1.0 / (2.0 * math.log(2.0)), 2.0 * math.pi      # q = 1/2
    logq = math.log(0.5)
    Ns = list(range(10, 26))
    rb = kr.fitted_log_rate(Ns, kr.bulk_convergence_errors(Ns, c, L))
    res.add("finite-N -> bulk rate vs log q (rel)", abs(rb / logq - 1.0), 0.15,
            note=f"fitted {rb:.4f}, log q {logq:.4f}")
    re_ = kr.fitted_log_rate(Ns, kr.edge_convergence_errors(Ns, c, L))
    res.add("finite-N -> edge rate vs log q (rel)", abs(re_ / logq - 1.0), 0.15,
            note=f"fitted {re_:.4f}, log q {logq:.4f}")

    worst = 0.0
    for N in range(1, 6):
        p = QParams.from_q(N, 0.5)
        worst = max(worst, abs(kr.kernel_trace(p) - N))
    res.add("trace of K_SWe minus N, N <= 5", worst, 1e-6)


@_timed(6, "sine limit", 10.0)
def check_sine(res: CheckResult, c: float = 1.0):
    # q_hat = exp(-c L^2 / 2) < 1e-6 once L > sqrt(12 log 10 / c) ~ 5.26
    Ls = [5.3, 6.0, 7.0, 8.0]
    errs = kr.sine_limit_error(Ls, c)
    res.add("max sup-error once q_hat < 1e-6", max(errs), 1e-2)
    res.add("error non-increasing in L", 0.0, 0.0, passed=all(np.diff(errs) <= 1e-12))
    # the residual is a period-1 ripple of relative size ~0.16 eps, eps = 2 pi^2/(c L^2)
    far = kr.sine_limit_error([18.0, 24.0], c)
    eps = [2.0 * math.pi**2 / (c * L * L) for L in (18.0, 24.0)]
    res.add("sup error / eps at L = 18, 24 (informational)", max(f / e for f, e in zip(far, eps)),
            math.inf, note=f"errors {far[0]:.4g}, {far[1]:.4g}")


@_timed(7, "Airy limit", 60.0)
def check_airy(res: CheckResult):
    eps = [4e-3, 2e-3, 1e-3, 5e-4]
    errs = [kr.airy_limit_error(e) for e in eps]
    res.add("sup error at eps = 1e-3", errs[2], 5e-3)
    rate = np.polyfit(np.log(eps), np.log(errs), 1)[0]
    res.add("error exponent in eps vs 1 (rel)", abs(rate - 1.0), 0.15, note=f"fitted exponent {rate:.3f}")


# ---------------------------------------------------------------------------
# q-special functions
# ---------------------------------------------------------------------------

AQ_CONSTANT = 10.0


@_timed(8, "A_q Airy asymptotics", 5.0)
def check_aq_asymptotics(res: CheckResult):
    for e in (1e-2, 1e-3):
        r = qc.aq_asymptotic_residual(e, form="refined")
        res.add(f"eps={e:g}: sup log residual / eps", r / e, AQ_CONSTANT)
    r1 = qc.aq_asymptotic_residual(1e-2, form="naive")
    r2 = qc.aq_asymptotic_residual(1e-3, form="naive")
    res.add("naive form residual at eps=1e-3 (informational)", r2, math.inf,
            note=f"eps=1e-2: {r1:.4f}; tends to log 2")


@_timed(0, "q-special function identities", 5.0)
def check_qcore(res: CheckResult):
    q = 0.5
    res.add("(q;q)_3 - 0.328125", abs(float(qc.qpochhammer(q, q, 3)) - 0.328125), 1e-14)
    res.add("[4,2]_q - (1+q^2)(1+q+q^2)",
            abs(float(qc.qbinomial(4, 2, q)) - (1 + q * q) * (1 + q + q * q)), 1e-13)
    # Jacobi triple product at z = 1: theta3(1, q) = (q^2;q^2)_inf (-q;q^2)_inf^2
    n = np.arange(200)
    tp = np.prod(1 - q ** (2 * n + 2)) * np.prod(1 + q ** (2 * n + 1)) ** 2
    res.add("theta3 triple product", abs(qc.theta3(1.0, q).real - tp), 1e-13)
    z = np.linspace(0.0, 5.0, 11)
    ser = np.array([sum(q ** (k * k) * (-x) ** k / float(qc.qpochhammer(q, q, k)) for k in range(60))
                    for x in z])
    res.add("A_q recurrence vs series", float(np.max(np.abs(qc.aq(z, q) - ser))), 1e-12)


# ---------------------------------------------------------------------------
# gap probabilities
# ---------------------------------------------------------------------------

@_timed(9, "edge gap probability", 120.0)
def check_gap(res: CheckResult):
    p = QParams.from_cL(1, 1.0, 2.0 * math.pi)
    cfg = gp.FredholmConfig()
    ss = np.arange(-4.0, 6.01, 0.5)
    worst = 0.0
    bracket_ok = True
    for s in ss:
        e1 = gp.gap_probability(s, p, cfg)
        e2 = math.exp(gp.log_gap_probability(s, p, cfg, n=2 * cfg.nodes))
        deep = gp.FredholmConfig(T=2.0 * cfg.depth(p.c))
        e3 = gp.gap_probability(s, p, deep)
        worst = max(worst, abs(e1 - e2), abs(e1 - e3))
        lo, hi = gp.gap_series_bracket(s, p, cfg)
        bracket_ok &= (lo - 1e-12 <= e1 <= hi + 1e-12)
    res.add("node doubling / depth doubling change", worst, 1e-8)
    res.add("two-term series bracket holds", 0.0, 0.0, passed=bracket_ok)
    s = np.linspace(-4.5, -3.0, 16)
    lp = np.log([gp.leftmost_pdf(v, p, cfg) for v in s])
    A = np.polyfit(s, lp, 2)[0]
    res.add("left-tail s^2 coefficient vs -c (rel)", abs(-A / p.c - 1.0), 0.05,
            note=f"fitted {A:.4f}")


@_timed(10, "two-dimensional gas right tail", 5.0)
def check_gap2d(res: CheckResult):
    f1 = gp.right_tail_exponent(2.0 * math.pi)
    res.add("L=2pi: fitted s^3 coefficient / (L/24pi) - 1", abs(f1.ratio - 1.0), 0.05)
    f2 = gp.right_tail_exponent(math.pi)
    res.add("L=pi: fitted s^3 coefficient / (L/24pi) - 1", abs(f2.ratio - 1.0), 0.05)
    res.add("coefficient ratio L=2pi : L=pi vs 2 (rel)",
            abs(f1.coefficient / f2.coefficient / 2.0 - 1.0), 0.05)
    res.add("fits conclusive", 0.0, 0.0, passed=not (f1.inconclusive or f2.inconclusive))


# ---------------------------------------------------------------------------
# sampler
# ---------------------------------------------------------------------------

@_timed(11, "Metropolis sampler", 300.0)
def check_sampler(res: CheckResult, n_chains: int = 100, sweeps: int = 10_000, seed: int = 2024):
    from . import sampler as sm

    p = QParams.from_cL(4, 1.0 / (2.0 * math.log(2.0)), 2.0 * math.pi)
    edges = sm.default_edges(p, 40)
    st = sm.run_chain(p, sweeps, seed=seed, n_chains=n_chains, edges=edges)
    exact = sm.bin_average_density(edges, p)
    ok = st.density_se > 0
    z = np.abs(st.density - exact)[ok] / st.density_se[ok]
    res.add("max histogram |z| vs exact one-point density", float(z.max()), 3.0,
            note=f"{int(ok.sum())} bins, {n_chains * sweeps} sweeps")
    for l, (m, se) in sorted(st.moments.items()):
        exact_m = float(mo.power_sum_moment(l, p).value)
        res.add(f"l={l} moment |z|", abs(m - exact_m) / se, 3.0, note=f"{m:.5g} +- {se:.2g} vs {exact_m:.5g}")
    res.add("acceptance rate in [0.3, 0.5]", 0.0, 0.0, passed=0.3 <= st.acceptance_rate <= 0.5,
            note=f"{st.acceptance_rate:.3f}")


SUITES = {
    "qcore": [check_qcore, check_aq_asymptotics],
    "moments": [check_moment_routes, check_schur_product, check_scaled_moments],
    "density": [check_density],
    "kernels": [check_kernels, check_sine, check_airy],
    "gap": [check_gap, check_gap2d],
    "sampler": [check_sampler],
}
SUITES["all"] = [check_moment_routes, check_schur_product, check_scaled_moments, check_density,
                 check_kernels, check_sine, check_airy, check_aq_asymptotics, check_gap,
                 check_gap2d]


def run_suite(name: str = "all", progress=None) -> list:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    out = []
    for fn in SUITES[name]:
        r = fn()
        if progress is not None:
            progress(r)
        out.append(r)
    return out
