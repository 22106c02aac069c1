"""Command-line interface: ``qrmt <command> ...`` (or ``python3 -m qrmt``).

Tables are written as CSV with a header row, '.' decimals, LF line endings
and 17 significant digits.  When ``--out`` names a file, a JSON manifest
``<out>.manifest.json`` records the command line, resolved parameters,
version, timestamp and SHA-256 of every file written.  ``qrmt rerun``
replays a manifest and confirms the bytes match.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import NumericalPrecisionError, SamplerDiagnosticsError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class Output:
    """Collects written files and writes the manifest at the end."""

    def __init__(self, args, argv):
        self.path = args.out
        self.argv = list(argv)
        self.command = args.command
        self.files: list[str] = []
        self.params: dict = {}
        self.extra: dict = {}
        self.seed = getattr(args, "seed", None)

    def write(self, text: str, suffix: str = ""):
        if self.path is None:
            sys.stdout.write(text)
            return
        path = self.path + suffix
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.files.append(path)

    def finish(self):
        if self.path is None:
            return
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "params": self.params,
            "seed": self.seed,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": {os.path.basename(f): _sha256(f) for f in self.files},
            "extra": self.extra,
        }
        with open(self.path + ".manifest.json", "w", encoding="utf-8", newline="") as fh:
            fh.write(json.dumps(manifest, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _params(args, need_N=True):
    """Resolve QParams from --N and one of (--c, --L), --q or --lambda."""
    from .ensemble import QParams

    N = getattr(args, "N", None)
    if need_N and (N is None or N < 1):
        raise UsageError("--N must be a positive integer")
    N = N or 1
    q = getattr(args, "q", None)
    lam = getattr(args, "lam", None)
    c = getattr(args, "c", None)
    L = getattr(args, "L", None)
    given = [q is not None, lam is not None, L is not None]
    if sum(given) > 1:
        raise UsageError("give only one of --q, --lambda, --L")
    try:
        if q is not None:
            return QParams.from_q(N, q, c if c is not None else 1.0)
        if lam is not None:
            return QParams.scaled(N, lam, c if c is not None else 1.0)
        if L is not None:
            return QParams.from_cL(N, c if c is not None else 1.0, L)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("one of --q, --lambda or --L is required")


def _grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError
        return np.linspace(float(lo), float(hi), n)
    except ValueError:
        raise UsageError(f"--grid expects lo:hi:n, got {text!r}") from None


def _srange(a, b, step):
    if step <= 0 or b < a:
        raise UsageError("need --s-from <= --s-to and --step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(n)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_moments(args, out: Output):
    from .moments import power_sum_moment

    p = _params(args)
    if args.lmax < 1:
        raise UsageError("--lmax must be >= 1")
    if args.route == "all":
        routes = ("phi21", "hook") + (("det",) if p.N <= 12 else ())
    else:
        routes = (args.route,)
    if "det" in routes and p.N > 12:
        raise UsageError("the determinant route is limited to N <= 12")
    rows = []
    for l in range(1, args.lmax + 1):
        r = power_sum_moment(l, p, routes=routes)
        vals = [float(r.value)] + [float(v) for v in r.alternatives.values()]
        spread = max((abs(v / vals[0] - 1.0) for v in vals[1:]), default=0.0)
        plain = float(r.value) if r.value.is_representable() else float("nan")
        rows.append((l, r.value.logmag, r.value.sign, r.route, spread, plain))
    out.params = p.as_dict()
    out.extra = {"routes": list(routes), "scaling": "values are q^(N l) m_l"}
    out.write(_csv_text(["l", "value_log", "value_sign", "route", "cross_route_max_reldiff", "value"], rows))


def cmd_density(args, out: Output):
    from .density import density_curve

    if args.points < 1:
        raise UsageError("--points must be >= 1")
    try:
        cur = density_curve(args.lam, args.points)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out.params = {"lambda": args.lam, "points": args.points}
    out.extra = {"z_minus": cur.support.z_minus, "z_plus": cur.support.z_plus, "mass": cur.mass,
                 "mass_error": abs(cur.mass - 1.0)}
    out.write(_csv_text(["x", "rho"], zip(cur.grid, cur.values)))


def cmd_kernel(args, out: Output):
    from . import kernels as kr
    from .ensemble import QParams

    g = _grid(args.grid)
    X, Y = np.meshgrid(g, g, indexing="ij")
    kind = args.kind
    if kind == "airy-rescaled":
        if args.eps is None or not 0 < args.eps <= 0.05:
            raise UsageError("--kind airy-rescaled needs 0 < --eps <= 0.05")
        c = args.c if args.c is not None else 1.0
        p = QParams.from_cL(1, c, math.pi * math.sqrt(2.0 / (c * args.eps)))
        K = kr.airy_rescaled_edge(X, Y, p)
    else:
        p = _params(args, need_N=kind in ("sw", "swe", "bulk"))
        if kind == "sw":
            if np.any(g <= 0):
                raise UsageError("the sw kernel lives on u > 0")
            K = kr.kernel_sw(X, Y, p)
        elif kind == "swe":
            K = kr.kernel_swe(X, Y, p)
        elif kind == "bulk":
            K = kr.kernel_bulk(X, Y, p, form=args.form)
        else:
            K = kr.kernel_edge(X, Y, p)
    K = np.asarray(K).reshape(X.shape)
    out.params = p.as_dict()
    out.extra = {"kind": kind, "grid": args.grid}
    rows = [[g[i]] + list(K[i]) for i in range(len(g))]
    out.write(_csv_text(["x\\y"] + [_fmt(v) for v in g], rows))


def cmd_gap(args, out: Output):
    from .ensemble import QParams
    from .gap import FredholmConfig, gap_probability, leftmost_pdf

    c = args.c if args.c is not None else 1.0
    p = QParams.from_cL(1, c, args.L)
    cfg = FredholmConfig(nodes=args.nodes)
    rows = []
    for s in _srange(args.s_from, args.s_to, args.step):
        rows.append((s, gap_probability(s, p, cfg), leftmost_pdf(s, p, cfg)))
    out.params = {"c": c, "L": args.L, "nodes": args.nodes, "T": cfg.depth(c)}
    out.write(_csv_text(["s", "gap", "leftmost_pdf"], rows))


def cmd_gap2d(args, out: Output):
    from .gap import gap2d_product, right_tail_exponent

    rows = [(s, gap2d_product(s, args.L)) for s in _srange(args.s_from, args.s_to, args.step)]
    fit = right_tail_exponent(args.L)
    out.params = {"L": args.L}
    out.extra = {"fitted_tail_coeff": fit.coefficient, "target_coeff": fit.target,
                 "ratio": fit.ratio, "fit_rel_residual": fit.rel_residual,
                 "inconclusive": fit.inconclusive}
    out.write(_csv_text(["s", "gap2d"], rows))


def cmd_sample(args, out: Output):
    from .moments import power_sum_moment
    from .sampler import bin_average_density, default_edges, run_chain

    p = _params(args)
    edges = default_edges(p, args.bins)
    st = run_chain(p, args.steps, args.burn_in, args.seed, args.chains, edges=edges)
    exact = bin_average_density(edges, p)
    rows = zip(edges[:-1], edges[1:], st.density, st.density_se, exact)
    out.params = p.as_dict()
    stats = {
        "acceptance_rate": st.acceptance_rate,
        "batches": st.n_batches,
        "sweeps_per_chain": st.sweeps,
        "burn_in": st.burn_in,
        "chains": args.chains,
        "audits": st.audits,
        "max_audit_error": st.max_audit_error,
        "moments": {str(l): {"estimate": m, "se": se, "exact": float(power_sum_moment(l, p).value)}
                    for l, (m, se) in st.moments.items()},
    }
    out.extra = {"stats": stats}
    out.write(_csv_text(["x_lo", "x_hi", "density", "se", "exact"], rows))
    text = json.dumps(stats, sort_keys=True, indent=2) + "\n"
    if out.path is None:
        sys.stderr.write(text)
    else:
        out.write(text, suffix=".stats.json")


def cmd_verify(args, out: Output):
    from .verify import run_suite

    prog = (lambda r: print(r.summary(), file=sys.stderr, flush=True)) if not args.quiet else None
    results = run_suite(args.suite, progress=prog)
    report = {"suite": args.suite, "version": __version__,
              "passed": all(r.passed for r in results),
              "checks": [r.as_dict() for r in results]}
    out.params = {"suite": args.suite}
    out.write(json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_rerun(args, out: Output):
    with open(args.manifest, encoding="utf-8") as fh:
        man = json.load(fh)
    argv = list(man["argv"])
    if "--out" not in argv:
        raise UsageError("manifest has no --out file to compare")
    i = argv.index("--out")
    old_base = os.path.basename(argv[i + 1])
    with tempfile.TemporaryDirectory() as tmp:
        argv[i + 1] = os.path.join(tmp, old_base)
        code = main(argv)
        if code != EXIT_OK:
            return code
        mismatched = []
        for name, digest in man["outputs"].items():
            path = os.path.join(tmp, name)
            if not os.path.exists(path) or _sha256(path) != digest:
                mismatched.append(name)
    if mismatched:
        print("rerun mismatch: " + ", ".join(mismatched), file=sys.stderr)
        return EXIT_VERIFY
    print("rerun reproduced " + ", ".join(sorted(man["outputs"])), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_ensemble(sp, with_N=True):
    if with_N:
        sp.add_argument("--N", type=int, help="number of particles")
    sp.add_argument("--c", type=float, help="Gaussian strength (default 1)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--L", type=float, help="cylinder circumference")
    g.add_argument("--q", type=float, help="base q in (0, 1)")
    g.add_argument("--lambda", dest="lam", type=float, help="scaled regime q = exp(-lambda/N)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qrmt", description="Stieltjes-Wigert ensemble numerics")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="output file (default: stdout, no manifest)")
        return sp

    sp = add("moments", cmd_moments, "exact power-sum moments q^(N l) m_l")
    _add_ensemble(sp)
    sp.add_argument("--lmax", type=int, required=True)
    sp.add_argument("--route", choices=["all", "phi21", "hook", "det"], default="all")

    sp = add("density", cmd_density, "limiting global density")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--points", type=int, required=True)

    sp = add("kernel", cmd_kernel, "correlation kernel on a square grid")
    sp.add_argument("--kind", choices=["sw", "swe", "bulk", "edge", "airy-rescaled"], required=True)
    sp.add_argument("--grid", required=True, help="lo:hi:n (write --grid=-1:1:5 for a negative lo)")
    _add_ensemble(sp)
    sp.add_argument("--eps", type=float, help="eps = 2 pi^2/(c L^2) for airy-rescaled")
    sp.add_argument("--form", choices=["auto", "theta3", "theta1"], default="auto")

    sp = add("gap", cmd_gap, "edge gap probability and leftmost-particle density")
    sp.add_argument("--s-from", dest="s_from", type=float, required=True)
    sp.add_argument("--s-to", dest="s_to", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)
    sp.add_argument("--nodes", type=int, default=80)
    sp.add_argument("--c", type=float)
    sp.add_argument("--L", type=float, default=2.0 * math.pi)

    sp = add("gap2d", cmd_gap2d, "two-dimensional cylinder-gas gap product")
    sp.add_argument("--L", type=float, required=True)
    sp.add_argument("--s-from", dest="s_from", type=float, required=True)
    sp.add_argument("--s-to", dest="s_to", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)

    sp = add("sample", cmd_sample, "Metropolis sampling of the log-gas")
    _add_ensemble(sp)
    sp.add_argument("--steps", type=int, required=True, help="sweeps per chain after burn-in")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--chains", type=int, default=20)
    sp.add_argument("--burn-in", dest="burn_in", type=int)
    sp.add_argument("--bins", type=int, default=40)

    sp = add("verify", cmd_verify, "run the self-verification suite")
    sp.add_argument("--suite", default="all",
                    choices=["qcore", "moments", "density", "kernels", "gap", "sampler", "all"])
    sp.add_argument("--quiet", action="store_true")

    sp = add("rerun", cmd_rerun, "replay a manifest and compare output checksums")
    sp.add_argument("manifest")
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    out = Output(args, argv)
    try:
        code = args.func(args, out)
    except UsageError as exc:
        print(f"qrmt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalPrecisionError, SamplerDiagnosticsError) as exc:
        print(f"qrmt {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.finish()
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
