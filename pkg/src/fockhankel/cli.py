"""``fhl``: experiment harness writing CSV or JSON reports.

Usage::

    fhl <experiment> [--symbol S] [--weight W] [--N int] [--M int] [--K int]
        [--p list] [--r real] [--q real] [--D int] [--delta real] [--Rmax real]
        [--radii list] [--lambdas list] [--out path] [--format csv|json]
        [--seed int] [--threads int] [--timing]
    fhl list

Each knob resolves as command-line flag, then ``FHL_<KNOB>`` from the
environment, then the experiment default.  The report path is the only
thing written to stdout; progress and verdicts go to stderr.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
3 numerical inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import FockHankelError, InvalidWeightError, NumericalInconsistencyError
from .fock import FockBasis, RadialWeight
from .hankel import HankelModel, dense_spectrum, normal_matrix, symbol_spectrum
from .oscillation import (
    OscillationParams,
    bmo_sup,
    compactness_probe,
    g_functional,
    ida_norm,
    imo_norm,
    mo,
    reaggregate,
)
from .quadrature import PolarGrid, disk, exactness_report
from .spectra import HermitianMatrix, divergence_flag, jacobi_eigen
from .symbols import Polynomial, parse_symbol

log = logging.getLogger("fhl")

SQRT1_2 = math.sqrt(0.5)
IMO_RING = math.sqrt(2) * math.pi * math.log(2)


# -- configuration -----------------------------------------------------------

@dataclass
class ExperimentConfig:
    experiment: str
    symbol: str | None = None
    weight: str = "classical"
    N: int | None = None
    M: int | None = None
    K: int | None = None
    p: tuple | None = None
    r: float = 1.0
    q: float = 2.0
    D: int = 25
    delta: float = 0.5
    R_max: float | None = None
    radii: tuple | None = None
    lambdas: tuple | None = None
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    threads: int = 1
    timing: bool = False

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        for name in ("N", "M", "K"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.p is not None and not all(x > 0 for x in self.p):
            raise ValueError("every p must be positive")
        if not (self.r > 0 and self.delta > 0 and self.q >= 1 and self.D >= 0):
            raise ValueError("need r > 0, delta > 0, q >= 1, D >= 0")
        if self.R_max is not None and not self.R_max > 0:
            raise ValueError("Rmax must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class RunReport:
    config: dict
    tables: dict
    checks: list
    version: str = __version__
    wall_time: float | None = None

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def to_json(self):
        doc = {
            "tool": "fhl",
            "version": self.version,
            "config": self.config,
            "tables": self.tables,
            "checks": self.checks,
            "passed": self.passed,
        }
        if self.wall_time is not None:
            doc["wall_time"] = self.wall_time
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def to_csv(self):
        (table,) = self.tables.values()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table["columns"])
        for row in table["rows"]:
            w.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return v


def _table(columns, rows):
    clean = []
    for row in rows:
        clean.append([v if isinstance(v, (bool, int, str)) else float(v) for v in row])
    return {"columns": list(columns), "rows": clean}


class _Checks(list):
    def add(self, name, passed, detail=""):
        self.append({"name": name, "passed": bool(passed), "detail": detail})


# -- weights -----------------------------------------------------------------

_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sqrt", "exp", "log", "log1p", "expm1", "sin", "cos", "tanh", "cosh",
                 "sinh", "arctan", "abs", "square", "pi", "where", "minimum", "maximum")
}


def _compile_expr(text):
    code = compile(text, "<weight>", "eval")
    for name in code.co_names:
        if name not in _EXPR_NAMESPACE and name != "rho":
            raise InvalidWeightError(f"name {name!r} not allowed in weight expression")
    scope = {"__builtins__": {}, **_EXPR_NAMESPACE}
    return lambda rho: eval(code, scope, {"rho": np.asarray(rho, dtype=float)})


def load_weight(spec):
    """``classical``, ``gaussian:<alpha>`` or a JSON file path.

    The JSON file holds ``phi`` and ``laplacian`` as numpy expressions in the
    variable ``rho`` together with the bounds ``m`` and ``M``.
    """
    if spec == "classical":
        return RadialWeight.classical()
    if spec.startswith("gaussian:"):
        try:
            alpha = float(spec.split(":", 1)[1])
        except ValueError:
            raise InvalidWeightError(f"bad gaussian parameter in {spec!r}") from None
        return RadialWeight.gaussian(alpha)
    try:
        with open(spec, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidWeightError(f"cannot read weight spec {spec!r}: {exc}") from None
    try:
        return RadialWeight.custom(
            _compile_expr(doc["phi"]), _compile_expr(doc["laplacian"]),
            doc["m"], doc["M"], label=os.path.basename(spec),
        )
    except (KeyError, SyntaxError, TypeError) as exc:
        raise InvalidWeightError(f"malformed weight spec {spec!r}: {exc}") from None


# -- experiments -------------------------------------------------------------

def _params(cfg, **kw):
    base = dict(r=cfg.r, q=cfg.q, D=cfg.D, delta=cfg.delta, threads=cfg.threads,
                R_max=cfg.R_max or 8.0)
    base.update(kw)
    return OscillationParams(**base)


def _doubling_cutoffs(K, floor=16):
    cuts = []
    while K >= floor:
        cuts.append(K)
        K //= 2
    return cuts[::-1]


def run_bcp_sweep(cfg, checks):
    f = parse_symbol(cfg.symbol or "xia")
    if f.single_frequency() is None:
        raise ValueError("bcp-sweep needs a single-frequency symbol")
    K = 2000 if cfg.K is None else cfg.K
    ps = cfg.p or (0.5, 1.0, 1.5, 2.0)
    nu = abs(f.single_frequency()[0])
    basis = FockBasis(load_weight(cfg.weight), K + nu + 1)
    s_f = symbol_spectrum(f, basis, K).mode_indexed
    s_c = symbol_spectrum(f.conj(), basis, K).mode_indexed
    cuts = _doubling_cutoffs(K)
    rows, flags = [], {}
    for p in ps:
        pf = [math.fsum((s_f[: k + 1] ** p).tolist()) for k in cuts]
        pc = [math.fsum((s_c[: k + 1] ** p).tolist()) for k in cuts]
        for i, k in enumerate(cuts):
            df = divergence_flag(pf[: i + 1])
            dc = divergence_flag(pc[: i + 1])
            rows.append([p, k, pf[i], pc[i], df, dc])
        flags[p] = (divergence_flag(pf), divergence_flag(pc))
    checks.add("bcp.finite", all(math.isfinite(v) for r in rows for v in r[2:4]))
    if str(f) == "xia" and len(cuts) >= 3:
        checks.add("bcp.f_converges", not any(a for a, _ in flags.values()),
                   "xia: no divergence flag for any p")
        checks.add("bcp.conj_dichotomy",
                   all(b == (p <= 1) for p, (_, b) in flags.items()),
                   "conj(xia): divergent exactly for p <= 1")
    cols = ("p", "K", "partial_sum_f", "partial_sum_conj_f",
            "divergence_flag_f", "divergence_flag_conj_f")
    return _table(cols, rows)


def run_mo_decay(cfg, checks):
    f = parse_symbol(cfg.symbol or "conj(xia)")
    radii = cfg.radii or (8.0, 16.0, 32.0)
    rows = []
    for rad in radii:
        v = mo(f, complex(rad), cfg.r, 2.0)
        rows.append([rad, v, v * rad * rad])
    if str(f) in ("conj(xia)", "xia") and cfg.r == 1.0:
        checks.add("mo.decay_rate", all(0.65 <= r[2] <= 0.75 for r in rows if r[0] >= 8),
                   f"MO*|z|^2 in [0.65, 0.75] for |z| >= 8 (limit {SQRT1_2:.6f})")
    return _table(("radius", "MO", "MO_times_radius_sq"), rows)


def run_imo_integral(cfg, checks):
    f = parse_symbol(cfg.symbol or "conj(xia)")
    R_max = cfg.R_max or 32.0
    radii = cfg.radii or (R_max / 4, R_max / 2, R_max)
    ps = cfg.p or (1.0, 2.0)
    base = imo_norm(f, _params(cfg, R_max=R_max, radii=radii, s=ps[0]))
    rows, reports = [], {}
    for p in ps:
        rep = reaggregate(base, _params(cfg, R_max=R_max, radii=radii, s=p))
        reports[p] = rep
        prev = None
        for R, agg in rep.partial_aggregates:
            rows.append([p, R, agg, 0.0 if prev is None else agg - prev, rep.diverging])
            prev = agg
    if str(f) == "conj(xia)" and cfg.r == 1.0 and radii == (8.0, 16.0, 32.0):
        if 1.0 in reports:
            inc = reports[1.0].increments
            checks.add("imo.p1_ring_increments",
                       all(abs(d - IMO_RING) <= 0.15 * IMO_RING for d in inc),
                       f"increments {[round(d, 4) for d in inc]} vs {IMO_RING:.4f}")
            checks.add("imo.p1_diverges", reports[1.0].diverging)
        if 2.0 in reports:
            checks.add("imo.p2_converges", reports[2.0].increments[-1] < 0.01
                       and not reports[2.0].diverging)
    return _table(("p", "R", "aggregate", "increment", "diverging"), rows)


def run_ida_check(cfg, checks):
    f = parse_symbol(cfg.symbol or "xia")
    s = (cfg.p or (1.0,))[0]
    params = _params(cfg, s=s)
    rep = ida_norm(f, params)
    rows = []
    probe_radii = [x for x in (2.0, 3.0, 4.0, 8.0) if x <= params.R_max]
    point = {x: g_functional(f, complex(x), cfg.r, cfg.q, cfg.D) for x in probe_radii}
    rows += [["G", x, v] for x, v in point.items()]
    rows.append(["max_inner", 2 * cfg.r, rep.meta["max_inner"]])
    rows += [["aggregate", R, a] for R, a in rep.partial_aggregates]
    rows.append(["diverging", params.R_max, float(rep.diverging)])
    if str(f) == "xia" and cfg.r == 1.0 and cfg.q == 2.0:
        checks.add("ida.g_vanishes", all(v <= 1e-6 for v in point.values()),
                   "G <= 1e-6 at |z| in {2, 3, 4, 8}")
        tail = [a for R, a in rep.partial_aggregates if R >= 4]
        checks.add("ida.stabilizes", len(tail) >= 2 and max(tail) - min(tail) <= 1e-6)
    checks.add("ida.max_inner_finite", math.isfinite(rep.meta["max_inner"]))
    return _table(("quantity", "radius", "value"), rows)


def _poly_mo_sq(f, z, r):
    """Closed form sum_{j>=1} |a_j(z)|^2 r^{2j} / (j+1) for a polynomial."""
    coeffs = np.array(f.coeffs)
    total, fact = 0.0, 1.0
    c = coeffs
    for j in range(1, len(coeffs)):
        c = np.polynomial.polynomial.polyder(c)
        fact *= j
        a = np.polynomial.polynomial.polyval(z, c) / fact
        total += abs(a) ** 2 * r ** (2 * j) / (j + 1)
    return total


def run_entire_symbol(cfg, checks):
    f = parse_symbol(cfg.symbol or "poly(0,0,1)")
    if not isinstance(f, Polynomial):
        raise ValueError("entire-symbol needs a poly(...) symbol")
    deg = f.degree
    params = _params(cfg, D=max(cfg.D, deg))
    rows = []
    for x in (0.0, 1.0, 5.0):
        got = mo(f, complex(x), cfg.r) ** 2
        rows.append(["MO_sq", x, got, _poly_mo_sq(f, complex(x), cfg.r)])
    checks.add("entire.mo_closed_form", all(abs(a - b) <= 1e-6 for _, _, a, b in rows))
    g_rep = ida_norm(f, params)
    g_max = float(g_rep.values.max())
    rows.append(["G_max", params.R_max, g_max, 0.0])
    checks.add("entire.g_vanishes", g_max <= 1e-8, f"max lattice G = {g_max:.3e}")
    N = cfg.N if cfg.N is not None else 12
    model = HankelModel(FockBasis(load_weight(cfg.weight), (cfg.M or N + 16 + deg) + deg + 8),
                        f, N, cfg.M)
    h_max = float(np.abs(normal_matrix(model)).max())
    rows.append(["normal_matrix_max", float(N), h_max, 0.0])
    checks.add("entire.hankel_zero", h_max <= 1e-9, f"max |entry| = {h_max:.3e}")
    sup, growth = bmo_sup(f, params)
    rows.append(["bmo_sup", params.R_max, sup, float(growth)])
    imo = imo_norm(f, params)
    for R, a in imo.partial_aggregates:
        rows.append(["imo_aggregate", R, a, float(imo.diverging)])
    if deg >= 2:
        checks.add("entire.bmo_growth", growth, "f' not constant, MO unbounded")
    elif deg == 1:
        checks.add("entire.imo_diverges", imo.diverging, "MO constant and nonzero")
    return _table(("quantity", "radius", "value", "reference"), rows)


def run_compactness_probe(cfg, checks):
    f = parse_symbol(cfg.symbol or "xia")
    lambdas = cfg.lambdas or (0.0, 2.0, 4.0, 8.0)
    M = 40 if cfg.M is None else cfg.M
    basis = FockBasis(load_weight(cfg.weight), M)
    rows = [[complex(lam).real, complex(lam).imag, compactness_probe(f, lam, M, basis)]
            for lam in lambdas]
    vals = [r[2] for r in rows]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    name = str(f)
    if name in ("xia", "conj(xia)"):
        checks.add("probe.decreasing", decreasing, f"{name}: probe strictly decreasing")
    if name == "xia" and rows[0][:2] == [0.0, 0.0] and cfg.weight == "classical":
        checks.add("probe.origin_value", abs(vals[0] - 0.83017) <= 1e-4, f"probe(0) = {vals[0]:.6f}")
    if name == "conj(poly(0,1))":
        checks.add("probe.noncompact", vals[-1] >= 0.5 * vals[0], "probe does not decay")
    return _table(("lambda_re", "lambda_im", "probe"), rows)


def run_validate(cfg, checks):
    rows = []

    def record(name, value, tol, ok=None):
        ok = value <= tol if ok is None else ok
        rows.append([name, value, tol, bool(ok)])
        checks.add(f"validate.{name}", ok, f"{value:.3e} (tol {tol:g})")

    N = 24 if cfg.N is None else cfg.N
    M = 40 if cfg.M is None else cfg.M
    basis = FockBasis(RadialWeight.classical(), M + 8)
    for text in ("xia", "conj(xia)"):
        f = parse_symbol(text)
        dense = dense_spectrum(HankelModel(basis, f, N, M)).values
        closed = symbol_spectrum(f, basis, N).values
        record(f"dense_vs_closed[{text}]", float(np.abs(dense - closed).max()), 1e-6)

    rng = np.random.default_rng(cfg.seed)
    for n in (2, 3):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = HermitianMatrix(a)
        lam = jacobi_eigen(H)
        coeffs = np.poly(np.asarray(H))
        err = max(abs(np.polyval(coeffs, x)) for x in lam) / max(1.0, np.abs(coeffs).max())
        record(f"charpoly_{n}x{n}", float(err), 1e-10)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    H = HermitianMatrix(a)
    lam = jacobi_eigen(H)
    A = np.asarray(H)
    record("jacobi_trace", abs(lam.sum() - np.trace(A).real) / np.linalg.norm(A), 1e-10)
    record("jacobi_frobenius", abs(math.sqrt((lam**2).sum()) - np.linalg.norm(A)) / np.linalg.norm(A), 1e-10)

    grid = PolarGrid(disk(0.3 - 0.2j, 1.5))
    record("quadrature_exactness", exactness_report(grid).max_error, 1e-10)
    G = FockBasis.classical(30).gram(30)
    record("basis_gram", float(np.abs(G - np.eye(31)).max()), 1e-9)
    return _table(("check", "value", "tolerance", "passed"), rows)


EXPERIMENTS = {
    "bcp-sweep": (run_bcp_sweep, "Schatten partial sums of H_f and H_conj(f) with divergence flags"),
    "mo-decay": (run_mo_decay, "mean oscillation MO_{2,r} far from the origin and its |z|^2 scaling"),
    "imo-integral": (run_imo_integral, "ring increments of the integrated mean oscillation"),
    "ida-check": (run_ida_check, "holomorphic distance G on a lattice and its L^s aggregates"),
    "entire-symbol": (run_entire_symbol, "polynomial symbols: G = 0, H_f = 0, MO closed form and growth"),
    "compactness-probe": (run_compactness_probe, "translated projection residual ||(I-P)(f o tau_lam)||"),
    "validate": (run_validate, "dense vs closed-form spectra, eigensolver and quadrature fixtures"),
}


def list_experiments():
    return [(name, desc) for name, (_, desc) in EXPERIMENTS.items()]


def run(cfg):
    """Run one experiment and return its :class:`RunReport` (nothing is written)."""
    cfg.validate()
    fn = EXPERIMENTS[cfg.experiment][0]
    checks = _Checks()
    t0 = time.perf_counter()
    table = fn(cfg, checks)
    wall = time.perf_counter() - t0
    echo = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()
            if k not in ("out", "timing", "threads")}
    return RunReport(echo, {cfg.experiment: table}, list(checks),
                     wall_time=wall if cfg.timing else None)


# -- command line ------------------------------------------------------------

def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _complex_list(text):
    try:
        return tuple(complex(x.strip().replace("i", "j")) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None


_KNOBS = {
    # dest: (flag, type, env name)
    "symbol": ("--symbol", str, "FHL_SYMBOL"),
    "weight": ("--weight", str, "FHL_WEIGHT"),
    "N": ("--N", int, "FHL_N"),
    "M": ("--M", int, "FHL_M"),
    "K": ("--K", int, "FHL_K"),
    "p": ("--p", _float_list, "FHL_P"),
    "r": ("--r", float, "FHL_R"),
    "q": ("--q", float, "FHL_Q"),
    "D": ("--D", int, "FHL_D"),
    "delta": ("--delta", float, "FHL_DELTA"),
    "R_max": ("--Rmax", float, "FHL_RMAX"),
    "radii": ("--radii", _float_list, "FHL_RADII"),
    "lambdas": ("--lambdas", _complex_list, "FHL_LAMBDAS"),
    "out": ("--out", str, "FHL_OUT"),
    "format": ("--format", str, "FHL_FORMAT"),
    "seed": ("--seed", int, "FHL_SEED"),
    "threads": ("--threads", int, "FHL_THREADS"),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="fhl", description="Hankel operators on Fock spaces: experiments.")
    ap.add_argument("experiment", choices=[*EXPERIMENTS, "list"])
    for dest, (flag, typ, env) in _KNOBS.items():
        kw = {"choices": ("csv", "json")} if dest == "format" else {}
        ap.add_argument(flag, dest=dest, type=typ, default=None, help=f"(env {env})", **kw)
    ap.add_argument("--timing", action="store_true", help="include wall time in JSON reports")
    ap.add_argument("--version", action="version", version=f"fhl {__version__}")
    return ap


def resolve_config(args, parser, environ=None):
    environ = os.environ if environ is None else environ
    values = {}
    for dest, (flag, typ, env) in _KNOBS.items():
        v = getattr(args, dest)
        if v is None and environ.get(env):
            try:
                v = typ(environ[env])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                parser.error(f"bad value in {env}: {exc}")
        if v is not None:
            values[dest] = v
    cfg = ExperimentConfig(args.experiment, timing=args.timing, **values)
    try:
        cfg.validate()
        load_weight(cfg.weight)
    except ValueError as exc:
        parser.error(str(exc))
    if cfg.out is None:
        cfg.out = f"fhl-{cfg.experiment}.{cfg.format}"
    return cfg


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="fhl: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.experiment == "list":
        for name, desc in list_experiments():
            print(f"{name:<18} {desc}")
        return 0
    cfg = resolve_config(args, parser)
    try:
        report = run(cfg)
    except NumericalInconsistencyError as exc:
        print(f"fhl: numerical inconsistency: {exc}", file=sys.stderr)
        return 3
    except (FockHankelError, ValueError) as exc:
        parser.error(str(exc))
    text = report.to_json() if cfg.format == "json" else report.to_csv()
    with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    for c in report.checks:
        print(f"fhl: {'ok  ' if c['passed'] else 'FAIL'} {c['name']} {c['detail']}", file=sys.stderr)
    n_ok = sum(c["passed"] for c in report.checks)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict} ({n_ok}/{len(report.checks)} checks)", file=sys.stderr)
    print(cfg.out)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
